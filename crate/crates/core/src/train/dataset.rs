use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Affine map of a fitted [min, max] range onto [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: f64,
    pub max: f64,
    pub lo: f64,
    pub hi: f64,
}

impl MinMaxScaler {
    pub fn fit(values: impl IntoIterator<Item = f64>, lo: f64, hi: f64) -> Result<Self> {
        let (min, max) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Dataset(format!(
                "cannot fit scaler on range [{min}, {max}]"
            )));
        }
        Ok(Self { min, max, lo, hi })
    }

    pub fn transform(&self, v: f64) -> f64 {
        self.lo + (v - self.min) * (self.hi - self.lo) / (self.max - self.min)
    }

    pub fn inverse(&self, v: f64) -> f64 {
        self.min + (v - self.lo) * (self.max - self.min) / (self.hi - self.lo)
    }
}

/// Samples with a train/test split and train-fitted scalers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    /// Raw feature rows.
    pub features: Vec<Vec<f64>>,
    /// Raw labels.
    pub labels: Vec<f64>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    /// One per feature column; `None` when features enter the circuit unscaled.
    pub feature_scalers: Option<Vec<MinMaxScaler>>,
    pub label_scaler: MinMaxScaler,
}

impl Dataset {
    /// Builds a dataset and fits scalers on the train rows only.
    pub fn new(
        name: impl Into<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<f64>,
        train_idx: Vec<usize>,
        test_idx: Vec<usize>,
        scale_features: Option<(f64, f64)>,
    ) -> Result<Self> {
        let m = labels.len();
        if features.len() != m {
            return Err(Error::Dataset(format!(
                "{} feature rows for {m} labels",
                features.len()
            )));
        }
        if train_idx.is_empty() || test_idx.is_empty() {
            return Err(Error::Dataset("train and test splits must be nonempty".into()));
        }
        let mut seen = vec![false; m];
        for &i in train_idx.iter().chain(&test_idx) {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Dataset(format!("index {i} duplicated or out of range")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Dataset("split does not cover every sample".into()));
        }
        let width = features.first().map_or(0, Vec::len);
        if features.iter().any(|r| r.len() != width) {
            return Err(Error::Dataset("ragged feature rows".into()));
        }
        let label_scaler = MinMaxScaler::fit(train_idx.iter().map(|&i| labels[i]), -1.0, 1.0)?;
        let feature_scalers = scale_features
            .map(|(lo, hi)| {
                (0..width)
                    .map(|c| MinMaxScaler::fit(train_idx.iter().map(|&i| features[i][c]), lo, hi))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(Self {
            name: name.into(),
            features,
            labels,
            train_idx,
            test_idx,
            feature_scalers,
            label_scaler,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Circuit input for sample `i`.
    pub fn input(&self, i: usize) -> Vec<f64> {
        match &self.feature_scalers {
            Some(s) => self.features[i].iter().zip(s).map(|(v, sc)| sc.transform(*v)).collect(),
            None => self.features[i].clone(),
        }
    }

    /// Scaled label for sample `i`.
    pub fn target(&self, i: usize) -> f64 {
        self.label_scaler.transform(self.labels[i])
    }

    fn gather(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            idx.iter().map(|&i| self.input(i)).collect(),
            idx.iter().map(|&i| self.target(i)).collect(),
        )
    }

    pub fn train_set(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.gather(&self.train_idx)
    }

    pub fn test_set(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.gather(&self.test_idx)
    }

    pub fn is_train(&self, i: usize) -> bool {
        self.train_idx.contains(&i)
    }
}

/// Settings of the noisy sine regression task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidalParams {
    pub m_total: usize,
    pub train_fraction: f64,
    pub noise_amp: f64,
    pub noise_std: f64,
}

impl SinusoidalParams {
    pub const STANDARD: Self = Self {
        m_total: 50,
        train_fraction: 0.30,
        noise_amp: 0.4,
        noise_std: 0.5,
    };

    /// Smaller variant: 20 samples, 75% train.
    pub const SMALL: Self = Self {
        m_total: 20,
        train_fraction: 0.75,
        noise_amp: 0.4,
        noise_std: 0.5,
    };
}

impl Default for SinusoidalParams {
    fn default() -> Self {
        Self::STANDARD
    }
}

fn split(m: usize, n_train: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(rng);
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// y = sin(pi x) + noise_amp * N(0, noise_std) with x ~ U[-1, 1].
pub fn gen_sinusoidal(seed: u64, params: &SinusoidalParams) -> Result<Dataset> {
    let m = params.m_total;
    if m < 2 {
        return Err(Error::Dataset("need at least 2 samples".into()));
    }
    if !(0.0..=1.0).contains(&params.train_fraction) {
        return Err(Error::Dataset("train fraction must lie in [0, 1]".into()));
    }
    let n_train = (m as f64 * params.train_fraction).round() as usize;
    if n_train == 0 || n_train == m {
        return Err(Error::Dataset(format!("degenerate split: {n_train} of {m} train")));
    }
    if !(params.noise_std >= 0.0) {
        return Err(Error::Dataset("noise std must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, params.noise_std).map_err(|e| Error::Dataset(e.to_string()))?;
    let xs: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let labels: Vec<f64> = xs
        .iter()
        .map(|&x| (PI * x).sin() + params.noise_amp * normal.sample(&mut rng))
        .collect();
    let (train, test) = split(m, n_train, &mut rng);
    Dataset::new(
        "sinusoidal",
        xs.into_iter().map(|x| vec![x]).collect(),
        labels,
        train,
        test,
        None,
    )
}

/// Reads a headed numeric CSV. Features are scaled to [-pi, pi] and labels to
/// [-1, 1], both fitted on `train_count` randomly chosen rows.
pub fn load_csv_dataset(
    path: &Path,
    feature_cols: &[&str],
    label_col: &str,
    train_count: usize,
    seed: u64,
) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Dataset(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Dataset(e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Dataset(format!("column '{name}' not found")))
    };
    let fcols = feature_cols.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?;
    let lcol = find(label_col)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        // row 1 is the header
        let line = row + 2;
        let rec = rec.map_err(|e| Error::Csv {
            row: line,
            column: String::new(),
            message: e.to_string(),
        })?;
        let cell = |c: usize| -> Result<f64> {
            let raw = rec.get(c).ok_or_else(|| Error::Csv {
                row: line,
                column: headers[c].to_string(),
                message: "missing cell".into(),
            })?;
            raw.trim().parse::<f64>().map_err(|_| Error::Csv {
                row: line,
                column: headers[c].to_string(),
                message: format!("non-numeric value '{raw}'"),
            })
        };
        features.push(fcols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>>>()?);
        labels.push(cell(lcol)?);
    }
    let m = labels.len();
    if train_count == 0 || train_count >= m {
        return Err(Error::Dataset(format!(
            "train count {train_count} invalid for {m} rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, test) = split(m, train_count, &mut rng);
    let name = path
        .file_stem()
        .map_or_else(|| "csv".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::new(name, features, labels, train, test, Some((-PI, PI)))
}
