//! Importance ratios of QFIM eigenvalues under noise, equalization ranks and
//! the best-equalization noise level p*.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to reference eigenvalues in the ratio denominator.
pub const REFERENCE_GUARD: f64 = 1e-10;

/// I_r = lambda_r(p) / max(1e-10, lambda_r(p0)).
pub fn importance_ratio(lams_p: &[f64], lams_p0: &[f64]) -> Result<Vec<f64>> {
    if lams_p.len() != lams_p0.len() {
        return Err(Error::DimensionMismatch {
            expected: lams_p0.len(),
            actual: lams_p.len(),
        });
    }
    Ok(lams_p
        .iter()
        .zip(lams_p0)
        .map(|(l, l0)| l / l0.max(REFERENCE_GUARD))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDetection {
    pub r: usize,
    /// Ratios above one form a prefix followed only by ratios at or below one.
    pub conforming: bool,
}

/// Length of the leading run of ratios strictly above one.
pub fn detect_r(ratios: &[f64]) -> RankDetection {
    let r = ratios.iter().take_while(|&&v| v > 1.0).count();
    RankDetection {
        r,
        conforming: ratios[r..].iter().all(|&v| v <= 1.0),
    }
}

/// Ascending spectra of one (input, seed) run across the noise grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpectra {
    pub input_id: usize,
    pub seed_id: usize,
    /// Spectrum at the reference level p0 = 0.
    pub reference: Vec<f64>,
    /// `spectra[g]` belongs to `grid[g]`.
    pub spectra: Vec<Vec<f64>>,
}

/// QFIM spectra over (input, seed, p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    /// Nonzero noise levels, strictly ascending.
    grid: Vec<f64>,
    runs: Vec<RunSpectra>,
}

impl SpectrumScan {
    pub fn new(grid: Vec<f64>, runs: Vec<RunSpectra>) -> Result<Self> {
        if grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidArgument(
                "scan grid levels must lie in (0, 1]".into(),
            ));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("scan grid must be strictly ascending".into()));
        }
        let n_params = runs.first().map(|r| r.reference.len());
        for run in &runs {
            if run.spectra.len() != grid.len() {
                return Err(Error::InvalidArgument(format!(
                    "run ({}, {}) has {} spectra for {} grid levels",
                    run.input_id,
                    run.seed_id,
                    run.spectra.len(),
                    grid.len()
                )));
            }
            let p = n_params.unwrap_or(0);
            if run.reference.len() != p || run.spectra.iter().any(|s| s.len() != p) {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: run.reference.len(),
                });
            }
        }
        Ok(Self { grid, runs })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn runs(&self) -> &[RunSpectra] {
        &self.runs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NieStatus {
    Ok,
    /// R_max = 0: no run shows equalization at any level.
    NoEqualization,
}

/// Per-run tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input_id: usize,
    pub seed_id: usize,
    /// Ranks removed before ranking; `ratios` skips them.
    pub structural_nulls: usize,
    /// `ratios[g][r]`
    pub ratios: Vec<Vec<f64>>,
    pub ranks: Vec<RankDetection>,
    pub r_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IBarPoint {
    pub p: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NieReport {
    pub status: NieStatus,
    pub options: NieOptions,
    pub grid: Vec<f64>,
    pub runs: Vec<RunReport>,
    /// Minimum over runs of the per-run maximum rank.
    pub r_max: usize,
    pub p_star: Option<f64>,
    /// Population standard deviation of the per-(run, rank) argmax sample.
    pub p_star_std: Option<f64>,
    /// The sample behind `p_star`, run-major then rank.
    pub argmax_samples: Vec<f64>,
    /// p* lies outside the scanned levels (cannot happen for grid argmax).
    pub extrapolated: bool,
    pub non_conforming_fraction: f64,
    pub i_bar: Vec<IBarPoint>,
    /// argmax of the mean curve, which generally differs from `p_star`.
    pub i_bar_argmax: Option<f64>,
}

/// Index of the first maximum (ties resolve to the smaller level).
fn first_argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Mean and population standard deviation. The mean is accumulated relative
/// to the first value so that a constant sample returns that value exactly.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let x0 = values[0];
    let mean = x0 + values.iter().map(|v| v - x0).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Ranks whose eigenvalue stays at or below the reference guard at p0 and at
/// every scanned level. Exact redundancies between parameters (e.g. two
/// rotations about commuting axes separated only by gates they commute with)
/// produce these; they cannot gain importance at any noise level.
pub fn structural_null_ranks(run: &RunSpectra) -> Vec<usize> {
    (0..run.reference.len())
        .filter(|&r| {
            run.reference[r] <= REFERENCE_GUARD
                && run.spectra.iter().all(|s| s[r] <= REFERENCE_GUARD)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NieOptions {
    /// Remove [`structural_null_ranks`] before ranking.
    pub drop_structural_nulls: bool,
}

impl Default for NieOptions {
    fn default() -> Self {
        Self {
            drop_structural_nulls: true,
        }
    }
}

/// [`estimate_p_star_with`] under default options.
pub fn estimate_p_star(scan: &SpectrumScan) -> Result<NieReport> {
    estimate_p_star_with(scan, &NieOptions::default())
}

/// Aggregates a scan into R_max, p* and the mean equalization curve.
pub fn estimate_p_star_with(scan: &SpectrumScan, options: &NieOptions) -> Result<NieReport> {
    let grid = scan.grid();
    if grid.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 nonzero noise levels, got {}",
            grid.len()
        )));
    }
    if scan.runs().is_empty() {
        return Err(Error::InvalidArgument("scan has no runs".into()));
    }
    let mut runs = Vec::with_capacity(scan.runs().len());
    let mut records = 0usize;
    let mut non_conforming = 0usize;
    for run in scan.runs() {
        let nulls = if options.drop_structural_nulls {
            structural_null_ranks(run)
        } else {
            Vec::new()
        };
        let keep = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .filter(|(r, _)| !nulls.contains(r))
                .map(|(_, &l)| l)
                .collect()
        };
        let reference = keep(&run.reference);
        let ratios = run
            .spectra
            .iter()
            .map(|s| importance_ratio(&keep(s), &reference))
            .collect::<Result<Vec<_>>>()?;
        let ranks: Vec<RankDetection> = ratios.iter().map(|i| detect_r(i)).collect();
        records += ranks.len();
        non_conforming += ranks.iter().filter(|d| !d.conforming).count();
        let r_max = ranks.iter().map(|d| d.r).max().unwrap_or(0);
        runs.push(RunReport {
            input_id: run.input_id,
            seed_id: run.seed_id,
            structural_nulls: nulls.len(),
            ratios,
            ranks,
            r_max,
        });
    }
    let r_max = runs.iter().map(|r| r.r_max).min().unwrap_or(0);
    let non_conforming_fraction = non_conforming as f64 / records as f64;

    if r_max == 0 {
        return Ok(NieReport {
            status: NieStatus::NoEqualization,
            options: *options,
            grid: grid.to_vec(),
            runs,
            r_max,
            p_star: None,
            p_star_std: None,
            argmax_samples: Vec::new(),
            extrapolated: false,
            non_conforming_fraction,
            i_bar: Vec::new(),
            i_bar_argmax: None,
        });
    }

    let mut samples = Vec::with_capacity(runs.len() * r_max);
    for run in &runs {
        for r in 0..r_max {
            samples.push(grid[first_argmax(run.ratios.iter().map(|i| i[r]))]);
        }
    }
    let (p_star, p_star_std) = mean_std(&samples);

    let i_bar: Vec<IBarPoint> = grid
        .iter()
        .enumerate()
        .map(|(g, &p)| {
            let per_run: Vec<f64> = runs
                .iter()
                .map(|run| run.ratios[g][..r_max].iter().sum::<f64>() / r_max as f64)
                .collect();
            let (mean, std) = mean_std(&per_run);
            IBarPoint { p, mean, std }
        })
        .collect();
    let i_bar_argmax = Some(grid[first_argmax(i_bar.iter().map(|pt| pt.mean))]);

    Ok(NieReport {
        status: NieStatus::Ok,
        options: *options,
        grid: grid.to_vec(),
        runs,
        r_max,
        p_star: Some(p_star),
        p_star_std: Some(p_star_std),
        argmax_samples: samples,
        extrapolated: p_star < grid[0] || p_star > grid[grid.len() - 1],
        non_conforming_fraction,
        i_bar,
        i_bar_argmax,
    })
}
