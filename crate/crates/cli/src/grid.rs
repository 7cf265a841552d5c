//! Noise-level grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Levels used for the sinusoidal experiments.
pub fn sin_grid() -> Vec<f64> {
    vec![
        1e-6, 1e-4, 5e-4, 1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3, 8e-3, 9e-3, 1e-2, 2e-2, 4e-2,
        7e-2,
    ]
}

/// The sinusoidal levels plus a denser and wider tail, sorted.
pub fn diab_grid() -> Vec<f64> {
    let mut g = sin_grid();
    g.extend([
        10f64.powf(-2.75),
        10f64.powf(-2.5),
        10f64.powf(-2.25),
        10f64.powf(-1.75),
        3e-2,
        10f64.powf(-1.5),
        5e-2,
        10f64.powf(-1.25),
        8e-2,
        9e-2,
        1e-1,
        10f64.powf(-0.75),
        10f64.powf(-0.5),
        10f64.powf(-0.25),
        1.0,
    ]);
    g.sort_by(f64::total_cmp);
    g
}

/// `sin`, `diab`, or `custom:p1,p2,...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GridSpec {
    Sin,
    Diab,
    /// Strictly ascending, each level in [0, 1).
    Custom(Vec<f64>),
}

impl GridSpec {
    pub fn levels(&self) -> Vec<f64> {
        match self {
            GridSpec::Sin => sin_grid(),
            GridSpec::Diab => diab_grid(),
            GridSpec::Custom(v) => v.clone(),
        }
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "sin" => return Ok(GridSpec::Sin),
            "diab" => return Ok(GridSpec::Diab),
            _ => {}
        }
        let Some(list) = s.strip_prefix("custom:") else {
            return Err(CliError::Grid(format!("unknown grid '{s}' (sin, diab or custom:...)")));
        };
        let levels = list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Grid(format!("bad level '{t}': {e}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if levels.is_empty() {
            return Err(CliError::Grid("custom grid is empty".into()));
        }
        if let Some(p) = levels.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(CliError::Grid(format!("level {p} outside [0, 1)")));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Grid("custom levels must be strictly ascending".into()));
        }
        Ok(GridSpec::Custom(levels))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Sin => f.write_str("sin"),
            GridSpec::Diab => f.write_str("diab"),
            GridSpec::Custom(v) => {
                let parts: Vec<String> = v.iter().map(|p| format!("{p:e}")).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

impl TryFrom<String> for GridSpec {
    type Error = CliError;

    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_grids() {
        let s = sin_grid();
        assert_eq!(s.len(), 16);
        assert_eq!((s[0], s[15]), (1e-6, 7e-2));
        let d = diab_grid();
        assert_eq!(d.len(), 31);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*d.last().unwrap(), 1.0);
        assert!(d.contains(&10f64.powf(-2.75)));
        assert!(s.iter().all(|p| d.contains(p)));
    }

    #[test]
    fn custom_parsing() {
        let g: GridSpec = "custom:0, 0.002,7e-2".parse().unwrap();
        assert_eq!(g.levels(), vec![0.0, 0.002, 0.07]);
        assert!("custom:0.1,0.05".parse::<GridSpec>().is_err());
        assert!("custom:0.5,1".parse::<GridSpec>().is_err());
        assert!("custom:".parse::<GridSpec>().is_err());
        assert!("coarse".parse::<GridSpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for g in [GridSpec::Sin, GridSpec::Diab, "custom:0,1e-3,0.3".parse().unwrap()] {
            let back: GridSpec = g.to_string().parse().unwrap();
            assert_eq!(back, g);
        }
    }
}
