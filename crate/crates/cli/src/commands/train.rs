use rayon::prelude::*;
use serde::Serialize;

use super::{require_seeds, CommandOutcome, Summary};
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_f64, fmt_opt, gnuplot_header, write_csv, write_json, write_text};
use crate::CliError;
use nie_lab_core::circuits::NoiseSetting;
use nie_lab_core::train::{estimate_p_star_mse, train_run, TrainConfig, TrainHistory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainStatus {
    Ok,
    /// The grid has no nonzero level, so there is nothing to estimate.
    BaselineOnly,
    /// Failed jobs left fewer than two complete seeds.
    Incomplete,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSummary {
    pub p: f64,
    /// Mean over the seeds that completed.
    pub mean_final_test_mse: Option<f64>,
    pub mean_final_train_mse: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainOutput {
    pub status: TrainStatus,
    /// argmin of the final test MSE over the nonzero levels, averaged over seeds.
    pub p_star: Option<f64>,
    pub p_star_std: Option<f64>,
    pub levels: Vec<LevelSummary>,
    #[serde(skip)]
    pub histories: Vec<Vec<Option<TrainHistory>>>,
    #[serde(skip)]
    pub outcome: CommandOutcome,
}

/// One training run per (level, seed); `histories[g][seed]`.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutput, CliError> {
    let grid = cfg.grid.levels();
    let n_seeds = cfg.train_seeds();
    let has_noisy = grid.iter().any(|&p| p > 0.0);
    require_seeds(n_seeds, if has_noisy { 2 } else { 1 })?;
    let ds = cfg.dataset.load()?;
    let spec = cfg.circuit.build(cfg.layers)?;
    if ds.n_features() != spec.n_features() {
        return Err(CliError::Config(format!(
            "{} takes {} features but the dataset has {}",
            cfg.circuit,
            spec.n_features(),
            ds.n_features()
        )));
    }

    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|g| (0..n_seeds as u64).map(move |s| (g, s)))
        .collect();
    let results: Vec<Option<TrainHistory>> = jobs
        .par_iter()
        .map(|&(g, seed)| {
            let mut tc = TrainConfig::new(cfg.circuit, cfg.layers, NoiseSetting::new(cfg.noise, grid[g]), seed);
            tc.epochs = cfg.epochs;
            match train_run(&tc, &ds) {
                Ok(h) => Some(h),
                Err(e) => {
                    log::warn!("training at p = {}, seed {seed} failed: {e}", grid[g]);
                    None
                }
            }
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    let histories: Vec<Vec<Option<TrainHistory>>> =
        results.chunks(n_seeds).map(<[_]>::to_vec).collect();

    let levels: Vec<LevelSummary> = grid
        .iter()
        .zip(&histories)
        .map(|(&p, hs)| {
            let done: Vec<&TrainHistory> = hs.iter().flatten().collect();
            let mean = |f: fn(&TrainHistory) -> f64| {
                (!done.is_empty()).then(|| done.iter().map(|h| f(h)).sum::<f64>() / done.len() as f64)
            };
            LevelSummary {
                p,
                mean_final_test_mse: mean(TrainHistory::final_test_mse),
                mean_final_train_mse: mean(TrainHistory::final_train_mse),
            }
        })
        .collect();

    let noisy: Vec<usize> = (0..grid.len()).filter(|&g| grid[g] > 0.0).collect();
    let complete: Vec<usize> = (0..n_seeds)
        .filter(|&s| noisy.iter().all(|&g| histories[g][s].is_some()))
        .collect();
    let (status, p_star, p_star_std) = if noisy.is_empty() {
        (TrainStatus::BaselineOnly, None, None)
    } else if complete.len() < 2 {
        (TrainStatus::Incomplete, None, None)
    } else {
        let table: Vec<Vec<f64>> = complete
            .iter()
            .map(|&s| noisy.iter().map(|&g| histories[g][s].as_ref().unwrap().final_test_mse()).collect())
            .collect();
        let sub: Vec<f64> = noisy.iter().map(|&g| grid[g]).collect();
        let (m, sd) = estimate_p_star_mse(&sub, &table)?;
        (TrainStatus::Ok, Some(m), Some(sd))
    };

    ensure_dir(&cfg.out)?;
    let mut hist_rows = Vec::new();
    let mut final_rows = Vec::new();
    for (g, hs) in histories.iter().enumerate() {
        for (s, h) in hs.iter().enumerate() {
            let Some(h) = h else { continue };
            for (e, (tr, te)) in h.train_mse.iter().zip(&h.test_mse).enumerate() {
                hist_rows.push(vec![fmt_f64(grid[g]), s.to_string(), e.to_string(), fmt_f64(*tr), fmt_f64(*te)]);
            }
            final_rows.push(vec![
                fmt_f64(grid[g]),
                s.to_string(),
                fmt_f64(h.final_train_mse()),
                fmt_f64(h.final_test_mse()),
            ]);
        }
    }
    let mut outputs = vec![
        write_csv(&cfg.out.join("histories.csv"), &["p", "seed", "epoch", "train_mse", "test_mse"], &hist_rows)?,
        write_csv(&cfg.out.join("final.csv"), &["p", "seed", "final_train_mse", "final_test_mse"], &final_rows)?,
    ];
    let level_rows: Vec<Vec<String>> = levels
        .iter()
        .map(|l| vec![fmt_f64(l.p), fmt_opt(l.mean_final_train_mse), fmt_opt(l.mean_final_test_mse)])
        .collect();
    outputs.push(write_csv(
        &cfg.out.join("levels.csv"),
        &["p", "mean_final_train_mse", "mean_final_test_mse"],
        &level_rows,
    )?);
    let mut out = TrainOutput {
        status,
        p_star,
        p_star_std,
        levels,
        histories,
        outcome: CommandOutcome::default(),
    };
    outputs.push(write_json(
        &cfg.out.join("train_summary.json"),
        &Summary {
            config: cfg,
            failures,
            body: &out,
        },
    )?);
    if cfg.plots {
        let logx = grid.iter().all(|&p| p > 0.0);
        let mut gp = gnuplot_header("test_mse.png", "p", "mean final MSE", logx);
        gp.push_str("plot 'levels.csv' using 1:3 skip 1 with linespoints title 'test', \\\n");
        gp.push_str("     'levels.csv' using 1:2 skip 1 with linespoints title 'train'\n");
        outputs.push(write_text(&cfg.out.join("test_mse.gp"), &gp)?);
    }
    log::info!("train: status {status:?}, p* = {p_star:?} +- {p_star_std:?}, {failures} failed jobs");
    out.outcome = CommandOutcome { outputs, failures };
    Ok(out)
}
