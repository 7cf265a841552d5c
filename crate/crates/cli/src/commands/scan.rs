use rayon::prelude::*;
use serde::Serialize;

use super::{model_and_inputs, require_seeds, CommandOutcome, Summary};
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_f64, gnuplot_header, write_csv, write_json, write_text};
use crate::CliError;
use nie_lab_core::circuits::NoiseSetting;
use nie_lab_core::nie::{estimate_p_star, NieReport, RunSpectra, SpectrumScan};
use nie_lab_core::qfim::{circuit_qfim, DerivativeMethod};
use nie_lab_core::train::{init_params, SCAN_STREAM};

#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub scan: SpectrumScan,
    pub report: NieReport,
    pub outcome: CommandOutcome,
}

#[derive(Serialize)]
struct ScanBody<'a> {
    reference_level: f64,
    n_inputs: usize,
    n_seeds: usize,
    report: &'a NieReport,
}

/// QFIM spectra over (training inputs x seeds x ({0} + grid)), then p*.
///
/// A failing cell drops its (input, seed) run from the estimate and is
/// counted in the outcome.
pub fn cmd_scan(cfg: &RunConfig) -> Result<ScanOutput, CliError> {
    let levels: Vec<f64> = cfg.grid.levels().into_iter().filter(|&p| p > 0.0).collect();
    if levels.len() < 3 {
        return Err(CliError::Config(format!(
            "a scan needs at least 3 nonzero noise levels, got {}",
            levels.len()
        )));
    }
    let n_seeds = cfg.scan_seeds();
    require_seeds(n_seeds, 1)?;
    let (spec, _, inputs) = model_and_inputs(cfg)?;
    let thetas: Vec<Vec<f64>> = (0..n_seeds as u64)
        .map(|s| init_params(spec.n_params(), s, SCAN_STREAM))
        .collect();
    let all_levels: Vec<f64> = std::iter::once(0.0).chain(levels.iter().copied()).collect();

    let n_levels = all_levels.len();
    let cells: Vec<(usize, usize, usize)> = (0..inputs.len())
        .flat_map(|i| (0..n_seeds).flat_map(move |j| (0..n_levels).map(move |g| (i, j, g))))
        .collect();
    let method = DerivativeMethod::default();
    let results: Vec<Result<Vec<f64>, CliError>> = cells
        .par_iter()
        .map(|&(i, j, g)| {
            let noise = NoiseSetting::new(cfg.noise, all_levels[g]);
            Ok(circuit_qfim(&spec, &inputs[i], &thetas[j], &noise, &method)?.eigenvalues)
        })
        .collect();

    let per_run = all_levels.len();
    let mut failures = 0;
    let mut runs = Vec::new();
    for (chunk, cell_ids) in results.chunks(per_run).zip(cells.chunks(per_run)) {
        let (i, j, _) = cell_ids[0];
        let mut spectra = Vec::with_capacity(per_run);
        for (res, &(_, _, g)) in chunk.iter().zip(cell_ids) {
            match res {
                Ok(ev) => spectra.push(ev.clone()),
                Err(e) => {
                    failures += 1;
                    log::warn!("scan cell (input {i}, seed {j}, p = {}) failed: {e}", all_levels[g]);
                }
            }
        }
        if spectra.len() == per_run {
            let reference = spectra.remove(0);
            runs.push(RunSpectra {
                input_id: i,
                seed_id: j,
                reference,
                spectra,
            });
        }
    }
    let scan = SpectrumScan::new(levels, runs)?;
    let report = estimate_p_star(&scan)?;

    ensure_dir(&cfg.out)?;
    let mut outputs = vec![write_spectra(cfg, &scan)?];
    let ibar_rows: Vec<Vec<String>> = report
        .i_bar
        .iter()
        .map(|pt| vec![fmt_f64(pt.p), fmt_f64(pt.mean), fmt_f64(pt.std)])
        .collect();
    outputs.push(write_csv(&cfg.out.join("ibar.csv"), &["p", "mean", "std"], &ibar_rows)?);
    outputs.push(write_json(
        &cfg.out.join("nie_report.json"),
        &Summary {
            config: cfg,
            failures,
            body: ScanBody {
                reference_level: 0.0,
                n_inputs: inputs.len(),
                n_seeds,
                report: &report,
            },
        },
    )?);
    if cfg.plots {
        let mut gp = gnuplot_header("ibar.png", "p", "mean importance ratio", true);
        if let Some(p) = report.p_star {
            gp.push_str(&format!("set arrow from {p:e}, graph 0 to {p:e}, graph 1 nohead dt 2\n"));
        }
        gp.push_str("plot 'ibar.csv' using 1:2:3 skip 1 with yerrorlines title 'mean over runs'\n");
        outputs.push(write_text(&cfg.out.join("ibar.gp"), &gp)?);
    }
    log::info!(
        "scan: R_max = {}, p* = {:?} +- {:?}, {failures} failed cells",
        report.r_max,
        report.p_star,
        report.p_star_std
    );
    Ok(ScanOutput {
        scan,
        report,
        outcome: CommandOutcome { outputs, failures },
    })
}

fn write_spectra(cfg: &RunConfig, scan: &SpectrumScan) -> Result<std::path::PathBuf, CliError> {
    let (circuit, layers, kind) = (cfg.circuit.to_string(), cfg.layers.to_string(), cfg.noise.to_string());
    let mut rows = Vec::new();
    for run in scan.runs() {
        let levels = std::iter::once((0.0, &run.reference))
            .chain(scan.grid().iter().copied().zip(&run.spectra));
        for (p, spectrum) in levels {
            for (r, lam) in spectrum.iter().enumerate() {
                rows.push(vec![
                    circuit.clone(),
                    layers.clone(),
                    kind.clone(),
                    fmt_f64(p),
                    run.input_id.to_string(),
                    run.seed_id.to_string(),
                    (r + 1).to_string(),
                    fmt_f64(*lam),
                ]);
            }
        }
    }
    write_csv(
        &cfg.out.join("spectra.csv"),
        &["circuit", "L", "noise_kind", "p", "input_id", "seed_id", "rank_r", "lambda_r"],
        &rows,
    )
}
