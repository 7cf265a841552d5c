use rayon::prelude::*;
use serde::Serialize;

use super::{model_and_inputs, require_seeds, CommandOutcome, Summary};
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_f64, fmt_opt, gnuplot_header, write_csv, write_json, write_text};
use crate::CliError;
use nie_lab_core::circuits::NoiseSetting;
use nie_lab_core::genbound::{
    bound_row, bound_sample, summarize_bound, BoundOptions, BoundRow, BoundSample, BoundScan,
};
use nie_lab_core::train::{init_params, SCAN_STREAM};

#[derive(Debug, Clone)]
pub struct GenboundOutput {
    pub scan: BoundScan,
    pub outcome: CommandOutcome,
}

#[derive(Serialize)]
struct GenboundBody<'a> {
    m_train: usize,
    n_inputs: usize,
    n_seeds: usize,
    d_eff_rounding: &'static str,
    status: &'a nie_lab_core::genbound::BoundStatus,
    argmin_p: Option<f64>,
    argmin_is_interior: bool,
    options: &'a BoundOptions,
}

/// B(p) over the grid with 5 parameter vectors per training input by default.
/// Failed samples are left out of their level and counted.
pub fn cmd_genbound(cfg: &RunConfig) -> Result<GenboundOutput, CliError> {
    let grid = cfg.grid.levels();
    let n_seeds = cfg.bound_seeds();
    require_seeds(n_seeds, 1)?;
    let (spec, ds, inputs) = model_and_inputs(cfg)?;
    let m_train = ds.train_idx.len();
    let options = BoundOptions {
        delta: cfg.delta,
        policy: cfg.determinant,
        ..BoundOptions::default()
    };
    let thetas: Vec<Vec<f64>> = (0..n_seeds as u64)
        .map(|s| init_params(spec.n_params(), s, SCAN_STREAM))
        .collect();
    let cells: Vec<(usize, usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..inputs.len()).flat_map(move |i| (0..n_seeds).map(move |j| (g, i, j))))
        .collect();
    let samples: Vec<Option<BoundSample>> = cells
        .par_iter()
        .map(|&(g, i, j)| {
            let noise = NoiseSetting::new(cfg.noise, grid[g]);
            bound_sample(&spec, &inputs[i], &thetas[j], &noise, (i, j), &options)
                .map_err(|e| log::warn!("bound cell (p = {}, input {i}, seed {j}) failed: {e}", grid[g]))
                .ok()
        })
        .collect();
    let failures = samples.iter().filter(|s| s.is_none()).count();
    let per_level = inputs.len() * n_seeds;
    let mut rows: Vec<BoundRow> = Vec::new();
    for (g, chunk) in samples.chunks(per_level).enumerate() {
        let ok: Vec<BoundSample> = chunk.iter().flatten().cloned().collect();
        if ok.is_empty() {
            continue;
        }
        rows.push(bound_row(grid[g], &ok, m_train, options.delta)?);
    }
    let scan = summarize_bound(rows, options);

    ensure_dir(&cfg.out)?;
    let csv_rows: Vec<Vec<String>> = scan
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.p),
                fmt_f64(r.d_eff_mean),
                r.d_eff.to_string(),
                fmt_opt(r.log_m),
                fmt_f64(r.l_f),
                fmt_opt(r.b),
                fmt_opt(r.full_bound),
                u8::from(r.is_computable()).to_string(),
            ]
        })
        .collect();
    let mut outputs = vec![write_csv(
        &cfg.out.join("bound.csv"),
        &["p", "d_eff_mean", "d_eff", "log_m", "L_f", "B", "full_bound", "computable_flag"],
        &csv_rows,
    )?];
    outputs.push(write_json(
        &cfg.out.join("bound_summary.json"),
        &Summary {
            config: cfg,
            failures,
            body: GenboundBody {
                m_train,
                n_inputs: inputs.len(),
                n_seeds,
                d_eff_rounding: "mean rank rounded to nearest, halves away from zero",
                status: &scan.status,
                argmin_p: scan.argmin_p,
                argmin_is_interior: scan.argmin_is_interior,
                options: &scan.options,
            },
        },
    )?);
    if cfg.plots {
        let mut gp = gnuplot_header("bound.png", "p", "B(p)", true);
        gp.push_str("set logscale y\n");
        if let Some(p) = scan.argmin_p {
            gp.push_str(&format!("set arrow from {p:e}, graph 0 to {p:e}, graph 1 nohead dt 2\n"));
        }
        gp.push_str("plot 'bound.csv' using 1:($8 == 1 ? $6 : 1/0) skip 1 with linespoints title 'computable', \\\n");
        gp.push_str("     'bound.csv' using 1:($8 == 0 ? 1 : 1/0) skip 1 with points pt 2 lc 'red' title 'not computable'\n");
        outputs.push(write_text(&cfg.out.join("bound.gp"), &gp)?);
    }
    log::info!(
        "genbound: status {:?}, argmin {:?}, {failures} failed cells",
        scan.status,
        scan.argmin_p
    );
    Ok(GenboundOutput {
        scan,
        outcome: CommandOutcome { outputs, failures },
    })
}
