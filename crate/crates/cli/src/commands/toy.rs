use serde::Serialize;

use super::{CommandOutcome, Summary};
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_f64, gnuplot_header, write_csv, write_json, write_text};
use crate::CliError;
use nie_lab_core::oracle::{
    toy_gamma_star, toy_multi_eigvals, toy_single_qfi, GammaStar, ToyMultiParams, ToyParams,
};

#[derive(Serialize)]
struct ToyBody {
    gamma_star: GammaStar,
    /// Largest F over the swept rates (first occurrence).
    sweep_argmax_gamma: f64,
    sweep_max_qfi: f64,
}

/// Closed-form sweeps of the single-parameter QFI and the two nonzero
/// multi-parameter eigenvalues over the configured rates.
pub fn cmd_toy(cfg: &RunConfig) -> Result<CommandOutcome, CliError> {
    let toy = &cfg.toy;
    if toy.gammas.is_empty() {
        return Err(CliError::Config("toy sweep needs at least one rate".into()));
    }
    let mut single = Vec::with_capacity(toy.gammas.len());
    let mut multi = Vec::with_capacity(toy.gammas.len());
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &gamma in &toy.gammas {
        let f = toy_single_qfi(&ToyParams {
            delta_e: toy.delta_e,
            delta_ell: toy.delta_ell,
            gamma,
            t: toy.t,
        })?;
        if f > best.1 {
            best = (gamma, f);
        }
        single.push(vec![fmt_f64(gamma), fmt_f64(f)]);
        let m = toy_multi_eigvals(&ToyMultiParams {
            delta_e: toy.multi_delta_e.clone(),
            delta_ell: toy.delta_ell,
            gamma,
            t: toy.t,
        })?;
        multi.push(vec![
            fmt_f64(gamma),
            fmt_f64(m.approx.0),
            fmt_f64(m.approx.1),
            fmt_f64(m.exact.0),
            fmt_f64(m.exact.1),
        ]);
    }
    let gamma_star = toy_gamma_star(toy.delta_e, toy.delta_ell, toy.t)?;

    ensure_dir(&cfg.out)?;
    let mut outputs = vec![
        write_csv(&cfg.out.join("toy_single.csv"), &["gamma", "qfi"], &single)?,
        write_csv(
            &cfg.out.join("toy_multi.csv"),
            &["gamma", "lambda_plus_approx", "lambda_minus_approx", "lambda_plus_exact", "lambda_minus_exact"],
            &multi,
        )?,
        write_json(
            &cfg.out.join("toy_summary.json"),
            &Summary {
                config: cfg,
                failures: 0,
                body: ToyBody {
                    gamma_star,
                    sweep_argmax_gamma: best.0,
                    sweep_max_qfi: best.1,
                },
            },
        )?,
    ];
    if cfg.plots {
        let mut gp = gnuplot_header("toy_single.png", "gamma", "QFI", false);
        if let Some(g) = gamma_star.achievable() {
            gp.push_str(&format!(
                "set arrow from {g:e}, graph 0 to {g:e}, graph 1 nohead dt 2\nset label 'gamma*' at {g:e}, graph 0.95\n"
            ));
        }
        gp.push_str("plot 'toy_single.csv' using 1:2 skip 1 with lines title 'F(gamma)'\n");
        outputs.push(write_text(&cfg.out.join("toy_single.gp"), &gp)?);
    }
    Ok(CommandOutcome {
        outputs,
        failures: 0,
    })
}
