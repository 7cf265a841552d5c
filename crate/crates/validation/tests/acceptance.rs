//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nie_lab::{cmd_genbound, cmd_scan, cmd_train, GridSpec, RunConfig, ScanOutput};
use nie_lab_core::circuits::{
    build_hea, build_ising_qnn, AngleSource, CircuitSpec, Gate, GateKind, NoiseSetting,
};
use nie_lab_core::genbound::{bound_term_b, BoundInputs};
use nie_lab_core::noise::{apply_channel, make_channel, ChannelKind};
use nie_lab_core::oracle::{
    bures_hessian_qfim, rx_bloch_qfi, toy_gamma_star, toy_multi_eigvals, toy_single_qfi,
    ToyMultiParams, ToyParams, BURES_STEP,
};
use nie_lab_core::qcore::{ComplexMatrix, DensityMatrix, Observable};
use nie_lab_core::qfim::{
    circuit_qfim, circuit_qfim_pure, qfim_mixed, state_and_derivatives, DerivativeMethod,
    DEFAULT_EIG_CUTOFF,
};
use nie_lab_core::train::{
    adam_step, gen_sinusoidal, grad_loss, mse, predict, train_run, AdamConfig, AdamState, Engine,
    GradientMethod, SinusoidalParams, TrainConfig,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHANNELS: [ChannelKind; 3] =
    [ChannelKind::Depolarizing, ChannelKind::Dephasing, ChannelKind::AmplitudeDamping];

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

fn random_two_qubit(seed: u64) -> (CircuitSpec, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [GateKind::RX, GateKind::RY, GateKind::RZ];
    let mut gates = vec![
        Gate::rotation(GateKind::RY, 0, AngleSource::Fixed { angle: rng.random_range(0.0..3.0) }),
        Gate::rotation(GateKind::RX, 1, AngleSource::Fixed { angle: rng.random_range(0.0..3.0) }),
    ];
    for param in 0..4 {
        gates.push(Gate::rotation(kinds[rng.random_range(0..3)], param % 2, AngleSource::Trainable { param }));
        if param == 1 {
            gates.push(Gate::cnot(0, 1));
        }
    }
    let theta = (0..4).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    (CircuitSpec::new(2, gates, 4, 0, Observable::z_all(2), "accept2").unwrap(), theta)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let (spec, theta) = random_two_qubit(1000 + seed);
        for kind in CHANNELS {
            for p in [0.0, 0.01, 0.05] {
                let noise = NoiseSetting::new(kind, p);
                let oracle = bures_hessian_qfim(&spec, &[], &theta, &noise, BURES_STEP).map_err(|e| e.to_string())?;
                let fast = circuit_qfim(&spec, &[], &theta, &noise, &DerivativeMethod::default())
                    .map_err(|e| e.to_string())?;
                let d = max_abs_diff(&oracle.matrix, &fast.matrix);
                worst = worst.max(d);
                check!(d < 1e-4, "seed {seed} {kind} p={p}: deviation {d:.3e}");
            }
        }
    }
    Ok(format!("max deviation {worst:.2e} (tol 1e-4)"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for cfg in 0..20 {
        let layers = 1 + cfg % 3;
        let (spec, x) = if cfg % 2 == 0 {
            (build_hea(layers).unwrap(), vec![rng.random_range(-1.0..1.0)])
        } else {
            (build_ising_qnn(layers).unwrap(), vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        };
        let theta: Vec<f64> = (0..spec.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let pure = circuit_qfim_pure(&spec, &x, &theta).map_err(|e| e.to_string())?;
        let (rho, drho) = state_and_derivatives(&spec, &x, &theta, &NoiseSetting::none(), &DerivativeMethod::default())
            .map_err(|e| e.to_string())?;
        let mixed = qfim_mixed(&rho, &drho, DEFAULT_EIG_CUTOFF).map_err(|e| e.to_string())?;
        let d = max_abs_diff(&pure.matrix, &mixed.matrix);
        worst = worst.max(d);
        check!(d < 1e-6, "config {cfg} ({}, L={layers}): deviation {d:.3e}", spec.label());
    }
    Ok(format!("max deviation {worst:.2e} (tol 1e-6)"))
}

fn criterion_3() -> Outcome {
    let single = |de: f64, dl: f64, gamma: f64, t: f64| {
        toy_single_qfi(&ToyParams { delta_e: de, delta_ell: dl, gamma, t }).unwrap()
    };
    for de in [0.0, 0.3, 1.0, 2.5] {
        check!(single(de, 1.0, 0.0, 1.0) == de * de, "F(0) != dE^2 at dE={de}");
    }

    let mut misses = Vec::new();
    let sets = [(0.0, 1.0), (0.1, 1.0), (0.2, 1.0), (0.3, 1.0), (0.4, 1.0), (0.0, 1.5), (0.1, 1.5), (0.2, 1.5), (0.3, 1.5), (0.4, 0.7)];
    for (de, dl) in sets {
        let t = 1.0;
        let Some(gs) = toy_gamma_star(de, dl, t).unwrap().achievable() else {
            return Err(format!("set ({de}, {dl}) has no achievable optimum"));
        };
        // 400 steps spanning [0, 8 gamma*]
        let step = gs / 50.0;
        let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
        for k in 0..=400 {
            let g = k as f64 * step;
            let f = single(de, dl, g, t);
            if f > best {
                (arg, best) = (g, f);
            }
        }
        if (arg - gs).abs() > step * (1.0 + 1e-9) {
            misses.push(format!("(dE={de}, dl={dl}): argmax {arg:.4} vs gamma* {gs:.4}"));
        }
    }

    let err = |gamma: f64| {
        let m = toy_multi_eigvals(&ToyMultiParams { delta_e: vec![1.0, 0.0], delta_ell: 1.0, gamma, t: 1.0 }).unwrap();
        (m.approx.0 - m.exact.0).abs().max((m.approx.1 - m.exact.1).abs())
    };
    let mut ratios = Vec::new();
    for gamma in [1e-3, 2e-3, 4e-3, 8e-3] {
        let r = err(2.0 * gamma) / err(gamma);
        check!((4.0 / 1.5..=6.0).contains(&r), "multi error ratio {r:.3} at gamma={gamma}");
        ratios.push(format!("{r:.3}"));
    }
    check!(misses.is_empty(), "grid argmax off gamma*: {}", misses.join("; "));
    Ok(format!("F(0) exact; argmax within one step for 10 sets; error ratios [{}]", ratios.join(", ")))
}

fn criterion_4() -> Outcome {
    let spec = CircuitSpec::new(
        1,
        vec![Gate::rotation(GateKind::RX, 0, AngleSource::Trainable { param: 0 })],
        1,
        0,
        Observable::z_all(1),
        "rx",
    )
    .map_err(|e| e.to_string())?;
    let theta = 0.83;
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.1, 0.2] {
        for (kind, want) in [(ChannelKind::Depolarizing, (1.0 - p) * (1.0 - p)), (ChannelKind::Dephasing, 1.0)] {
            let bloch = rx_bloch_qfi(kind, p, theta);
            let q = circuit_qfim(&spec, &[], &[theta], &NoiseSetting::new(kind, p), &DerivativeMethod::default())
                .map_err(|e| e.to_string())?;
            let engine = q.matrix[(0, 0)];
            for v in [bloch, engine] {
                worst = worst.max((v - want).abs());
                check!((v - want).abs() < 1e-6, "{kind} p={p}: {v} vs {want}");
            }
        }
    }
    Ok(format!("max deviation {worst:.2e} (tol 1e-6)"))
}

fn scan_config(layers: usize, dir: &std::path::Path) -> RunConfig {
    RunConfig {
        layers,
        inputs: Some(5),
        seeds: Some(2),
        grid: GridSpec::Sin,
        noise: ChannelKind::Depolarizing,
        out: dir.to_path_buf(),
        plots: false,
        ..RunConfig::default()
    }
}

fn criterion_5(scan: &ScanOutput) -> Outcome {
    let slack = 1e-8;
    let mut worst: f64 = f64::NEG_INFINITY;
    for run in scan.scan.runs() {
        let desc = |v: &[f64]| {
            let mut d = v.to_vec();
            d.sort_by(|a, b| b.total_cmp(a));
            d
        };
        let reference = desc(&run.reference);
        let mut prev_trace: f64 = reference.iter().sum();
        for (p, spec) in scan.scan.grid().iter().zip(&run.spectra) {
            let noisy = desc(spec);
            let (mut acc0, mut acc) = (0.0, 0.0);
            for (a, b) in reference.iter().zip(&noisy) {
                acc0 += a;
                acc += b;
                worst = worst.max(acc - acc0);
                check!(acc <= acc0 + slack, "run ({}, {}) p={p}: partial sum exceeds noiseless by {:.3e}", run.input_id, run.seed_id, acc - acc0);
            }
            check!(acc <= prev_trace + slack, "run ({}, {}) p={p}: trace rose from {prev_trace} to {acc}", run.input_id, run.seed_id);
            prev_trace = acc;
        }
    }
    Ok(format!("largest partial-sum excess {worst:.2e} (slack 1e-8); traces non-increasing"))
}

fn criterion_6(l4: &ScanOutput, l10: &ScanOutput) -> Outcome {
    let rep = &l4.report;
    let p4 = rep.p_star.ok_or("L=4: p* undefined")?;
    check!(rep.r_max >= 1, "L=4: R_max = {}", rep.r_max);
    check!((0.7e-3..=3.5e-3).contains(&p4), "L=4: p* = {p4:.3e} outside [0.7e-3, 3.5e-3]");

    let rep10 = &l10.report;
    let p10 = rep10.p_star.ok_or("L=10: p* undefined")?;
    let mut activated = 0;
    for run in l10.scan.runs() {
        for r in 0..run.reference.len() {
            if run.reference[r] <= 1e-10 && run.spectra.iter().any(|s| s[r] > 1e-8) {
                activated += 1;
            }
        }
    }
    check!((0.5e-3..=2e-3).contains(&p10), "L=10: p* = {p10:.3e} outside [0.5e-3, 2e-3]");
    check!(activated > 0, "L=10: no null eigenvalue activated above 1e-8");
    Ok(format!(
        "L=4: R_max={} p*={p4:.3e}±{:.1e}; L=10: R_max={} p*={p10:.3e}±{:.1e}, {activated} activated (run, rank) pairs",
        rep.r_max,
        rep.p_star_std.unwrap_or(f64::NAN),
        rep10.r_max,
        rep10.p_star_std.unwrap_or(f64::NAN)
    ))
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        layers: 4,
        seeds: Some(3),
        epochs: 300,
        grid: GridSpec::Custom(vec![0.0, 2e-3, 7e-2]),
        noise: ChannelKind::Depolarizing,
        out: dir.path().to_path_buf(),
        plots: false,
        ..RunConfig::default()
    };
    let out = cmd_train(&cfg).map_err(|e| e.to_string())?;
    check!(out.outcome.failures == 0, "{} training jobs failed", out.outcome.failures);
    let m: Vec<f64> = out.levels.iter().map(|l| l.mean_final_test_mse.unwrap_or(f64::NAN)).collect();
    let detail = format!("mean test MSE p=0: {:.4}, 2e-3: {:.4}, 7e-2: {:.4}", m[0], m[1], m[2]);
    check!(m[1] < m[0] && m[1] < m[2], "no dip: {detail}");
    Ok(detail)
}

fn criterion_8(l4: &ScanOutput) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = cmd_genbound(&scan_config(4, dir.path())).map_err(|e| e.to_string())?;
    let argmin = out.scan.argmin_p.ok_or("bound not computable anywhere")?;
    let p_star = l4.report.p_star.ok_or("NIE p* undefined")?;
    check!(out.scan.argmin_is_interior, "argmin {argmin:e} on the grid boundary");
    check!(argmin > p_star, "argmin {argmin:.3e} does not exceed NIE p* {p_star:.3e}");

    // sqrt(60) * exp((ln 30! - ln 1e-200) / 60)
    let ln_fact: f64 = (2..=30).map(|k| (k as f64).ln()).sum();
    let log_m = -200.0 * std::f64::consts::LN_10;
    let expect = 60f64.sqrt() * ((ln_fact - log_m) / 60.0).exp();
    let b = bound_term_b(&BoundInputs { d_eff: 60, log_m: Some(log_m), l_f: 1.0, m_train: 15, delta: 0.1 })
        .map_err(|e| e.to_string())?;
    let rel = (b - expect).abs() / expect;
    check!(b.is_finite() && rel < 1e-9, "B(60, 1e-200, 1) = {b} vs {expect} (rel {rel:.2e})");
    Ok(format!("argmin {argmin:.1e} interior, NIE p* {p_star:.2e}; log-space B rel err {rel:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for sample in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + sample);
        let (spec, n_feat) = if sample % 2 == 0 { (build_hea(1).unwrap(), 1) } else { (build_ising_qnn(1).unwrap(), 2) };
        let noise = NoiseSetting::new(CHANNELS[sample as usize % 3], rng.random_range(0.001..0.1));
        let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..n_feat).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let theta: Vec<f64> = (0..spec.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let (_, grad) = grad_loss(&spec, &xs, &ys, &theta, &noise, GradientMethod::ParameterShift, Engine::Density)
            .map_err(|e| e.to_string())?;
        let loss = |t: &[f64]| mse(&predict(&spec, &xs, t, &noise, Engine::Density).unwrap(), &ys).unwrap();
        let h = 1e-5;
        for i in 0..theta.len() {
            let mut t = theta.clone();
            t[i] += h;
            let up = loss(&t);
            t[i] -= 2.0 * h;
            let fd = (up - loss(&t)) / (2.0 * h);
            worst = worst.max((fd - grad[i]).abs());
            check!((fd - grad[i]).abs() < 1e-6, "sample {sample} param {i}: {fd} vs {}", grad[i]);
        }
    }

    let curv = [0.3, 1.0, 2.5, 4.0];
    let center = [1.0, -0.5, 0.25, 2.0];
    let grad = |t: &[f64]| -> Vec<f64> { (0..4).map(|i| 2.0 * curv[i] * (t[i] - center[i])).collect() };
    let (lr, b1, b2, eps) = (0.01f64, 0.9f64, 0.999f64, 1e-8f64);
    let mut reference = vec![-1.0, 2.0, 0.5, -3.0];
    let (mut m, mut v) = (vec![0.0; 4], vec![0.0; 4]);
    let mut theta = reference.clone();
    let mut state = AdamState::new(4);
    let mut adam_dev: f64 = 0.0;
    for t in 1..=100 {
        let g = grad(&reference);
        for i in 0..4 {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let mhat = m[i] / (1.0 - b1.powi(t));
            let vhat = v[i] / (1.0 - b2.powi(t));
            reference[i] -= lr * mhat / (vhat.sqrt() + eps);
        }
        let g = grad(&theta);
        adam_step(&mut theta, &g, &mut state, &AdamConfig::default());
    }
    for (a, b) in theta.iter().zip(&reference) {
        adam_dev = adam_dev.max((a - b).abs());
    }
    check!(adam_dev < 1e-10, "Adam deviates from reference by {adam_dev:.3e}");

    let ds = gen_sinusoidal(5, &SinusoidalParams::SMALL).map_err(|e| e.to_string())?;
    let mut tc = TrainConfig::new(nie_lab_core::circuits::CircuitKind::Hea, 2, NoiseSetting::new(ChannelKind::Depolarizing, 0.003), 4);
    tc.epochs = 5;
    let a = train_run(&tc, &ds).map_err(|e| e.to_string())?;
    let b = train_run(&tc, &ds).map_err(|e| e.to_string())?;
    let bitwise = a.train_mse.iter().zip(&b.train_mse).all(|(x, y)| x.to_bits() == y.to_bits())
        && a.test_mse.iter().zip(&b.test_mse).all(|(x, y)| x.to_bits() == y.to_bits());
    check!(a == b && bitwise, "repeated training runs differ");
    Ok(format!("shift vs FD {worst:.1e} (tol 1e-6); Adam {adam_dev:.1e} (tol 1e-10); histories bitwise equal"))
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in CHANNELS {
        for k in 0..50 {
            let p = k as f64 / 49.0;
            let r = make_channel(kind, p).map_err(|e| e.to_string())?.completeness_residual();
            worst = worst.max(r);
            check!(r < 1e-12, "{kind} p={p}: completeness residual {r:.3e}");
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c = |re: f64, im: f64| Complex64::new(re, im);
    // random 2-qubit state as A A^dagger / Tr
    let a = ComplexMatrix::from_fn(4, 4, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let aa = a.matmul(&a.adjoint());
    let tr: f64 = (0..4).map(|i| aa[(i, i)].re).sum();
    let rho = DensityMatrix::new(aa.scale_real(1.0 / tr)).map_err(|e| e.to_string())?;
    let dp = |p: f64| make_channel(ChannelKind::Depolarizing, p).unwrap();
    for (p1, p2) in [(0.1, 0.2), (0.003, 0.07), (0.5, 0.9)] {
        let twice = apply_channel(&apply_channel(&rho, &dp(p1), 0).unwrap(), &dp(p2), 0).unwrap();
        let once = apply_channel(&rho, &dp(1.0 - (1.0 - p1) * (1.0 - p2)), 0).unwrap();
        let d = twice.matrix().max_abs_diff(once.matrix());
        check!(d < 1e-12, "composition ({p1}, {p2}): {d:.3e}");
    }

    let one_q = ComplexMatrix::from_fn(2, 2, |i, j| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * if i == j { 1.0 } else { 0.3 });
    let aa = one_q.matmul(&one_q.adjoint());
    let tr = aa[(0, 0)].re + aa[(1, 1)].re;
    let sigma = DensityMatrix::new(aa.scale_real(1.0 / tr)).map_err(|e| e.to_string())?;
    let full = apply_channel(&sigma, &dp(1.0), 0).unwrap();
    check!(full.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12, "full depolarization does not give I/2");
    let excited = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| c(if i == 1 && j == 1 { 1.0 } else { 0.0 }, 0.0)))
        .map_err(|e| e.to_string())?;
    let decayed = apply_channel(&excited, &make_channel(ChannelKind::AmplitudeDamping, 1.0).unwrap(), 0).unwrap();
    check!(decayed.matrix().max_abs_diff(DensityMatrix::zero(1).matrix()) < 1e-12, "full damping does not give |0><0|");
    Ok(format!("completeness residual {worst:.1e}; composition and p=1 fixed points hold"))
}

struct Runner {
    failed: usize,
}

impl Runner {
    /// `prior` is time already spent on shared work this criterion depends on.
    fn run(&mut self, id: u32, budget: Option<Duration>, prior: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now() - prior;
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let res = match (res, budget) {
            (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; exceeded runtime budget {b:?}")),
            (r, _) => r,
        };
        let (tag, detail) = match res {
            Ok(d) => ("PASS", d),
            Err(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2}: {tag} [{:.1}s] {detail}", elapsed.as_secs_f64());
    }
}

fn main() -> ExitCode {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    let secs = |s: u64| Some(Duration::from_secs(s));
    let mut runner = Runner { failed: 0 };

    let l4_dir = tempfile::tempdir().expect("tempdir");
    let l10_dir = tempfile::tempdir().expect("tempdir");
    let t = Instant::now();
    let l4 = cmd_scan(&scan_config(4, l4_dir.path()));
    let l4_time = t.elapsed();
    let l10 = cmd_scan(&scan_config(10, l10_dir.path()));
    let scan_time = t.elapsed();

    runner.run(1, mins(2), Duration::ZERO, criterion_1);
    runner.run(2, mins(2), Duration::ZERO, criterion_2);
    runner.run(3, secs(10), Duration::ZERO, criterion_3);
    runner.run(4, secs(10), Duration::ZERO, criterion_4);
    runner.run(5, mins(10), l4_time, || {
        criterion_5(l4.as_ref().map_err(|e| format!("L=4 scan failed: {e}"))?)
    });
    runner.run(6, mins(30), scan_time, || {
        let l4 = l4.as_ref().map_err(|e| format!("L=4 scan failed: {e}"))?;
        let l10 = l10.as_ref().map_err(|e| format!("L=10 scan failed: {e}"))?;
        criterion_6(l4, l10)
    });
    runner.run(7, None, Duration::ZERO, criterion_7);
    runner.run(8, mins(15), Duration::ZERO, || criterion_8(l4.as_ref().map_err(|e| format!("L=4 scan failed: {e}"))?));
    runner.run(9, None, Duration::ZERO, criterion_9);
    runner.run(10, None, Duration::ZERO, criterion_10);
    println!(
        "shared scans: L=4 {:.1}s, L=10 {:.1}s",
        l4_time.as_secs_f64(),
        (scan_time - l4_time).as_secs_f64()
    );

    if runner.failed > 0 {
        println!("{} of 10 criteria failed", runner.failed);
        ExitCode::FAILURE
    } else {
        println!("all 10 criteria passed");
        ExitCode::SUCCESS
    }
}
