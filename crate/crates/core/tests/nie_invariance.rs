use nie_lab_core::nie::{estimate_p_star, RunSpectra, SpectrumScan};
use proptest::prelude::*;

const GRID: [f64; 4] = [0.001, 0.002, 0.004, 0.008];

fn run_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    let spectrum = || prop::collection::vec(1e-6f64..4.0, 4).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    });
    (spectrum(), prop::collection::vec(spectrum(), GRID.len()))
}

fn scan(runs: &[(Vec<f64>, Vec<Vec<f64>>)], scale: f64) -> SpectrumScan {
    let runs = runs
        .iter()
        .enumerate()
        .map(|(j, (r, s))| RunSpectra {
            input_id: j,
            seed_id: 0,
            reference: r.iter().map(|v| v * scale).collect(),
            spectra: s.iter().map(|sp| sp.iter().map(|v| v * scale).collect()).collect(),
        })
        .collect();
    SpectrumScan::new(GRID.to_vec(), runs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn common_rescaling_changes_nothing(runs in prop::collection::vec(run_strategy(), 2..5), k in 0i32..6) {
        let scale = 2f64.powi(k);
        let a = estimate_p_star(&scan(&runs, 1.0)).unwrap();
        let b = estimate_p_star(&scan(&runs, scale)).unwrap();
        prop_assert_eq!(a.r_max, b.r_max);
        prop_assert_eq!(a.p_star, b.p_star);
        prop_assert_eq!(a.argmax_samples, b.argmax_samples);
    }

    #[test]
    fn record_order_is_irrelevant(runs in prop::collection::vec(run_strategy(), 2..5), rot in 0usize..4) {
        let mut rotated = runs.clone();
        let n = rotated.len();
        rotated.rotate_left(rot % n);
        let a = estimate_p_star(&scan(&runs, 1.0)).unwrap();
        let b = estimate_p_star(&scan(&rotated, 1.0)).unwrap();
        prop_assert_eq!(a.r_max, b.r_max);
        match (a.p_star, b.p_star) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-15),
            (x, y) => prop_assert_eq!(x, y),
        }
    }
}
