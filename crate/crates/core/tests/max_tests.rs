use proptest::prelude::*;

use wn_core::lstat::{permutation_test, LStatConfig};
use wn_core::mc::{run_size, McGrid, McMethod, ModelSpec};
use wn_core::scan::{max_test, pair_scan};
use wn_core::simgen::{gen_null, NullModel, NullModelSpec};
use wn_core::{Method, SeriesPanel};

fn null_panel(model: NullModel, n: usize, p: usize, seed: u64) -> SeriesPanel {
    gen_null(&NullModelSpec {
        model,
        n,
        p,
        seed,
        matrix_seed: None,
    })
    .unwrap()
}

fn increasing(kind: u8, v: f64) -> f64 {
    match kind % 4 {
        0 => v.exp(),
        1 => v * v * v + 2.0 * v,
        2 => 0.01 * v - 3.0,
        _ => v.atan(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn max_test_outcomes_survive_increasing_maps(
        seed in any::<u64>(),
        model in 0usize..8,
        n in 25usize..70,
        p in 1usize..5,
        k_max in 1usize..3,
        kinds in prop::collection::vec(any::<u8>(), 5),
    ) {
        prop_assume!(p * p * k_max >= 2);
        let panel = null_panel(NullModel::ALL[model], n, p, seed);
        let moved = panel.map_values(|col, v| increasing(kinds[col], v)).unwrap();
        for method in Method::BUILT_IN {
            let a = max_test(&pair_scan(&panel, k_max, method).unwrap(), 0.05).unwrap();
            let b = max_test(&pair_scan(&moved, k_max, method).unwrap(), 0.05).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn reject_iff_p_value_at_most_alpha(
        seed in any::<u64>(),
        method in 0usize..6,
        alpha in 0.001f64..0.999,
    ) {
        let panel = null_panel(NullModel::Iii, 40, 3, seed);
        let outcome = max_test(&pair_scan(&panel, 2, Method::BUILT_IN[method]).unwrap(), alpha).unwrap();
        prop_assume!((outcome.p_value - alpha).abs() > 1e-12);
        prop_assert_eq!(outcome.reject, outcome.p_value <= alpha);
    }

    #[test]
    fn permutation_test_is_deterministic(seed in any::<u64>(), l in 1usize..6) {
        let panel = null_panel(NullModel::V, 30, 3, seed);
        let config = LStatConfig { l, method: Method::KendallTau, perms: 100, alpha: 0.1, seed };
        let a = permutation_test(&panel, &config, 1).unwrap();
        let b = permutation_test(&panel, &config, 1).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn sizes_across_innovation_laws() {
    // Innovation laws (a)-(d) with Toeplitz mixing: models (i)-(iv).
    let grid = McGrid {
        reps: 1000,
        base_seed: 31,
        ..McGrid::new(
            NullModel::ALL[..4].iter().map(|&m| ModelSpec::null(m)).collect(),
            Method::BUILT_IN.into_iter().map(McMethod::from).collect(),
        )
    };
    let table = run_size(&grid).unwrap();
    assert_eq!(table.cells.len(), 24);
    for cell in &table.cells {
        assert!(!cell.partial);
        let method: Method = cell.method.parse().unwrap();
        let (lo, hi) = if method.is_degenerate() {
            (0.02, 0.10)
        } else {
            (0.0, 0.07)
        };
        assert!(
            (lo..=hi).contains(&cell.rejection_rate),
            "model {} {}: size {}",
            cell.model,
            cell.method,
            cell.rejection_rate
        );
    }
}
