use proptest::prelude::*;

use wn_core::io::{read_csv, write_csv};
use wn_core::mc::{run_power, run_size, McGrid, ModelSpec};
use wn_core::scan::{max_test, pair_scan};
use wn_core::simgen::{
    alt_matrix, gen_alt, gen_null, AltForm, AltModelSpec, NullModel, NullModelSpec, DEFAULT_BURN_IN,
};
use wn_core::{Method, SeriesPanel};

fn alt_spec(form: AltForm, rho: f64, k0: usize, n: usize, p: usize, seed: u64) -> AltModelSpec {
    AltModelSpec {
        form,
        rho,
        k0,
        n,
        p,
        seed,
        burn_in: DEFAULT_BURN_IN,
        matrix_seed: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generators_are_seed_deterministic(
        seed in any::<u64>(),
        model in 0usize..8,
        n in 1usize..40,
        p in 1usize..6,
        rho in 0.0f64..0.9,
    ) {
        let null = NullModelSpec { model: NullModel::ALL[model], n, p, seed, matrix_seed: None };
        prop_assert_eq!(gen_null(&null).unwrap(), gen_null(&null).unwrap());
        let alt = alt_spec(AltForm::ALL[model], rho, p.min(2), n, p, seed);
        prop_assert_eq!(gen_alt(&alt).unwrap(), gen_alt(&alt).unwrap());
    }

    #[test]
    fn alternative_matrix_vanishes_outside_block(
        seed in any::<u64>(),
        p in 1usize..12,
        k0_frac in 0.0f64..1.0,
        rho in 0.0f64..2.0,
    ) {
        let k0 = 1 + ((p - 1) as f64 * k0_frac) as usize;
        let a = alt_matrix(&alt_spec(AltForm::I, rho, k0, 10, p, seed));
        for i in 0..p {
            for j in 0..p {
                if i >= k0 || j >= k0 {
                    prop_assert_eq!(a[(i, j)], 0.0);
                } else {
                    prop_assert!(a[(i, j)].abs() <= rho);
                }
            }
        }
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(prop::collection::vec(
            prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e6f64..1e6], 3), 1..20),
    ) {
        let panel = SeriesPanel::from_rows(&rows).unwrap();
        let mut first = Vec::new();
        write_csv(&panel, None, &mut first).unwrap();
        let back = read_csv(first.as_slice(), false).unwrap().panel;
        prop_assert_eq!(&back, &panel);
        let mut second = Vec::new();
        write_csv(&back, None, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}

#[test]
fn planted_signal_locates_the_argmax() {
    let (k0, reps) = (2, 100);
    let mut inside = 0;
    for seed in 0..reps {
        let panel = gen_alt(&alt_spec(AltForm::I, 0.9, k0, 100, 30, seed)).unwrap();
        let outcome = max_test(&pair_scan(&panel, 2, Method::HoeffdingD).unwrap(), 0.05).unwrap();
        let (i, j, _) = outcome.argmax;
        inside += usize::from(i <= k0 && j <= k0);
    }
    assert!(
        inside as f64 >= 0.9 * reps as f64,
        "argmax inside the block in {inside} of {reps}"
    );
}

#[test]
fn power_grows_with_signal_strength() {
    let grid = McGrid {
        reps: 100,
        base_seed: 41,
        ..McGrid::new(
            vec![ModelSpec::alt(AltForm::I, 0.3, 2), ModelSpec::alt(AltForm::I, 0.9, 2)],
            vec![Method::TauStar.into()],
        )
    };
    let table = run_power(&grid).unwrap();
    let weak = table.cells[0].rejection_rate;
    let strong = table.cells[1].rejection_rate;
    assert!(strong >= weak, "power at rho=0.9 ({strong}) below rho=0.3 ({weak})");
}

#[test]
fn power_falls_with_block_size_on_some_forms() {
    // Soft trend at rho = 0.6: a wider block lowers max-type power on the
    // forms whose dependence dilutes as k0 grows. Counted over all eight.
    let mut falling = 0;
    for form in AltForm::ALL {
        let grid = McGrid {
            reps: 100,
            base_seed: 43,
            ..McGrid::new(
                vec![ModelSpec::alt(form, 0.6, 2), ModelSpec::alt(form, 0.6, 10)],
                vec![Method::HoeffdingD.into()],
            )
        };
        let table = run_power(&grid).unwrap();
        let (sparse, dense) = (table.cells[0].rejection_rate, table.cells[1].rejection_rate);
        falling += usize::from(dense < sparse);
    }
    assert!(falling >= 4, "power fell with k0 on only {falling} of 8 forms");
}

#[test]
fn monte_carlo_errors_are_honest() {
    let grid = |seed| McGrid {
        n_list: vec![40],
        p_list: vec![5],
        k_list: vec![1],
        reps: 200,
        base_seed: seed,
        ..McGrid::new(
            NullModel::ALL.iter().map(|&m| ModelSpec::null(m)).collect(),
            vec![
                Method::SpearmanRho.into(),
                Method::HoeffdingD.into(),
                Method::ChatterjeeXi.into(),
            ],
        )
    };
    let a = run_size(&grid(1)).unwrap();
    let b = run_size(&grid(2)).unwrap();
    let cells = a.cells.len();
    let close = a
        .cells
        .iter()
        .zip(&b.cells)
        .filter(|(x, y)| {
            let se = x.mc_se.max(y.mc_se).max(1.0 / x.reps as f64);
            (x.rejection_rate - y.rejection_rate).abs() < 4.0 * se
        })
        .count();
    assert!(close as f64 >= 0.95 * cells as f64, "{close} of {cells} cells agree");
}
