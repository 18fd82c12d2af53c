//! Top-L statistics calibrated by permuting the time index.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr::Method;
use crate::error::{Result, WnError};
use crate::panel::SeriesPanel;
use crate::scan::{scan_with_cache, Calibration, LagRankCache, PairScan, ScanStatistic, TestOutcome};

/// Smallest permutation count accepted.
pub const MIN_PERMS: usize = 100;
pub const DEFAULT_PERMS: usize = 500;
pub const DEFAULT_L_GRID: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LStatConfig {
    pub l: usize,
    pub method: Method,
    pub perms: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for LStatConfig {
    fn default() -> Self {
        Self {
            l: 1,
            method: Method::TauStar,
            perms: DEFAULT_PERMS,
            alpha: 0.05,
            seed: 0,
        }
    }
}

fn check(perms: usize, alpha: f64, ls: &[usize], n_cells: usize) -> Result<()> {
    if perms < MIN_PERMS {
        return Err(WnError::Config(format!(
            "at least {MIN_PERMS} permutations are required, got {perms}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(WnError::InvalidAlpha(alpha));
    }
    if ls.is_empty() {
        return Err(WnError::Config("no L values requested".into()));
    }
    for &l in ls {
        if l == 0 || l > n_cells {
            return Err(WnError::InvalidL { got: l, max: n_cells });
        }
    }
    Ok(())
}

/// Sums of the `ls[q]` largest values, for every requested `L`.
fn top_sums(mut values: Vec<f64>, ls: &[usize]) -> Vec<f64> {
    let l_max = *ls.iter().max().expect("non-empty L list");
    let desc = |a: &f64, b: &f64| b.total_cmp(a);
    if l_max < values.len() {
        values.select_nth_unstable_by(l_max - 1, desc);
        values.truncate(l_max);
    }
    values.sort_unstable_by(desc);
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for v in &values {
        acc += v;
        prefix.push(acc);
    }
    ls.iter().map(|&l| prefix[l - 1]).collect()
}

/// Sum of the `l` largest absolute standardized cells.
pub fn l_statistic(scan: &PairScan, l: usize) -> Result<f64> {
    if l == 0 || l > scan.n_cells() {
        return Err(WnError::InvalidL {
            got: l,
            max: scan.n_cells(),
        });
    }
    Ok(top_sums(scan.abs_standardized(), &[l])[0])
}

/// Reorders the rows by a uniformly random permutation; columns move together.
pub fn permute_panel<R: Rng + ?Sized>(panel: &SeriesPanel, rng: &mut R) -> SeriesPanel {
    let mut order: Vec<usize> = (0..panel.n()).collect();
    order.shuffle(rng);
    panel
        .reorder_rows(&order)
        .expect("a shuffled index vector is a permutation")
}

/// Random stream of permutation replicate `b` under `seed`.
pub fn replicate_rng(seed: u64, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64);
    rng
}

/// The `⌈(1 - α) B⌉`-th smallest permuted statistic.
fn critical_value(mut permuted: Vec<f64>, alpha: f64) -> f64 {
    permuted.sort_unstable_by(f64::total_cmp);
    let b = permuted.len();
    let rank = (((1.0 - alpha) * b as f64).ceil() as usize).clamp(1, b);
    permuted[rank - 1]
}

/// Permutation tests of one statistic for several `L` sharing the same
/// permuted panels. Outcomes follow the order of `ls`.
pub fn permutation_test_multi(
    panel: &SeriesPanel,
    stat: &ScanStatistic,
    k_max: usize,
    ls: &[usize],
    perms: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<TestOutcome>> {
    let observed = scan_with_cache(&LagRankCache::new(panel, k_max)?, stat)?;
    check(perms, alpha, ls, observed.n_cells())?;
    let obs = top_sums(observed.abs_standardized(), ls);

    let permuted: Vec<Vec<f64>> = (0..perms)
        .into_par_iter()
        .map(|b| {
            let shuffled = permute_panel(panel, &mut replicate_rng(seed, b));
            let scan = scan_with_cache(&LagRankCache::new(&shuffled, k_max)?, stat)?;
            Ok(top_sums(scan.abs_standardized(), ls))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let (idx, max_cell) = observed.argmax();
    let (i, j, k) = observed.cell(idx);
    Ok(ls
        .iter()
        .enumerate()
        .map(|(q, &l)| {
            let column: Vec<f64> = permuted.iter().map(|row| row[q]).collect();
            let exceed = column.iter().filter(|&&v| v >= obs[q]).count();
            let threshold = critical_value(column, alpha);
            TestOutcome {
                method: observed.method,
                calibration: Calibration::Permutation { perms, l },
                statistic: obs[q],
                threshold,
                p_value: (1 + exceed) as f64 / (perms + 1) as f64,
                reject: obs[q] >= threshold,
                argmax: (i + 1, j + 1, k),
                max_cell,
                alpha,
                n_cells: observed.n_cells(),
                tie_flag: observed.tie_flag,
            }
        })
        .collect())
}

pub fn permutation_test(panel: &SeriesPanel, config: &LStatConfig, k_max: usize) -> Result<TestOutcome> {
    let stat = ScanStatistic::Builtin(config.method);
    let mut out = permutation_test_multi(
        panel,
        &stat,
        k_max,
        &[config.l],
        config.perms,
        config.alpha,
        config.seed,
    )?;
    Ok(out.remove(0))
}
