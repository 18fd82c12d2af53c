//! Evaluation of one statistic over every lagged pair `(i, j, k)` and the
//! max-type test built on the resulting scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr::{
    binom, bkr_r_value, chatterjee_xi_ranks, hoeffding_d_value, kendall_tau_value, spearman_rho_ranks, tau_star_value,
    DegenerateKind, Method, ScorePair, SlrTable,
};
use crate::error::{Result, WnError};
use crate::gumbel::{gumbel_quantile, p_value, GumbelLaw};
use crate::panel::{SeriesPanel, MIN_PAIR_LEN};

/// Marginal rank information of every lagged segment of a panel.
///
/// For lag `k` and column `c`, `order` lists the time indices of the first
/// `n - k` values in increasing order and `suffix_ranks` holds the 1-based
/// ranks of the last `n - k` values. Relative ranks of the pair `(i, j, k)`
/// are then `r[s] = suffix_ranks(j)[order(i)[s]]`.
#[derive(Debug, Clone)]
pub struct LagRankCache {
    n: usize,
    p: usize,
    k_max: usize,
    order: Vec<Vec<u32>>,
    suffix_ranks: Vec<Vec<u32>>,
    tie_flag: bool,
}

fn argsort(values: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    // Stable, so ties fall back to time order as in `rank::ranks`.
    idx.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]));
    idx
}

impl LagRankCache {
    pub fn new(panel: &SeriesPanel, k_max: usize) -> Result<Self> {
        let (n, p) = (panel.n(), panel.p());
        if k_max == 0 {
            return Err(WnError::Config("the maximum lag K must be at least 1".into()));
        }
        if k_max >= n || n - k_max < MIN_PAIR_LEN {
            return Err(WnError::TooShort {
                needed: k_max + MIN_PAIR_LEN,
                got: n,
            });
        }
        let slots: Vec<(Vec<u32>, Vec<u32>)> = (0..k_max * p)
            .into_par_iter()
            .map(|slot| {
                let (k, c) = (slot / p + 1, slot % p);
                let col = panel.column(c);
                let m = n - k;
                let order = argsort(&col[..m]);
                let mut ranks = vec![0u32; m];
                for (pos, &t) in argsort(&col[k..]).iter().enumerate() {
                    ranks[t as usize] = pos as u32 + 1;
                }
                (order, ranks)
            })
            .collect();
        let (order, suffix_ranks) = slots.into_iter().unzip();
        Ok(Self {
            n,
            p,
            k_max,
            order,
            suffix_ranks,
            tie_flag: panel.has_ties(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn tie_flag(&self) -> bool {
        self.tie_flag
    }

    /// Writes the relative ranks of pair `(i, j, k)` into `r` (columns 0-based).
    pub fn relative_ranks_into(&self, i: usize, j: usize, k: usize, r: &mut Vec<usize>) {
        let order = &self.order[(k - 1) * self.p + i];
        let ranks = &self.suffix_ranks[(k - 1) * self.p + j];
        r.clear();
        r.extend(order.iter().map(|&t| ranks[t as usize] as usize));
    }
}

/// The statistic a scan evaluates.
#[derive(Debug, Clone)]
pub enum ScanStatistic {
    Builtin(Method),
    Slr(ScorePair),
}

impl ScanStatistic {
    pub fn method(&self) -> Method {
        match self {
            ScanStatistic::Builtin(m) => *m,
            ScanStatistic::Slr(_) => Method::GenericSlr,
        }
    }
}

impl From<Method> for ScanStatistic {
    fn from(m: Method) -> Self {
        ScanStatistic::Builtin(m)
    }
}

/// Cell values of one statistic over all `(i, j, k)`.
///
/// Cells hold the form the max test consumes: a squared standardized value
/// for the Spearman, Kendall, Chatterjee and generic statistics, or the
/// scaled raw value for the degenerate ones (which may be negative).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub k_max: usize,
    /// Cell `(i, j, k)` (0-based columns, 1-based lag) sits at
    /// `(i * p + j) * k_max + k - 1`, so storage order is lexicographic.
    pub values: Vec<f64>,
    pub tie_flag: bool,
}

impl PairScan {
    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.p + j) * self.k_max + k - 1
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// 0-based columns and 1-based lag of a storage index.
    pub fn cell(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.k_max + 1;
        let ij = idx / self.k_max;
        (ij / self.p, ij % self.p, k)
    }

    /// Whether cells hold squares of standardized values.
    pub fn squared(&self) -> bool {
        !self.method.is_degenerate()
    }

    /// Absolute standardized values: square roots of the squared forms,
    /// absolute values of the degenerate forms.
    pub fn abs_standardized(&self) -> Vec<f64> {
        if self.squared() {
            self.values.iter().map(|v| v.sqrt()).collect()
        } else {
            self.values.iter().map(|v| v.abs()).collect()
        }
    }

    /// Largest cell and its storage index; ties go to the smallest index.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (0, self.values[0]);
        for (idx, &v) in self.values.iter().enumerate().skip(1) {
            if v > best.1 {
                best = (idx, v);
            }
        }
        best
    }
}

#[derive(Default)]
struct Scratch {
    r: Vec<usize>,
    table: Vec<u32>,
}

/// Cell transform for one lag, fixed per statistic and aligned length.
enum CellForm {
    /// `m ρ²`.
    Spearman { m: f64 },
    /// `τ² / var τ`.
    Kendall { inv_var: f64 },
    /// `5 (m + 1) / 2 · ξ²`.
    Chatterjee { scale: f64 },
    /// `(m - 1) / (λ₁ C(order, 2)) · Û`.
    Degenerate { kind: DegenerateKind, scale: f64 },
    /// `((V - E V) / sd V)²`.
    Slr(SlrTable),
}

impl CellForm {
    fn new(stat: &ScanStatistic, m: usize) -> Result<Self> {
        let mf = m as f64;
        Ok(match stat {
            ScanStatistic::Slr(scores) => CellForm::Slr(scores.tabulate(m)?),
            ScanStatistic::Builtin(method) => match *method {
                Method::SpearmanRho => CellForm::Spearman { m: mf },
                Method::KendallTau => CellForm::Kendall {
                    inv_var: 9.0 * mf * (mf - 1.0) / (2.0 * (2.0 * mf + 5.0)),
                },
                Method::ChatterjeeXi => CellForm::Chatterjee {
                    scale: 5.0 * (mf + 1.0) / 2.0,
                },
                Method::HoeffdingD | Method::BkrR | Method::TauStar => {
                    let kind = method.degenerate_kind().expect("degenerate method");
                    CellForm::Degenerate {
                        kind,
                        scale: (mf - 1.0) / (kind.lambda1() * binom(kind.order(), 2)),
                    }
                }
                Method::GenericSlr => {
                    return Err(WnError::Config(
                        "the generic simple linear rank scan needs a score pair".into(),
                    ))
                }
            },
        })
    }

    fn eval(&self, r: &[usize], sc: &mut Scratch) -> Result<f64> {
        Ok(match self {
            CellForm::Spearman { m } => {
                let rho = spearman_rho_ranks(r)?.value;
                m * rho * rho
            }
            CellForm::Kendall { inv_var } => {
                let tau = kendall_tau_value(r, &mut sc.table);
                inv_var * tau * tau
            }
            CellForm::Chatterjee { scale } => {
                let xi = chatterjee_xi_ranks(r)?.value;
                scale * xi * xi
            }
            CellForm::Degenerate { kind, scale } => {
                let u = match kind {
                    DegenerateKind::HoeffdingD => hoeffding_d_value(r, &mut sc.table),
                    DegenerateKind::BkrR => bkr_r_value(r, &mut sc.table),
                    DegenerateKind::TauStar => tau_star_value(r, &mut sc.table),
                };
                scale * u
            }
            CellForm::Slr(table) => {
                let v = table.evaluate(r)?;
                let z = v.standardized();
                z * z
            }
        })
    }
}

/// Evaluates `stat` on every pair `(i, j, k)`, `1 ≤ k ≤ K`, including `i == j`.
pub fn scan_with_cache(cache: &LagRankCache, stat: &ScanStatistic) -> Result<PairScan> {
    let method = stat.method();
    let (n, p, k_max) = (cache.n, cache.p, cache.k_max);
    let min_len = method.min_len().max(MIN_PAIR_LEN);
    if n - k_max < min_len {
        return Err(WnError::TooShort {
            needed: k_max + min_len,
            got: n,
        });
    }
    let forms: Vec<CellForm> = (1..=k_max).map(|k| CellForm::new(stat, n - k)).collect::<Result<_>>()?;
    let n_cells = p * p * k_max;
    let results: Vec<Result<f64>> = (0..n_cells)
        .into_par_iter()
        .map_init(Scratch::default, |sc, idx| {
            let k = idx % k_max + 1;
            let ij = idx / k_max;
            let (i, j) = (ij / p, ij % p);
            let mut r = std::mem::take(&mut sc.r);
            cache.relative_ranks_into(i, j, k, &mut r);
            let out = forms[k - 1].eval(&r, sc).and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(WnError::InvalidInput("non-finite cell value".into()))
                }
            });
            sc.r = r;
            out.map_err(|e| WnError::Pair {
                i: i + 1,
                j: j + 1,
                k,
                source: Box::new(e),
            })
        })
        .collect();
    let values = results.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(PairScan {
        method,
        n,
        p,
        k_max,
        values,
        tie_flag: cache.tie_flag,
    })
}

pub fn pair_scan(panel: &SeriesPanel, k_max: usize, method: Method) -> Result<PairScan> {
    scan_with_cache(&LagRankCache::new(panel, k_max)?, &ScanStatistic::Builtin(method))
}

pub fn pair_scan_slr(panel: &SeriesPanel, k_max: usize, scores: &ScorePair) -> Result<PairScan> {
    scan_with_cache(&LagRankCache::new(panel, k_max)?, &ScanStatistic::Slr(scores.clone()))
}

/// How a test's critical value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Calibration {
    Gumbel,
    Permutation { perms: usize, l: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub method: Method,
    pub calibration: Calibration,
    /// Centered maximum for Gumbel calibration, the L-statistic otherwise.
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: f64,
    pub reject: bool,
    /// 1-based `(i, j, k)` of the largest cell.
    pub argmax: (usize, usize, usize),
    /// Uncentered largest cell.
    pub max_cell: f64,
    pub alpha: f64,
    pub n_cells: usize,
    pub tie_flag: bool,
}

/// Centers the largest cell: `max - 2 log N - (μ₁ - 2) log log N`, plus
/// `Λ/λ₁` for the degenerate statistics.
pub fn centered_max(scan: &PairScan) -> Result<(usize, f64, f64)> {
    let n_cells = scan.n_cells();
    if n_cells < 2 {
        return Err(WnError::Config(
            "the max test needs at least two cells (K p² ≥ 2)".into(),
        ));
    }
    let law = GumbelLaw::for_method(scan.method);
    let (idx, max) = scan.argmax();
    let big_n = n_cells as f64;
    let mut y = max - 2.0 * big_n.ln() - (law.mu1 as f64 - 2.0) * big_n.ln().ln();
    if scan.method.is_degenerate() {
        y += law.capital_lambda / law.lambda1;
    }
    Ok((idx, max, y))
}

/// The max-type test with its limiting Gumbel threshold and p-value.
pub fn max_test(scan: &PairScan, alpha: f64) -> Result<TestOutcome> {
    let law = GumbelLaw::for_method(scan.method);
    let threshold = gumbel_quantile(alpha, &law)?;
    let (idx, max, y) = centered_max(scan)?;
    let (i, j, k) = scan.cell(idx);
    Ok(TestOutcome {
        method: scan.method,
        calibration: Calibration::Gumbel,
        statistic: y,
        threshold,
        p_value: p_value(y, &law),
        reject: y >= threshold,
        argmax: (i + 1, j + 1, k),
        max_cell: max,
        alpha,
        n_cells: scan.n_cells(),
        tie_flag: scan.tie_flag,
    })
}
