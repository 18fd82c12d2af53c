//! Literal U-statistic kernels and a brute-force U-statistic evaluator.
//!
//! These are slow by design: they exist to define the statistics and to
//! check the fast rank-counting paths against.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Result, WnError};
use crate::panel::LagPairSample;

/// Largest number of kernel argument tuples the oracle will visit.
pub const ORACLE_BUDGET: u128 = 100_000_000;

type Evaluator = Arc<dyn Fn(&[(f64, f64)]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KernelId {
    HoeffdingD,
    BkrR,
    TauStar,
    Custom(String),
}

/// A kernel of a given order acting on points of the plane.
#[derive(Clone)]
pub struct KernelSpec {
    pub id: KernelId,
    pub order: usize,
    /// Whether the evaluator is invariant under permutations of its arguments.
    /// Symmetric kernels are averaged over subsets, others over ordered tuples.
    pub symmetric: bool,
    evaluator: Evaluator,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("id", &self.id)
            .field("order", &self.order)
            .field("symmetric", &self.symmetric)
            .finish_non_exhaustive()
    }
}

impl KernelSpec {
    pub fn custom(
        name: impl Into<String>,
        order: usize,
        symmetric: bool,
        evaluator: impl Fn(&[(f64, f64)]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if order == 0 {
            return Err(WnError::InvalidInput("kernel order must be positive".into()));
        }
        Ok(Self {
            id: KernelId::Custom(name.into()),
            order,
            symmetric,
            evaluator: Arc::new(evaluator),
        })
    }

    pub fn hoeffding_d() -> Self {
        Self {
            id: KernelId::HoeffdingD,
            order: 5,
            symmetric: true,
            evaluator: Arc::new(h_d),
        }
    }

    pub fn bkr_r() -> Self {
        Self {
            id: KernelId::BkrR,
            order: 6,
            symmetric: true,
            evaluator: Arc::new(h_r),
        }
    }

    pub fn tau_star() -> Self {
        Self {
            id: KernelId::TauStar,
            order: 4,
            symmetric: true,
            evaluator: Arc::new(h_tau_star),
        }
    }

    pub fn eval(&self, points: &[(f64, f64)]) -> f64 {
        debug_assert_eq!(points.len(), self.order);
        (self.evaluator)(points)
    }

    /// Compares the kernel on `trials` random argument sets against a random
    /// reordering of the same arguments.
    pub fn looks_symmetric<R: Rng>(&self, rng: &mut R, trials: usize) -> bool {
        let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0); self.order];
        for _ in 0..trials {
            for p in pts.iter_mut() {
                *p = (rng.random(), rng.random());
            }
            let base = self.eval(&pts);
            pts.shuffle(rng);
            if (self.eval(&pts) - base).abs() > 1e-12 {
                return false;
            }
        }
        true
    }
}

fn perms(order: usize) -> &'static [Vec<usize>] {
    static CACHE: [OnceLock<Vec<Vec<usize>>>; 7] = [const { OnceLock::new() }; 7];
    CACHE[order].get_or_init(|| {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..order).collect();
        permute(&mut cur, 0, &mut out);
        out
    })
}

fn permute(cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in start..cur.len() {
        cur.swap(start, i);
        permute(cur, start + 1, out);
        cur.swap(start, i);
    }
}

fn ind(b: bool) -> i32 {
    i32::from(b)
}

/// `[I(a ≤ e) - I(b ≤ e)][I(c ≤ e) - I(d ≤ e)]`.
fn split(a: f64, b: f64, c: f64, d: f64, e: f64) -> i32 {
    (ind(a <= e) - ind(b <= e)) * (ind(c <= e) - ind(d <= e))
}

fn h_d(z: &[(f64, f64)]) -> f64 {
    let mut s = 0;
    for p in perms(5) {
        let [a, b, c, d, e] = [z[p[0]], z[p[1]], z[p[2]], z[p[3]], z[p[4]]];
        s += split(a.0, b.0, c.0, d.0, e.0) * split(a.1, b.1, c.1, d.1, e.1);
    }
    s as f64 / 16.0
}

fn h_r(z: &[(f64, f64)]) -> f64 {
    let mut s = 0;
    for p in perms(6) {
        let [a, b, c, d, e, f] = [z[p[0]], z[p[1]], z[p[2]], z[p[3]], z[p[4]], z[p[5]]];
        s += split(a.0, b.0, c.0, d.0, e.0) * split(a.1, b.1, c.1, d.1, f.1);
    }
    s as f64 / 32.0
}

/// `I(y1, y2 < y3, y4)`.
fn below(y1: f64, y2: f64, y3: f64, y4: f64) -> i32 {
    ind(y1 < y3 && y1 < y4 && y2 < y3 && y2 < y4)
}

fn tau_star_sign(v: [f64; 4]) -> i32 {
    below(v[0], v[2], v[1], v[3]) + below(v[1], v[3], v[0], v[2])
        - below(v[0], v[3], v[1], v[2])
        - below(v[1], v[2], v[0], v[3])
}

fn h_tau_star(z: &[(f64, f64)]) -> f64 {
    let mut s = 0;
    for p in perms(4) {
        let q = [z[p[0]], z[p[1]], z[p[2]], z[p[3]]];
        s += tau_star_sign(q.map(|t| t.0)) * tau_star_sign(q.map(|t| t.1));
    }
    s as f64 / 16.0
}

fn count(m: usize, order: usize, ordered: bool) -> u128 {
    let mut c: u128 = 1;
    for i in 0..order as u128 {
        c = c * (m as u128 - i) / if ordered { 1 } else { i + 1 };
    }
    c
}

/// Exact U-statistic by complete enumeration.
///
/// Symmetric kernels are averaged over all `C(m, order)` subsets, others over
/// all ordered tuples of distinct indices.
pub fn u_stat_oracle(kernel: &KernelSpec, pair: &LagPairSample) -> Result<f64> {
    let m = pair.len();
    let r = kernel.order;
    if m < r {
        return Err(WnError::TooShort { needed: r, got: m });
    }
    let evaluations = count(m, r, true);
    if evaluations > ORACLE_BUDGET {
        return Err(WnError::TooLarge {
            evaluations,
            limit: ORACLE_BUDGET,
        });
    }
    let points: Vec<(f64, f64)> = pair.x.iter().copied().zip(pair.y.iter().copied()).collect();
    let mut idx: Vec<usize> = (0..r).collect();
    let mut args = vec![(0.0, 0.0); r];
    let mut total = 0.0;
    let mut visited: u128 = 0;
    loop {
        if kernel.symmetric {
            for (a, &i) in args.iter_mut().zip(&idx) {
                *a = points[i];
            }
            total += kernel.eval(&args);
            visited += 1;
        } else {
            for p in &perms_any(r) {
                for (a, &pi) in args.iter_mut().zip(p) {
                    *a = points[idx[pi]];
                }
                total += kernel.eval(&args);
                visited += 1;
            }
        }
        // Next combination in lexicographic order.
        let mut pos = r;
        while pos > 0 && idx[pos - 1] == m - r + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for q in pos..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(total / visited as f64)
}

fn perms_any(order: usize) -> Vec<Vec<usize>> {
    if order < 7 {
        return perms(order).to_vec();
    }
    let mut out = Vec::new();
    permute(&mut (0..order).collect(), 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, m: usize) -> LagPairSample {
        let x = (0..m).map(|_| rng.random::<f64>()).collect();
        let y = (0..m).map(|_| rng.random::<f64>()).collect();
        LagPairSample::from_xy(x, y).unwrap()
    }

    /// Hoeffding's D kernel through five nested index loops over distinct
    /// ordered indices, without any permutation table.
    fn nested_d(pair: &LagPairSample) -> f64 {
        let (x, y) = (&pair.x, &pair.y);
        let m = x.len();
        let phi = |v: &[f64], a: usize, b: usize, c: usize, d: usize, e: usize| {
            let le = |s: usize| if v[s] <= v[e] { 1.0 } else { 0.0 };
            (le(a) - le(b)) * (le(c) - le(d))
        };
        let mut s = 0.0;
        let mut cnt = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        for e in 0..m {
                            let ids = [a, b, c, d, e];
                            let distinct = (0..5).all(|i| (i + 1..5).all(|j| ids[i] != ids[j]));
                            if distinct {
                                s += phi(x, a, b, c, d, e) * phi(y, a, b, c, d, e);
                                cnt += 1.0;
                            }
                        }
                    }
                }
            }
        }
        // h_D averages 120 orderings with weight 1/16.
        s / cnt * 120.0 / 16.0
    }

    #[test]
    fn constant_kernel() {
        let k = KernelSpec::custom("const", 3, true, |_| 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(u_stat_oracle(&k, &random_pair(&mut rng, 9)).unwrap(), 0.25);
    }

    #[test]
    fn kendall_kernel_comonotone() {
        let k = KernelSpec::custom("kendall", 2, true, |z| {
            (z[0].0 - z[1].0).signum() * (z[0].1 - z[1].1).signum()
        })
        .unwrap();
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let pair = LagPairSample::from_xy(x.clone(), x.iter().map(|v| v * 3.0).collect()).unwrap();
        assert_eq!(u_stat_oracle(&k, &pair).unwrap(), 1.0);
    }

    #[test]
    fn hoeffding_matches_nested_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let pair = random_pair(&mut rng, 7);
        let a = u_stat_oracle(&KernelSpec::hoeffding_d(), &pair).unwrap();
        assert!((a - nested_d(&pair)).abs() < 1e-12);
    }

    #[test]
    fn builtin_kernels_bounded_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [KernelSpec::hoeffding_d(), KernelSpec::bkr_r(), KernelSpec::tau_star()] {
            assert!(k.looks_symmetric(&mut rng, 20));
            for _ in 0..50 {
                let pts: Vec<(f64, f64)> = (0..k.order).map(|_| (rng.random(), rng.random())).collect();
                assert!(k.eval(&pts).abs() <= 1.0);
            }
        }
        let asym = KernelSpec::custom("first", 2, false, |z| z[0].0).unwrap();
        assert!(!asym.looks_symmetric(&mut rng, 20));
    }

    #[test]
    fn non_symmetric_kernel_averages_ordered_tuples() {
        let k = KernelSpec::custom("first", 2, false, |z| z[0].0).unwrap();
        let pair = LagPairSample::from_xy(vec![1.0, 2.0, 6.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!((u_stat_oracle(&k, &pair).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn budget_guard() {
        let x: Vec<f64> = (0..60).map(f64::from).collect();
        let pair = LagPairSample::from_xy(x.clone(), x).unwrap();
        assert!(matches!(
            u_stat_oracle(&KernelSpec::bkr_r(), &pair),
            Err(WnError::TooLarge { .. })
        ));
    }
}
