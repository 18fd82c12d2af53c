use std::fmt;
use std::sync::Arc;

use super::{require_len, CorrValue, Method};
use crate::error::{Result, WnError};
use crate::rank::RankProfile;

type ScoreFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const GRID: usize = 1024;

/// Regression score `f` and rank score `g` of a simple linear rank statistic.
#[derive(Clone)]
pub struct ScorePair {
    f: ScoreFn,
    g: ScoreFn,
    pub lipschitz_bound: f64,
}

impl fmt::Debug for ScorePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScorePair")
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish_non_exhaustive()
    }
}

impl ScorePair {
    /// Checks that both functions are finite on a 1024-point grid of (0, 1).
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz_bound: f64,
    ) -> Result<Self> {
        for t in 1..=GRID {
            let u = t as f64 / (GRID + 1) as f64;
            if !f(u).is_finite() || !g(u).is_finite() {
                return Err(WnError::InvalidScore(format!("non-finite score at u = {u}")));
            }
        }
        if !(lipschitz_bound.is_finite() && lipschitz_bound >= 0.0) {
            return Err(WnError::InvalidScore("Lipschitz bound must be finite and >= 0".into()));
        }
        Ok(Self {
            f: Arc::new(f),
            g: Arc::new(g),
            lipschitz_bound,
        })
    }

    /// `f(u) = g(u) = u - 1/2`, the member giving Spearman's ρ.
    pub fn spearman() -> Self {
        Self::new(|u| u - 0.5, |u| u - 0.5, 1.0).expect("linear scores are finite")
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn g(&self, u: f64) -> f64 {
        (self.g)(u)
    }

    /// Precomputes the regression constants and rank scores for length `m`.
    pub fn tabulate(&self, m: usize) -> Result<SlrTable> {
        require_len(m, 3)?;
        let denom = (m + 1) as f64;
        let c: Vec<f64> = (1..=m).map(|t| self.f(t as f64 / denom) / m as f64).collect();
        let a: Vec<f64> = (1..=m).map(|s| self.g(s as f64 / denom)).collect();
        if c.iter().chain(&a).any(|v| !v.is_finite()) {
            return Err(WnError::InvalidScore(format!("non-finite score at m = {m}")));
        }
        let mf = m as f64;
        let c_sum: f64 = c.iter().sum();
        let c_bar = c_sum / mf;
        let a_bar = a.iter().sum::<f64>() / mf;
        let ss_c: f64 = c.iter().map(|v| (v - c_bar).powi(2)).sum();
        let ss_a: f64 = a.iter().map(|v| (v - a_bar).powi(2)).sum();
        let mean = mf.sqrt() * a_bar * c_sum;
        let var = mf / (mf - 1.0) * ss_a * ss_c;
        if var.is_nan() || var <= 0.0 {
            return Err(WnError::InvalidScore(
                "scores have zero null variance at this length".into(),
            ));
        }
        Ok(SlrTable { c, a, mean, var })
    }
}

/// Scores tabulated for one sample length.
#[derive(Debug, Clone)]
pub struct SlrTable {
    c: Vec<f64>,
    a: Vec<f64>,
    pub mean: f64,
    pub var: f64,
}

impl SlrTable {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `√m Σ_t c_t g(r_t / (m + 1))`.
    pub fn evaluate(&self, r: &[usize]) -> Result<CorrValue> {
        let m = self.c.len();
        if r.len() != m {
            return Err(WnError::InvalidInput(format!(
                "score table has length {m}, ranks have length {}",
                r.len()
            )));
        }
        let s: f64 = self.c.iter().zip(r).map(|(c, &rt)| c * self.a[rt - 1]).sum();
        Ok(CorrValue {
            method: Method::GenericSlr,
            value: (m as f64).sqrt() * s,
            m,
            null_mean: self.mean,
            null_var: self.var,
        })
    }
}

/// Simple linear rank statistic with exact permutation null moments.
pub fn simple_linear_rank(profile: &RankProfile, scores: &ScorePair) -> Result<CorrValue> {
    scores.tabulate(profile.len())?.evaluate(&profile.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::spearman_rho_ranks;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn profile(r: Vec<usize>) -> RankProfile {
        RankProfile::from_relative(r).unwrap()
    }

    #[test]
    fn spearman_member_standardizes_to_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let scores = ScorePair::spearman();
        for _ in 0..100 {
            let m = 10 + rand::Rng::random_range(&mut rng, 0..40);
            let mut r: Vec<usize> = (1..=m).collect();
            r.shuffle(&mut rng);
            let v = simple_linear_rank(&profile(r.clone()), &scores).unwrap();
            let z = (v.value - v.null_mean) / v.null_var.sqrt();
            let rho = spearman_rho_ranks(&r).unwrap();
            let z_rho = rho.value / rho.null_var.sqrt();
            assert!((z - z_rho).abs() < 1e-10, "{z} vs {z_rho}");
        }
    }

    #[test]
    fn constant_rank_score_rejected() {
        let scores = ScorePair::new(|u| u, |_| 1.0, 1.0).unwrap();
        let err = simple_linear_rank(&profile((1..=10).collect()), &scores).unwrap_err();
        assert!(matches!(err, WnError::InvalidScore(_)));
    }

    #[test]
    fn non_finite_scores_rejected() {
        assert!(matches!(
            ScorePair::new(|u| u, |u| (u - 0.25).sqrt(), 1.0),
            Err(WnError::InvalidScore(_))
        ));
    }

    #[test]
    fn null_variance_matches_permutation_draws() {
        let scores = ScorePair::new(|u| u * u, |u| (3.0 * u).sin(), 3.0).unwrap();
        let table = scores.tabulate(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut r: Vec<usize> = (1..=12).collect();
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                r.shuffle(&mut rng);
                table.evaluate(&r).unwrap().value
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / table.var - 1.0).abs() < 0.03, "{var} vs {}", table.var);
        assert!((mean - table.mean).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
