//! Marginal ranks and the relative-rank profile of a lagged pair.
//!
//! All ranks are 1-based. Ties are broken by original position (the earlier
//! observation gets the smaller rank) and reported through `tie_flag`.

use crate::error::{Result, WnError};
use crate::panel::LagPairSample;

/// Ranks of a sequence plus a flag recording whether ties had to be broken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub ranks: Vec<usize>,
    pub tie_flag: bool,
}

/// The marginal ranks of both halves of a pair and the relative ranks.
///
/// `r[s - 1]` is the y-rank of the point whose x-rank is `s`, i.e.
/// `r[qx[t] - 1] == qy[t]` for every `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub qx: Vec<usize>,
    pub qy: Vec<usize>,
    pub r: Vec<usize>,
    pub tie_flag: bool,
}

impl RankProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Builds a profile directly from relative ranks (x already sorted).
    pub fn from_relative(r: Vec<usize>) -> Result<Self> {
        check_permutation(&r)?;
        let qx = (1..=r.len()).collect();
        Ok(Self {
            qx,
            qy: r.clone(),
            r,
            tie_flag: false,
        })
    }
}

/// Ranks `values`, breaking ties by position.
pub fn ranks(values: &[f64]) -> Result<Ranking> {
    if values.is_empty() {
        return Err(WnError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(WnError::InvalidInput("non-finite value".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Stable sort keeps equal values in position order.
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; values.len()];
    let mut tie_flag = false;
    for (pos, &idx) in order.iter().enumerate() {
        out[idx] = pos + 1;
        if pos > 0 && values[order[pos - 1]] == values[idx] {
            tie_flag = true;
        }
    }
    Ok(Ranking { ranks: out, tie_flag })
}

/// Composes marginal ranks into relative ranks.
pub(crate) fn compose_relative(qx: &[usize], qy: &[usize], r: &mut Vec<usize>) {
    r.clear();
    r.resize(qx.len(), 0);
    for (&sx, &sy) in qx.iter().zip(qy) {
        r[sx - 1] = sy;
    }
}

pub fn relative_ranks(pair: &LagPairSample) -> Result<RankProfile> {
    let x = ranks(&pair.x)?;
    let y = ranks(&pair.y)?;
    if x.ranks.len() != y.ranks.len() {
        return Err(WnError::InvalidInput("x and y differ in length".into()));
    }
    let mut r = Vec::new();
    compose_relative(&x.ranks, &y.ranks, &mut r);
    Ok(RankProfile {
        qx: x.ranks,
        qy: y.ranks,
        r,
        tie_flag: x.tie_flag || y.tie_flag,
    })
}

pub(crate) fn check_permutation(r: &[usize]) -> Result<()> {
    let mut seen = vec![false; r.len()];
    for &v in r {
        if v == 0 || v > r.len() || std::mem::replace(&mut seen[v - 1], true) {
            return Err(WnError::InvalidInput(
                "relative ranks are not a permutation of 1..m".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n²) counting oracle: rank = 1 + #smaller + #equal-and-earlier.
    fn naive_ranks(v: &[f64]) -> Vec<usize> {
        (0..v.len())
            .map(|i| 1 + (0..v.len()).filter(|&j| v[j] < v[i] || (v[j] == v[i] && j < i)).count())
            .collect()
    }

    #[test]
    fn ranks_small_examples() {
        let r = ranks(&[3.1, 1.2, 2.5]).unwrap();
        assert_eq!(r.ranks, vec![3, 1, 2]);
        assert!(!r.tie_flag);

        let r = ranks(&[5.0, 5.0, 1.0]).unwrap();
        assert_eq!(r.ranks, vec![2, 3, 1]);
        assert!(r.tie_flag);
    }

    #[test]
    fn ranks_match_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let r = ranks(&v).unwrap();
        assert_eq!(r.ranks, naive_ranks(&v));
        let mut sorted = r.ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=50).collect::<Vec<_>>());

        // With heavy ties the stable policy still agrees with the oracle.
        let v: Vec<f64> = (0..60).map(|_| rng.random_range(0..5) as f64).collect();
        assert_eq!(ranks(&v).unwrap().ranks, naive_ranks(&v));
    }

    #[test]
    fn ranks_reject_bad_input() {
        assert!(matches!(ranks(&[1.0, f64::INFINITY]), Err(WnError::InvalidInput(_))));
        assert_eq!(ranks(&[]), Err(WnError::EmptyInput));
    }

    #[test]
    fn relative_ranks_monotone_pairs() {
        let up = LagPairSample::from_xy(vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]).unwrap();
        assert_eq!(relative_ranks(&up).unwrap().r, vec![1, 2, 3]);
        let down = LagPairSample::from_xy(vec![1.0, 2.0, 3.0], vec![30.0, 20.0, 10.0]).unwrap();
        assert_eq!(relative_ranks(&down).unwrap().r, vec![3, 2, 1]);
    }

    #[test]
    fn relative_ranks_satisfy_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let prof = relative_ranks(&LagPairSample::from_xy(x, y).unwrap()).unwrap();
        for t in 0..20 {
            assert_eq!(prof.r[prof.qx[t] - 1], prof.qy[t]);
        }
        check_permutation(&prof.r).unwrap();
    }

    #[test]
    fn relative_ranks_uniform_under_shuffle() {
        // Chi-square goodness of fit over the 24 permutations of m = 4.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let x = vec![0.3, -1.2, 2.2, 0.9];
        let mut y = vec![5.0, 6.0, 7.0, 8.0];
        let draws = 100_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            y.shuffle(&mut rng);
            let pair = LagPairSample::from_xy(x.clone(), y.clone()).unwrap();
            *counts.entry(relative_ranks(&pair).unwrap().r).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = draws as f64 / 24.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 23 degrees of freedom.
        assert!(chi2 < 49.73, "chi2 = {chi2}");
    }

    proptest! {
        #[test]
        fn ranks_invariant_under_increasing_maps(v in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let base = ranks(&v).unwrap();
            let mapped: Vec<f64> = v.iter().map(|&a| (a / 100.0).exp() * 3.0 + 1.0).collect();
            let cubed: Vec<f64> = v.iter().map(|&a| a * a * a).collect();
            if !base.tie_flag {
                prop_assert_eq!(&ranks(&mapped).unwrap().ranks, &base.ranks);
                prop_assert_eq!(&ranks(&cubed).unwrap().ranks, &base.ranks);
            }
        }

        #[test]
        fn increasing_link_gives_identity(v in prop::collection::hash_set(-10_000i32..10_000, 2..40)) {
            let x: Vec<f64> = v.into_iter().map(f64::from).collect();
            let y: Vec<f64> = x.iter().map(|&a| (a / 5000.0).exp() - 7.0).collect();
            let prof = relative_ranks(&LagPairSample::from_xy(x.clone(), y).unwrap()).unwrap();
            prop_assert_eq!(prof.r, (1..=x.len()).collect::<Vec<_>>());
        }
    }
}
