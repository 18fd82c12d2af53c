use super::{require_len, CorrValue, Method};
use crate::error::Result;
use crate::panel::LagPairSample;

fn null_var(m: usize) -> f64 {
    let m = m as f64;
    2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0))
}

/// Counts pairs `a < b` with `v[a] > v[b]`, sorting `v` in place.
fn count_inversions<T: PartialOrd + Copy>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid], buf) + count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut a, mut b) = (0, mid);
    while a < mid && b < n {
        if v[b] < v[a] {
            inv += (mid - a) as u64;
            buf.push(v[b]);
            b += 1;
        } else {
            buf.push(v[a]);
            a += 1;
        }
    }
    buf.extend_from_slice(&v[a..mid]);
    buf.extend_from_slice(&v[b..n]);
    v.copy_from_slice(buf);
    inv
}

/// Kendall's τ from relative ranks by Fenwick-tree inversion counting.
pub fn kendall_tau_ranks(r: &[usize]) -> Result<CorrValue> {
    let m = r.len();
    require_len(m, 2)?;
    Ok(CorrValue {
        method: Method::KendallTau,
        value: kendall_tau_value(r, &mut Vec::new()),
        m,
        null_mean: 0.0,
        null_var: null_var(m),
    })
}

/// τ from relative ranks; `tree` is scratch space for a Fenwick tree.
pub(crate) fn kendall_tau_value(r: &[usize], tree: &mut Vec<u32>) -> f64 {
    let m = r.len();
    tree.clear();
    tree.resize(m + 1, 0);
    // Inversions: for each point, the earlier points with a larger y-rank.
    let mut inv: u64 = 0;
    for (pos, &y) in r.iter().enumerate() {
        let mut below = 0u32;
        let mut i = y;
        while i > 0 {
            below += tree[i];
            i &= i - 1;
        }
        inv += (pos as u32 - below) as u64;
        let mut i = y;
        while i <= m {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    let pairs = (m * (m - 1) / 2) as f64;
    (pairs - 2.0 * inv as f64) / pairs
}

/// Kendall's τ on the raw pair, with `sign(0) = 0` for tied coordinates.
///
/// Uses Knight's O(m log m) scheme: sort by `(x, y)`, then count the
/// discordant pairs as inversions of `y`, correcting for ties in `x`, in
/// `y` and in both.
pub fn kendall_tau(pair: &LagPairSample) -> Result<CorrValue> {
    let m = pair.len();
    require_len(m, 2)?;
    let (x, y) = (&pair.x, &pair.y);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let tied_pairs = |eq: &dyn Fn(usize, usize) -> bool| -> u64 {
        let mut total = 0u64;
        let mut run = 1u64;
        for w in order.windows(2) {
            if eq(w[0], w[1]) {
                run += 1;
            } else {
                total += run * (run - 1) / 2;
                run = 1;
            }
        }
        total + run * (run - 1) / 2
    };
    let x_ties = tied_pairs(&|a, b| x[a] == x[b]);
    let joint_ties = tied_pairs(&|a, b| x[a] == x[b] && y[a] == y[b]);

    let mut ys: Vec<f64> = order.iter().map(|&t| y[t]).collect();
    let discordant = count_inversions(&mut ys, &mut Vec::with_capacity(m));
    // `ys` is now sorted, so y-ties are adjacent runs.
    let mut y_ties = 0u64;
    let mut run = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            y_ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    y_ties += run * (run - 1) / 2;

    let pairs = (m * (m - 1) / 2) as u64;
    let score = pairs as i64 - x_ties as i64 - y_ties as i64 + joint_ties as i64 - 2 * discordant as i64;
    Ok(CorrValue {
        method: Method::KendallTau,
        value: score as f64 / pairs as f64,
        m,
        null_mean: 0.0,
        null_var: null_var(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::relative_ranks;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sign(v: f64) -> i64 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }

    /// O(m²) sign-sum straight from the definition.
    fn brute(x: &[f64], y: &[f64]) -> f64 {
        let m = x.len();
        let mut s = 0i64;
        for l in 0..m {
            for l2 in l + 1..m {
                s += sign(x[l2] - x[l]) * sign(y[l2] - y[l]);
            }
        }
        2.0 * s as f64 / (m * (m - 1)) as f64
    }

    #[test]
    fn monotone_pairs() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let up = LagPairSample::from_xy(x.clone(), x.iter().map(|v| v * 2.0).collect()).unwrap();
        let down = LagPairSample::from_xy(x.clone(), x.iter().map(|v| -v).collect()).unwrap();
        assert_eq!(kendall_tau(&up).unwrap().value, 1.0);
        assert_eq!(kendall_tau(&down).unwrap().value, -1.0);
    }

    #[test]
    fn null_variance_m10() {
        let v = kendall_tau_ranks(&(1..=10).collect::<Vec<_>>()).unwrap();
        assert!((v.null_var - 5.0 / 81.0).abs() < 1e-15);
    }

    #[test]
    fn fast_matches_sign_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let pair = LagPairSample::from_xy(x.clone(), y.clone()).unwrap();
        let expected = brute(&x, &y);
        assert_eq!(kendall_tau(&pair).unwrap().value, expected);
        let prof = relative_ranks(&pair).unwrap();
        assert_eq!(kendall_tau_ranks(&prof.r).unwrap().value, expected);
    }

    #[test]
    fn ties_use_zero_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: Vec<f64> = (0..30).map(|_| rng.random_range(0..4) as f64).collect();
            let y: Vec<f64> = (0..30).map(|_| rng.random_range(0..3) as f64).collect();
            let pair = LagPairSample::from_xy(x.clone(), y.clone()).unwrap();
            let got = kendall_tau(&pair).unwrap().value;
            assert!((got - brute(&x, &y)).abs() < 1e-15);
        }
    }

    #[test]
    fn relative_rank_sign_form() {
        // Sign-sum over pairs of the relative ranks equals the sign-sum over
        // the raw coordinates.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let prof = relative_ranks(&LagPairSample::from_xy(x.clone(), y.clone()).unwrap()).unwrap();
        let rf: Vec<f64> = prof.r.iter().map(|&v| v as f64).collect();
        let idx: Vec<f64> = (0..25).map(f64::from).collect();
        assert_eq!(brute(&idx, &rf), brute(&x, &y));
    }

    #[test]
    fn too_short() {
        assert!(kendall_tau_ranks(&[1]).is_err());
    }
}
