//! Hoeffding's D, Blum–Kiefer–Rosenblatt's R and Bergsma–Dassios–Yanagimoto's τ*.
//!
//! All three are degenerate rank U-statistics. The fast paths count
//! quadrant occupancies instead of enumerating subsets:
//!
//! * D and R: the unsymmetrized kernel is a product of two sign differences
//!   `(u1 - u2)(v1 - v2) (u3 - u4)(v3 - v4)` of indicator vectors relative to
//!   one (D) or two (R) reference points. Summed over ordered disjoint index
//!   pairs this depends only on the four quadrant counts around the
//!   reference, so D costs O(m log m) and R costs O(m²).
//! * τ*: the symmetrized kernel of four points is `1` when the x-split and
//!   y-split of the points into a lower and an upper pair coincide and `-1/2`
//!   otherwise, so τ* reduces to counting the eight length-4 patterns whose
//!   first two entries are `{1, 2}` or `{3, 4}`. That costs O(m²) with one
//!   suffix-count table.

use serde::{Deserialize, Serialize};

use super::{binom, falling, require_len, CorrValue, Method};
use crate::error::{Result, WnError};
use crate::panel::LagPairSample;
use crate::rank::relative_ranks;

/// Above this length the i64 quadrant arithmetic could overflow.
const MAX_LEN: usize = 40_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegenerateKind {
    HoeffdingD,
    BkrR,
    TauStar,
}

impl DegenerateKind {
    /// Order of the U-statistic kernel.
    pub fn order(self) -> usize {
        match self {
            DegenerateKind::HoeffdingD => 5,
            DegenerateKind::BkrR => 6,
            DegenerateKind::TauStar => 4,
        }
    }

    /// Largest eigenvalue of the order-2 projection under independence.
    pub fn lambda1(self) -> f64 {
        let pi4 = std::f64::consts::PI.powi(4);
        match self {
            DegenerateKind::HoeffdingD => 3.0 / pi4,
            DegenerateKind::BkrR => 6.0 / pi4,
            DegenerateKind::TauStar => 9.0 / pi4,
        }
    }

    /// Sum of all eigenvalues of the order-2 projection.
    pub fn capital_lambda(self) -> f64 {
        match self {
            DegenerateKind::HoeffdingD => 1.0 / 12.0,
            DegenerateKind::BkrR => 1.0 / 6.0,
            DegenerateKind::TauStar => 1.0 / 4.0,
        }
    }

    /// Multiplicity of the largest eigenvalue.
    pub fn mu1(self) -> u32 {
        1
    }

    pub fn method(self) -> Method {
        match self {
            DegenerateKind::HoeffdingD => Method::HoeffdingD,
            DegenerateKind::BkrR => Method::BkrR,
            DegenerateKind::TauStar => Method::TauStar,
        }
    }

    /// `ζ_c = Var h_c` under independence for `c = 2..=order`.
    ///
    /// Derived exactly (as rationals) by exhaustive enumeration of all
    /// permutations at `m = order..=2·order-2` and solving the triangular
    /// Hoeffding variance system; see `examples/null_variance_constants.rs`.
    /// `ζ_2` equals the sum of the squared eigenvalues of the order-2 projection.
    fn zetas(self) -> &'static [f64] {
        match self {
            DegenerateKind::HoeffdingD => &ZETA_D,
            DegenerateKind::BkrR => &ZETA_R,
            DegenerateKind::TauStar => &ZETA_TAU_STAR,
        }
    }
}

const ZETA_D: [f64; 4] = [1.0 / 900.0, 7.0 / 900.0, 41.0 / 1350.0, 1.0 / 10.0];
const ZETA_R: [f64; 5] = [1.0 / 225.0, 11.0 / 600.0, 34.0 / 675.0, 41.0 / 360.0, 41.0 / 180.0];
const ZETA_TAU_STAR: [f64; 3] = [1.0 / 100.0, 2.0 / 25.0, 1.0 / 2.0];

/// Exact variance of the statistic under independence at sample length `m`.
///
/// Uses `Var U = C(m, r)^{-1} Σ_c C(r, c) C(m - r, r - c) ζ_c` with the
/// first-order term absent because the kernels are degenerate.
pub fn degenerate_null_var(kind: DegenerateKind, m: usize) -> f64 {
    let r = kind.order();
    if m < r {
        return f64::NAN;
    }
    let total: f64 = kind
        .zetas()
        .iter()
        .enumerate()
        .map(|(idx, &zeta)| {
            let c = idx + 2;
            binom(r, c) * binom(m - r, r - c) * zeta
        })
        .sum();
    total / binom(m, r)
}

fn check_len(r: &[usize], kind: DegenerateKind) -> Result<()> {
    require_len(r.len(), kind.order())?;
    if r.len() > MAX_LEN {
        return Err(WnError::InvalidInput(format!(
            "sample length {} exceeds the supported maximum {MAX_LEN}",
            r.len()
        )));
    }
    Ok(())
}

fn value(kind: DegenerateKind, m: usize, v: f64) -> CorrValue {
    CorrValue {
        method: kind.method(),
        value: v,
        m,
        null_mean: 0.0,
        null_var: degenerate_null_var(kind, m),
    }
}

/// Sum over ordered pairs of disjoint ordered index pairs `(a, b), (c, d)`
/// of `g(a, b) g(c, d)` with `g = (u_a - u_b)(v_a - v_b)`, given the four
/// quadrant counts of the indicator vectors `(u, v)`.
#[inline(always)]
fn quadrant_sum(n11: i64, n10: i64, n01: i64, n00: i64) -> i64 {
    let concord = n11 * n00;
    let discord = n10 * n01;
    let g = 2 * (concord - discord);
    let h = 2 * (concord + discord);
    let t = concord * (n00 + n11 - 2) + discord * (n01 + n10 - 2);
    g * g - 2 * h - 4 * t
}

/// Fenwick tree over 1..=m stored in `tree[1..=m]`.
fn fenwick_add(tree: &mut [u32], mut i: usize) {
    while i < tree.len() {
        tree[i] += 1;
        i += i & i.wrapping_neg();
    }
}

/// Number of inserted values `<= i`.
fn fenwick_prefix(tree: &[u32], mut i: usize) -> u32 {
    let mut s = 0;
    while i > 0 {
        s += tree[i];
        i &= i - 1;
    }
    s
}

/// Hoeffding's D on relative ranks, scaled so the kernel lies in [-1/2, 1].
pub fn hoeffding_d_ranks(r: &[usize]) -> Result<CorrValue> {
    let kind = DegenerateKind::HoeffdingD;
    check_len(r, kind)?;
    Ok(value(kind, r.len(), hoeffding_d_value(r, &mut Vec::new())))
}

/// Blum–Kiefer–Rosenblatt's R on relative ranks.
pub fn bkr_r_ranks(r: &[usize]) -> Result<CorrValue> {
    let kind = DegenerateKind::BkrR;
    check_len(r, kind)?;
    Ok(value(kind, r.len(), bkr_r_value(r, &mut Vec::new())))
}

/// Lengths up to which the f64 path of R is exact: every per-row partial
/// sum stays below 2^53.
const R_F64_MAX_LEN: usize = 1000;

const LANES: usize = 8;

/// Defines `$name`, which runs `$generic` compiled with AVX2 when the CPU
/// has it and the baseline build otherwise.
macro_rules! dispatch_avx2 {
    ($name:ident, $generic:ident, $avx2:ident, ($($arg:ident: $ty:ty),*) -> $ret:ty) => {
        #[cfg(target_arch = "x86_64")]
        #[target_feature(enable = "avx2")]
        unsafe fn $avx2($($arg: $ty),*) -> $ret {
            $generic($($arg),*)
        }

        fn $name($($arg: $ty),*) -> $ret {
            #[cfg(target_arch = "x86_64")]
            if std::arch::is_x86_feature_detected!("avx2") {
                // SAFETY: the CPU supports every feature $avx2 is compiled for.
                return unsafe { $avx2($($arg),*) };
            }
            $generic($($arg),*)
        }
    };
}

dispatch_avx2!(bkr_r_sum_fast, bkr_r_sum_f64, bkr_r_sum_avx2, (r: &[usize]) -> f64);
dispatch_avx2!(
    tau_star_count_fast,
    tau_star_count,
    tau_star_count_avx2,
    (r: &[usize], scratch: &mut Vec<u32>) -> i128
);

/// R without length checks; `scratch` is reused between calls.
pub(crate) fn bkr_r_value(r: &[usize], scratch: &mut Vec<u32>) -> f64 {
    let total = if r.len() <= R_F64_MAX_LEN {
        bkr_r_sum_fast(r)
    } else {
        bkr_r_sum_i64(r, scratch) as f64
    };
    // h_R = (1/32) Σ over 720 orderings = 22.5 × mean of the raw product.
    22.5 * total / falling(r.len(), 6)
}

/// Σ over ordered reference pairs of the quadrant sums, in f64 so the inner
/// loop vectorizes. Exact for `m <= R_F64_MAX_LEN`.
#[inline(always)]
fn bkr_r_sum_f64(r: &[usize]) -> f64 {
    let m = r.len();
    // For y-rank b (index b - 1): the x-rank of its point and b itself.
    let mut x_of = vec![0.0f64; m];
    for (s, &y) in r.iter().enumerate() {
        x_of[y - 1] = (s + 1) as f64;
    }
    let b_of: Vec<f64> = (1..=m).map(|b| b as f64).collect();
    // row[b - 1] = #{points with x-rank <= s5 and y-rank <= b}, grown with s5.
    let mut row = vec![0.0f64; m];
    let mm = m as f64 - 2.0;
    let mut total = 0.0f64;
    for s5 in 1..=m {
        let r5 = r[s5 - 1];
        for cell in &mut row[r5 - 1..] {
            *cell += 1.0;
        }
        let a = s5 as f64;
        let r5f = r5 as f64;
        let term = |cnt: f64, s6: f64, b: f64| {
            let t5_low_y = if r5f <= b { 1.0 } else { 0.0 };
            let t6_low_x = if s6 <= a { 1.0 } else { 0.0 };
            let n11 = cnt - t5_low_y - t6_low_x;
            let n10 = a - 1.0 - t6_low_x - n11;
            let n01 = b - 1.0 - t5_low_y - n11;
            let n00 = mm - n11 - n10 - n01;
            quadrant_sum_f64(n11, n10, n01, n00)
        };
        // Independent lanes let the compiler vectorize the reduction; the
        // terms are integers, so the summation order does not matter.
        let mut lanes = [0.0f64; LANES];
        let chunks = row
            .chunks_exact(LANES)
            .zip(x_of.chunks_exact(LANES))
            .zip(b_of.chunks_exact(LANES));
        for ((c, x), b) in chunks {
            for l in 0..LANES {
                lanes[l] += term(c[l], x[l], b[l]);
            }
        }
        let tail = m / LANES * LANES;
        let mut acc: f64 = lanes.iter().sum();
        for idx in tail..m {
            acc += term(row[idx], x_of[idx], b_of[idx]);
        }
        // Remove the s6 == s5 term.
        let n11 = row[r5 - 1] - 2.0;
        let n10 = a - 2.0 - n11;
        let n01 = r5f - 2.0 - n11;
        acc -= quadrant_sum_f64(n11, n10, n01, mm - n11 - n10 - n01);
        total += acc;
    }
    total
}

#[inline(always)]
fn quadrant_sum_f64(n11: f64, n10: f64, n01: f64, n00: f64) -> f64 {
    let concord = n11 * n00;
    let discord = n10 * n01;
    let g = 2.0 * (concord - discord);
    let h = 2.0 * (concord + discord);
    let t = concord * (n00 + n11 - 2.0) + discord * (n01 + n10 - 2.0);
    g * g - 2.0 * h - 4.0 * t
}

/// Integer version of [`bkr_r_sum_f64`] for long samples.
fn bkr_r_sum_i64(r: &[usize], row: &mut Vec<u32>) -> i128 {
    let m = r.len();
    let mut x_of = vec![0u32; m];
    for (s, &y) in r.iter().enumerate() {
        x_of[y - 1] = s as u32 + 1;
    }
    row.clear();
    row.resize(m, 0);
    let mut total: i128 = 0;
    let mm = m as i64 - 2;
    for s5 in 1..=m {
        let r5 = r[s5 - 1];
        for cell in &mut row[r5 - 1..] {
            *cell += 1;
        }
        let a = s5 as i64;
        let mut acc: i128 = 0;
        for (b0, (&cnt, &s6)) in row.iter().zip(&x_of).enumerate() {
            let b = b0 as i64 + 1;
            let t5_low_y = i64::from(r5 as i64 <= b);
            let t6_low_x = i64::from(s6 as i64 <= a);
            let n11 = cnt as i64 - t5_low_y - t6_low_x;
            let n10 = a - 1 - t6_low_x - n11;
            let n01 = b - 1 - t5_low_y - n11;
            let n00 = mm - n11 - n10 - n01;
            acc += quadrant_sum(n11, n10, n01, n00) as i128;
        }
        let n11 = row[r5 - 1] as i64 - 2;
        let n10 = a - 2 - n11;
        let n01 = r5 as i64 - 2 - n11;
        acc -= quadrant_sum(n11, n10, n01, mm - n11 - n10 - n01) as i128;
        total += acc;
    }
    total
}

/// Bergsma–Dassios–Yanagimoto's τ* on relative ranks.
pub fn tau_star_ranks(r: &[usize]) -> Result<CorrValue> {
    let kind = DegenerateKind::TauStar;
    check_len(r, kind)?;
    Ok(value(kind, r.len(), tau_star_value(r, &mut Vec::new())))
}

/// τ* without length checks; `scratch` is reused between calls.
pub(crate) fn tau_star_value(r: &[usize], scratch: &mut Vec<u32>) -> f64 {
    let concordant = tau_star_count_fast(r, scratch);
    1.5 * concordant as f64 / binom(r.len(), 4) - 0.5
}

/// Number of 4-subsets whose lower/upper split agrees in x and y.
#[inline(always)]
fn tau_star_count(r: &[usize], scratch: &mut Vec<u32>) -> i128 {
    let m = r.len();
    // Layout: row[0..=m] then pos_of[0..m].
    // row[y] = #{q > s1 : r[q] > y}, maintained as s1 falls.
    // pos_of[y - 1] = 0-based position of the point with y-rank y.
    scratch.clear();
    scratch.resize(2 * m + 1, 0);
    let (row, pos_of) = scratch.split_at_mut(m + 1);
    for (s, &y) in r.iter().enumerate() {
        pos_of[y - 1] = s as u32;
    }
    let mut concordant: i128 = 0;
    for s1 in (0..m).rev() {
        if s1 + 1 < m {
            for cell in &mut row[..r[s1 + 1]] {
                *cell = cell.wrapping_add(1);
            }
        }
        let r1 = r[s1];
        let right = (m - 1 - s1) as i64;

        // A = {p2, p1} with p1 the right-hand point and p2 = (s2, y) left of
        // it. When p2 sits above p1 the upper pair must clear (x of p1, y of
        // p2); when it sits below, the lower pair must stay under it.
        // Split by y so that both loops read `row` sequentially. Counts are
        // at most MAX_LEN, so w(w - 1) fits in i32 and the wrapping ops never
        // wrap; they keep the loops vectorizable when overflow checks are on.
        let mut pairs: i64 = 0;
        let s1u = s1 as u32;
        let right32 = right as i32;
        let weight = |w_up: i32| w_up.wrapping_mul(w_up.wrapping_sub(1));
        for (&p, &w) in pos_of[..r1 - 1].iter().zip(&row[..r1 - 1]) {
            let w_up = right32.wrapping_sub(w as i32);
            pairs = pairs.wrapping_add(i64::from(if p < s1u { weight(w_up) } else { 0 }));
        }
        for (&p, &w) in pos_of[r1..].iter().zip(&row[r1 + 1..]) {
            pairs = pairs.wrapping_add(i64::from(if p < s1u { weight(w as i32) } else { 0 }));
        }
        let mut acc = pairs / 2;

        // p2 below-left (resp. above-left) of p1: the corner is p1 itself.
        let choose2 = |v: i64| v * (v - 1) / 2;
        let ur = row[r1] as i64;
        let right_below = right - row[r1 - 1] as i64;
        let left_below = (r1 as i64 - 1) - right_below;
        let left_above = s1 as i64 - left_below;
        let lr = right - ur;
        acc += left_below * choose2(ur) + left_above * choose2(lr);
        concordant += acc as i128;
    }
    concordant
}

/// D without length checks.
pub(crate) fn hoeffding_d_value(r: &[usize], tree: &mut Vec<u32>) -> f64 {
    let m = r.len();
    tree.clear();
    tree.resize(m + 1, 0);
    let mut total: i128 = 0;
    for (pos, &y) in r.iter().enumerate() {
        // The reference point has x-rank s = pos + 1 and y-rank y.
        let below_left = fenwick_prefix(tree, y) as i64;
        fenwick_add(tree, y);
        let n11 = below_left;
        let n10 = pos as i64 - below_left;
        let n01 = (y as i64 - 1) - below_left;
        let n00 = (m as i64 - 1) - n11 - n10 - n01;
        total += quadrant_sum(n11, n10, n01, n00) as i128;
    }
    // h_D = (1/16) Σ over 120 orderings = 7.5 × mean of the raw product.
    7.5 * total as f64 / falling(m, 5)
}

pub fn hoeffding_d(pair: &LagPairSample) -> Result<CorrValue> {
    require_len(pair.len(), 5)?;
    hoeffding_d_ranks(&relative_ranks(pair)?.r)
}

pub fn bkr_r(pair: &LagPairSample) -> Result<CorrValue> {
    require_len(pair.len(), 6)?;
    bkr_r_ranks(&relative_ranks(pair)?.r)
}

pub fn tau_star(pair: &LagPairSample) -> Result<CorrValue> {
    require_len(pair.len(), 4)?;
    tau_star_ranks(&relative_ranks(pair)?.r)
}
