use super::{require_len, CorrValue, Method};
use crate::error::Result;
use crate::panel::LagPairSample;
use crate::rank::relative_ranks;

/// Chatterjee's ξ from relative ranks.
///
/// `r[s - 1]` is the y-rank of the point with the s-th smallest x, so the
/// statistic sums the m - 1 consecutive gaps of `r`. `null_var` is the
/// asymptotic 2/(5m).
pub fn chatterjee_xi_ranks(r: &[usize]) -> Result<CorrValue> {
    let m = r.len();
    require_len(m, 3)?;
    let gaps: u64 = r.windows(2).map(|w| w[0].abs_diff(w[1]) as u64).sum();
    let mf = m as f64;
    Ok(CorrValue {
        method: Method::ChatterjeeXi,
        value: 1.0 - 3.0 * gaps as f64 / (mf * mf - 1.0),
        m,
        null_mean: 0.0,
        null_var: 2.0 / (5.0 * mf),
    })
}

pub fn chatterjee_xi(pair: &LagPairSample) -> Result<CorrValue> {
    require_len(pair.len(), 3)?;
    chatterjee_xi_ranks(&relative_ranks(pair)?.r)
}
