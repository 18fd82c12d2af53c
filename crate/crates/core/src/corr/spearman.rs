use super::{require_len, CorrValue, Method};
use crate::error::Result;
use crate::rank::RankProfile;

/// Spearman's ρ from relative ranks, using the centered-rank product form.
pub fn spearman_rho_ranks(r: &[usize]) -> Result<CorrValue> {
    let m = r.len();
    require_len(m, 3)?;
    // Σ (2t - m - 1)(2r_t - m - 1) = 4 Σ (t - (m+1)/2)(r_t - (m+1)/2), kept integral.
    let centre = m as i64 + 1;
    let cross: i64 = r
        .iter()
        .enumerate()
        .map(|(t, &rt)| (2 * (t as i64 + 1) - centre) * (2 * rt as i64 - centre))
        .sum();
    let mf = m as f64;
    let value = 3.0 * cross as f64 / (mf * (mf * mf - 1.0));
    Ok(CorrValue {
        method: Method::SpearmanRho,
        value,
        m,
        null_mean: 0.0,
        null_var: 1.0 / (mf - 1.0),
    })
}

pub fn spearman_rho(profile: &RankProfile) -> Result<CorrValue> {
    spearman_rho_ranks(&profile.r)
}
