//! Limiting Gumbel-type laws of the centered maximum statistics.
//!
//! The centered maximum `y` has limit distribution
//! `exp{-(κ / Γ(μ₁/2)) e^{-y/2}}`. The simple law (`μ₁ = κ = 1`) serves the
//! non-degenerate statistics; the degenerate law uses κ_D.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corr::{DegenerateKind, Method};
use crate::error::{Result, WnError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelLaw {
    pub mu1: u32,
    pub kappa: f64,
    pub lambda1: f64,
    pub capital_lambda: f64,
}

impl GumbelLaw {
    /// The law of the Spearman, Kendall, Chatterjee and generic statistics.
    pub fn simple() -> Self {
        Self {
            mu1: 1,
            kappa: 1.0,
            lambda1: 1.0,
            capital_lambda: 1.0,
        }
    }

    pub fn degenerate(kind: DegenerateKind) -> Self {
        Self {
            mu1: kind.mu1(),
            kappa: kappa_d(),
            lambda1: kind.lambda1(),
            capital_lambda: kind.capital_lambda(),
        }
    }

    pub fn for_method(method: Method) -> Self {
        match method.degenerate_kind() {
            Some(kind) => Self::degenerate(kind),
            None => Self::simple(),
        }
    }

    /// `κ / Γ(μ₁/2)`, the scale of the limiting tail.
    fn rate(&self) -> f64 {
        self.kappa / gamma_half(self.mu1)
    }
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "Γ(k/2) needs k >= 1");
    let (mut g, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// `κ_D = {2 Π_{n≥2} (π/n) / sin(π/n)}^{1/2}`.
///
/// The product is summed in log form up to `n = 10⁵`; the remainder uses
/// `log(x / sin x) = x²/6 + x⁴/180 + O(x⁶)` with Euler–Maclaurin tails.
pub fn kappa_d() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| kappa_d_truncated(100_000, true))
}

pub(crate) fn kappa_d_truncated(terms: u32, tail: bool) -> f64 {
    let mut log_prod = 0.0;
    // Sum small terms first for accuracy.
    for n in (2..=terms).rev() {
        let x = PI / n as f64;
        log_prod += (x / x.sin()).ln();
    }
    if tail {
        let big_n = terms as f64;
        let inv_sq = 1.0 / big_n - 1.0 / (2.0 * big_n * big_n) + 1.0 / (6.0 * big_n.powi(3));
        let inv_4 = 1.0 / (3.0 * big_n.powi(3));
        log_prod += PI * PI / 6.0 * inv_sq + PI.powi(4) / 180.0 * inv_4;
    }
    (2.0 * log_prod.exp()).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(WnError::InvalidAlpha(alpha))
    }
}

/// Upper-α quantile `-log(Γ(μ₁/2)² / κ²) - 2 log log (1 - α)^{-1}`.
pub fn gumbel_quantile(alpha: f64, law: &GumbelLaw) -> Result<f64> {
    check_alpha(alpha)?;
    let g = gamma_half(law.mu1);
    Ok(-(g * g / (law.kappa * law.kappa)).ln() - 2.0 * (-(-alpha).ln_1p()).ln())
}

/// Upper tail probability of the limit law at `y`.
pub fn p_value(y: f64, law: &GumbelLaw) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    -(-law.rate() * (-y / 2.0).exp()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_gamma() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(6), 2.0);
    }

    #[test]
    fn simple_quantile_at_five_percent() {
        // Reference value computed with 40-digit arithmetic.
        let q = gumbel_quantile(0.05, &GumbelLaw::simple()).unwrap();
        assert!((q - 4.795_660_612_234_929).abs() < 1e-10);
    }

    #[test]
    fn degenerate_quantile_at_five_percent() {
        let law = GumbelLaw::degenerate(DegenerateKind::HoeffdingD);
        let q = gumbel_quantile(0.05, &law).unwrap();
        assert!((q - 6.601_388_106_644_448).abs() < 1e-8);
    }

    #[test]
    fn kappa_value_and_truncation() {
        assert!((kappa_d() - 2.467).abs() < 1e-3);
        assert!((kappa_d() - 2.466_656_887_987_487).abs() < 1e-9);
        assert!((kappa_d_truncated(2, false) - PI.sqrt()).abs() < 1e-15);
        let a = kappa_d_truncated(10_000, true);
        let b = kappa_d_truncated(100_000, true);
        let c = kappa_d_truncated(1_000_000, true);
        assert!((a - b).abs() < 1e-6 && (b - c).abs() < 1e-6);
    }

    #[test]
    fn quantile_and_p_value_are_inverse() {
        for law in [GumbelLaw::simple(), GumbelLaw::degenerate(DegenerateKind::TauStar)] {
            for alpha in [0.01, 0.05, 0.1, 0.5, 0.9] {
                let q = gumbel_quantile(alpha, &law).unwrap();
                assert!((p_value(q, &law) - alpha).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quantile_monotone_and_limits() {
        let law = GumbelLaw::simple();
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let q = gumbel_quantile(i as f64 / 100.0, &law).unwrap();
            assert!(q < prev);
            prev = q;
        }
        assert!(gumbel_quantile(1.0 - 1e-15, &law).unwrap() < -5.0);
        assert!(matches!(gumbel_quantile(1.5, &law), Err(WnError::InvalidAlpha(_))));
        assert!(gumbel_quantile(0.0, &law).is_err());
        assert_eq!(p_value(f64::INFINITY, &law), 0.0);
        assert_eq!(p_value(f64::NEG_INFINITY, &law), 1.0);
    }

    #[test]
    fn median_of_simple_law() {
        // Root of exp(-π^{-1/2} e^{-y/2}) = 1/2, found with 40-digit arithmetic.
        let y = -0.411_704_044_686_071_5;
        assert!((p_value(y, &GumbelLaw::simple()) - 0.5).abs() < 1e-12);
    }
}
