//! Per-pair rank correlation statistics and their null moments.
//!
//! Every statistic here is a function of the relative ranks of a pair, so
//! the fast paths take a [`RankProfile`] (or the bare relative-rank slice).
//! The `*_pair` style entry points named after each statistic accept a
//! [`LagPairSample`] and rank it first.

mod chatterjee;
mod degenerate;
mod kendall;
pub mod kernel;
mod slr;
mod spearman;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WnError};
use crate::panel::LagPairSample;
use crate::rank::{relative_ranks, RankProfile};

pub use chatterjee::{chatterjee_xi, chatterjee_xi_ranks};
pub use degenerate::{
    bkr_r, bkr_r_ranks, degenerate_null_var, hoeffding_d, hoeffding_d_ranks, tau_star, tau_star_ranks, DegenerateKind,
};
pub(crate) use degenerate::{bkr_r_value, hoeffding_d_value, tau_star_value};
pub(crate) use kendall::kendall_tau_value;
pub use kendall::{kendall_tau, kendall_tau_ranks};
pub use kernel::{u_stat_oracle, KernelId, KernelSpec};
pub use slr::{simple_linear_rank, ScorePair, SlrTable};
pub use spearman::{spearman_rho, spearman_rho_ranks};

/// Which rank correlation a value (or a test) is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rho")]
    SpearmanRho,
    #[serde(rename = "tau")]
    KendallTau,
    #[serde(rename = "d")]
    HoeffdingD,
    #[serde(rename = "r")]
    BkrR,
    #[serde(rename = "taustar")]
    TauStar,
    #[serde(rename = "xi")]
    ChatterjeeXi,
    #[serde(rename = "slr")]
    GenericSlr,
}

impl Method {
    /// The six statistics that need no extra configuration.
    pub const BUILT_IN: [Method; 6] = [
        Method::SpearmanRho,
        Method::KendallTau,
        Method::HoeffdingD,
        Method::BkrR,
        Method::TauStar,
        Method::ChatterjeeXi,
    ];

    /// Short name used on the command line and in tables.
    pub fn short_name(self) -> &'static str {
        match self {
            Method::SpearmanRho => "rho",
            Method::KendallTau => "tau",
            Method::HoeffdingD => "d",
            Method::BkrR => "r",
            Method::TauStar => "taustar",
            Method::ChatterjeeXi => "xi",
            Method::GenericSlr => "slr",
        }
    }

    /// Smallest aligned length for which the statistic is defined.
    pub fn min_len(self) -> usize {
        match self {
            Method::KendallTau => 2,
            Method::SpearmanRho | Method::ChatterjeeXi | Method::GenericSlr => 3,
            Method::TauStar => 4,
            Method::HoeffdingD => 5,
            Method::BkrR => 6,
        }
    }

    pub fn degenerate_kind(self) -> Option<DegenerateKind> {
        match self {
            Method::HoeffdingD => Some(DegenerateKind::HoeffdingD),
            Method::BkrR => Some(DegenerateKind::BkrR),
            Method::TauStar => Some(DegenerateKind::TauStar),
            _ => None,
        }
    }

    pub fn is_degenerate(self) -> bool {
        self.degenerate_kind().is_some()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Method {
    type Err = WnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rho" | "spearman" => Ok(Method::SpearmanRho),
            "tau" | "kendall" => Ok(Method::KendallTau),
            "d" | "hoeffding" => Ok(Method::HoeffdingD),
            "r" | "bkr" => Ok(Method::BkrR),
            "taustar" | "tau*" | "bdy" => Ok(Method::TauStar),
            "xi" | "chatterjee" => Ok(Method::ChatterjeeXi),
            "slr" => Ok(Method::GenericSlr),
            other => Err(WnError::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// One evaluated statistic with its null mean and variance.
///
/// `null_var` is exact for finite samples except for Chatterjee's ξ, where
/// only the asymptotic variance is available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrValue {
    pub method: Method,
    pub value: f64,
    pub m: usize,
    pub null_mean: f64,
    pub null_var: f64,
}

impl CorrValue {
    /// `(value - null_mean) / sqrt(null_var)`.
    pub fn standardized(&self) -> f64 {
        (self.value - self.null_mean) / self.null_var.sqrt()
    }
}

pub(crate) fn require_len(m: usize, needed: usize) -> Result<()> {
    if m < needed {
        Err(WnError::TooShort { needed, got: m })
    } else {
        Ok(())
    }
}

/// Evaluates a built-in statistic from relative ranks.
pub fn evaluate_ranks(method: Method, r: &[usize]) -> Result<CorrValue> {
    match method {
        Method::SpearmanRho => spearman_rho_ranks(r),
        Method::KendallTau => kendall_tau_ranks(r),
        Method::HoeffdingD => hoeffding_d_ranks(r),
        Method::BkrR => bkr_r_ranks(r),
        Method::TauStar => tau_star_ranks(r),
        Method::ChatterjeeXi => chatterjee_xi_ranks(r),
        Method::GenericSlr => Err(WnError::Config(
            "the generic simple linear rank statistic needs a score pair".into(),
        )),
    }
}

pub fn evaluate_profile(method: Method, profile: &RankProfile) -> Result<CorrValue> {
    evaluate_ranks(method, &profile.r)
}

pub fn evaluate_pair(method: Method, pair: &LagPairSample) -> Result<CorrValue> {
    evaluate_profile(method, &relative_ranks(pair)?)
}

/// Number of ordered k-tuples of distinct items out of m, as f64.
pub(crate) fn falling(m: usize, k: usize) -> f64 {
    (0..k).map(|i| (m - i) as f64).product()
}

pub(crate) fn binom(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}
