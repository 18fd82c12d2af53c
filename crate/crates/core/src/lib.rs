//! Rank-based white noise tests for multivariate time series.

pub mod corr;
pub mod error;
pub mod gumbel;
pub mod io;
pub mod lstat;
pub mod mc;
pub mod panel;
pub mod rank;
pub mod scan;
pub mod simgen;

pub use corr::{CorrValue, Method};
pub use error::{Result, WnError};
pub use panel::{lag_pair, LagPairSample, SeriesPanel, MIN_PAIR_LEN};
pub use rank::{ranks, relative_ranks, RankProfile, Ranking};
