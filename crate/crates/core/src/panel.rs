//! The observation matrix and the lagged pair samples drawn from it.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WnError};

/// Smallest aligned sample length accepted by [`lag_pair`].
pub const MIN_PAIR_LEN: usize = 8;

/// An n×p matrix of observations, rows indexed by time.
///
/// Stored column-major so that each component series is a contiguous slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPanel {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl SeriesPanel {
    /// Builds a panel from column-major data (`data[i * n + t]` is row `t` of column `i`).
    pub fn from_column_major(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(WnError::EmptyInput);
        }
        if data.len() != n * p {
            return Err(WnError::InvalidInput(format!(
                "expected {} values for a {n}x{p} panel, got {}",
                n * p,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(WnError::InvalidInput(format!(
                "non-finite value at row {}, column {}",
                pos % n + 1,
                pos / n + 1
            )));
        }
        Ok(Self { n, p, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(WnError::InvalidInput("columns differ in length".into()));
        }
        Self::from_column_major(n, p, columns.concat())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(WnError::InvalidInput("rows differ in length".into()));
        }
        let mut data = vec![0.0; n * p];
        for (t, row) in rows.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                data[i * n + t] = v;
            }
        }
        Self::from_column_major(n, p, data)
    }

    /// Sample length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn value(&self, t: usize, i: usize) -> f64 {
        self.data[i * self.n + t]
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        (0..self.p).map(|i| self.value(t, i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|t| self.row(t)).collect()
    }

    /// Returns the panel whose row `t` is row `order[t]` of `self`.
    pub fn reorder_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return Err(WnError::InvalidInput(format!(
                "row order has length {}, panel has {} rows",
                order.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &t in order {
            if t >= self.n || std::mem::replace(&mut seen[t], true) {
                return Err(WnError::InvalidInput("row order is not a permutation".into()));
            }
        }
        let mut data = Vec::with_capacity(self.data.len());
        for col in self.columns() {
            data.extend(order.iter().map(|&t| col[t]));
        }
        Ok(Self {
            n: self.n,
            p: self.p,
            data,
        })
    }

    /// Applies `f(column index, value)` to every entry.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, &v)| f(idx / self.n, v))
            .collect();
        Self::from_column_major(self.n, self.p, data)
    }

    /// True when some column contains a repeated value.
    pub fn has_ties(&self) -> bool {
        self.columns().any(|col| {
            let mut sorted = col.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted.windows(2).any(|w| w[0] == w[1])
        })
    }

    /// Largest lag `K` for which every lagged pair keeps `min_len` points.
    pub fn max_lag(&self, min_len: usize) -> usize {
        self.n.saturating_sub(min_len)
    }
}

/// The aligned pair `{(x_t, y_t)}` with `x_t = ε_{t,i}` and `y_t = ε_{t+k,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagPairSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Column of `x` (0-based).
    pub i: usize,
    /// Column of `y` (0-based).
    pub j: usize,
    /// Lag; 0 for a free-standing pair built with [`LagPairSample::from_xy`].
    pub k: usize,
}

impl LagPairSample {
    /// A free-standing bivariate sample, not tied to a panel.
    pub fn from_xy(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(WnError::InvalidInput(format!(
                "x has {} values, y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(WnError::EmptyInput);
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(WnError::InvalidInput("non-finite value in pair".into()));
        }
        Ok(Self { x, y, i: 0, j: 0, k: 0 })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Extracts `x = column i, rows 1..n-k` and `y = column j, rows k+1..n`.
///
/// Columns are 0-based; the lag is `1 ≤ k < n` and the aligned length
/// `n - k` must be at least [`MIN_PAIR_LEN`].
pub fn lag_pair(panel: &SeriesPanel, i: usize, j: usize, k: usize) -> Result<LagPairSample> {
    let (n, p) = (panel.n(), panel.p());
    if i >= p || j >= p {
        return Err(WnError::IndexError(format!("column pair ({i}, {j}) outside 0..{p}")));
    }
    if k == 0 || k >= n {
        return Err(WnError::IndexError(format!("lag {k} outside 1..{n}")));
    }
    let m = n - k;
    if m < MIN_PAIR_LEN {
        return Err(WnError::TooShort {
            needed: MIN_PAIR_LEN,
            got: m,
        });
    }
    Ok(LagPairSample {
        x: panel.column(i)[..m].to_vec(),
        y: panel.column(j)[k..].to_vec(),
        i,
        j,
        k,
    })
}
