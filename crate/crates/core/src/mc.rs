//! Monte Carlo estimation of empirical size and power.
//!
//! Every replicate draws its panel from a seed hashed from the base seed and
//! the cell coordinates, so tables do not depend on the worker schedule.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr::Method;
use crate::error::{Result, WnError};
use crate::lstat::{permutation_test_multi, MIN_PERMS};
use crate::panel::{SeriesPanel, MIN_PAIR_LEN};
use crate::scan::{max_test, scan_with_cache, LagRankCache, ScanStatistic};
use crate::simgen::{gen_alt, gen_null, AltForm, AltModelSpec, NullModel, NullModelSpec, DEFAULT_BURN_IN};

pub const MIN_REPS: usize = 100;
pub const DEFAULT_REPS: usize = 500;
/// A cell is flagged partial when more than this fraction of replicates fail.
pub const PARTIAL_FRACTION: f64 = 0.01;

/// A data-generating process in a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Null {
        model: NullModel,
    },
    Alt {
        form: AltForm,
        rho: f64,
        k0: usize,
        /// Keep `A` fixed across replicates instead of redrawing it.
        #[serde(default)]
        fixed_matrix: bool,
    },
}

impl ModelSpec {
    pub fn null(model: NullModel) -> Self {
        ModelSpec::Null { model }
    }

    pub fn alt(form: AltForm, rho: f64, k0: usize) -> Self {
        ModelSpec::Alt {
            form,
            rho,
            k0,
            fixed_matrix: false,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, ModelSpec::Null { .. })
    }

    /// The model's short name, `i`..`viii` or `I`..`VIII`.
    pub fn name(&self) -> String {
        match self {
            ModelSpec::Null { model } => model.to_string(),
            ModelSpec::Alt { form, .. } => form.to_string(),
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            ModelSpec::Alt { rho, .. } => Some(*rho),
            ModelSpec::Null { .. } => None,
        }
    }

    pub fn k0(&self) -> Option<usize> {
        match self {
            ModelSpec::Alt { k0, .. } => Some(*k0),
            ModelSpec::Null { .. } => None,
        }
    }

    /// Draws one panel.
    pub fn generate(&self, n: usize, p: usize, seed: u64, matrix_seed: u64, burn_in: usize) -> Result<SeriesPanel> {
        match *self {
            ModelSpec::Null { model } => gen_null(&NullModelSpec {
                model,
                n,
                p,
                seed,
                matrix_seed: None,
            }),
            ModelSpec::Alt {
                form,
                rho,
                k0,
                fixed_matrix,
            } => gen_alt(&AltModelSpec {
                form,
                rho,
                k0,
                n,
                p,
                seed,
                burn_in,
                matrix_seed: fixed_matrix.then_some(matrix_seed),
            }),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Null { model } => write!(f, "{model}"),
            ModelSpec::Alt {
                form,
                rho,
                k0,
                fixed_matrix,
            } => {
                write!(f, "{form}(rho={rho},k0={k0}")?;
                if *fixed_matrix {
                    f.write_str(",fixed")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A test applied to each replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McMethod {
    /// Max-type test with the Gumbel threshold.
    Max { method: Method },
    /// Permutation-calibrated sum of the `l` largest cells.
    LStat { method: Method, l: usize, perms: usize },
}

impl McMethod {
    pub fn method(self) -> Method {
        match self {
            McMethod::Max { method } | McMethod::LStat { method, .. } => method,
        }
    }
}

impl From<Method> for McMethod {
    fn from(method: Method) -> Self {
        McMethod::Max { method }
    }
}

impl fmt::Display for McMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McMethod::Max { method } => write!(f, "{method}"),
            McMethod::LStat { method, l, perms } => write!(f, "lstat_{method}_L{l}_B{perms}"),
        }
    }
}

impl FromStr for McMethod {
    type Err = WnError;

    /// Accepts a method name (`taustar`) or `lstat_<method>_L<l>_B<perms>`.
    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("lstat_") else {
            return Ok(McMethod::Max { method: s.parse()? });
        };
        let bad = || WnError::Config(format!("malformed L-statistic method '{s}'"));
        let mut parts = rest.split('_');
        let method = parts.next().ok_or_else(bad)?.parse()?;
        let l = parts
            .next()
            .and_then(|v| v.strip_prefix('L'))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let perms = parts
            .next()
            .and_then(|v| v.strip_prefix('B'))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(McMethod::LStat { method, l, perms })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McGrid {
    pub models: Vec<ModelSpec>,
    pub methods: Vec<McMethod>,
    pub n_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub reps: usize,
    pub alpha: f64,
    pub base_seed: u64,
    pub burn_in: usize,
}

impl McGrid {
    pub fn new(models: Vec<ModelSpec>, methods: Vec<McMethod>) -> Self {
        McGrid {
            models,
            methods,
            n_list: vec![100],
            p_list: vec![30],
            k_list: vec![2],
            reps: DEFAULT_REPS,
            alpha: 0.05,
            base_seed: 0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(WnError::Config(msg));
        if self.models.is_empty() || self.methods.is_empty() {
            return fail("the grid needs at least one model and one method".into());
        }
        if [&self.n_list, &self.p_list, &self.k_list].iter().any(|l| l.is_empty()) {
            return fail("n, p and K lists must be non-empty".into());
        }
        if self.reps < MIN_REPS {
            return fail(format!("reps must be at least {MIN_REPS}, got {}", self.reps));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(WnError::InvalidAlpha(self.alpha));
        }
        for m in &self.methods {
            if m.method() == Method::GenericSlr {
                return fail("custom score statistics are not available in the grid".into());
            }
            if let McMethod::LStat { l, perms, .. } = *m {
                if perms < MIN_PERMS {
                    return fail(format!("perms must be at least {MIN_PERMS}, got {perms}"));
                }
                if l == 0 {
                    return fail("L must be positive".into());
                }
            }
        }
        let order = self.methods.iter().map(|m| m.method().min_len()).max().unwrap_or(0);
        for &n in &self.n_list {
            for &k in &self.k_list {
                if k == 0 || n < k + MIN_PAIR_LEN + order {
                    return fail(format!(
                        "n={n}, K={k} violates n - K >= {} with K >= 1",
                        MIN_PAIR_LEN + order
                    ));
                }
            }
        }
        if self.p_list.contains(&0) {
            return fail("p must be positive".into());
        }
        for model in &self.models {
            if let ModelSpec::Alt { rho, k0, .. } = model {
                if !(rho.is_finite() && *rho >= 0.0) {
                    return fail(format!("rho must be finite and >= 0, got {rho}"));
                }
                if let Some(&p) = self.p_list.iter().find(|&&p| *k0 == 0 || *k0 > p) {
                    return fail(format!("k0={k0} must lie in 1..={p}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub model: String,
    pub rho: Option<f64>,
    pub k0: Option<usize>,
    pub method: String,
    pub n: usize,
    pub p: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub rejection_rate: f64,
    /// Replicates that produced an outcome.
    pub reps: usize,
    pub failed: usize,
    pub mc_se: f64,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTable {
    pub cells: Vec<McCell>,
    pub base_seed: u64,
    pub requested_reps: usize,
    pub alpha: f64,
    pub wall_seconds: f64,
}

/// `sqrt(r (1 - r) / reps)`.
pub fn mc_se(rate: f64, reps: usize) -> f64 {
    if reps == 0 {
        0.0
    } else {
        (rate * (1.0 - rate) / reps as f64).sqrt()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(words: impl IntoIterator<Item = u64>) -> u64 {
    words.into_iter().fold(0, |h, w| splitmix64(h ^ w))
}

fn model_hash(model: &ModelSpec) -> u64 {
    mix(model.to_string().bytes().map(u64::from))
}

/// Seed of one replicate panel.
pub fn replicate_seed(base_seed: u64, model: &ModelSpec, n: usize, p: usize, k: usize, rep: usize) -> u64 {
    mix([base_seed, model_hash(model), n as u64, p as u64, k as u64, rep as u64])
}

/// Seed of a fixed mixing matrix, shared by all replicates of a cell.
fn matrix_seed(base_seed: u64, model: &ModelSpec, p: usize) -> u64 {
    mix([base_seed, model_hash(model), p as u64, u64::MAX])
}

/// Runs `f` on a pool of `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(WnError::Config("threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| WnError::Config(format!("cannot build thread pool: {e}"))),
    }
}

/// Rejection decisions of every method on one panel, in grid order.
fn replicate(grid: &McGrid, panel: &SeriesPanel, k_max: usize, seed: u64) -> Vec<Result<bool>> {
    let cache = match LagRankCache::new(panel, k_max) {
        Ok(c) => c,
        Err(e) => return vec![Err(e); grid.methods.len()],
    };
    let mut out: Vec<Option<Result<bool>>> = vec![None; grid.methods.len()];
    for (q, m) in grid.methods.iter().enumerate() {
        if out[q].is_some() {
            continue;
        }
        match *m {
            McMethod::Max { method } => {
                out[q] = Some(
                    scan_with_cache(&cache, &ScanStatistic::Builtin(method))
                        .and_then(|scan| max_test(&scan, grid.alpha))
                        .map(|o| o.reject),
                );
            }
            McMethod::LStat { method, perms, .. } => {
                // Every L of the same statistic shares one set of permutations.
                let group: Vec<(usize, usize)> = grid
                    .methods
                    .iter()
                    .enumerate()
                    .filter_map(|(r, other)| match *other {
                        McMethod::LStat {
                            method: om,
                            l,
                            perms: op,
                        } if om == method && op == perms && out[r].is_none() => Some((r, l)),
                        _ => None,
                    })
                    .collect();
                let ls: Vec<usize> = group.iter().map(|&(_, l)| l).collect();
                let perm_seed = mix([seed, method as u64, perms as u64]);
                let stat = ScanStatistic::Builtin(method);
                match permutation_test_multi(panel, &stat, k_max, &ls, perms, grid.alpha, perm_seed) {
                    Ok(outcomes) => {
                        for (&(r, _), o) in group.iter().zip(outcomes) {
                            out[r] = Some(Ok(o.reject));
                        }
                    }
                    Err(e) => {
                        for &(r, _) in &group {
                            out[r] = Some(Err(e.clone()));
                        }
                    }
                }
            }
        }
    }
    out.into_iter().map(|o| o.expect("every method evaluated")).collect()
}

fn run_grid(grid: &McGrid) -> Result<McTable> {
    grid.validate()?;
    let start = Instant::now();
    let mut cells = Vec::new();
    for model in &grid.models {
        for &n in &grid.n_list {
            for &p in &grid.p_list {
                for &k in &grid.k_list {
                    log::info!("model {model}, n={n}, p={p}, K={k}: {} replicates", grid.reps);
                    let fixed = matrix_seed(grid.base_seed, model, p);
                    let results: Vec<Vec<Result<bool>>> = (0..grid.reps)
                        .into_par_iter()
                        .map(|rep| {
                            let seed = replicate_seed(grid.base_seed, model, n, p, k, rep);
                            match model.generate(n, p, seed, fixed, grid.burn_in) {
                                Ok(panel) => replicate(grid, &panel, k, seed),
                                Err(e) => vec![Err(e); grid.methods.len()],
                            }
                        })
                        .collect();
                    for (q, m) in grid.methods.iter().enumerate() {
                        let mut rejections = 0;
                        let mut failed = 0;
                        for (rep, row) in results.iter().enumerate() {
                            match &row[q] {
                                Ok(true) => rejections += 1,
                                Ok(false) => {}
                                Err(e) => {
                                    log::warn!("model {model}, {m}, replicate {rep}: {e}");
                                    failed += 1;
                                }
                            }
                        }
                        let ok = grid.reps - failed;
                        let rate = if ok == 0 { 0.0 } else { rejections as f64 / ok as f64 };
                        cells.push(McCell {
                            model: model.name(),
                            rho: model.rho(),
                            k0: model.k0(),
                            method: m.to_string(),
                            n,
                            p,
                            k,
                            rejection_rate: rate,
                            reps: ok,
                            failed,
                            mc_se: mc_se(rate, ok),
                            partial: ok == 0 || failed as f64 > PARTIAL_FRACTION * grid.reps as f64,
                        });
                    }
                }
            }
        }
    }
    Ok(McTable {
        cells,
        base_seed: grid.base_seed,
        requested_reps: grid.reps,
        alpha: grid.alpha,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Empirical sizes over null models.
pub fn run_size(grid: &McGrid) -> Result<McTable> {
    if !grid.models.iter().all(ModelSpec::is_null) {
        return Err(WnError::Config("size runs take null models only".into()));
    }
    run_grid(grid)
}

/// Empirical power over alternatives.
pub fn run_power(grid: &McGrid) -> Result<McTable> {
    if grid.models.iter().any(ModelSpec::is_null) {
        return Err(WnError::Config("power runs take alternative models only".into()));
    }
    run_grid(grid)
}

/// Grid parameter used as the x-axis of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveAxis {
    Rho,
    K0,
    P,
    N,
    K,
}

impl FromStr for CurveAxis {
    type Err = WnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(CurveAxis::Rho),
            "k0" => Ok(CurveAxis::K0),
            "p" => Ok(CurveAxis::P),
            "n" => Ok(CurveAxis::N),
            "K" | "k" => Ok(CurveAxis::K),
            other => Err(WnError::Config(format!("unknown curve axis '{other}'"))),
        }
    }
}

#[derive(Debug, Serialize)]
struct CurveRow<'a> {
    model: &'a str,
    method: &'a str,
    x: f64,
    rate: f64,
    mc_se: f64,
    reps: usize,
}

impl McTable {
    pub fn cell(&self, model: &str, method: &str) -> Option<&McCell> {
        self.cells.iter().find(|c| c.model == model && c.method == method)
    }

    /// One row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            w.serialize(c).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long-format `(model, method, x, rate)` rows for plotting against `axis`.
    pub fn write_curve_csv<W: Write>(&self, out: W, axis: CurveAxis) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            let x = match axis {
                CurveAxis::Rho => c.rho.unwrap_or(0.0),
                CurveAxis::K0 => c.k0.unwrap_or(0) as f64,
                CurveAxis::P => c.p as f64,
                CurveAxis::N => c.n as f64,
                CurveAxis::K => c.k as f64,
            };
            w.serialize(CurveRow {
                model: &c.model,
                method: &c.method,
                x,
                rate: c.rejection_rate,
                mc_se: c.mc_se,
                reps: c.reps,
            })
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> WnError {
    WnError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid(models: Vec<ModelSpec>, methods: Vec<McMethod>) -> McGrid {
        McGrid {
            n_list: vec![40],
            p_list: vec![4],
            k_list: vec![1],
            reps: 100,
            base_seed: 11,
            ..McGrid::new(models, methods)
        }
    }

    #[test]
    fn method_labels_round_trip() {
        for m in [
            McMethod::from(Method::TauStar),
            McMethod::from(Method::ChatterjeeXi),
            McMethod::LStat {
                method: Method::HoeffdingD,
                l: 5,
                perms: 200,
            },
        ] {
            assert_eq!(m.to_string().parse::<McMethod>().unwrap(), m);
        }
        assert!("lstat_d_L5".parse::<McMethod>().is_err());
        assert!("lstat_d_5_B100".parse::<McMethod>().is_err());
    }

    #[test]
    fn grid_guards() {
        let base = small_grid(vec![ModelSpec::null(NullModel::I)], vec![Method::TauStar.into()]);
        assert!(base.validate().is_ok());
        assert!(McGrid {
            reps: 10,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(McGrid {
            alpha: 1.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(McGrid {
            alpha: 0.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(McGrid {
            n_list: vec![12],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(McGrid {
            n_list: vec![11],
            k_list: vec![1],
            methods: vec![Method::KendallTau.into()],
            ..base.clone()
        }
        .validate()
        .is_ok());
        assert!(McGrid {
            k_list: vec![0],
            ..base.clone()
        }
        .validate()
        .is_err());
        let alt = McGrid {
            models: vec![ModelSpec::alt(AltForm::I, 0.5, 5)],
            ..base.clone()
        };
        assert!(alt.validate().is_err());
        let lstat = McGrid {
            methods: vec![McMethod::LStat {
                method: Method::TauStar,
                l: 1,
                perms: 50,
            }],
            ..base.clone()
        };
        assert!(lstat.validate().is_err());
        assert!(run_power(&base).is_err());
        assert!(run_size(&McGrid {
            models: vec![ModelSpec::alt(AltForm::I, 0.5, 2)],
            ..base
        })
        .is_err());
    }

    #[test]
    fn seeds_separate_cells() {
        let m = ModelSpec::null(NullModel::I);
        let a = ModelSpec::alt(AltForm::I, 0.5, 2);
        let s = replicate_seed(1, &m, 100, 30, 2, 0);
        assert_eq!(s, replicate_seed(1, &m, 100, 30, 2, 0));
        for other in [
            replicate_seed(2, &m, 100, 30, 2, 0),
            replicate_seed(1, &a, 100, 30, 2, 0),
            replicate_seed(1, &m, 101, 30, 2, 0),
            replicate_seed(1, &m, 100, 31, 2, 0),
            replicate_seed(1, &m, 100, 30, 3, 0),
            replicate_seed(1, &m, 100, 30, 2, 1),
        ] {
            assert_ne!(s, other);
        }
        assert_ne!(
            model_hash(&ModelSpec::alt(AltForm::I, 0.5, 2)),
            model_hash(&ModelSpec::alt(AltForm::I, 0.3, 2))
        );
    }

    #[test]
    fn mc_se_formula() {
        assert_eq!(mc_se(0.0, 100), 0.0);
        assert!((mc_se(0.5, 100) - 0.05).abs() < 1e-15);
        assert_eq!(mc_se(0.3, 0), 0.0);
    }

    #[test]
    fn table_is_schedule_independent() {
        let grid = small_grid(
            vec![ModelSpec::null(NullModel::Iii), ModelSpec::null(NullModel::Vi)],
            vec![Method::SpearmanRho.into(), Method::HoeffdingD.into()],
        );
        let one = with_threads(Some(1), || run_size(&grid)).unwrap().unwrap();
        let three = with_threads(Some(3), || run_size(&grid)).unwrap().unwrap();
        assert_eq!(one.cells, three.cells);
        assert_eq!(one.cells.len(), 4);
        for c in &one.cells {
            assert!((0.0..=1.0).contains(&c.rejection_rate));
            assert_eq!(c.reps, 100);
            assert!(!c.partial);
            assert_eq!(c.mc_se, mc_se(c.rejection_rate, 100));
        }
    }

    #[test]
    fn permutation_size_at_half() {
        // A calibrated permutation test rejects about half the time at α = 0.5.
        let grid = McGrid {
            alpha: 0.5,
            reps: 200,
            ..small_grid(
                vec![ModelSpec::null(NullModel::I)],
                vec![McMethod::LStat {
                    method: Method::SpearmanRho,
                    l: 2,
                    perms: 100,
                }],
            )
        };
        let table = run_size(&grid).unwrap();
        let rate = table.cells[0].rejection_rate;
        assert!((rate - 0.5).abs() < 4.0 * mc_se(0.5, 200), "rate {rate}");
    }

    #[test]
    fn failures_mark_cells_partial() {
        let grid = McGrid {
            burn_in: 3000,
            ..small_grid(
                vec![ModelSpec::alt(AltForm::I, 40.0, 3)],
                vec![Method::SpearmanRho.into()],
            )
        };
        let table = run_power(&grid).unwrap();
        let c = &table.cells[0];
        assert!(c.failed > 0 && c.partial);
        assert_eq!(c.reps + c.failed, 100);
    }

    #[test]
    fn strong_signal_has_power() {
        let grid = McGrid {
            n_list: vec![100],
            ..small_grid(
                vec![ModelSpec::alt(AltForm::V, 0.95, 2)],
                vec![Method::SpearmanRho.into()],
            )
        };
        let table = run_power(&grid).unwrap();
        assert!(table.cells[0].rejection_rate > 0.5);
    }

    #[test]
    fn csv_outputs() {
        let grid = McGrid {
            models: vec![ModelSpec::alt(AltForm::I, 0.2, 2), ModelSpec::alt(AltForm::I, 0.6, 2)],
            ..small_grid(vec![], vec![Method::SpearmanRho.into()])
        };
        let table = run_power(&grid).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("model,rho,k0,method,n,p,K,rejection_rate"));
        let mut buf = Vec::new();
        table.write_curve_csv(&mut buf, CurveAxis::Rho).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,method,x,rate,mc_se,reps");
        assert!(lines[1].starts_with("I,rho,0.2,"));
        assert!(lines[2].starts_with("I,rho,0.6,"));
        let json = serde_json::to_string(&table).unwrap();
        assert_eq!(serde_json::from_str::<McTable>(&json).unwrap(), table);
    }
}
