//! Data-generating processes for size and power experiments.
//!
//! Null models `ε_t = A z_t` combine four innovation laws with two mixing
//! matrices; alternatives are sparse VAR(1)-type and MA(1)-type processes
//! with elementwise nonlinear links.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WnError};
use crate::panel::SeriesPanel;

pub const DEFAULT_BURN_IN: usize = 200;

/// Stream of a generator's RNG reserved for the mixing matrix, so that
/// fixing `A` leaves the innovations unchanged.
const MATRIX_STREAM: u64 = 1;
const INNOVATION_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Innovation {
    /// (a) standard normal.
    Normal,
    /// (b) signed cube root of a standard normal.
    CubeRootNormal,
    /// (c) cube of a standard normal.
    CubedNormal,
    /// (d) Student t with 3 degrees of freedom over √3.
    StudentT3,
}

impl Innovation {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, t3: &StudentT<f64>) -> f64 {
        match self {
            Innovation::Normal => rng.sample(StandardNormal),
            Innovation::CubeRootNormal => rng.sample::<f64, _>(StandardNormal).cbrt(),
            Innovation::CubedNormal => rng.sample::<f64, _>(StandardNormal).powi(3),
            Innovation::StudentT3 => t3.sample(rng) / 3f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mixing {
    /// `A = Σ^{1/2}` with `Σ_ij = 0.5^{|i-j|}`.
    Toeplitz,
    /// `a_ij` i.i.d. uniform on (-1, 1).
    Uniform,
}

/// The eight null models, `(i)`–`(viii)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NullModel {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
}

const NULL_NAMES: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];
const ALT_NAMES: [&str; 8] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"];

impl NullModel {
    pub const ALL: [NullModel; 8] = [
        NullModel::I,
        NullModel::Ii,
        NullModel::Iii,
        NullModel::Iv,
        NullModel::V,
        NullModel::Vi,
        NullModel::Vii,
        NullModel::Viii,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn innovation(self) -> Innovation {
        [
            Innovation::Normal,
            Innovation::CubeRootNormal,
            Innovation::CubedNormal,
            Innovation::StudentT3,
        ][self.index() % 4]
    }

    pub fn mixing(self) -> Mixing {
        if self.index() < 4 {
            Mixing::Toeplitz
        } else {
            Mixing::Uniform
        }
    }

    pub fn from_parts(innovation: Innovation, mixing: Mixing) -> Self {
        let base = match mixing {
            Mixing::Toeplitz => 0,
            Mixing::Uniform => 4,
        };
        Self::ALL[base + innovation as usize]
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(NULL_NAMES[self.index()])
    }
}

impl FromStr for NullModel {
    type Err = WnError;

    fn from_str(s: &str) -> Result<Self> {
        NULL_NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| WnError::Config(format!("unknown null model '{s}' (expected i..viii)")))
    }
}

/// The eight alternatives, `(I)`–`(VIII)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AltForm {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
}

/// Elementwise function applied to `A v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Identity,
    /// `sin(2π/3 · x)`.
    Sine,
    /// `sin(π/3 · x^{1/3})`.
    SineCubeRoot,
    /// `x^{1/3}`.
    CubeRoot,
}

impl Link {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Link::Identity => x,
            Link::Sine => (2.0 * PI / 3.0 * x).sin(),
            Link::SineCubeRoot => (PI / 3.0 * x.cbrt()).sin(),
            Link::CubeRoot => x.cbrt(),
        }
    }
}

impl AltForm {
    pub const ALL: [AltForm; 8] = [
        AltForm::I,
        AltForm::Ii,
        AltForm::Iii,
        AltForm::Iv,
        AltForm::V,
        AltForm::Vi,
        AltForm::Vii,
        AltForm::Viii,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// VAR-type forms feed back `ε_{t-1}`; the others use `z_{t-1}`.
    pub fn is_autoregressive(self) -> bool {
        self.index() < 4
    }

    pub fn link(self) -> Link {
        [Link::Identity, Link::Sine, Link::SineCubeRoot, Link::CubeRoot][self.index() % 4]
    }
}

impl fmt::Display for AltForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(ALT_NAMES[self.index()])
    }
}

impl FromStr for AltForm {
    type Err = WnError;

    fn from_str(s: &str) -> Result<Self> {
        ALT_NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| WnError::Config(format!("unknown alternative '{s}' (expected I..VIII)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelSpec {
    pub model: NullModel,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    /// Draw the uniform mixing matrix from this seed instead of `seed`.
    pub matrix_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltModelSpec {
    pub form: AltForm,
    pub rho: f64,
    pub k0: usize,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub burn_in: usize,
    /// Draw `A` from this seed instead of `seed`, keeping it fixed across
    /// replications.
    pub matrix_seed: Option<u64>,
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_dims(n: usize, p: usize) -> Result<()> {
    if n == 0 || p == 0 {
        Err(WnError::Config(format!(
            "panel dimensions must be positive, got n={n}, p={p}"
        )))
    } else {
        Ok(())
    }
}

/// Symmetric square root of `Σ = (0.5^{|i-j|})`.
pub fn sigma_half(p: usize) -> DMatrix<f64> {
    let sigma = DMatrix::from_fn(p, p, |i, j| 0.5f64.powi(i.abs_diff(j) as i32));
    let eig = SymmetricEigen::new(sigma);
    let root = eig.eigenvalues.map(|l| l.max(1e-12).sqrt());
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&root) * v.transpose()
}

fn uniform_matrix<R: Rng + ?Sized>(rows: usize, bound: f64, rng: &mut R) -> DMatrix<f64> {
    if bound == 0.0 {
        return DMatrix::zeros(rows, rows);
    }
    let u = Uniform::new(-bound, bound).expect("non-empty range");
    DMatrix::from_fn(rows, rows, |_, _| u.sample(rng))
}

/// Mixing matrix of a null model.
pub fn null_matrix(spec: &NullModelSpec) -> DMatrix<f64> {
    match spec.model.mixing() {
        Mixing::Toeplitz => sigma_half(spec.p),
        Mixing::Uniform => {
            let mut rng = stream(spec.matrix_seed.unwrap_or(spec.seed), MATRIX_STREAM);
            uniform_matrix(spec.p, 1.0, &mut rng)
        }
    }
}

/// `n × p` innovations, column-major.
fn innovations(innovation: Innovation, n: usize, p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let t3 = StudentT::new(3.0).expect("valid degrees of freedom");
    // Row by row so that a prefix of rows does not depend on n.
    let mut z = DMatrix::zeros(n, p);
    for t in 0..n {
        for i in 0..p {
            z[(t, i)] = innovation.draw(rng, &t3);
        }
    }
    z
}

pub fn gen_null(spec: &NullModelSpec) -> Result<SeriesPanel> {
    check_dims(spec.n, spec.p)?;
    let a = null_matrix(spec);
    let mut rng = stream(spec.seed, INNOVATION_STREAM);
    let z = innovations(spec.model.innovation(), spec.n, spec.p, &mut rng);
    // Row t of Z Aᵀ is (A z_t)ᵀ.
    let eps = z * a.transpose();
    SeriesPanel::from_column_major(spec.n, spec.p, eps.as_slice().to_vec())
}

/// The `k0 × k0` nonzero block of `A` for an alternative.
pub fn alt_block(spec: &AltModelSpec) -> DMatrix<f64> {
    let mut rng = stream(spec.matrix_seed.unwrap_or(spec.seed), MATRIX_STREAM);
    uniform_matrix(spec.k0, spec.rho, &mut rng)
}

/// The full `p × p` matrix `A`, zero outside the leading block.
pub fn alt_matrix(spec: &AltModelSpec) -> DMatrix<f64> {
    let block = alt_block(spec);
    let mut a = DMatrix::zeros(spec.p, spec.p);
    a.view_mut((0, 0), (spec.k0, spec.k0)).copy_from(&block);
    a
}

fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn gen_alt(spec: &AltModelSpec) -> Result<SeriesPanel> {
    check_dims(spec.n, spec.p)?;
    if !(spec.rho.is_finite() && spec.rho >= 0.0) {
        return Err(WnError::Config(format!(
            "rho must be finite and >= 0, got {}",
            spec.rho
        )));
    }
    if spec.k0 == 0 || spec.k0 > spec.p {
        return Err(WnError::Config(format!(
            "k0 must lie in 1..={}, got {}",
            spec.p, spec.k0
        )));
    }
    let (n, p, k0) = (spec.n, spec.p, spec.k0);
    let block = alt_block(spec);
    let link = spec.form.link();
    let autoregressive = spec.form.is_autoregressive();
    if autoregressive && spec.rho > 0.0 {
        let radius = spectral_radius(&block);
        if radius >= 1.0 {
            log::warn!(
                "model {} with rho={} has spectral radius {radius:.3} >= 1",
                spec.form,
                spec.rho
            );
        }
    }

    let mut rng = stream(spec.seed, INNOVATION_STREAM);
    // VAR forms discard a burn-in; MA forms need one extra leading z.
    let lead = if autoregressive { spec.burn_in } else { 1 };
    let z = innovations(Innovation::Normal, lead + n, p, &mut rng);

    let mut out = vec![0.0; n * p];
    let mut prev = vec![0.0; p];
    let mut cur = vec![0.0; p];
    for t in 0..lead + n {
        // The lagged input: ε_{t-1} (zero before the start) or z_{t-1}.
        let input: Vec<f64> = if autoregressive {
            prev[..k0].to_vec()
        } else if t == 0 {
            vec![0.0; k0]
        } else {
            (0..k0).map(|i| z[(t - 1, i)]).collect()
        };
        for i in 0..p {
            let drive = if i < k0 {
                let av: f64 = (0..k0).map(|j| block[(i, j)] * input[j]).sum();
                link.apply(av)
            } else {
                0.0
            };
            cur[i] = drive + z[(t, i)];
            if !cur[i].is_finite() {
                return Err(WnError::DivergedModel { t });
            }
        }
        if t >= lead {
            for i in 0..p {
                out[i * n + (t - lead)] = cur[i];
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    SeriesPanel::from_column_major(n, p, out)
}
