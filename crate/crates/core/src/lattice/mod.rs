//! Unitary gauge theory on the unit-area flat torus, discretized on a
//! periodic `n × n` grid.
//!
//! Fields are collocated at grid sites and differentiated with the centered
//! periodic difference `D⁰`, which is exactly skew-adjoint under the periodic
//! sum. A connection is stored as its periodic fluctuation `a` around a
//! central background of curvature `i2π(d/r)·Id` per unit area, so every
//! rank and degree is representable and commutators with the background
//! vanish.
//!
//! Sites are indexed row-major: site `(ix, iy)` lives at `iy * n + ix`, so
//! "row 0" runs along `x` and "column 0" runs along `y`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

mod ops;
pub mod random;
pub mod snapshot;

pub use ops::*;

/// Square complex matrix; every field value is one of these.
pub type Mat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("grid side {0} must be a power of two and at least 8")]
    BadGridSide(usize),
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("field has {got} sites, grid needs {want}")]
    SiteCount { got: usize, want: usize },
    #[error("value at site ({ix}, {iy}) is {got}×{got}, rank is {want}")]
    MatrixShape {
        ix: usize,
        iy: usize,
        got: usize,
        want: usize,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("gauge value at site ({ix}, {iy}) is singular")]
    Singular { ix: usize, iy: usize },
}

/// Periodic grid on the unit torus carrying a bundle of rank `r` and
/// degree `d`. Spacing is `h = 1/n`, so the total area `n²h²` is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
    rank: usize,
    degree: i64,
}

impl GridSpec {
    pub fn new(n: usize, rank: usize, degree: i64) -> Result<Self, LatticeError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(LatticeError::BadGridSide(n));
        }
        if rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        Ok(GridSpec { n, rank, degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn sites(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        (iy % self.n) * self.n + ix % self.n
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.n, site / self.n)
    }

    /// Physical position of a site in `[0, 1)²`.
    pub fn position(&self, site: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(site);
        (ix as f64 * self.h(), iy as f64 * self.h())
    }

    /// Central curvature `i2π(d/r)·Id` of the background connection.
    pub fn background_curvature(&self) -> Mat {
        let c = I * (2.0 * PI * self.degree as f64 / self.rank as f64);
        Mat::identity(self.rank, self.rank) * c
    }

    pub fn zero_mat(&self) -> Mat {
        Mat::zeros(self.rank, self.rank)
    }

    fn check_values(&self, values: &[Mat]) -> Result<(), LatticeError> {
        if values.len() != self.sites() {
            return Err(LatticeError::SiteCount {
                got: values.len(),
                want: self.sites(),
            });
        }
        for (s, m) in values.iter().enumerate() {
            if m.nrows() != self.rank || m.ncols() != self.rank {
                let (ix, iy) = self.coords(s);
                return Err(LatticeError::MatrixShape {
                    ix,
                    iy,
                    got: m.nrows(),
                    want: self.rank,
                });
            }
        }
        Ok(())
    }
}

/// `½(M − M†)`; the result is exactly anti-Hermitian.
pub fn project_ah(m: &Mat) -> Mat {
    (m - m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `κ(a, b) = −Re tr(ab)`, the positive inner product on `𝔲(r)`.
pub fn kappa(a: &Mat, b: &Mat) -> f64 {
    // tr(ab) without forming the product.
    let r = a.nrows();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..r {
        for k in 0..r {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    -t.re
}

/// Largest deviation from anti-Hermiticity, `max |M + M†|`.
pub fn ah_defect(m: &Mat) -> f64 {
    (m + m.adjoint())
        .iter()
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Operator (spectral) norm.
pub fn op_norm(m: &Mat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Closest unitary matrix in Frobenius norm: `U Vᴴ` from the SVD.
pub fn polar_unitary(m: &Mat) -> Mat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    u * v_t
}

/// One matrix per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteField {
    pub grid: GridSpec,
    pub values: Vec<Mat>,
}

/// Infinitesimal gauge parameter `ξ ∈ Ω⁰(𝔲(r))`.
pub type EndoField = SiteField;

/// Coefficient of `dx∧dy` of a curvature 2-form, background included.
pub type CurvatureField = SiteField;

impl SiteField {
    pub fn new(grid: GridSpec, values: Vec<Mat>) -> Result<Self, LatticeError> {
        grid.check_values(&values)?;
        Ok(SiteField { grid, values })
    }

    /// Anti-Hermitian projection of each value.
    pub fn new_ah(grid: GridSpec, values: Vec<Mat>) -> Result<Self, LatticeError> {
        grid.check_values(&values)?;
        Ok(SiteField {
            grid,
            values: values.iter().map(project_ah).collect(),
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SiteField {
            grid,
            values: vec![grid.zero_mat(); grid.sites()],
        }
    }

    pub fn constant(grid: GridSpec, m: &Mat) -> Result<Self, LatticeError> {
        SiteField::new(grid, vec![m.clone(); grid.sites()])
    }

    pub fn scale(&self, s: f64) -> Self {
        SiteField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|m| m * Complex64::new(s, 0.0))
                .collect(),
        }
    }

    pub fn add(&self, other: &SiteField) -> Self {
        SiteField {
            grid: self.grid,
            values: zip_with(&self.values, &other.values, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &SiteField) -> Self {
        SiteField {
            grid: self.grid,
            values: zip_with(&self.values, &other.values, |a, b| a - b),
        }
    }

    /// Maximum entry modulus over all sites.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// `h² Σ κ(ξ, f)`, the L² pairing of 0-forms (or of a 0-form with the
    /// coefficient of a 2-form).
    pub fn pair(&self, other: &SiteField) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        let mut s = 0.0;
        for (a, b) in self.values.iter().zip(&other.values) {
            s += kappa(a, b);
        }
        h2 * s
    }
}

/// A `𝔲(r)`-valued 1-form `b_x dx + b_y dy`: a tangent vector to the space
/// of connections.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub grid: GridSpec,
    pub x: Vec<Mat>,
    pub y: Vec<Mat>,
}

pub type TangentField = OneForm;

impl OneForm {
    pub fn new(grid: GridSpec, x: Vec<Mat>, y: Vec<Mat>) -> Result<Self, LatticeError> {
        grid.check_values(&x)?;
        grid.check_values(&y)?;
        Ok(OneForm { grid, x, y })
    }

    /// Anti-Hermitian projection of each component.
    pub fn new_ah(grid: GridSpec, x: Vec<Mat>, y: Vec<Mat>) -> Result<Self, LatticeError> {
        grid.check_values(&x)?;
        grid.check_values(&y)?;
        Ok(OneForm {
            grid,
            x: x.iter().map(project_ah).collect(),
            y: y.iter().map(project_ah).collect(),
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        OneForm {
            grid,
            x: vec![grid.zero_mat(); grid.sites()],
            y: vec![grid.zero_mat(); grid.sites()],
        }
    }

    pub fn constant(grid: GridSpec, x: &Mat, y: &Mat) -> Result<Self, LatticeError> {
        OneForm::new(
            grid,
            vec![x.clone(); grid.sites()],
            vec![y.clone(); grid.sites()],
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        let c = Complex64::new(s, 0.0);
        OneForm {
            grid: self.grid,
            x: self.x.iter().map(|m| m * c).collect(),
            y: self.y.iter().map(|m| m * c).collect(),
        }
    }

    pub fn add(&self, other: &OneForm) -> Self {
        OneForm {
            grid: self.grid,
            x: zip_with(&self.x, &other.x, |a, b| a + b),
            y: zip_with(&self.y, &other.y, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &OneForm) -> Self {
        OneForm {
            grid: self.grid,
            x: zip_with(&self.x, &other.x, |a, b| a - b),
            y: zip_with(&self.y, &other.y, |a, b| a - b),
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &OneForm) -> Self {
        let c = Complex64::new(s, 0.0);
        OneForm {
            grid: self.grid,
            x: zip_with(&self.x, &other.x, |a, b| a + b * c),
            y: zip_with(&self.y, &other.y, |a, b| a + b * c),
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.x).max(max_abs(&self.y))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Largest anti-Hermiticity defect over both components.
    pub fn ah_defect(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .fold(0.0, |acc, m| acc.max(ah_defect(m)))
    }
}

/// A unitary connection `A = A₀ + a`; only the periodic fluctuation `a` is
/// stored, the background `A₀` is fixed by the grid's rank and degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionField {
    fluct: OneForm,
}

impl ConnectionField {
    /// Components are projected to `𝔲(r)`.
    pub fn new(grid: GridSpec, ax: Vec<Mat>, ay: Vec<Mat>) -> Result<Self, LatticeError> {
        Ok(ConnectionField {
            fluct: OneForm::new_ah(grid, ax, ay)?,
        })
    }

    /// The background connection alone.
    pub fn background(grid: GridSpec) -> Self {
        ConnectionField {
            fluct: OneForm::zeros(grid),
        }
    }

    /// Uses `fluct` as the fluctuation after projecting to `𝔲(r)`.
    pub fn from_fluctuation(fluct: OneForm) -> Self {
        let OneForm { grid, x, y } = fluct;
        ConnectionField {
            fluct: OneForm {
                grid,
                x: x.iter().map(project_ah).collect(),
                y: y.iter().map(project_ah).collect(),
            },
        }
    }

    pub(crate) fn from_fluctuation_unchecked(fluct: OneForm) -> Self {
        ConnectionField { fluct }
    }

    pub fn grid(&self) -> GridSpec {
        self.fluct.grid
    }

    pub fn ax(&self) -> &[Mat] {
        &self.fluct.x
    }

    pub fn ay(&self) -> &[Mat] {
        &self.fluct.y
    }

    pub fn fluctuation(&self) -> &OneForm {
        &self.fluct
    }

    /// `A + b`.
    pub fn translate(&self, b: &TangentField) -> Self {
        ConnectionField {
            fluct: self.fluct.add(b),
        }
    }
}

/// A unitary gauge transformation, one `U(r)` element per site.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub grid: GridSpec,
    pub u: Vec<Mat>,
}

impl GaugeField {
    /// Values are re-unitarized by polar projection.
    pub fn new(grid: GridSpec, u: Vec<Mat>) -> Result<Self, LatticeError> {
        grid.check_values(&u)?;
        Ok(GaugeField {
            grid,
            u: u.iter().map(polar_unitary).collect(),
        })
    }

    pub fn identity(grid: GridSpec) -> Self {
        GaugeField {
            grid,
            u: vec![Mat::identity(grid.rank, grid.rank); grid.sites()],
        }
    }

    /// Pointwise `exp(ξ)`.
    pub fn exp(xi: &EndoField) -> Self {
        GaugeField {
            grid: xi.grid,
            u: xi
                .values
                .iter()
                .map(|m| polar_unitary(&m.clone().exp()))
                .collect(),
        }
    }

    /// Pointwise product `(uv)(p) = u(p) v(p)`.
    pub fn compose(&self, other: &GaugeField) -> Self {
        GaugeField {
            grid: self.grid,
            u: zip_with(&self.u, &other.u, |a, b| a * b),
        }
    }

    /// Largest `‖u u† − Id‖` entry.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Mat::identity(self.grid.rank, self.grid.rank);
        self.u.iter().fold(0.0, |acc, m| {
            acc.max(
                (m * m.adjoint() - &id)
                    .iter()
                    .fold(0.0, |a, z| a.max(z.norm())),
            )
        })
    }
}

pub(crate) fn zip_with(a: &[Mat], b: &[Mat], f: impl Fn(&Mat, &Mat) -> Mat) -> Vec<Mat> {
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

pub(crate) fn max_abs(v: &[Mat]) -> f64 {
    v.iter()
        .flat_map(|m| m.iter())
        .fold(0.0, |acc, z| acc.max(z.norm()))
}
