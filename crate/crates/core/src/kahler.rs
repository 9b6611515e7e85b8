//! Kähler reduction of `ℂⁿ` by the diagonal circle action.
//!
//! Conventions: the metric is `g(v, w) = Re⟨v, w⟩`, the complex structure
//! is multiplication by `i`, and the symplectic form is
//! `ω(v, w) = g(Jv, w) = Im⟨v, w⟩` with `⟨v, w⟩ = Σ conj(vₖ) wₖ`, so that
//! `g(v, w) = ω(v, Jw)`. The circle acts by `e^{−iθ} z`, its generator is
//! `X#(z) = −iz`, and `μ(z) = ½|z|² − c` satisfies `ω(X#, v) = dμ(v)`.
//!
//! The level set `μ⁻¹(0)` is the sphere of radius `R = √(2c)`, and the
//! quotient is a projective line of area `πR² = 2πc`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::lattice::random::rng;

pub type CVec = DVector<Complex64>;

/// Tolerance for membership of the level set.
pub const LEVEL_TOL: f64 = 1e-12;
/// Smallest accepted Monte-Carlo sample count.
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KahlerError {
    #[error("need n ≥ 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("point is not on the level set: μ = {0:e}")]
    OffLevel(f64),
    #[error("the circle does not act freely at the origin")]
    Origin,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("level must be positive, got {0}")]
    NonPositiveLevel(f64),
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

pub fn inner(v: &CVec, w: &CVec) -> Complex64 {
    v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn metric(v: &CVec, w: &CVec) -> f64 {
    inner(v, w).re
}

pub fn omega(v: &CVec, w: &CVec) -> f64 {
    inner(v, w).im
}

pub fn moment(z: &CVec, level: f64) -> f64 {
    0.5 * z.iter().map(|c| c.norm_sqr()).sum::<f64>() - level
}

/// `dμ_z(v) = Re⟨z, v⟩`.
pub fn moment_differential(z: &CVec, v: &CVec) -> f64 {
    metric(z, v)
}

/// Generator of the circle action at `z`.
pub fn orbit_direction(z: &CVec) -> CVec {
    z * (-Complex64::i())
}

/// `|ω(X#, v) − (μ(z+tv) − μ(z−tv))/2t|`.
pub fn momentum_relation_residual(z: &CVec, v: &CVec, t: f64) -> f64 {
    let fd = (moment(&(z + v * Complex64::from(t)), 0.0)
        - moment(&(z - v * Complex64::from(t)), 0.0))
        / (2.0 * t);
    (omega(&orbit_direction(z), v) - fd).abs()
}

/// Real basis `e₁, ie₁, …, eₙ, ieₙ` of `T_zℂⁿ`.
pub fn real_basis(n: usize) -> Vec<CVec> {
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for c in [Complex64::new(1.0, 0.0), Complex64::i()] {
            let mut v = CVec::zeros(n);
            v[k] = c;
            out.push(v);
        }
    }
    out
}

fn require_level(z: &CVec, level: f64) -> Result<(), KahlerError> {
    if z.len() < 2 {
        return Err(KahlerError::DimensionTooSmall(z.len()));
    }
    let m = moment(z, level);
    if m.is_nan() || m.abs() > LEVEL_TOL {
        return Err(KahlerError::OffLevel(m));
    }
    Ok(())
}

/// Worst mismatch over a real basis between `dμ(v)` and `ω(X#, v)`: the
/// kernel of `dμ` is exactly the symplectic complement of the orbit.
pub fn check_kernel_complement(z: &CVec, level: f64) -> Result<f64, KahlerError> {
    check_kernel_complement_with(z, level, omega)
}

/// As [`check_kernel_complement`] with a caller-supplied symplectic form.
pub fn check_kernel_complement_with(
    z: &CVec,
    level: f64,
    form: impl Fn(&CVec, &CVec) -> f64,
) -> Result<f64, KahlerError> {
    require_level(z, level)?;
    let x = orbit_direction(z);
    Ok(real_basis(z.len())
        .iter()
        .map(|v| (moment_differential(z, v) - form(&x, v)).abs())
        .fold(0.0, f64::max))
}

/// Complex vector as a real `2n` column.
pub fn realify(v: &CVec) -> DVector<f64> {
    DVector::from_iterator(2 * v.len(), v.iter().flat_map(|c| [c.re, c.im]))
}

fn complexify(v: &DVector<f64>) -> CVec {
    CVec::from_iterator(
        v.len() / 2,
        (0..v.len() / 2).map(|k| Complex64::new(v[2 * k], v[2 * k + 1])),
    )
}

/// Real orthonormal basis of `{v : g(v, w) = 0 for all w in vs}`.
fn orthogonal_complement(n: usize, vs: &[CVec], threshold: f64) -> Vec<CVec> {
    let mut gram = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for w in vs {
        let r = realify(w);
        gram += &r * r.transpose();
    }
    let eig = SymmetricEigen::new(gram);
    (0..2 * n)
        .filter(|&i| eig.eigenvalues[i].abs() <= threshold)
        .map(|i| complexify(&eig.eigenvectors.column(i).into_owned()))
        .collect()
}

fn rank(vs: &[CVec], threshold: f64) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let cols: Vec<DVector<f64>> = vs.iter().map(realify).collect();
    let m = DMatrix::from_columns(&cols);
    m.svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// Horizontal space `H_z = (T orbit ⊕ J·T orbit)^⊥`, as a real basis.
pub fn horizontal_basis(z: &CVec) -> Vec<CVec> {
    let x = orbit_direction(z);
    let jx = &x * Complex64::i();
    orthogonal_complement(z.len(), &[x, jx], 1e-10 * z.norm_squared().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Splitting {
    pub horizontal: usize,
    pub orbit: usize,
    pub j_orbit: usize,
    /// Rank of the three spaces stacked together.
    pub total: usize,
    /// `dim(T orbit) + dim(J T orbit) − rank(T orbit + J T orbit)`.
    pub orbit_overlap: usize,
}

/// Numerically computed dimensions of `H_z`, `T_z(K·z)` and `J·T_z(K·z)`.
pub fn check_splitting(z: &CVec, level: f64) -> Result<Splitting, KahlerError> {
    if z.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
        return Err(KahlerError::Origin);
    }
    require_level(z, level)?;
    let threshold = 1e-10;
    let x = orbit_direction(z);
    let jx = &x * Complex64::i();
    let h = horizontal_basis(z);
    let orbit = rank(std::slice::from_ref(&x), threshold);
    let j_orbit = rank(std::slice::from_ref(&jx), threshold);
    let pair = rank(&[x.clone(), jx.clone()], threshold);
    let mut all = h.clone();
    all.push(x);
    all.push(jx);
    Ok(Splitting {
        horizontal: rank(&h, threshold),
        orbit,
        j_orbit,
        total: rank(&all, threshold),
        orbit_overlap: orbit + j_orbit - pair,
    })
}

/// Orthogonal projection onto `H_z`.
pub fn project_horizontal(z: &CVec, v: &CVec) -> CVec {
    let x = orbit_direction(z);
    let jx = &x * Complex64::i();
    let mut out = v.clone();
    for w in [x, jx] {
        let c = metric(&w, v) / metric(&w, &w);
        out -= w * Complex64::from(c);
    }
    out
}

/// `ω^red([v], [w]) = ω_z(v_H, w_H)` with horizontal lifts.
pub fn reduced_form(z: &CVec, v: &CVec, w: &CVec) -> f64 {
    omega(&project_horizontal(z, v), &project_horizontal(z, w))
}

/// Uniformly random point on the level sphere `|z|² = 2c`.
pub fn random_level_point<R: Rng>(rng: &mut R, n: usize, level: f64) -> CVec {
    let v = CVec::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let r = (2.0 * level).sqrt();
    let out = &v * Complex64::from(r / v.norm());
    // Renormalise so that the level condition holds to rounding.
    let s = (2.0 * level / out.norm_squared()).sqrt();
    out * Complex64::from(s)
}

pub fn random_tangent<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Level-set section over the affine chart `w ↦ [1 : w]` and its partial
/// derivatives along `Re w` and `Im w`.
pub fn chart_section(w: Complex64, level: f64) -> (CVec, CVec, CVec) {
    let r = (2.0 * level).sqrt();
    let s = 1.0 + w.norm_sqr();
    let k = r / s.sqrt();
    let z = CVec::from_vec(vec![Complex64::from(k), w * k]);
    // ∂k/∂u = −r·u·s^{-3/2}, ∂k/∂v = −r·v·s^{-3/2}.
    let dk_du = -r * w.re * s.powf(-1.5);
    let dk_dv = -r * w.im * s.powf(-1.5);
    let du = CVec::from_vec(vec![Complex64::from(dk_du), w * dk_du + Complex64::from(k)]);
    let dv = CVec::from_vec(vec![
        Complex64::from(dk_dv),
        w * dk_dv + Complex64::new(0.0, k),
    ]);
    (z, du, dv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    pub area: f64,
    pub std_error: f64,
    /// Set when the standard error exceeds 1% of the estimate.
    pub insufficient: bool,
}

/// Total `ω^red` area of `μ⁻¹(c)/S¹` for `n = 2`.
///
/// The chart `w ↦ [1 : w]` covers the quotient up to a point. Chart points
/// are drawn with uniform angle and `|w| = ρ` distributed with cumulative
/// distribution `1 − (1+ρ²)^{−1/2}`, and the integrand `ω^red(∂ᵤ, ∂ᵥ)` is
/// importance-weighted by the inverse of that density.
pub fn reduced_area(level: f64, samples: usize, seed: u64) -> Result<AreaEstimate, KahlerError> {
    if level.is_nan() || level <= 0.0 {
        return Err(KahlerError::NonPositiveLevel(level));
    }
    if samples < MIN_SAMPLES {
        return Err(KahlerError::TooFewSamples(samples));
    }
    let mut r = rng(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let u: f64 = r.gen();
        let t = 1.0 / (1.0 - u);
        let rho = (t * t - 1.0).max(0.0).sqrt();
        let theta = 2.0 * PI * r.gen::<f64>();
        let w = Complex64::from_polar(rho, theta);
        let (z, du, dv) = chart_section(w, level);
        // Density with respect to dρ dθ; the area element is ρ dρ dθ.
        let density = rho / (2.0 * PI * (1.0 + rho * rho).powf(1.5));
        let value = if density > 0.0 {
            reduced_form(&z, &du, &dv) * rho / density
        } else {
            0.0
        };
        sum += value;
        sum_sq += value * value;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    let std_error = (var / m).sqrt();
    let area = mean.abs();
    Ok(AreaEstimate {
        area,
        std_error,
        insufficient: std_error > 0.01 * area,
    })
}

/// Riemannian gradient of a function with symplectic gradient `s`:
/// `∇^Riem = J ∇^symp`, i.e. multiplication by `i`.
pub fn riemannian_from_symplectic(s: &CVec) -> CVec {
    s * Complex64::i()
}
