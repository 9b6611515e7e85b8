//! Seeded random fields.
//!
//! White-noise fields draw an independent matrix per site. Smooth fields are
//! low-mode Fourier series whose coefficients depend only on the seed, so the
//! same seed describes the same continuum field on every grid, which is
//! what refinement studies need.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    project_ah, ConnectionField, EndoField, GaugeField, GridSpec, Mat, OneForm, SiteField,
};

/// Highest Fourier mode used by the smooth generators.
pub const DEFAULT_MAX_MODE: i32 = 2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Anti-Hermitian matrix with standard Gaussian entries before projection.
pub fn random_ah<R: Rng>(rng: &mut R, rank: usize, scale: f64) -> Mat {
    let m = Mat::from_fn(rank, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    project_ah(&m) * Complex64::new(scale, 0.0)
}

fn noise(grid: GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> Vec<Mat> {
    (0..grid.sites())
        .map(|_| random_ah(rng, grid.rank(), amplitude))
        .collect()
}

pub fn random_one_form(grid: GridSpec, seed: u64, amplitude: f64) -> OneForm {
    let mut r = rng(seed);
    let x = noise(grid, &mut r, amplitude);
    let y = noise(grid, &mut r, amplitude);
    OneForm { grid, x, y }
}

pub fn random_endo(grid: GridSpec, seed: u64, amplitude: f64) -> EndoField {
    let mut r = rng(seed);
    SiteField {
        grid,
        values: noise(grid, &mut r, amplitude),
    }
}

pub fn random_gauge(grid: GridSpec, seed: u64, amplitude: f64) -> GaugeField {
    GaugeField::exp(&random_endo(grid, seed, amplitude))
}

/// A `𝔲(r)`-valued trigonometric polynomial on the unit torus.
#[derive(Debug, Clone)]
pub struct FourierField {
    rank: usize,
    /// `(kx, ky, cos coefficient, sin coefficient)`.
    modes: Vec<(i32, i32, Mat, Mat)>,
}

impl FourierField {
    /// Coefficients decay like `1/(1 + |k|²)`.
    pub fn random(rank: usize, seed: u64, amplitude: f64, max_mode: i32) -> Self {
        let mut r = rng(seed);
        let mut modes = Vec::new();
        for kx in -max_mode..=max_mode {
            for ky in -max_mode..=max_mode {
                let w = amplitude / (1.0 + (kx * kx + ky * ky) as f64);
                let c = random_ah(&mut r, rank, w);
                let s = random_ah(&mut r, rank, w);
                modes.push((kx, ky, c, s));
            }
        }
        FourierField { rank, modes }
    }

    /// Drops the constant term, leaving a field with zero mean.
    pub fn without_zero_mode(mut self) -> Self {
        self.modes.retain(|(kx, ky, _, _)| (*kx, *ky) != (0, 0));
        self
    }

    /// The constant term (zero if absent).
    pub fn zero_mode(&self) -> Mat {
        self.modes
            .iter()
            .find(|(kx, ky, _, _)| (*kx, *ky) == (0, 0))
            .map(|(_, _, c, _)| c.clone())
            .unwrap_or_else(|| Mat::zeros(self.rank, self.rank))
    }

    pub fn eval(&self, x: f64, y: f64) -> Mat {
        let mut m = Mat::zeros(self.rank, self.rank);
        for (kx, ky, c, s) in &self.modes {
            let phase = 2.0 * PI * (*kx as f64 * x + *ky as f64 * y);
            m += c * Complex64::new(phase.cos(), 0.0) + s * Complex64::new(phase.sin(), 0.0);
        }
        m
    }

    pub fn sample(&self, grid: GridSpec) -> Vec<Mat> {
        (0..grid.sites())
            .map(|s| {
                let (x, y) = grid.position(s);
                self.eval(x, y)
            })
            .collect()
    }
}

pub fn smooth_one_form(grid: GridSpec, seed: u64, amplitude: f64) -> OneForm {
    let fx = FourierField::random(grid.rank(), seed, amplitude, DEFAULT_MAX_MODE);
    let fy = FourierField::random(
        grid.rank(),
        seed ^ 0x9e37_79b9_7f4a_7c15,
        amplitude,
        DEFAULT_MAX_MODE,
    );
    OneForm {
        grid,
        x: fx.sample(grid),
        y: fy.sample(grid),
    }
}

pub fn smooth_connection(grid: GridSpec, seed: u64, amplitude: f64) -> ConnectionField {
    ConnectionField::from_fluctuation(smooth_one_form(grid, seed, amplitude))
}

pub fn smooth_endo(grid: GridSpec, seed: u64, amplitude: f64) -> EndoField {
    let f = FourierField::random(grid.rank(), seed, amplitude, DEFAULT_MAX_MODE);
    SiteField {
        grid,
        values: f.sample(grid),
    }
}

/// `exp(ξ)` for a smooth `ξ`; homotopic to the identity.
pub fn smooth_gauge(grid: GridSpec, seed: u64, amplitude: f64) -> GaugeField {
    GaugeField::exp(&smooth_endo(grid, seed, amplitude))
}
