//! Yang-Mills energy, its gradient, and descent towards central curvature.
//!
//! The energy is `E(A) = h² Σ κ(F_A, F_A)`. Its gradient with respect to
//! the L² metric is the exact adjoint of the discrete linearization
//! `η ↦ d_A η`:
//!
//! ```text
//! G_x =  2 (D⁰_y φ + [a_y, φ])
//! G_y = −2 (D⁰ₓ φ + [a_x, φ])
//! ```
//!
//! where `φ` is the fluctuation part of the curvature (the central
//! background is annihilated by both `D⁰` and commutators). Descent uses
//! Armijo backtracking, so accepted steps never increase the energy.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::random::smooth_connection;
use crate::lattice::{
    commutator, fluctuation_curvature, holonomy_loops, kappa, l2_metric, l2_norm, op_norm,
    ConnectionField, GridSpec, LatticeError, Mat, OneForm, SiteField, TangentField,
};

/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Backtracking gives up after this many halvings.
const MAX_HALVINGS: usize = 60;
/// Amplitude of the seeded smooth initial fluctuation.
pub const DEFAULT_AMPLITUDE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{0}` given twice")]
    DuplicateKey(String),
    #[error("missing config key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value `{value}` for config key `{key}`")]
    BadValue { key: String, value: String },
    #[error("invalid value for config key `grid_n`: {0}")]
    Grid(LatticeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub grid: GridSpec,
    pub seed: u64,
    pub max_steps: usize,
    pub step_size: f64,
    pub tol: f64,
    pub record_every: usize,
}

const KEYS: [&str; 8] = [
    "grid_n",
    "rank",
    "degree",
    "seed",
    "max_steps",
    "step_size",
    "tol",
    "record_every",
];

impl FlowConfig {
    /// Default descent parameters for a grid.
    pub fn for_grid(grid: GridSpec, seed: u64) -> Self {
        FlowConfig {
            grid,
            seed,
            max_steps: 50_000,
            step_size: 1e-3,
            tol: 1e-8,
            record_every: 10,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. `grid_n`, `rank`
    /// and `degree` are required, the remaining keys default as in
    /// [`FlowConfig::for_grid`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey(k.to_string()));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::DuplicateKey(k.to_string()));
            }
        }

        fn get<T: std::str::FromStr>(
            map: &BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<Option<T>, ConfigError> {
            map.get(key)
                .map(|v| {
                    v.parse().map_err(|_| ConfigError::BadValue {
                        key: key.to_string(),
                        value: v.clone(),
                    })
                })
                .transpose()
        }
        let bad = |key: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: map.get(key).cloned().unwrap_or_default(),
        };

        let n: usize = get(&map, "grid_n")?.ok_or(ConfigError::MissingKey("grid_n"))?;
        let rank: usize = get(&map, "rank")?.ok_or(ConfigError::MissingKey("rank"))?;
        let degree: i64 = get(&map, "degree")?.ok_or(ConfigError::MissingKey("degree"))?;
        if rank == 0 {
            return Err(bad("rank"));
        }
        let grid = GridSpec::new(n, rank, degree).map_err(ConfigError::Grid)?;
        let mut cfg = FlowConfig::for_grid(grid, get(&map, "seed")?.unwrap_or(0));
        if let Some(v) = get(&map, "max_steps")? {
            cfg.max_steps = v;
        }
        if let Some(v) = get::<f64>(&map, "step_size")? {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad("step_size"));
            }
            cfg.step_size = v;
        }
        if let Some(v) = get::<f64>(&map, "tol")? {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad("tol"));
            }
            cfg.tol = v;
        }
        if let Some(v) = get::<usize>(&map, "record_every")? {
            if v == 0 {
                return Err(bad("record_every"));
            }
            cfg.record_every = v;
        }
        Ok(cfg)
    }
}

/// Seeded smooth random fluctuation on the configured grid.
pub fn initial_field(cfg: &FlowConfig) -> ConnectionField {
    smooth_connection(cfg.grid, cfg.seed, DEFAULT_AMPLITUDE)
}

/// `4π²d²/r`: the energy of the central background, and the minimum over
/// all connections of the given topological type.
pub fn background_energy(grid: GridSpec) -> f64 {
    let d = grid.degree() as f64;
    4.0 * PI * PI * d * d / grid.rank() as f64
}

/// `E(A) − 4π²d²/r = h² Σ κ(φ, φ)` with `φ` the fluctuation curvature.
///
/// The cross term `2h² Σ κ(F₀, φ)` vanishes identically (`Σ tr φ` telescopes
/// and traces of commutators are zero), so it is not evaluated; its rounding
/// noise would otherwise swamp tiny fluctuation energies.
pub fn excess_energy(a: &ConnectionField) -> f64 {
    let grid = a.grid();
    let phi = fluctuation_curvature(a);
    let quad: f64 = phi.values.iter().map(|f| kappa(f, f)).sum();
    grid.h() * grid.h() * quad
}

/// `h² Σ −tr(F²)` with `F` the full curvature.
pub fn ym_energy(a: &ConnectionField) -> f64 {
    background_energy(a.grid()) + excess_energy(a)
}

pub fn ym_gradient(a: &ConnectionField) -> TangentField {
    let grid = a.grid();
    let phi = fluctuation_curvature(a);
    let n = grid.n();
    let c = Complex64::new(0.5 * n as f64, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut x = Vec::with_capacity(grid.sites());
    let mut y = Vec::with_capacity(grid.sites());
    for s in 0..grid.sites() {
        let (ix, iy) = grid.coords(s);
        let f = &phi.values[s];
        let dx =
            (&phi.values[grid.index(ix + 1, iy)] - &phi.values[grid.index(ix + n - 1, iy)]) * c;
        let dy =
            (&phi.values[grid.index(ix, iy + 1)] - &phi.values[grid.index(ix, iy + n - 1)]) * c;
        x.push((dy + commutator(&a.ay()[s], f)) * two);
        y.push((dx + commutator(&a.ax()[s], f)) * (-two));
    }
    OneForm { grid, x, y }
}

/// `max_sites ‖F − i2π(d/r)·Id‖` in operator norm.
pub fn central_residual(a: &ConnectionField) -> f64 {
    fluctuation_curvature(a)
        .values
        .iter()
        .map(op_norm)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub central_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowTrace {
    pub rows: Vec<TraceRow>,
}

impl FlowTrace {
    pub const HEADER: &'static str = "step,energy,grad_norm,central_residual";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{:e}",
                r.step, r.energy, r.grad_norm, r.central_residual
            )?;
        }
        Ok(())
    }

    pub fn energy_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].energy <= w[0].energy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowOutcome {
    /// Gradient norm reached the tolerance.
    Converged,
    /// Step budget used up first.
    BudgetExhausted,
    /// Backtracking could not find a decreasing step: the energy is flat to
    /// rounding along the gradient.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub field: ConnectionField,
    pub trace: FlowTrace,
    pub outcome: FlowOutcome,
    pub steps: usize,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("energy became non-finite at step {step}")]
    NonFinite { step: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Gradient descent with Armijo backtracking. Each line search starts from
/// the Barzilai-Borwein step `⟨Δa, Δa⟩ / ⟨Δa, ΔG⟩` of the previous accepted
/// step (from `step_size` on the first step or when that quotient is not
/// positive) and halves until the sufficient-decrease test passes. A row is
/// recorded every `record_every` accepted steps and at termination.
pub fn run_flow(a0: &ConnectionField, cfg: &FlowConfig) -> Result<FlowResult, FlowError> {
    if a0.grid() != cfg.grid {
        return Err(LatticeError::GridMismatch.into());
    }
    let bg = background_energy(cfg.grid);
    let mut a = a0.clone();
    let mut excess = excess_energy(&a);
    let mut trace = FlowTrace::default();
    let row = |step: usize, a: &ConnectionField, excess: f64, g: f64| TraceRow {
        step,
        energy: bg + excess,
        grad_norm: g,
        central_residual: central_residual(a),
    };
    let finish = |a: ConnectionField, trace: FlowTrace, outcome, step, g| FlowResult {
        field: a,
        trace,
        outcome,
        steps: step,
        grad_norm: g,
    };

    let mut prev: Option<(OneForm, TangentField)> = None;
    let mut step = 0;
    loop {
        let grad = ym_gradient(&a);
        let g = l2_norm(&grad);
        if !excess.is_finite() || !g.is_finite() {
            return Err(FlowError::NonFinite { step });
        }
        if g <= cfg.tol {
            trace.rows.push(row(step, &a, excess, g));
            return Ok(finish(a, trace, FlowOutcome::Converged, step, g));
        }
        if step >= cfg.max_steps {
            trace.rows.push(row(step, &a, excess, g));
            return Ok(finish(a, trace, FlowOutcome::BudgetExhausted, step, g));
        }
        if step > 0 && step % cfg.record_every == 0 {
            trace.rows.push(row(step, &a, excess, g));
        }

        let mut s = cfg.step_size;
        if let Some((pa, pg)) = &prev {
            let da = a.fluctuation().sub(pa);
            let dg = grad.sub(pg);
            let num = l2_metric(&da, &da)?;
            let den = l2_metric(&da, &dg)?;
            let bb = num / den;
            if den > 0.0 && bb.is_finite() {
                s = bb;
            }
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = ConnectionField::from_fluctuation(a.fluctuation().axpy(-s, &grad));
            let e = excess_energy(&trial);
            if e <= excess - ARMIJO_C1 * s * g * g {
                accepted = Some((trial, e));
                break;
            }
            s *= 0.5;
        }
        let Some((next, e)) = accepted else {
            trace.rows.push(row(step, &a, excess, g));
            return Ok(finish(a, trace, FlowOutcome::Stalled, step, g));
        };
        prev = Some((a.fluctuation().clone(), grad));
        a = next;
        excess = e;
        step += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobianError {
    #[error("Jacobian coordinates need rank 1 and degree 0, got ({rank}, {degree})")]
    NotDegreeZeroLine { rank: usize, degree: i64 },
    #[error("connection is not flat: central residual {residual:e} exceeds {tol:e}")]
    NotFlat { residual: f64, tol: f64 },
}

/// Point of the moduli torus of flat `U(1)` connections:
/// `(arg H_x / 2π, arg H_y / 2π)` reduced to `[0, 1)`.
pub fn jacobian_coordinates(a: &ConnectionField, tol: f64) -> Result<(f64, f64), JacobianError> {
    let grid = a.grid();
    if grid.rank() != 1 || grid.degree() != 0 {
        return Err(JacobianError::NotDegreeZeroLine {
            rank: grid.rank(),
            degree: grid.degree(),
        });
    }
    let residual = central_residual(a);
    if residual.is_nan() || residual > tol {
        return Err(JacobianError::NotFlat { residual, tol });
    }
    let (hx, hy) = holonomy_loops(a);
    let coord = |z: Complex64| {
        let t = (z.arg() / (2.0 * PI)).rem_euclid(1.0);
        if t >= 1.0 {
            0.0
        } else {
            t
        }
    };
    Ok((coord(hx[(0, 0)]), coord(hy[(0, 0)])))
}

/// Distance between two points of the unit 2-torus.
pub fn torus_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let wrap = |t: f64| {
        let d = (t).rem_euclid(1.0);
        d.min(1.0 - d)
    };
    wrap(p.0 - q.0).hypot(wrap(p.1 - q.1))
}

/// Dimension of the commutant of the two holonomies: 1 for an irreducible
/// flat connection, larger when it splits. Diagnostic only.
pub fn holonomy_commutant_dim(a: &ConnectionField, threshold: f64) -> usize {
    let (hx, hy) = holonomy_loops(a);
    let r = hx.nrows();
    // Matrix of X ↦ ([Hx, X], [Hy, X]) on the basis E_ij.
    let mut m = Mat::zeros(2 * r * r, r * r);
    for i in 0..r {
        for j in 0..r {
            let mut e = Mat::zeros(r, r);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let cx = commutator(&hx, &e);
            let cy = commutator(&hy, &e);
            let col = i * r + j;
            for p in 0..r {
                for q in 0..r {
                    m[(p * r + q, col)] = cx[(p, q)];
                    m[(r * r + p * r + q, col)] = cy[(p, q)];
                }
            }
        }
    }
    let sv = m.svd(false, false).singular_values;
    sv.iter().filter(|&&s| s < threshold).count()
}

/// Exact zero-mode part of a fluctuation: its site average.
pub fn mean_fluctuation(a: &ConnectionField) -> (Mat, Mat) {
    let grid = a.grid();
    let avg = |v: &[Mat]| {
        let mut m = grid.zero_mat();
        for x in v {
            m += x;
        }
        m / Complex64::new(grid.sites() as f64, 0.0)
    };
    (avg(a.ax()), avg(a.ay()))
}

/// Constant field with the given `U(1)` angles, `a = (2πi·tx, 2πi·ty)`.
pub fn constant_line_connection(
    grid: GridSpec,
    tx: f64,
    ty: f64,
) -> Result<ConnectionField, LatticeError> {
    let ax = Mat::from_element(1, 1, Complex64::new(0.0, 2.0 * PI * tx));
    let ay = Mat::from_element(1, 1, Complex64::new(0.0, 2.0 * PI * ty));
    ConnectionField::new(grid, vec![ax; grid.sites()], vec![ay; grid.sites()])
}

/// Zero-mean scalar field `φ` as a `𝔲(1)` gauge direction `i·D⁰φ`.
pub fn exact_direction(grid: GridSpec, phi: &SiteField) -> Result<OneForm, LatticeError> {
    let zero = ConnectionField::background(grid);
    crate::lattice::covariant_derivative(&zero, phi)
}
