//! Transition-function data for line bundles.
//!
//! A line bundle on the sphere is determined up to isomorphism by the
//! winding number of its clutching function on the equator; more general
//! covers are checked against the cocycle identities pointwise on sampled
//! overlaps.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Fewer samples than this cannot resolve a winding reliably.
pub const MIN_SAMPLES: usize = 8;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClutchError {
    #[error("loop has {0} samples, at least {MIN_SAMPLES} are required")]
    TooFewSamples(usize),
    #[error("sample {index} is zero or not finite")]
    ZeroSample { index: usize },
    #[error(
        "argument jumps by {jump:.3} rad between samples {index} and {next}; loop is under-sampled"
    )]
    UnderSampled {
        index: usize,
        next: usize,
        jump: f64,
    },
    #[error("accumulated argument {turns:.3} turns is not within 0.25 of an integer")]
    NotInteger { turns: f64 },
}

/// Values of a transition function at equispaced points on a circle, in
/// traversal order. The loop closes from the last sample back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLoop {
    samples: Vec<Complex64>,
}

impl SampledLoop {
    pub fn new(samples: Vec<Complex64>) -> Result<Self, ClutchError> {
        if samples.len() < MIN_SAMPLES {
            return Err(ClutchError::TooFewSamples(samples.len()));
        }
        if let Some(index) = samples
            .iter()
            .position(|z| !z.is_finite() || z.norm() == 0.0)
        {
            return Err(ClutchError::ZeroSample { index });
        }
        Ok(SampledLoop { samples })
    }

    /// Samples `f(2πk/n)` for `k = 0..n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self, ClutchError> {
        SampledLoop::new((0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Pointwise product; `None` if the lengths differ.
    pub fn pointwise_mul(&self, other: &SampledLoop) -> Option<SampledLoop> {
        (self.len() == other.len()).then(|| SampledLoop {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Every other sample.
    pub fn subsample2(&self) -> Result<SampledLoop, ClutchError> {
        SampledLoop::new(self.samples.iter().step_by(2).copied().collect())
    }
}

/// Accumulated argument of the loop in turns, summing principal-value
/// increments between consecutive samples.
pub fn winding_turns(l: &SampledLoop) -> Result<f64, ClutchError> {
    let n = l.samples.len();
    let mut total = 0.0;
    for index in 0..n {
        let next = (index + 1) % n;
        let jump = (l.samples[next] / l.samples[index]).arg();
        if jump.abs() >= PI * (1.0 - 1e-12) {
            return Err(ClutchError::UnderSampled { index, next, jump });
        }
        total += jump;
    }
    Ok(total / (2.0 * PI))
}

/// Degree of the clutched line bundle: total principal-branch argument
/// change around the loop divided by `2π`.
pub fn winding_number(l: &SampledLoop) -> Result<i64, ClutchError> {
    let turns = winding_turns(l)?;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return Err(ClutchError::NotInteger { turns });
    }
    Ok(rounded as i64)
}

/// Line bundles on a compact Riemann surface are topologically isomorphic
/// iff their degrees agree.
pub fn same_topological_class(d1: i64, d2: i64) -> bool {
    d1 == d2
}

/// Rank-1 cocycle data on sampled overlaps.
///
/// `transitions[(u, v)]` holds `g_uv` on the overlap of charts `u` and `v`.
/// Each triple overlap lists sample-index triples `(i, j, k)` such that
/// `g_uv[i]`, `g_vw[j]` and `g_uw[k]` are values at the same point.
#[derive(Debug, Clone, Default)]
pub struct CocycleSpec {
    pub transitions: BTreeMap<(String, String), SampledLoop>,
    pub triples: Vec<TripleOverlap>,
}

#[derive(Debug, Clone)]
pub struct TripleOverlap {
    pub charts: [String; 3],
    pub points: Vec<[usize; 3]>,
}

impl CocycleSpec {
    pub fn insert(&mut self, u: &str, v: &str, g: SampledLoop) {
        self.transitions.insert((u.to_string(), v.to_string()), g);
    }

    fn get(&self, u: &str, v: &str) -> Option<&SampledLoop> {
        self.transitions.get(&(u.to_string(), v.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CocycleStructureError {
    #[error("no transition function for ({0}, {1})")]
    MissingTransition(String, String),
    #[error("transitions ({0}, {1}) and ({1}, {0}) have different sample counts")]
    LengthMismatch(String, String),
    #[error("triple overlap {charts:?}: index {index} out of range at point {point}")]
    IndexOutOfRange {
        charts: [String; 3],
        point: usize,
        index: usize,
    },
}

/// Which identity produced the worst deviation.
#[derive(Debug, Clone, PartialEq)]
pub enum CocycleIdentity {
    Reflexive { chart: String, sample: usize },
    Inverse { u: String, v: String, sample: usize },
    Triple { charts: [String; 3], point: usize },
}

impl fmt::Display for CocycleIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CocycleIdentity::Reflexive { chart, sample } => {
                write!(f, "g_{chart}{chart} = 1 at sample {sample}")
            }
            CocycleIdentity::Inverse { u, v, sample } => {
                write!(f, "g_{u}{v} g_{v}{u} = 1 at sample {sample}")
            }
            CocycleIdentity::Triple { charts, point } => write!(
                f,
                "g_{a}{b} g_{b}{c} = g_{a}{c} at point {point}",
                a = charts[0],
                b = charts[1],
                c = charts[2]
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    pub valid: bool,
    /// Largest `|product − 1|` over all checked identities.
    pub worst: f64,
    pub worst_at: Option<CocycleIdentity>,
}

/// Checks `g_uu = 1`, `g_vu g_uv = 1` and `g_uv g_vw g_uw⁻¹ = 1` at every
/// sample, within `tol` in modulus.
pub fn validate_cocycle(c: &CocycleSpec, tol: f64) -> Result<CocycleReport, CocycleStructureError> {
    let mut worst = 0.0f64;
    let mut worst_at = None;
    let mut record = |dev: f64, at: CocycleIdentity| {
        // NaN deviations count as failures.
        if dev.is_nan() || dev > worst {
            worst = dev;
            worst_at = Some(at);
        }
    };

    for ((u, v), g) in &c.transitions {
        if u == v {
            for (k, z) in g.samples.iter().enumerate() {
                record(
                    (z - 1.0).norm(),
                    CocycleIdentity::Reflexive {
                        chart: u.clone(),
                        sample: k,
                    },
                );
            }
        } else if u < v {
            let back = c
                .get(v, u)
                .ok_or_else(|| CocycleStructureError::MissingTransition(v.clone(), u.clone()))?;
            if back.len() != g.len() {
                return Err(CocycleStructureError::LengthMismatch(u.clone(), v.clone()));
            }
            for (k, (a, b)) in g.samples.iter().zip(&back.samples).enumerate() {
                record(
                    (a * b - 1.0).norm(),
                    CocycleIdentity::Inverse {
                        u: u.clone(),
                        v: v.clone(),
                        sample: k,
                    },
                );
            }
        } else if c.get(v, u).is_none() {
            return Err(CocycleStructureError::MissingTransition(
                v.clone(),
                u.clone(),
            ));
        }
    }

    for t in &c.triples {
        let [a, b, w] = &t.charts;
        let missing = |x: &str, y: &str| {
            CocycleStructureError::MissingTransition(x.to_string(), y.to_string())
        };
        let g_ab = c.get(a, b).ok_or_else(|| missing(a, b))?;
        let g_bw = c.get(b, w).ok_or_else(|| missing(b, w))?;
        let g_aw = c.get(a, w).ok_or_else(|| missing(a, w))?;
        for (point, &[i, j, k]) in t.points.iter().enumerate() {
            let out_of_range = |index| CocycleStructureError::IndexOutOfRange {
                charts: t.charts.clone(),
                point,
                index,
            };
            let x = g_ab.samples.get(i).ok_or_else(|| out_of_range(i))?;
            let y = g_bw.samples.get(j).ok_or_else(|| out_of_range(j))?;
            let z = g_aw.samples.get(k).ok_or_else(|| out_of_range(k))?;
            record(
                (x * y / z - 1.0).norm(),
                CocycleIdentity::Triple {
                    charts: t.charts.clone(),
                    point,
                },
            );
        }
    }

    Ok(CocycleReport {
        valid: worst <= tol,
        worst,
        worst_at,
    })
}
