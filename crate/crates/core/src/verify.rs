//! Invariant suites run by the command-line `verify` subcommand.

use std::fmt;
use std::str::FromStr;

use crate::filtration::oracle;
use crate::kahler;
use crate::lattice::random::{random_endo, random_one_form};
use crate::lattice::{curvature_translate_residual, momentum_residual, ConnectionField, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Momentum,
    Reduction,
    Algebra,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "momentum" => Ok(Suite::Momentum),
            "reduction" => Ok(Suite::Reduction),
            "algebra" => Ok(Suite::Algebra),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected momentum, reduction, algebra or all)"
            )),
        }
    }
}

/// One reported quantity and its pass threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:e} (threshold {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

fn at_most(name: &str, value: f64, threshold: f64, detail: String) -> Check {
    Check {
        name: name.to_string(),
        value,
        threshold,
        passed: value <= threshold,
        detail,
    }
}

/// Momentum-map and curvature-translate residuals on random fields.
pub fn momentum_suite(seed: u64, samples: usize) -> Vec<Check> {
    let mut mom = 0.0f64;
    let mut tr = 0.0f64;
    let mut count = 0;
    for n in [16, 32] {
        for r in [1, 2, 3] {
            let grid = GridSpec::new(n, r, 1).expect("valid grid");
            for k in 0..samples as u64 {
                let base = seed
                    .wrapping_mul(1_000_003)
                    .wrapping_add(k * 3 + (n * 10 + r) as u64 * 7919);
                let a = ConnectionField::from_fluctuation(random_one_form(grid, base, 1.0));
                let xi = random_endo(grid, base + 1, 1.0);
                let eta = random_one_form(grid, base + 2, 1.0);
                mom = mom.max(momentum_residual(&a, &xi, &eta).expect("same grid"));
                tr = tr.max(curvature_translate_residual(&a, &eta).expect("same grid"));
                count += 1;
            }
        }
    }
    vec![
        at_most(
            "momentum_residual",
            mom,
            1e-10,
            format!("over {count} triples"),
        ),
        at_most(
            "curvature_translate_residual",
            tr,
            1e-12,
            format!("over {count} pairs"),
        ),
    ]
}

/// Kähler reduction checks on `ℂ²` and `ℂ³` and the reduced area.
pub fn reduction_suite(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = crate::lattice::random::rng(seed);
    let mut kernel = 0.0f64;
    let mut bad_split = 0usize;
    let mut count = 0;
    for n in [2, 3] {
        for _ in 0..samples {
            let level = 0.5 + rand::Rng::gen::<f64>(&mut rng) * 2.0;
            let z = kahler::random_level_point(&mut rng, n, level);
            kernel =
                kernel.max(kahler::check_kernel_complement(&z, level).unwrap_or(f64::INFINITY));
            match kahler::check_splitting(&z, level) {
                Ok(s)
                    if (s.horizontal, s.orbit, s.j_orbit, s.total, s.orbit_overlap)
                        == (2 * n - 2, 1, 1, 2 * n, 0) => {}
                _ => bad_split += 1,
            }
            count += 1;
        }
    }
    let mut out = vec![
        at_most(
            "kernel_complement",
            kernel,
            1e-10,
            format!("over {count} points"),
        ),
        at_most(
            "splitting_failures",
            bad_split as f64,
            0.0,
            format!("over {count} points"),
        ),
    ];
    let mut areas = Vec::new();
    for (i, c) in [1.0, 2.0].into_iter().enumerate() {
        let want = 2.0 * std::f64::consts::PI * c;
        match kahler::reduced_area(c, 100_000, seed.wrapping_add(i as u64)) {
            Ok(est) => {
                let rel = (est.area - want).abs() / want;
                let mut check = at_most(
                    &format!("reduced_area(c={c})"),
                    rel,
                    0.01,
                    format!(
                        "area {:.6} vs {:.6}, std error {:.2e}",
                        est.area, want, est.std_error
                    ),
                );
                check.passed &= !est.insufficient;
                out.push(check);
                areas.push(est.area);
            }
            Err(e) => out.push(Check {
                name: format!("reduced_area(c={c})"),
                value: f64::NAN,
                threshold: 0.01,
                passed: false,
                detail: e.to_string(),
            }),
        }
    }
    if let [a1, a2] = areas[..] {
        out.push(at_most(
            "reduced_area linearity",
            (a2 / a1 - 2.0).abs() / 2.0,
            0.01,
            String::new(),
        ));
    }
    out
}

/// Exhaustive filtration oracle sweep.
pub fn algebra_suite() -> Vec<Check> {
    let report = oracle::sweep(6, 3, 4);
    vec![Check {
        name: "filtration_oracle_mismatches".into(),
        value: report.mismatches as f64,
        threshold: 0.0,
        passed: report.mismatches == 0 && report.instances > 0,
        detail: format!("over {} multisets", report.instances),
    }]
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Momentum => momentum_suite(seed, 10),
        Suite::Reduction => reduction_suite(seed, 100),
        Suite::Algebra => algebra_suite(),
        Suite::All => {
            let mut out = momentum_suite(seed, 10);
            out.extend(reduction_suite(seed, 100));
            out.extend(algebra_suite());
            out
        }
    }
}
