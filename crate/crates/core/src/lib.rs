//! Stability of vector bundles on Riemann surfaces, exact and discretized.
//!
//! * [`slope`], [`filtration`]: exact slope calculus, Harder-Narasimhan and
//!   Jordan-Hölder filtrations, Shatz polygons and S-equivalence for split
//!   bundles given as multisets of stable atoms.
//! * [`clutching`]: cocycle checks and degrees of line bundles from sampled
//!   transition functions.
//! * [`lattice`]: unitary gauge theory on a periodic grid over the unit-area
//!   flat torus.
//! * [`flow`]: Yang-Mills energy, its gradient and a monotone descent towards
//!   central curvature.
//! * [`kahler`]: finite-dimensional Kähler reduction of `ℂⁿ` by the circle.
//! * [`verify`]: invariant suites shared by the command-line tool.

pub mod clutching;
pub mod filtration;
pub mod flow;
pub mod kahler;
pub mod lattice;
pub mod slope;
pub mod verify;
