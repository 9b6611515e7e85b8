//! Harder-Narasimhan and Jordan-Hölder filtrations of split bundles.
//!
//! In the split model a sub-bundle built from summands is a sub-multiset of
//! atoms and the quotient by it is the complementary multiset. Every
//! quantity computed here by a direct formula has a brute-force counterpart
//! in [`oracle`] that enumerates all sub-multisets.

use std::fmt;

use thiserror::Error;

use crate::slope::{multiset_difference, BundleSum, RankDegree, Rational, StableAtom};

pub mod oracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("bundle {0} is not semi-stable")]
    NotSemistable(String),
}

/// A chain `0 = E_0 ⊂ E_1 ⊂ … ⊂ E_l = E` of sub-multisets.
///
/// Construction does not check nesting; use [`validate_filtration`] for that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub steps: Vec<BundleSum>,
    pub total: BundleSum,
}

/// Rank, degree and slope of a successive quotient `E_i / E_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientData {
    pub rd: RankDegree,
    pub slope: Rational,
}

impl Filtration {
    pub fn new(steps: Vec<BundleSum>, total: BundleSum) -> Self {
        Filtration { steps, total }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Quotient multisets `E_i ∖ E_{i-1}`, or a structural error if the chain
    /// is not strictly nested or does not end at the total.
    pub fn quotients(&self) -> Result<Vec<BundleSum>, Malformed> {
        if self.steps.is_empty() {
            return Err(Malformed::Empty);
        }
        if self.steps.last() != Some(&self.total) {
            return Err(Malformed::LastStepNotTotal);
        }
        let mut out = Vec::with_capacity(self.steps.len());
        let mut prev: &[StableAtom] = &[];
        for (i, step) in self.steps.iter().enumerate() {
            let rest = multiset_difference(step.atoms(), prev)
                .ok_or(Malformed::NotNested { step: i + 1 })?;
            let q = BundleSum::new(rest).map_err(|_| Malformed::NotStrict { step: i + 1 })?;
            out.push(q);
            prev = step.atoms();
        }
        Ok(out)
    }

    pub fn quotient_data(&self) -> Result<Vec<QuotientData>, Malformed> {
        Ok(self
            .quotients()?
            .into_iter()
            .map(|q| QuotientData {
                rd: q.rank_degree(),
                slope: q.slope(),
            })
            .collect())
    }
}

/// Weakly decreasing slope vector of length `rank(E)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnType(pub Vec<Rational>);

/// Lattice vertices from `(0, 0)` to `(r, d)` with strictly decreasing
/// segment slopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShatzPolygon {
    pub vertices: Vec<(i64, i64)>,
}

impl ShatzPolygon {
    /// Strictly increasing x and strictly decreasing segment slopes.
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        if v.first() != Some(&(0, 0)) || v.len() < 2 {
            return false;
        }
        if v.windows(2).any(|w| w[1].0 <= w[0].0) {
            return false;
        }
        v.windows(3).all(|w| {
            let (dx1, dy1) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let (dx2, dy2) = (w[2].0 - w[1].0, w[2].1 - w[1].1);
            // dy1/dx1 > dy2/dx2 with positive dx
            (dy1 as i128) * (dx2 as i128) > (dy2 as i128) * (dx1 as i128)
        })
    }
}

/// Maximal slope of a non-empty sub-sum, which is the maximal atom slope.
pub fn mu_max(b: &BundleSum) -> Rational {
    b.atoms()
        .iter()
        .map(StableAtom::slope)
        .max()
        .expect("bundle sums are non-empty")
}

/// The unique maximal-rank sub-sum among those of maximal slope.
pub fn destabilizer(b: &BundleSum) -> BundleSum {
    let top = mu_max(b);
    let atoms = b
        .atoms()
        .iter()
        .filter(|a| a.slope() == top)
        .cloned()
        .collect();
    BundleSum::new(atoms).expect("at least one atom attains the maximum")
}

pub fn hn_filtration(b: &BundleSum) -> Filtration {
    let mut by_slope: Vec<(Rational, &StableAtom)> =
        b.atoms().iter().map(|a| (a.slope(), a)).collect();
    // Decreasing slope; ties keep canonical atom order.
    by_slope.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(y.1)));

    let mut steps = Vec::new();
    let mut acc: Vec<StableAtom> = Vec::with_capacity(b.len());
    for (i, (mu, atom)) in by_slope.iter().enumerate() {
        acc.push((*atom).clone());
        let group_ends = by_slope.get(i + 1).is_none_or(|next| next.0 != *mu);
        if group_ends {
            steps.push(BundleSum::new(acc.clone()).expect("non-empty"));
        }
    }
    Filtration::new(steps, b.clone())
}

pub fn hn_type(b: &BundleSum) -> HnType {
    let f = hn_filtration(b);
    let mut mu = Vec::with_capacity(b.rank() as usize);
    for q in f.quotient_data().expect("HN filtration is well formed") {
        mu.extend(std::iter::repeat_n(q.slope, q.rd.rank() as usize));
    }
    HnType(mu)
}

pub fn shatz_polygon(b: &BundleSum) -> ShatzPolygon {
    let f = hn_filtration(b);
    let mut vertices = vec![(0, 0)];
    for step in &f.steps {
        vertices.push((step.rank(), step.degree()));
    }
    ShatzPolygon { vertices }
}

/// One atom per step, in canonical label order.
pub fn jh_filtration(b: &BundleSum) -> Result<Filtration, FiltrationError> {
    if !b.is_semistable() {
        return Err(FiltrationError::NotSemistable(b.to_string()));
    }
    let steps = (1..=b.len())
        .map(|k| BundleSum::new(b.atoms()[..k].to_vec()).expect("non-empty"))
        .collect();
    Ok(Filtration::new(steps, b.clone()))
}

/// Graded object of a Jordan-Hölder filtration. In the split model this is
/// the atom multiset itself, whichever filtration is used.
pub fn graded(b: &BundleSum) -> Result<BundleSum, FiltrationError> {
    let f = jh_filtration(b)?;
    let quotients = f.quotients().expect("JH filtration is well formed");
    let atoms = quotients
        .into_iter()
        .flat_map(|q| q.atoms().to_vec())
        .collect();
    Ok(BundleSum::new(atoms).expect("non-empty"))
}

pub fn s_equivalent(b1: &BundleSum, b2: &BundleSum) -> Result<bool, FiltrationError> {
    Ok(graded(b1)? == graded(b2)?)
}

/// Sufficient condition for `Hom(src, dst) = 0`: `src` semi-stable with
/// slope above `μ_max(dst)`.
pub fn hom_must_vanish(src: &BundleSum, dst: &BundleSum) -> bool {
    src.is_semistable() && src.slope() > mu_max(dst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationKind {
    HarderNarasimhan,
    JordanHolder,
}

/// Structural defects of a chain, independent of which theorem is checked.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Malformed {
    #[error("filtration has no steps")]
    Empty,
    #[error("last step is not the whole bundle")]
    LastStepNotTotal,
    #[error("step {step} does not contain the previous step")]
    NotNested { step: usize },
    #[error("step {step} equals the previous step")]
    NotStrict { step: usize },
}

/// A violated defining condition, reported for the first failing quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    QuotientNotSemistable { step: usize },
    SlopesNotDecreasing { step: usize },
    QuotientNotStable { step: usize },
    QuotientSlopeNotTotal { step: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QuotientNotSemistable { step } => {
                write!(f, "quotient {step} not semi-stable")
            }
            Violation::SlopesNotDecreasing { step } => {
                write!(f, "slopes not decreasing at quotient {step}")
            }
            Violation::QuotientNotStable { step } => write!(f, "quotient {step} not stable"),
            Violation::QuotientSlopeNotTotal { step } => {
                write!(f, "quotient slope ≠ total slope at quotient {step}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid,
    Violated(Violation),
    Malformed(Malformed),
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

/// Checks the defining conditions in order: for HN, semi-stable quotients
/// then strictly decreasing slopes; for JH, stable quotients then quotient
/// slope equal to the total slope.
pub fn validate_filtration(f: &Filtration, kind: FiltrationKind) -> Validation {
    let quotients = match f.quotients() {
        Ok(q) => q,
        Err(m) => return Validation::Malformed(m),
    };
    match kind {
        FiltrationKind::HarderNarasimhan => {
            if let Some(i) = quotients.iter().position(|q| !q.is_semistable()) {
                return Validation::Violated(Violation::QuotientNotSemistable { step: i + 1 });
            }
            if let Some(i) = quotients
                .windows(2)
                .position(|w| w[0].slope() <= w[1].slope())
            {
                return Validation::Violated(Violation::SlopesNotDecreasing { step: i + 2 });
            }
        }
        FiltrationKind::JordanHolder => {
            if let Some(i) = quotients.iter().position(|q| !q.is_stable()) {
                return Validation::Violated(Violation::QuotientNotStable { step: i + 1 });
            }
            let mu = f.total.slope();
            if let Some(i) = quotients.iter().position(|q| q.slope() != mu) {
                return Validation::Violated(Violation::QuotientSlopeNotTotal { step: i + 1 });
            }
        }
    }
    Validation::Valid
}
