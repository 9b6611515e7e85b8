//! Exact slope calculus for formal bundles.
//!
//! A bundle is represented by its poly-stable graded data: a multiset of
//! declared-stable atoms, each carrying a rank, a degree and a label naming
//! its isomorphism class. Slopes are exact rationals backed by
//! arbitrary-precision integers, so comparisons never round.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("rank must be at least 1, got {0}")]
    ZeroRank(i64),
    #[error("a bundle needs at least one atom")]
    Empty,
    #[error("rank/degree arithmetic overflowed 64-bit integers")]
    Overflow,
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(i64),
}

/// Exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// Topological type `(r, d)` of a bundle. The rank is always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankDegree {
    rank: i64,
    degree: i64,
}

impl RankDegree {
    pub fn new(rank: i64, degree: i64) -> Result<Self, SlopeError> {
        if rank < 1 {
            return Err(SlopeError::ZeroRank(rank));
        }
        Ok(RankDegree { rank, degree })
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.degree, self.rank)
    }

    /// Direct sum: ranks and degrees add.
    pub fn checked_add(&self, other: &RankDegree) -> Result<RankDegree, SlopeError> {
        Ok(RankDegree {
            rank: self
                .rank
                .checked_add(other.rank)
                .ok_or(SlopeError::Overflow)?,
            degree: self
                .degree
                .checked_add(other.degree)
                .ok_or(SlopeError::Overflow)?,
        })
    }
}

impl fmt::Display for RankDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rank, self.degree)
    }
}

/// `(r, d) -> (r, -d)`.
pub fn dual_rd(rd: RankDegree) -> RankDegree {
    RankDegree {
        rank: rd.rank,
        degree: -rd.degree,
    }
}

/// `deg(E ⊗ F) = deg(E) rk(F) + rk(E) deg(F)`.
pub fn tensor_rd(a: RankDegree, b: RankDegree) -> Result<RankDegree, SlopeError> {
    let rank = a.rank.checked_mul(b.rank).ok_or(SlopeError::Overflow)?;
    let degree = a
        .degree
        .checked_mul(b.rank)
        .zip(a.rank.checked_mul(b.degree))
        .and_then(|(x, y)| x.checked_add(y))
        .ok_or(SlopeError::Overflow)?;
    Ok(RankDegree { rank, degree })
}

/// `Hom(E, F) = E* ⊗ F`.
pub fn hom_rd(a: RankDegree, b: RankDegree) -> Result<RankDegree, SlopeError> {
    tensor_rd(dual_rd(a), b)
}

/// Dimension `r²(g−1) + 1` of the moduli space of semi-stable bundles of rank
/// `r` on a curve of genus `g ≥ 2`.
pub fn moduli_dimension(rank: i64, genus: i64) -> Result<i64, SlopeError> {
    if rank < 1 {
        return Err(SlopeError::ZeroRank(rank));
    }
    if genus < 2 {
        return Err(SlopeError::GenusTooSmall(genus));
    }
    rank.checked_mul(rank)
        .and_then(|r2| r2.checked_mul(genus - 1))
        .and_then(|x| x.checked_add(1))
        .ok_or(SlopeError::Overflow)
}

/// An indivisible summand declared stable. Two atoms are equal iff their
/// labels and topological types agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StableAtom {
    pub label: String,
    pub rd: RankDegree,
}

impl StableAtom {
    pub fn new(label: impl Into<String>, rank: i64, degree: i64) -> Result<Self, SlopeError> {
        Ok(StableAtom {
            label: label.into(),
            rd: RankDegree::new(rank, degree)?,
        })
    }

    /// The line bundle `O(d)`.
    pub fn line(degree: i64) -> Self {
        StableAtom {
            label: format!("O({degree})"),
            rd: RankDegree { rank: 1, degree },
        }
    }

    pub fn rank(&self) -> i64 {
        self.rd.rank
    }

    pub fn degree(&self) -> i64 {
        self.rd.degree
    }

    pub fn slope(&self) -> Rational {
        self.rd.slope()
    }

    /// Tensor with `O(m)`; stability is preserved so the result is again an atom.
    pub fn twist(&self, m: i64) -> Result<Self, SlopeError> {
        let rd = tensor_rd(self.rd, RankDegree { rank: 1, degree: m })?;
        Ok(StableAtom {
            label: self.label.clone(),
            rd,
        })
    }
}

impl Ord for StableAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label
            .cmp(&other.label)
            .then_with(|| self.rd.cmp(&other.rd))
    }
}

impl PartialOrd for StableAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StableAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, self.rd)
    }
}

/// Non-empty multiset of stable atoms, stored in canonical (sorted) order so
/// that structural equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BundleSum {
    atoms: Vec<StableAtom>,
    total: RankDegree,
}

impl BundleSum {
    pub fn new(mut atoms: Vec<StableAtom>) -> Result<Self, SlopeError> {
        let first = atoms.first().ok_or(SlopeError::Empty)?.rd;
        let total = atoms[1..]
            .iter()
            .try_fold(first, |acc, a| acc.checked_add(&a.rd))?;
        atoms.sort();
        Ok(BundleSum { atoms, total })
    }

    pub fn atom(atom: StableAtom) -> Self {
        BundleSum {
            total: atom.rd,
            atoms: vec![atom],
        }
    }

    pub fn atoms(&self) -> &[StableAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank_degree(&self) -> RankDegree {
        self.total
    }

    pub fn rank(&self) -> i64 {
        self.total.rank
    }

    pub fn degree(&self) -> i64 {
        self.total.degree
    }

    pub fn slope(&self) -> Rational {
        self.total.slope()
    }

    /// Semi-stable iff every atom has the slope of the whole sum: the maximal
    /// slope of a sub-sum is the maximal atom slope.
    pub fn is_semistable(&self) -> bool {
        let mu = self.slope();
        self.atoms.iter().all(|a| a.slope() == mu)
    }

    /// Stable bundles are indecomposable, so only a single atom qualifies.
    pub fn is_stable(&self) -> bool {
        self.atoms.len() == 1
    }

    /// `E ⊗ O(m)`.
    pub fn twist(&self, m: i64) -> Result<Self, SlopeError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| a.twist(m))
            .collect::<Result<Vec<_>, _>>()?;
        BundleSum::new(atoms)
    }

    /// Multiset inclusion.
    pub fn contains(&self, other: &BundleSum) -> bool {
        is_sub_multiset(&other.atoms, &self.atoms)
    }

    /// Multiset difference `self ∖ other`, or `None` if `other` is not a
    /// sub-multiset or the difference would be empty.
    pub fn difference(&self, other: &BundleSum) -> Option<BundleSum> {
        let rest = multiset_difference(&self.atoms, &other.atoms)?;
        BundleSum::new(rest).ok()
    }
}

impl fmt::Display for BundleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Both slices must be sorted.
pub(crate) fn is_sub_multiset(small: &[StableAtom], big: &[StableAtom]) -> bool {
    multiset_difference(big, small).is_some()
}

/// `big ∖ small` for sorted slices; `None` if `small ⊄ big`.
pub(crate) fn multiset_difference(
    big: &[StableAtom],
    small: &[StableAtom],
) -> Option<Vec<StableAtom>> {
    let mut rest = Vec::with_capacity(big.len().saturating_sub(small.len()));
    let mut j = 0;
    for a in big {
        if j < small.len() && small[j] == *a {
            j += 1;
        } else {
            rest.push(a.clone());
        }
    }
    (j == small.len()).then_some(rest)
}
