//! Exhaustive sub-multiset search.
//!
//! Enumerates every non-empty subset of atom positions and compares slopes
//! by integer cross-multiplication. Shares no code with the direct formulas
//! in the parent module beyond the data types.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::slope::{BundleSum, Rational, StableAtom};

use super::{
    destabilizer as direct_destabilizer, hn_filtration as direct_hn, mu_max as direct_mu_max,
};

/// `(rank, degree)` of the sub-sum selected by `mask`.
fn masked_total(atoms: &[StableAtom], mask: u64) -> (i128, i128) {
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold((0, 0), |(r, d), (_, a)| {
            (r + a.rank() as i128, d + a.degree() as i128)
        })
}

/// Compares `d1/r1` with `d2/r2` for positive ranks.
fn cmp_slope((r1, d1): (i128, i128), (r2, d2): (i128, i128)) -> Ordering {
    (d1 * r2).cmp(&(d2 * r1))
}

/// Maximal-slope, then maximal-rank, sub-sum of `atoms` as a position mask.
fn best_mask(atoms: &[StableAtom]) -> u64 {
    assert!(atoms.len() < 64, "oracle enumerates at most 63 atoms");
    let full = (1u64 << atoms.len()) - 1;
    let mut best = 0u64;
    let mut best_rd = (0i128, 0i128);
    for mask in 1..=full {
        let rd = masked_total(atoms, mask);
        let better = best == 0
            || match cmp_slope(rd, best_rd) {
                Ordering::Greater => true,
                Ordering::Equal => rd.0 > best_rd.0,
                Ordering::Less => false,
            };
        if better {
            best = mask;
            best_rd = rd;
        }
    }
    best
}

fn select(atoms: &[StableAtom], mask: u64, keep: bool) -> Vec<StableAtom> {
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| (mask >> i & 1 == 1) == keep)
        .map(|(_, a)| a.clone())
        .collect()
}

pub fn mu_max(b: &BundleSum) -> Rational {
    let atoms = b.atoms();
    let (r, d) = masked_total(atoms, best_mask(atoms));
    Rational::new(d as i64, r as i64)
}

pub fn destabilizer(b: &BundleSum) -> BundleSum {
    let atoms = b.atoms();
    BundleSum::new(select(atoms, best_mask(atoms), true)).expect("non-empty")
}

/// Iterated destabilizer: take the destabilizing sub-sum of the current
/// quotient, pass to the complementary multiset, repeat.
pub fn hn_filtration(b: &BundleSum) -> Vec<BundleSum> {
    let mut steps = Vec::new();
    let mut acc: Vec<StableAtom> = Vec::new();
    let mut rest = b.atoms().to_vec();
    while !rest.is_empty() {
        let mask = best_mask(&rest);
        acc.extend(select(&rest, mask, true));
        rest = select(&rest, mask, false);
        steps.push(BundleSum::new(acc.clone()).expect("non-empty"));
    }
    steps
}

/// True iff the direct formulas agree with exhaustive search on `b`.
pub fn agrees(b: &BundleSum) -> bool {
    direct_mu_max(b) == mu_max(b)
        && direct_destabilizer(b) == destabilizer(b)
        && direct_hn(b).steps == hn_filtration(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepReport {
    pub instances: usize,
    pub mismatches: usize,
}

/// Compares direct and exhaustive results on every multiset of at most
/// `max_atoms` atoms with rank in `1..=max_rank` and `|degree| <= max_degree`.
/// Atoms of the same type share a label, so multiplicities are genuine.
pub fn sweep(max_atoms: usize, max_rank: i64, max_degree: i64) -> SweepReport {
    let types: Vec<StableAtom> = (1..=max_rank)
        .flat_map(|r| (-max_degree..=max_degree).map(move |d| (r, d)))
        .map(|(r, d)| StableAtom::new(format!("E{r}_{d}"), r, d).expect("rank >= 1"))
        .collect();

    // Parallel over the first (smallest-index) atom type.
    let per_first: Vec<SweepReport> = (0..types.len())
        .into_par_iter()
        .map(|first| {
            let mut report = SweepReport {
                instances: 0,
                mismatches: 0,
            };
            let mut picked = vec![types[first].clone()];
            visit(&types, first, max_atoms, &mut picked, &mut report);
            report
        })
        .collect();

    per_first.iter().fold(
        SweepReport {
            instances: 0,
            mismatches: 0,
        },
        |acc, r| SweepReport {
            instances: acc.instances + r.instances,
            mismatches: acc.mismatches + r.mismatches,
        },
    )
}

fn visit(
    types: &[StableAtom],
    start: usize,
    max_atoms: usize,
    picked: &mut Vec<StableAtom>,
    report: &mut SweepReport,
) {
    let b = BundleSum::new(picked.clone()).expect("non-empty");
    report.instances += 1;
    if !agrees(&b) {
        report.mismatches += 1;
    }
    if picked.len() == max_atoms {
        return;
    }
    for i in start..types.len() {
        picked.push(types[i].clone());
        visit(types, i, max_atoms, picked, report);
        picked.pop();
    }
}
