//! JSON bundle specifications.
//!
//! ```json
//! {"atoms": [{"rank": 1, "degree": 2, "label": "O(2)"}, ...]}
//! ```
//!
//! Each record is a stable bundle; repeating a record adds another copy of
//! the same summand.

use serde::Deserialize;
use vbstab::slope::{BundleSum, StableAtom};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleSpecFile {
    atoms: Vec<AtomRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomRecord {
    rank: i64,
    degree: i64,
    label: String,
}

pub fn parse_bundle(text: &str) -> Result<BundleSum, String> {
    let spec: BundleSpecFile = serde_json::from_str(text).map_err(|e| {
        format!(
            "bundle spec parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        )
    })?;
    if spec.atoms.is_empty() {
        return Err("bundle spec has an empty atom list".into());
    }
    let mut atoms = Vec::with_capacity(spec.atoms.len());
    for (i, rec) in spec.atoms.iter().enumerate() {
        let atom = StableAtom::new(rec.label.clone(), rec.rank, rec.degree).map_err(|e| {
            format!(
                "atom record {} (label {:?}, rank {}, degree {}): {e}",
                i + 1,
                rec.label,
                rec.rank,
                rec.degree
            )
        })?;
        atoms.push(atom);
    }
    BundleSum::new(atoms).map_err(|e| format!("bundle spec: {e}"))
}
