//! Co-authorship complexes: one simplex per paper's author set, valued by
//! citation counts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexSpec, SimplicialComplex};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoauthorRecord {
    pub authors: Vec<usize>,
    pub citations: u64,
}

/// Face closure of every author set. Vertices and edges carry the summed
/// citations of the records containing them; a simplex of dimension two or
/// more carries the sum of its codimension-1 faces' values. Returns one
/// signal per stratum.
pub fn citation_complex(records: &[CoauthorRecord]) -> Result<(SimplicialComplex, Vec<Vec<f64>>)> {
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut cleaned: Vec<(Vec<usize>, u64)> = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let mut a = r.authors.clone();
        a.sort_unstable();
        a.dedup();
        if a.is_empty() {
            return invalid(format!("record {i} has no authors"));
        }
        sets.insert(a.clone());
        cleaned.push((a, r.citations));
    }
    let specs: Vec<SimplexSpec> = sets.into_iter().map(SimplexSpec::natural).collect();
    let c = SimplicialComplex::from_specs(None, &specs)?;

    let mut vertex: BTreeMap<usize, f64> = BTreeMap::new();
    let mut edge: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, cites) in &cleaned {
        let w = *cites as f64;
        for (p, &u) in a.iter().enumerate() {
            *vertex.entry(u).or_default() += w;
            for &v in &a[p + 1..] {
                *edge.entry((u, v)).or_default() += w;
            }
        }
    }
    let mut signals: Vec<Vec<f64>> = Vec::with_capacity(c.kappa_max() + 1);
    signals.push((0..c.len(0)).map(|i| vertex.get(&c.label(i)).copied().unwrap_or(0.0)).collect());
    if c.kappa_max() >= 1 {
        signals.push(
            (0..c.len(1))
                .map(|i| {
                    let l = c.simplex_labels(1, i);
                    edge.get(&(l[0], l[1])).copied().unwrap_or(0.0)
                })
                .collect(),
        );
    }
    for k in 2..=c.kappa_max() {
        let below = &signals[k - 1];
        let values = (0..c.len(k)).map(|i| c.faces(k, i).iter().map(|&f| below[f]).sum()).collect();
        signals.push(values);
    }
    Ok((c, signals))
}
