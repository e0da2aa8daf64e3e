//! The κ-Haar basis: a global scaling atom plus one mean-zero difference
//! atom per split node.

use std::sync::Arc;

use super::{Atom, Dictionary, DictionaryKind, Row};
use crate::error::{Error, Result};
use crate::par;
use crate::partition::BipartitionTree;

pub fn haar_basis(tree: Arc<BipartitionTree>) -> Result<Dictionary> {
    build(tree, None)
}

/// Haar basis orthonormal for `⟨f, g⟩_w = Σ w_i f_i g_i`.
pub fn haar_basis_weighted(tree: Arc<BipartitionTree>, weights: &[f64]) -> Result<Dictionary> {
    if weights.len() != tree.n() {
        return Err(Error::Dimension { expected: tree.n(), got: weights.len() });
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::Invalid("Haar weights must be positive".into()));
    }
    build(tree, Some(weights))
}

fn mass(members: &[usize], weights: Option<&[f64]>) -> f64 {
    match weights {
        Some(w) => members.iter().map(|&i| w[i]).sum(),
        None => members.len() as f64,
    }
}

/// `(a, b)` for the atom `a·1_A − b·1_B`: zero mean and unit norm.
pub(crate) fn haar_coefficients(mass_a: f64, mass_b: f64) -> (f64, f64) {
    let total = mass_a + mass_b;
    ((mass_b / (mass_a * total)).sqrt(), (mass_a / (mass_b * total)).sqrt())
}

pub(crate) fn haar_atom(j: usize, k: usize, parent: &[usize], a: &[usize], b: &[usize], weights: Option<&[f64]>) -> Atom {
    let (ca, cb) = haar_coefficients(mass(a, weights), mass(b, weights));
    let values = parent.iter().map(|m| if a.binary_search(m).is_ok() { ca } else { -cb }).collect();
    Atom { j, k, l: 1, support: Arc::new(parent.to_vec()), values }
}

fn build(tree: Arc<BipartitionTree>, weights: Option<&[f64]>) -> Result<Dictionary> {
    tree.validate()?;
    let n = tree.n();
    let root = &tree.level(0)[0].members;
    let scale = 1.0 / mass(root, weights).sqrt();
    let mut atoms = vec![Atom { j: 0, k: 0, l: 0, support: Arc::new(root.clone()), values: vec![scale; n] }];

    let t: &BipartitionTree = &tree;
    let splits: Vec<(usize, usize)> = (0..t.j_max())
        .flat_map(|j| (0..t.level(j).len()).filter(move |&k| t.region(j, k).is_split()).map(move |k| (j, k)))
        .collect();
    atoms.extend(par::map(&splits, |&(j, k)| {
        let r = tree.region(j, k);
        let (a, b) = (tree.region(j + 1, r.children[0]), tree.region(j + 1, r.children[1]));
        haar_atom(j, k, &r.members, &a.members, &b.members, weights)
    }));
    debug_assert_eq!(atoms.len(), n);

    let mut d = Dictionary::from_c2f(DictionaryKind::Haar, tree, atoms);
    d.rows = vec![Row { level: 0, atoms: 0..n }];
    Ok(d)
}
