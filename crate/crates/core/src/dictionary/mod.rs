//! Multiscale dictionaries over a bipartition tree.
//!
//! A [`Dictionary`] stores its atoms level by level in coarse-to-fine (C2F)
//! order: row `j` holds the atoms of tree level `j`, grouped by region `k`
//! and ordered by tag `l` inside a region. The GHWT can additionally be
//! presented fine-to-coarse (F2C), see [`reorder_f2c`].
//!
//! Atom values are stored on the atom's support only.

mod ghwt;
mod haar;
mod hglet;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::par;
use crate::partition::BipartitionTree;

pub use ghwt::ghwt;
pub use haar::{haar_basis, haar_basis_weighted};
pub use hglet::{hglet, hglet_cached};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DictionaryKind {
    Haar,
    Hglet,
    Ghwt,
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DictionaryKind::Haar => "haar",
            DictionaryKind::Hglet => "hglet",
            DictionaryKind::Ghwt => "ghwt",
        })
    }
}

impl FromStr for DictionaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(DictionaryKind::Haar),
            "hglet" => Ok(DictionaryKind::Hglet),
            "ghwt" => Ok(DictionaryKind::Ghwt),
            other => Err(Error::Invalid(format!("unknown dictionary kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    C2F,
    F2C,
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::C2F => "c2f",
            Ordering::F2C => "f2c",
        })
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c2f" => Ok(Ordering::C2F),
            "f2c" => Ok(Ordering::F2C),
            other => Err(Error::Invalid(format!("unknown ordering {other:?}"))),
        }
    }
}

/// One basis vector `φ^j_{k,l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    /// Sorted simplex indices; shared by all atoms of a region.
    pub support: Arc<Vec<usize>>,
    /// Values on `support`, position by position.
    pub values: Vec<f64>,
}

impl Atom {
    pub fn dot(&self, f: &[f64]) -> f64 {
        self.support.iter().zip(&self.values).map(|(&i, v)| f[i] * v).sum()
    }

    /// `⟨self, other⟩`, walking both sorted supports.
    pub fn inner(&self, other: &Atom) -> f64 {
        let (a, b) = (&self.support, &other.support);
        let (mut p, mut q, mut s) = (0, 0, 0.0);
        while p < a.len() && q < b.len() {
            match a[p].cmp(&b[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    s += self.values[p] * other.values[q];
                    p += 1;
                    q += 1;
                }
            }
        }
        s
    }

    /// `f += c * self`.
    pub fn add_to(&self, f: &mut [f64], c: f64) {
        for (&i, v) in self.support.iter().zip(&self.values) {
            f[i] += c * v;
        }
    }

    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.add_to(&mut out, 1.0);
        out
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// One presentation row: the atoms of tree level `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub level: usize,
    pub atoms: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct Dictionary {
    pub kind: DictionaryKind,
    pub ordering: Ordering,
    pub n: usize,
    pub tree: Arc<BipartitionTree>,
    atoms: Vec<Atom>,
    rows: Vec<Row>,
    recipe: Option<Arc<Recipe>>,
}

/// Each atom as a weighted sum of finer atoms, for analysis in
/// `O(|atoms|)` instead of one inner product per atom.
#[derive(Debug)]
struct Recipe {
    /// `(atom id, weight)` per atom; empty for atoms taken directly.
    parts: Vec<Vec<(usize, f64)>>,
    /// Atom ids, finest level first.
    order: Vec<usize>,
}

impl Dictionary {
    /// Builds a C2F dictionary from atoms already sorted by `(j, k, l)`.
    pub(crate) fn from_c2f(kind: DictionaryKind, tree: Arc<BipartitionTree>, atoms: Vec<Atom>) -> Self {
        let n = tree.n();
        let mut rows: Vec<Row> = Vec::new();
        for (i, a) in atoms.iter().enumerate() {
            match rows.last_mut() {
                Some(r) if r.level == a.j => r.atoms.end = i + 1,
                _ => rows.push(Row { level: a.j, atoms: i..i + 1 }),
            }
        }
        Self { kind, ordering: Ordering::C2F, n, tree, atoms, rows, recipe: None }
    }

    pub(crate) fn set_recipe(&mut self, parts: Vec<Vec<(usize, f64)>>) {
        let mut order: Vec<usize> = (0..self.atoms.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.atoms[i].j));
        self.recipe = Some(Arc::new(Recipe { parts, order }));
    }

    /// `⟨f, φ⟩` for every atom, in presentation order.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let Some(r) = &self.recipe else {
            return par::map(&self.atoms, |a| a.dot(f));
        };
        let mut c = vec![0.0; self.atoms.len()];
        for &i in &r.order {
            c[i] = if r.parts[i].is_empty() {
                self.atoms[i].dot(f)
            } else {
                r.parts[i].iter().map(|&(p, w)| w * c[p]).sum()
            };
        }
        c
    }

    /// Assembles a dictionary from explicit parts, checking the layout.
    pub fn from_parts(
        kind: DictionaryKind,
        ordering: Ordering,
        tree: Arc<BipartitionTree>,
        atoms: Vec<Atom>,
    ) -> Result<Self> {
        let n = tree.n();
        for a in &atoms {
            if a.support.len() != a.values.len() || a.support.iter().any(|&i| i >= n) {
                return Err(Error::Invalid(format!("atom ({},{},{}) has a malformed support", a.j, a.k, a.l)));
            }
        }
        let mut d = Self::from_c2f(kind, tree, atoms);
        d.ordering = ordering;
        if kind == DictionaryKind::Haar {
            d.rows = vec![Row { level: 0, atoms: 0..d.atoms.len() }];
        }
        let levels: Vec<usize> = d.rows.iter().map(|r| r.level).collect();
        let mut sorted = levels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != levels.len() {
            return Err(Error::Invalid("atoms of one level must be contiguous".into()));
        }
        Ok(d)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: usize) -> &Atom {
        &self.atoms[id]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Atom ids of tree level `j`, in presentation order.
    pub fn level(&self, j: usize) -> Range<usize> {
        self.rows.iter().find(|r| r.level == j).map_or(0..0, |r| r.atoms.clone())
    }

    /// Level indices present, in presentation order.
    pub fn levels(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.level).collect()
    }

    /// Atom id of `(j, k, l)`.
    pub fn find(&self, j: usize, k: usize, l: usize) -> Option<usize> {
        self.level(j).find(|&i| self.atoms[i].k == k && self.atoms[i].l == l)
    }

    /// Dense `|level| × n` matrix of a level, one atom per row.
    pub fn level_matrix(&self, j: usize) -> nalgebra::DMatrix<f64> {
        let ids: Vec<usize> = self.level(j).collect();
        let mut m = nalgebra::DMatrix::zeros(ids.len(), self.n);
        for (r, &id) in ids.iter().enumerate() {
            let a = &self.atoms[id];
            for (&i, &v) in a.support.iter().zip(&a.values) {
                m[(r, i)] = v;
            }
        }
        m
    }
}

/// Presents a GHWT fine-to-coarse: rows run from the finest level to level
/// 0, and each row is sorted by tag `l`, then by region `k`.
pub fn reorder_f2c(d: &Dictionary) -> Result<Dictionary> {
    if d.kind != DictionaryKind::Ghwt {
        return Err(Error::Unsupported(format!("F2C ordering needs a GHWT dictionary, got {}", d.kind)));
    }
    let mut perm: Vec<usize> = (0..d.atoms.len()).collect();
    let key = |i: usize| (std::cmp::Reverse(d.atoms[i].j), d.atoms[i].l, d.atoms[i].k);
    perm.sort_by_key(|&i| key(i));
    let atoms: Vec<Atom> = perm.iter().map(|&i| d.atoms[i].clone()).collect();
    let mut out = Dictionary::from_c2f(d.kind, d.tree.clone(), atoms);
    out.ordering = Ordering::F2C;
    if let Some(r) = &d.recipe {
        let mut to_new = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            to_new[old] = new;
        }
        let parts = perm.iter().map(|&i| r.parts[i].iter().map(|&(p, w)| (to_new[p], w)).collect()).collect();
        out.set_recipe(parts);
    }
    Ok(out)
}

fn ensure_ghwt(d: &Dictionary) -> Result<()> {
    if d.kind == DictionaryKind::Ghwt {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("expected a GHWT dictionary, got {}", d.kind)))
    }
}

/// The level-0 GHWT atoms ordered by tag.
pub fn extract_walsh(d: &Dictionary) -> Result<Vec<Atom>> {
    ensure_ghwt(d)?;
    let mut out: Vec<Atom> = d.level(0).map(|i| d.atoms[i].clone()).collect();
    out.sort_by_key(|a| a.l);
    Ok(out)
}

/// The global scaling atom followed by every tag-1 atom, coarse to fine.
pub fn extract_haar(d: &Dictionary) -> Result<Vec<Atom>> {
    ensure_ghwt(d)?;
    let mut out: Vec<Atom> = d.atoms.iter().filter(|a| a.j == 0 && a.l == 0).cloned().collect();
    let mut tagged: Vec<Atom> = d.atoms.iter().filter(|a| a.l == 1).cloned().collect();
    tagged.sort_by_key(|a| (a.j, a.k));
    out.extend(tagged);
    Ok(out)
}

/// Largest `|⟨a_p, a_q⟩ − δ_pq|` over a set of atoms.
pub fn orthonormality_defect(atoms: &[&Atom]) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, a) in atoms.iter().enumerate() {
        for (q, b) in atoms.iter().enumerate().skip(p) {
            let target = if p == q { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - target).abs());
        }
    }
    worst
}

/// The indicator atom of a singleton region.
pub(crate) fn delta(j: usize, k: usize, support: Arc<Vec<usize>>) -> Atom {
    Atom { j, k, l: 0, support, values: vec![1.0] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;
    use crate::partition::build_tree;

    #[test]
    fn f2c_rejects_other_kinds() {
        let c = close_under_faces(&[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let t = Arc::new(build_tree(&c, 0).unwrap());
        let h = hglet(t.clone(), &c, crate::Variant::Sym).unwrap();
        assert!(reorder_f2c(&h).is_err());
        assert!(extract_walsh(&h).is_err());
        let g = ghwt(t).unwrap();
        let f = reorder_f2c(&g).unwrap();
        assert_eq!(f.levels(), vec![2, 1, 0]);
        assert_eq!(f.len(), g.len());
    }

    #[test]
    fn two_point_f2c_is_reversed_c2f() {
        let c = close_under_faces(&[vec![0, 1]]).unwrap();
        let t = Arc::new(build_tree(&c, 0).unwrap());
        let g = ghwt(t).unwrap();
        let f = reorder_f2c(&g).unwrap();
        let c2f: Vec<(usize, usize, usize)> = g.atoms().iter().map(|a| (a.j, a.k, a.l)).collect();
        let mut rev: Vec<(usize, usize, usize)> = Vec::new();
        for j in g.levels().into_iter().rev() {
            rev.extend(g.level(j).map(|i| (g.atom(i).j, g.atom(i).k, g.atom(i).l)));
        }
        let f2c: Vec<(usize, usize, usize)> = f.atoms().iter().map(|a| (a.j, a.k, a.l)).collect();
        assert_eq!(f2c, rev);
        assert_eq!(c2f.len(), 4);
    }
}
