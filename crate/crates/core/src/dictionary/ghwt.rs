//! The κ-GHWT, built bottom-up from singleton indicators by tagged sums and
//! differences of the children's atoms.
//!
//! Children enter every combination with unit norm: tag 1 is the mean-zero
//! Haar atom of the split and tags `2l, 2l+1` are `(ψ_A ± ψ_B)/√2`. On a
//! balanced tree this is the sum/difference recurrence followed by ℓ²
//! normalization; on unbalanced trees it is what keeps each level
//! orthonormal.

use std::sync::Arc;

use super::haar::haar_atom;
use super::{delta, Atom, Dictionary, DictionaryKind};
use crate::error::{Error, Result};
use crate::par;
use crate::partition::BipartitionTree;

/// Child atoms of one atom as `(region on level j+1, position in that
/// region's block, weight)`.
type Parts = Vec<(usize, usize, f64)>;

/// Tags double per level, so trees deeper than the tag width are rejected.
pub fn ghwt(tree: Arc<BipartitionTree>) -> Result<Dictionary> {
    let j_max = tree.j_max();
    if j_max >= usize::BITS as usize {
        return Err(Error::Unsupported(format!("GHWT tags overflow on a tree of depth {j_max}")));
    }
    let mut levels: Vec<Vec<Vec<(Atom, Parts)>>> = vec![Vec::new(); j_max + 1];
    levels[j_max] = tree
        .level(j_max)
        .iter()
        .enumerate()
        .map(|(k, r)| vec![(delta(j_max, k, Arc::new(r.members.clone())), Vec::new())])
        .collect();
    for j in (0..j_max).rev() {
        let finer = &levels[j + 1];
        let built = par::map_range(tree.level(j).len(), |k| combine(&tree, j, k, finer));
        levels[j] = built;
    }
    let mut start: Vec<Vec<usize>> = Vec::with_capacity(j_max + 1);
    let mut next = 0;
    for level in &levels {
        let mut at = Vec::with_capacity(level.len());
        for block in level {
            at.push(next);
            next += block.len();
        }
        start.push(at);
    }
    let mut atoms = Vec::with_capacity(next);
    let mut parts = Vec::with_capacity(next);
    for (j, level) in levels.into_iter().enumerate() {
        for (atom, p) in level.into_iter().flatten() {
            parts.push(p.into_iter().map(|(kc, pos, w)| (start[j + 1][kc] + pos, w)).collect());
            atoms.push(atom);
        }
    }
    let mut d = Dictionary::from_c2f(DictionaryKind::Ghwt, tree, atoms);
    d.set_recipe(parts);
    Ok(d)
}

fn tagged(block: &[(Atom, Parts)]) -> Vec<(usize, &Atom)> {
    block.iter().enumerate().filter(|(_, x)| x.0.l > 0).map(|(pos, x)| (pos, &x.0)).collect()
}

fn combine(tree: &BipartitionTree, j: usize, k: usize, finer: &[Vec<(Atom, Parts)>]) -> Vec<(Atom, Parts)> {
    let region = tree.region(j, k);
    let support = Arc::new(region.members.clone());
    let lift = |child: &Atom| -> Vec<f64> {
        let mut v = vec![0.0; support.len()];
        for (m, x) in child.support.iter().zip(&child.values) {
            let p = support.binary_search(m).expect("child support inside parent");
            v[p] = *x;
        }
        v
    };
    if !region.is_split() {
        let kc = region.children[0];
        return finer[kc]
            .iter()
            .enumerate()
            .map(|(pos, (a, _))| {
                (Atom { j, k, l: 2 * a.l, support: support.clone(), values: lift(a) }, vec![(kc, pos, 1.0)])
            })
            .collect();
    }
    let (ka, kb) = (region.children[0], region.children[1]);
    let (a, b) = (&finer[ka], &finer[kb]);
    let (ra, rb) = (&tree.region(j + 1, ka).members, &tree.region(j + 1, kb).members);
    let n = support.len() as f64;
    let (na, nb) = (ra.len() as f64, rb.len() as f64);
    let (a0, b0) = (a.iter().position(|x| x.0.l == 0).unwrap(), b.iter().position(|x| x.0.l == 0).unwrap());
    let haar = Atom { support: support.clone(), ..haar_atom(j, k, &region.members, ra, rb, None) };
    let (ha, hb) = {
        let first_b = region.members.iter().position(|m| rb.binary_search(m).is_ok()).unwrap();
        let first_a = region.members.iter().position(|m| ra.binary_search(m).is_ok()).unwrap();
        (haar.values[first_a] * na.sqrt(), haar.values[first_b] * nb.sqrt())
    };
    let mut out = vec![
        (
            Atom { j, k, l: 0, support: support.clone(), values: vec![1.0 / n.sqrt(); support.len()] },
            vec![(ka, a0, (na / n).sqrt()), (kb, b0, (nb / n).sqrt())],
        ),
        (haar, vec![(ka, a0, ha), (kb, b0, hb)]),
    ];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // children are in ascending tag order; merge them on l >= 1
    let (ta, tb) = (tagged(a), tagged(b));
    let (mut ia, mut ib) = (ta.into_iter().peekable(), tb.into_iter().peekable());
    loop {
        let (la, lb) = (ia.peek().map(|x| x.1.l), ib.peek().map(|x| x.1.l));
        match (la, lb) {
            (Some(p), Some(q)) if p == q => {
                let ((px, x), (py, y)) = (ia.next().unwrap(), ib.next().unwrap());
                let (vx, vy) = (lift(x), lift(y));
                let sum = vx.iter().zip(&vy).map(|(p, q)| (p + q) * r).collect();
                let diff = vx.iter().zip(&vy).map(|(p, q)| (p - q) * r).collect();
                out.push((
                    Atom { j, k, l: 2 * p, support: support.clone(), values: sum },
                    vec![(ka, px, r), (kb, py, r)],
                ));
                out.push((
                    Atom { j, k, l: 2 * p + 1, support: support.clone(), values: diff },
                    vec![(ka, px, r), (kb, py, -r)],
                ));
            }
            (Some(p), q) if q.is_none_or(|q| p < q) => {
                let (px, x) = ia.next().unwrap();
                out.push((Atom { j, k, l: 2 * p, support: support.clone(), values: lift(x) }, vec![(ka, px, 1.0)]));
            }
            (_, Some(q)) => {
                let (py, y) = ib.next().unwrap();
                out.push((Atom { j, k, l: 2 * q, support: support.clone(), values: lift(y) }, vec![(kb, py, 1.0)]));
            }
            _ => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;
    use crate::dictionary::{extract_haar, extract_walsh, haar_basis, orthonormality_defect};
    use crate::partition::build_tree;

    fn path(n: usize) -> Arc<BipartitionTree> {
        let c = close_under_faces(&(0..n - 1).map(|i| vec![i, i + 1]).collect::<Vec<_>>()).unwrap();
        Arc::new(build_tree(&c, 0).unwrap())
    }

    #[test]
    fn two_point_walsh() {
        let d = ghwt(path(2)).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let w = extract_walsh(&d).unwrap();
        let close = |v: Vec<f64>, e: [f64; 2]| v.iter().zip(e).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(w[0].dense(2), [s, s]));
        assert!(close(w[1].dense(2), [s, -s]));
    }

    #[test]
    fn four_point_hadamard_rows() {
        let d = ghwt(path(4)).unwrap();
        let w = extract_walsh(&d).unwrap();
        // tag order: sum rule on tag 0, 1 gives the dyadic (Paley) arrangement
        let rows = [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
        for (atom, row) in w.iter().zip(rows) {
            let v = atom.dense(4);
            for (x, y) in v.iter().zip(row) {
                assert!((x - y / 2.0).abs() < 1e-15, "{v:?} vs {row:?}");
            }
        }
    }

    #[test]
    fn levels_orthonormal_and_haar_matches() {
        for n in [3, 5, 7, 10] {
            let t = path(n);
            let d = ghwt(t.clone()).unwrap();
            for j in 0..=t.j_max() {
                let atoms: Vec<&Atom> = d.level(j).map(|i| d.atom(i)).collect();
                assert_eq!(atoms.len(), n);
                assert!(orthonormality_defect(&atoms) < 1e-12);
            }
            let h = haar_basis(t).unwrap();
            let ex = extract_haar(&d).unwrap();
            assert_eq!(ex.len(), n);
            for (a, b) in ex.iter().zip(h.atoms()) {
                assert_eq!(a.dense(n), b.dense(n));
            }
        }
    }
}
