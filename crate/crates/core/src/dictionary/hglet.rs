//! The κ-HGLET: eigenvectors of every region's local Hodge Laplacian,
//! zero-extended to the whole stratum.
//!
//! Each region is diagonalized in its natural frame and the eigenvectors are
//! mapped back through the orientations, so a reoriented complex yields the
//! same dictionary up to `P` and atom signs.

use std::sync::Arc;

use super::{delta, Atom, Dictionary, DictionaryKind};
use crate::complex::SimplicialComplex;
use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::hodge::{local_laplacian_natural, Variant};
use crate::par;
use crate::partition::{local_spectrum, oriented, region_signs, BipartitionTree, SpectrumCache};

pub fn hglet(tree: Arc<BipartitionTree>, c: &SimplicialComplex, variant: Variant) -> Result<Dictionary> {
    hglet_cached(tree, c, variant, None)
}

/// HGLET reusing sym spectra already computed for the tree.
pub fn hglet_cached(
    tree: Arc<BipartitionTree>,
    c: &SimplicialComplex,
    variant: Variant,
    cache: Option<&SpectrumCache>,
) -> Result<Dictionary> {
    if !matches!(variant, Variant::Sym | Variant::Combinatorial) {
        return Err(Error::Unsupported(format!("HGLET needs a symmetric variant (comb or sym), got {variant}")));
    }
    tree.validate()?;
    let kappa = tree.kappa;
    if c.len(kappa) != tree.n() {
        return Err(Error::Dimension { expected: c.len(kappa), got: tree.n() });
    }
    let nodes: Vec<(usize, usize)> =
        (0..=tree.j_max()).flat_map(|j| (0..tree.level(j).len()).map(move |k| (j, k))).collect();
    let blocks: Vec<Result<Vec<Atom>>> = par::map(&nodes, |&(j, k)| {
        let members = &tree.region(j, k).members;
        let support = Arc::new(members.clone());
        if members.len() == 1 {
            return Ok(vec![delta(j, k, support)]);
        }
        let vectors: Vec<Vec<f64>> = match variant {
            Variant::Sym => {
                let local = local_spectrum(c, kappa, members, cache)?;
                (0..members.len()).map(|l| local.oriented_vector(l)).collect()
            }
            _ => {
                let l = local_laplacian_natural(c, kappa, members, variant)?;
                let s = symmetric_eigen(&l.matrix.to_dense()).map_err(|e| match e {
                    Error::Eigen { reason, .. } => Error::Eigen { region: format!("({j},{k})"), reason },
                    other => other,
                })?;
                let signs = region_signs(c, kappa, members);
                (0..members.len()).map(|l| oriented(&s, &signs, l)).collect()
            }
        };
        Ok(vectors
            .into_iter()
            .enumerate()
            .map(|(l, values)| Atom { j, k, l, support: support.clone(), values })
            .collect())
    });
    let mut atoms = Vec::with_capacity(tree.n() * (tree.j_max() + 1));
    for b in blocks {
        atoms.extend(b?);
    }
    Ok(Dictionary::from_c2f(DictionaryKind::Hglet, tree, atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;
    use crate::dictionary::orthonormality_defect;
    use crate::eigen::symmetric_eigen;
    use crate::hodge::laplacian;
    use crate::partition::build_tree;

    #[test]
    fn level_zero_is_global_eigenbasis() {
        let c = close_under_faces(&[vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4], vec![4, 5]]).unwrap();
        let t = Arc::new(build_tree(&c, 1).unwrap());
        let d = hglet(t.clone(), &c, Variant::Sym).unwrap();
        let global = symmetric_eigen(&laplacian(&c, 1, Variant::Sym).unwrap().matrix.to_dense()).unwrap();
        for (l, id) in d.level(0).enumerate() {
            assert_eq!(d.atom(id).values, global.vector(l));
        }
        for j in 0..=t.j_max() {
            let atoms: Vec<&Atom> = d.level(j).map(|i| d.atom(i)).collect();
            assert_eq!(atoms.len(), c.len(1));
            assert!(orthonormality_defect(&atoms) < 1e-10);
        }
        for id in d.level(t.j_max()) {
            assert_eq!(d.atom(id).values, vec![1.0]);
        }
        assert!(hglet(t, &c, Variant::Rw).is_err());
    }
}
