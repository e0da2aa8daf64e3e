//! Boundary operators, the four Hodge-Laplacian variants and their signed
//! adjacency matrices.
//!
//! All assembly goes through [`local_laplacian`], which builds the operator
//! of the sub-complex induced by a κ-region: the region's κ-simplices, all of
//! their faces, and the (κ+1)-simplices whose faces all lie in the region.
//! The full-stratum operator is the region `0..n`.

use std::fmt;
use std::str::FromStr;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Combinatorial,
    Sym,
    Wt,
    Rw,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Combinatorial, Variant::Sym, Variant::Wt, Variant::Rw];

    pub fn is_symmetric(self) -> bool {
        self != Variant::Rw
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Combinatorial => "comb",
            Variant::Sym => "sym",
            Variant::Wt => "wt",
            Variant::Rw => "rw",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comb" | "combinatorial" => Ok(Variant::Combinatorial),
            "sym" => Ok(Variant::Sym),
            "wt" => Ok(Variant::Wt),
            "rw" => Ok(Variant::Rw),
            other => Err(Error::Invalid(format!("unknown Laplacian variant {other:?}"))),
        }
    }
}

/// `B_κ`: maps functions on (κ+1)-simplices to functions on κ-simplices.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub kappa: usize,
    pub matrix: CsrMatrix,
}

#[derive(Clone, Debug)]
pub struct LaplacianMatrix {
    pub kappa: usize,
    pub variant: Variant,
    pub matrix: CsrMatrix,
    /// `D_κ` of the (sub-)complex the operator was assembled on.
    pub degrees: Vec<f64>,
}

/// `diag(L) - L`: the negated off-diagonal part of a Laplacian.
#[derive(Clone, Debug)]
pub struct SignedAdjacency {
    pub kappa: usize,
    pub variant: Variant,
    pub matrix: CsrMatrix,
}

fn face_sign(position: usize) -> f64 {
    if position % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn boundary(c: &SimplicialComplex, kappa: usize) -> Result<BoundaryMatrix> {
    if kappa > c.kappa_max() {
        return Err(Error::Index(format!("boundary B_{kappa} needs kappa <= {}", c.kappa_max())));
    }
    let rows = c.len(kappa);
    let cols = c.len(kappa + 1);
    let mut t = Vec::with_capacity(cols * (kappa + 2));
    for s in 0..cols {
        let ps = f64::from(c.simplex(kappa + 1, s).orientation());
        for (pos, &a) in c.faces(kappa + 1, s).iter().enumerate() {
            let pa = f64::from(c.simplex(kappa, a).orientation());
            t.push((a, s, ps * pa * face_sign(pos)));
        }
    }
    Ok(BoundaryMatrix { kappa, matrix: CsrMatrix::from_triplets(rows, cols, t) })
}

pub fn laplacian(c: &SimplicialComplex, kappa: usize, variant: Variant) -> Result<LaplacianMatrix> {
    let all: Vec<usize> = (0..c.len(kappa)).collect();
    local_laplacian(c, kappa, &all, variant)
}

/// Laplacian of the sub-complex induced by `region` (sorted, distinct
/// κ-simplex indices). Row/column `r` of the result is `region[r]`.
pub fn local_laplacian(
    c: &SimplicialComplex,
    kappa: usize,
    region: &[usize],
    variant: Variant,
) -> Result<LaplacianMatrix> {
    assemble(c, kappa, region, variant, false)
}

/// The same operator with every orientation taken as +1. The oriented
/// operator is exactly `P L P`, `P` the diagonal of the region's
/// orientations.
pub fn local_laplacian_natural(
    c: &SimplicialComplex,
    kappa: usize,
    region: &[usize],
    variant: Variant,
) -> Result<LaplacianMatrix> {
    assemble(c, kappa, region, variant, true)
}

fn assemble(
    c: &SimplicialComplex,
    kappa: usize,
    region: &[usize],
    variant: Variant,
    natural: bool,
) -> Result<LaplacianMatrix> {
    if kappa > c.kappa_max() {
        return Err(Error::Index(format!("kappa {kappa} above kappa_max {}", c.kappa_max())));
    }
    let total = c.len(kappa);
    let mut pos = vec![usize::MAX; total];
    for (r, &g) in region.iter().enumerate() {
        if g >= total || pos[g] != usize::MAX {
            return Err(Error::Index(format!("region entry {g} invalid for stratum of size {total}")));
        }
        pos[g] = r;
    }
    let n = region.len();
    let orient = |k: usize, i: usize| if natural { 1.0 } else { f64::from(c.simplex(k, i).orientation()) };

    // hulls whose every face lies in the region
    let mut hulls: Vec<usize> = region
        .iter()
        .flat_map(|&g| c.cofaces(kappa, g).iter().copied())
        .filter(|&h| c.faces(kappa + 1, h).iter().all(|&f| pos[f] != usize::MAX))
        .collect();
    hulls.sort_unstable();
    hulls.dedup();

    let mut degree = vec![0.0; n];
    for &h in &hulls {
        let w = c.simplex(kappa + 1, h).weight();
        for &f in c.faces(kappa + 1, h) {
            degree[pos[f]] += w;
        }
    }
    for d in degree.iter_mut() {
        if *d == 0.0 {
            *d = 1.0;
        }
    }

    // entries are evaluated per variant: sym = D^{-1/2}(...)D^{-1/2},
    // wt = D^{1/2} sym D^{1/2}, rw = D^{-1} wt
    let mut t: Vec<(usize, usize, f64)> = Vec::new();

    // upper part: B_κ D_{κ+1} B_κᵀ, normalized by D_κ^{-1/2} on both sides
    for &h in &hulls {
        let ph = orient(kappa + 1, h);
        let w = c.simplex(kappa + 1, h).weight();
        let entries: Vec<(usize, f64)> = c
            .faces(kappa + 1, h)
            .iter()
            .enumerate()
            .map(|(p, &f)| (pos[f], ph * orient(kappa, f) * face_sign(p)))
            .collect();
        for &(a, ba) in &entries {
            for &(b, bb) in &entries {
                let v = match variant {
                    Variant::Combinatorial => ba * bb,
                    Variant::Sym => ba * bb * w / (degree[a] * degree[b]).sqrt(),
                    Variant::Wt => ba * bb * w,
                    Variant::Rw => ba * bb * w / degree[a],
                };
                t.push((a, b, v));
            }
        }
    }

    // lower part: B_{κ-1}ᵀ B_{κ-1} with D_{κ-1} = |B_{κ-1}| D_κ 1 over the region
    if kappa > 0 {
        let mut lower_faces: Vec<usize> =
            region.iter().flat_map(|&g| c.faces(kappa, g).iter().copied()).collect();
        lower_faces.sort_unstable();
        lower_faces.dedup();
        for &f in &lower_faces {
            let pf = orient(kappa - 1, f);
            let entries: Vec<(usize, f64)> = c
                .cofaces(kappa - 1, f)
                .iter()
                .filter(|&&s| pos[s] != usize::MAX)
                .map(|&s| {
                    let p = c.faces(kappa, s).iter().position(|&x| x == f).unwrap();
                    (pos[s], orient(kappa, s) * pf * face_sign(p))
                })
                .collect();
            let mut df: f64 = entries.iter().map(|&(a, _)| degree[a]).sum();
            if df == 0.0 {
                df = 1.0;
            }
            for &(a, ba) in &entries {
                for &(b, bb) in &entries {
                    let v = match variant {
                        Variant::Combinatorial => ba * bb,
                        Variant::Sym => ba * bb * (degree[a] * degree[b]).sqrt() / df,
                        Variant::Wt => ba * bb * degree[a] * degree[b] / df,
                        Variant::Rw => ba * bb * degree[b] / df,
                    };
                    t.push((a, b, v));
                }
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(n, n, t);
    Ok(LaplacianMatrix { kappa, variant, matrix, degrees: degree })
}

pub fn signed_adjacency(l: &LaplacianMatrix) -> SignedAdjacency {
    SignedAdjacency { kappa: l.kappa, variant: l.variant, matrix: l.matrix.negated_off_diagonal() }
}

/// Copy of `c` with stratum `kappa` reoriented by `p`.
pub fn reorient(c: &SimplicialComplex, kappa: usize, p: &[i8]) -> Result<SimplicialComplex> {
    c.reoriented(kappa, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;

    fn fig1() -> SimplicialComplex {
        close_under_faces(&[vec![1, 2, 3], vec![2, 3, 4]]).unwrap()
    }

    #[test]
    fn boundary_columns() {
        let c = fig1();
        let b0 = boundary(&c, 0).unwrap();
        // e1 = {1,2}: tail v1 gets -1, head v2 gets +1
        assert_eq!(b0.matrix.get(0, 0), -1.0);
        assert_eq!(b0.matrix.get(1, 0), 1.0);
        let b1 = boundary(&c, 1).unwrap();
        assert_eq!((b1.matrix.get(0, 0), b1.matrix.get(1, 0), b1.matrix.get(2, 0)), (1.0, -1.0, 1.0));
        assert_eq!(b1.matrix.get(3, 0), 0.0);
        let b2 = boundary(&c, 2).unwrap();
        assert_eq!((b2.matrix.rows(), b2.matrix.cols()), (2, 0));
        assert!(boundary(&c, 3).is_err());

        let g = close_under_faces(&[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(boundary(&g, 1).unwrap().matrix.cols(), 0);
    }

    #[test]
    fn path_graph_adjacency() {
        let g = close_under_faces(&[vec![1, 2], vec![2, 3]]).unwrap();
        let s = signed_adjacency(&laplacian(&g, 0, Variant::Combinatorial).unwrap());
        let expect = [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(s.matrix.get(i, j), v);
            }
        }
        assert!(s.matrix.diagonal().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn graph_variants_reduce_to_classical() {
        let g = close_under_faces(&[vec![0, 1], vec![1, 2], vec![2, 0], vec![2, 3]]).unwrap();
        let deg = [2.0, 2.0, 3.0, 1.0];
        let wt = laplacian(&g, 0, Variant::Wt).unwrap();
        let comb = laplacian(&g, 0, Variant::Combinatorial).unwrap();
        assert!(wt.matrix.max_abs_diff(&comb.matrix) < 1e-14);
        let sym = laplacian(&g, 0, Variant::Sym).unwrap();
        for i in 0..4 {
            assert!((sym.matrix.get(i, i) - 1.0).abs() < 1e-14);
            assert_eq!(sym.degrees[i], deg[i]);
        }
        assert!((sym.matrix.get(0, 1) + 1.0 / (2.0f64 * 2.0).sqrt()).abs() < 1e-14);
        let rw = laplacian(&g, 0, Variant::Rw).unwrap();
        assert!((rw.matrix.get(2, 3) + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn isolated_simplex_gets_unit_degree() {
        let c = close_under_faces(&[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let l = laplacian(&c, 1, Variant::Sym).unwrap();
        let e34 = c.find_labels(&[3, 4]).unwrap();
        assert_eq!(l.degrees[e34], 1.0);
        assert!(l.matrix.row(e34).all(|(_, v)| v.is_finite()));
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("comb".parse::<Variant>().unwrap(), Variant::Combinatorial);
        assert_eq!("rw".parse::<Variant>().unwrap(), Variant::Rw);
        assert!("foo".parse::<Variant>().is_err());
    }
}
