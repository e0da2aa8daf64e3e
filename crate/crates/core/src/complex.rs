//! Oriented simplicial complexes: simplices, natural parity, faces, co-faces
//! and the weak/strong/κ-adjacency relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{invalid, Error, Result};

/// A stored simplex. Vertices are internal ids in strictly ascending order;
/// the orientation is relative to the natural one.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<usize>,
    orientation: i8,
    weight: f64,
}

impl Simplex {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// A simplex as supplied to the builder: arbitrary vertex labels in any
/// order, an orientation relative to that order, and a positive weight.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexSpec {
    pub vertices: Vec<usize>,
    pub orientation: i8,
    pub weight: f64,
}

impl SimplexSpec {
    pub fn natural(vertices: Vec<usize>) -> Self {
        Self { vertices, orientation: 1, weight: 1.0 }
    }
}

/// Natural parity of `sigma` with respect to `alpha`: `(-1)^(l+1)` where `l`
/// is the 1-based position of the vertex removed from `sigma` to obtain
/// `alpha`, and 0 when `alpha` is not a face. Both slices must be sorted.
pub fn natural_parity(sigma: &[usize], alpha: &[usize]) -> i8 {
    if alpha.len() + 1 != sigma.len() {
        return 0;
    }
    let mut removed = None;
    let mut a = 0;
    for (pos, &v) in sigma.iter().enumerate() {
        if a < alpha.len() && alpha[a] == v {
            a += 1;
        } else if removed.is_none() {
            removed = Some(pos);
        } else {
            return 0;
        }
    }
    match removed {
        Some(pos) if a == alpha.len() => {
            if pos % 2 == 0 {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

/// Sign of the permutation that sorts `v`; `None` on repeated entries.
fn sort_with_parity(v: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut sorted = v.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting transpositions
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sorted, sign))
}

/// How two weakly adjacent κ-simplices relate through their hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdjacencyKind {
    /// The hull is stored in the complex.
    Strong,
    /// The hull is absent from the complex.
    KappaAdjacent,
}

/// Witness of a weak adjacency between two κ-simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyRecord {
    pub kind: AdjacencyKind,
    /// Index of the shared face in stratum κ−1.
    pub boundary_face: usize,
    /// Index of the hull in stratum κ+1, when stored.
    pub hull: Option<usize>,
    /// Vertex set of the hull (union of both simplices), stored or not.
    pub hull_vertices: Vec<usize>,
}

/// An oriented, weighted simplicial complex, immutable after construction.
///
/// Vertex labels are compacted to ids `0..n` in ascending label order, so
/// natural orientation is the same in labels and ids. Within each stratum
/// simplices are ordered lexicographically by vertex list; that position is the
/// simplex's global index.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<usize>,
    strata: Vec<Vec<Simplex>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    faces: Vec<Vec<Vec<usize>>>,
    cofaces: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Builds a face-closed complex. Faces not listed explicitly get natural
    /// orientation and weight 1; repeated simplices are merged with summed
    /// weights. With `declared_vertices = Some(n)` every label must be below
    /// `n` and all of `0..n` become vertices.
    pub fn from_specs(declared_vertices: Option<usize>, specs: &[SimplexSpec]) -> Result<Self> {
        let mut label_set: BTreeSet<usize> = BTreeSet::new();
        if let Some(n) = declared_vertices {
            label_set.extend(0..n);
        }
        for s in specs {
            if s.vertices.is_empty() {
                return invalid("simplex with no vertices");
            }
            if s.orientation != 1 && s.orientation != -1 {
                return invalid(format!("orientation must be +1 or -1, got {}", s.orientation));
            }
            if !(s.weight > 0.0 && s.weight.is_finite()) {
                return invalid(format!("weight must be positive, got {}", s.weight));
            }
            for &v in &s.vertices {
                if let Some(n) = declared_vertices {
                    if v >= n {
                        return Err(Error::Index(format!("vertex label {v} not below declared count {n}")));
                    }
                }
                label_set.insert(v);
            }
        }
        let labels: Vec<usize> = label_set.into_iter().collect();
        if labels.is_empty() {
            return invalid("complex has no vertices");
        }
        let id_of: HashMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

        let mut explicit: BTreeMap<Vec<usize>, (i8, f64)> = BTreeMap::new();
        for s in specs {
            let ids: Vec<usize> = s.vertices.iter().map(|v| id_of[v]).collect();
            let (sorted, parity) = sort_with_parity(&ids)
                .ok_or_else(|| Error::Invalid(format!("repeated vertex in {:?}", s.vertices)))?;
            let orientation = s.orientation * parity;
            if sorted.len() == 1 && orientation != 1 {
                return invalid(format!("vertex {:?} must have orientation +1", s.vertices));
            }
            match explicit.get_mut(&sorted) {
                Some((o, w)) => {
                    if *o != orientation {
                        return invalid(format!("conflicting orientations for {:?}", s.vertices));
                    }
                    *w += s.weight;
                }
                None => {
                    explicit.insert(sorted, (orientation, s.weight));
                }
            }
        }

        let top = explicit.keys().map(|v| v.len()).max().unwrap_or(1);
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); top];
        by_dim[0].extend((0..labels.len()).map(|i| vec![i]));
        for v in explicit.keys() {
            by_dim[v.len() - 1].insert(v.clone());
        }
        for d in (1..top).rev() {
            let (lower, upper) = by_dim.split_at_mut(d);
            for s in upper[0].iter() {
                for skip in 0..s.len() {
                    let face: Vec<usize> =
                        s.iter().enumerate().filter(|&(p, _)| p != skip).map(|(_, &v)| v).collect();
                    lower[d - 1].insert(face);
                }
            }
        }

        let strata: Vec<Vec<Simplex>> = by_dim
            .into_iter()
            .map(|set| {
                set.into_iter()
                    .map(|vertices| {
                        let (orientation, weight) = explicit.get(&vertices).copied().unwrap_or((1, 1.0));
                        Simplex { vertices, orientation, weight }
                    })
                    .collect()
            })
            .collect();
        Ok(Self::assemble(labels, strata))
    }

    fn assemble(labels: Vec<usize>, strata: Vec<Vec<Simplex>>) -> Self {
        let lookup: Vec<HashMap<Vec<usize>, usize>> = strata
            .iter()
            .map(|st| st.iter().enumerate().map(|(i, s)| (s.vertices.clone(), i)).collect())
            .collect();
        let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); strata.len()];
        let mut cofaces: Vec<Vec<Vec<usize>>> = strata.iter().map(|st| vec![Vec::new(); st.len()]).collect();
        for d in 1..strata.len() {
            faces[d] = strata[d]
                .iter()
                .map(|s| {
                    (0..s.vertices.len())
                        .map(|skip| {
                            let face: Vec<usize> = s
                                .vertices
                                .iter()
                                .enumerate()
                                .filter(|&(p, _)| p != skip)
                                .map(|(_, &v)| v)
                                .collect();
                            lookup[d - 1][&face]
                        })
                        .collect()
                })
                .collect();
            for (i, fs) in faces[d].iter().enumerate() {
                for &f in fs {
                    cofaces[d - 1][f].push(i);
                }
            }
        }
        Self { labels, strata, lookup, faces, cofaces }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Original label of internal vertex id `v`.
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn kappa_max(&self) -> usize {
        self.strata.len() - 1
    }

    /// Number of κ-simplices; 0 above `kappa_max`.
    pub fn len(&self, kappa: usize) -> usize {
        self.strata.get(kappa).map_or(0, Vec::len)
    }

    pub fn stratum(&self, kappa: usize) -> &[Simplex] {
        self.strata.get(kappa).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, kappa: usize, i: usize) -> &Simplex {
        &self.strata[kappa][i]
    }

    /// Faces of κ-simplex `i`, position `p` being the face with vertex `p` removed.
    pub fn faces(&self, kappa: usize, i: usize) -> &[usize] {
        if kappa == 0 {
            return &[];
        }
        &self.faces[kappa][i]
    }

    /// Co-faces of κ-simplex `i` in ascending index order.
    pub fn cofaces(&self, kappa: usize, i: usize) -> &[usize] {
        self.cofaces.get(kappa).map_or(&[], |c| c[i].as_slice())
    }

    /// Index of the simplex with these internal (sorted) vertex ids.
    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        let kappa = vertices.len().checked_sub(1)?;
        self.lookup.get(kappa)?.get(vertices).copied()
    }

    /// Index of the simplex with these vertex labels, in any order.
    pub fn find_labels(&self, labels: &[usize]) -> Option<usize> {
        let mut ids = labels
            .iter()
            .map(|l| self.labels.binary_search(l).ok())
            .collect::<Option<Vec<usize>>>()?;
        ids.sort_unstable();
        self.find(&ids)
    }

    /// Vertex labels of a κ-simplex.
    pub fn simplex_labels(&self, kappa: usize, i: usize) -> Vec<usize> {
        self.strata[kappa][i].vertices.iter().map(|&v| self.labels[v]).collect()
    }

    /// Simplex count per stratum, κ = 0..=kappa_max.
    pub fn counts(&self) -> Vec<usize> {
        self.strata.iter().map(Vec::len).collect()
    }

    /// Adjacency between two distinct κ-simplices, `None` when they share no face.
    pub fn adjacency(&self, kappa: usize, i: usize, j: usize) -> Result<Option<AdjacencyRecord>> {
        if kappa == 0 || kappa > self.kappa_max() {
            return Err(Error::Index(format!("kappa {kappa} outside 1..={}", self.kappa_max())));
        }
        let n = self.len(kappa);
        if i >= n || j >= n {
            return Err(Error::Index(format!("simplex index out of range (stratum size {n})")));
        }
        if i == j {
            return Err(Error::Index("adjacency needs two distinct simplices".into()));
        }
        let shared = self.faces(kappa, i).iter().find(|f| self.faces(kappa, j).contains(f)).copied();
        let Some(face) = shared else { return Ok(None) };
        let mut hull: Vec<usize> = self.strata[kappa][i].vertices.clone();
        hull.extend_from_slice(&self.strata[kappa][j].vertices);
        hull.sort_unstable();
        hull.dedup();
        let stored = self.find(&hull);
        Ok(Some(AdjacencyRecord {
            kind: if stored.is_some() { AdjacencyKind::Strong } else { AdjacencyKind::KappaAdjacent },
            boundary_face: face,
            hull: stored,
            hull_vertices: hull,
        }))
    }

    /// Weakly adjacent κ-simplices of `i`: sharing a face for κ > 0, sharing
    /// an edge for vertices. Sorted, without `i`.
    pub fn weak_neighbors(&self, kappa: usize, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if kappa == 0 {
            for &e in self.cofaces(0, i) {
                out.extend(self.faces(1, e).iter().copied().filter(|&v| v != i));
            }
        } else {
            for &f in self.faces(kappa, i) {
                out.extend(self.cofaces(kappa - 1, f).iter().copied().filter(|&t| t != i));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Copy with the orientations of stratum `kappa` multiplied by `p`.
    pub fn reoriented(&self, kappa: usize, p: &[i8]) -> Result<Self> {
        if p.len() != self.len(kappa) {
            return Err(Error::Dimension { expected: self.len(kappa), got: p.len() });
        }
        if p.iter().any(|&s| s != 1 && s != -1) {
            return invalid("orientation flips must be +1 or -1");
        }
        if kappa == 0 && p.iter().any(|&s| s != 1) {
            return invalid("vertices are always in natural orientation");
        }
        let mut out = self.clone();
        for (s, &flip) in out.strata[kappa].iter_mut().zip(p) {
            s.orientation *= flip;
        }
        Ok(out)
    }

    /// Copy with the weights of stratum `kappa` replaced.
    pub fn with_weights(&self, kappa: usize, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len(kappa) {
            return Err(Error::Dimension { expected: self.len(kappa), got: weights.len() });
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return invalid("weights must be positive");
        }
        let mut out = self.clone();
        for (s, &w) in out.strata[kappa].iter_mut().zip(weights) {
            s.weight = w;
        }
        Ok(out)
    }
}

/// Closes a list of vertex sets under faces, with natural orientations and
/// unit weights. Repeated sets are deduplicated.
pub fn close_under_faces(sets: &[Vec<usize>]) -> Result<SimplicialComplex> {
    if sets.is_empty() {
        return invalid("no simplices given");
    }
    let mut seen = BTreeSet::new();
    let mut specs = Vec::new();
    for s in sets {
        let mut v = s.clone();
        v.sort_unstable();
        if seen.insert(v.clone()) {
            specs.push(SimplexSpec::natural(v));
        }
    }
    SimplicialComplex::from_specs(None, &specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_triangles() -> SimplicialComplex {
        close_under_faces(&[vec![1, 2, 3], vec![2, 3, 4]]).unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(natural_parity(&[1, 2], &[2]), 1);
        assert_eq!(natural_parity(&[1, 2, 3], &[1, 3]), -1);
        assert_eq!(natural_parity(&[1, 2], &[3]), 0);
        assert_eq!(natural_parity(&[1, 2, 3], &[1, 2]), 1);
        assert_eq!(natural_parity(&[1, 2, 3], &[1]), 0);
    }

    #[test]
    fn closure_counts() {
        assert_eq!(close_under_faces(&[vec![1, 2, 3]]).unwrap().counts(), vec![3, 3, 1]);
        assert_eq!(two_triangles().counts(), vec![4, 5, 2]);
        let c = close_under_faces(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(c.counts(), vec![4, 2]);
        assert!(c.weak_neighbors(1, 0).is_empty());
        assert!(close_under_faces(&[]).is_err());
        assert!(close_under_faces(&[vec![]]).is_err());
    }

    #[test]
    fn figure_one_adjacency() {
        let c = two_triangles();
        // edges in lexicographic order: e1={1,2} e2={1,3} e3={2,3} e4={2,4} e5={3,4}
        let e = |a: usize, b: usize| c.find_labels(&[a, b]).unwrap();
        let v = |a: usize| c.find_labels(&[a]).unwrap();
        assert_eq!((e(1, 2), e(1, 3), e(2, 3), e(2, 4), e(3, 4)), (0, 1, 2, 3, 4));

        let r = c.adjacency(1, e(1, 2), e(1, 3)).unwrap().unwrap();
        assert_eq!(r.kind, AdjacencyKind::Strong);
        assert_eq!(r.boundary_face, v(1));
        assert_eq!(r.hull, c.find_labels(&[1, 2, 3]));

        let r = c.adjacency(1, e(1, 2), e(2, 4)).unwrap().unwrap();
        assert_eq!(r.kind, AdjacencyKind::KappaAdjacent);
        assert_eq!(r.boundary_face, v(2));
        assert_eq!(r.hull, None);

        let r = c.adjacency(2, 0, 1).unwrap().unwrap();
        assert_eq!(r.kind, AdjacencyKind::KappaAdjacent);
        assert_eq!(r.boundary_face, e(2, 3));

        assert!(c.adjacency(1, e(1, 2), e(3, 4)).unwrap().is_none());
        assert!(c.adjacency(3, 0, 1).is_err());
        assert!(c.adjacency(1, 0, 9).is_err());
        assert!(c.adjacency(1, 0, 0).is_err());
    }

    #[test]
    fn unsorted_input_flips_orientation() {
        let c = SimplicialComplex::from_specs(
            None,
            &[SimplexSpec { vertices: vec![3, 1], orientation: 1, weight: 2.0 }],
        )
        .unwrap();
        assert_eq!(c.simplex(1, 0).orientation(), -1);
        assert_eq!(c.simplex(1, 0).weight(), 2.0);
    }

    #[test]
    fn duplicates_merge_weights() {
        let specs = vec![
            SimplexSpec { vertices: vec![0, 1], orientation: 1, weight: 1.5 },
            SimplexSpec { vertices: vec![0, 1], orientation: 1, weight: 2.0 },
        ];
        let c = SimplicialComplex::from_specs(Some(3), &specs).unwrap();
        assert_eq!(c.counts(), vec![3, 1]);
        assert_eq!(c.simplex(1, 0).weight(), 3.5);

        let bad = vec![
            SimplexSpec { vertices: vec![0, 1], orientation: 1, weight: 1.0 },
            SimplexSpec { vertices: vec![1, 0], orientation: 1, weight: 1.0 },
        ];
        assert!(SimplicialComplex::from_specs(None, &bad).is_err());
        assert!(SimplicialComplex::from_specs(Some(1), &specs).is_err());
        let neg = vec![SimplexSpec { vertices: vec![0], orientation: -1, weight: 1.0 }];
        assert!(SimplicialComplex::from_specs(None, &neg).is_err());
    }

    #[test]
    fn isolated_vertices_are_kept() {
        let c = SimplicialComplex::from_specs(Some(5), &[SimplexSpec::natural(vec![0, 1])]).unwrap();
        assert_eq!(c.counts(), vec![5, 1]);
        assert!(c.cofaces(0, 4).is_empty());
    }

    #[test]
    fn reorientation_checks_length() {
        let c = two_triangles();
        assert!(c.reoriented(1, &[1, 1]).is_err());
        assert!(c.reoriented(0, &[1, -1, 1, 1]).is_err());
        let r = c.reoriented(1, &[1, -1, 1, 1, 1]).unwrap();
        assert_eq!(r.simplex(1, 1).orientation(), -1);
    }
}
