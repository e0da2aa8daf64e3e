//! Sign-corrected Fiedler vectors, signed cut objectives, and the
//! hierarchical bipartition tree of a κ-stratum.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use crate::complex::SimplicialComplex;
use crate::eigen::{normalize_sign, symmetric_eigen, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::hodge::{local_laplacian_natural, signed_adjacency, LaplacianMatrix, SignedAdjacency, Variant};
use crate::par;

/// Entries of the Fiedler vector below this fraction of its largest entry
/// count as zero and go to the positive side.
const ZERO_FRACTION: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FiedlerResult {
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub p_star: Vec<i8>,
    pub fiedler: Vec<f64>,
    pub lambda0: f64,
    pub lambda1: f64,
}

/// Eigendecomposition of a region's local sym Laplacian in the natural
/// frame, with its degrees and the region's orientations.
#[derive(Clone, Debug)]
pub struct LocalSpectrum {
    pub spectrum: Spectrum,
    pub degrees: Vec<f64>,
    pub signs: Vec<f64>,
}

impl LocalSpectrum {
    /// Eigenvector `l` of the oriented operator, sign-normalized.
    pub fn oriented_vector(&self, l: usize) -> Vec<f64> {
        oriented(&self.spectrum, &self.signs, l)
    }
}

pub(crate) fn oriented(s: &Spectrum, signs: &[f64], l: usize) -> Vec<f64> {
    let mut v: Vec<f64> = s.vectors.column(l).iter().zip(signs).map(|(x, p)| x * p).collect();
    normalize_sign(&mut v);
    v
}

pub(crate) fn region_signs(c: &SimplicialComplex, kappa: usize, region: &[usize]) -> Vec<f64> {
    region.iter().map(|&g| f64::from(c.simplex(kappa, g).orientation())).collect()
}

/// Shares local sym spectra between tree construction and the HGLET, which
/// diagonalize the same matrices.
#[derive(Default)]
pub struct SpectrumCache {
    inner: Mutex<HashMap<Vec<usize>, Arc<LocalSpectrum>>>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, region: &[usize]) -> bool {
        self.inner.lock().map(|m| m.contains_key(region)).unwrap_or(false)
    }
}

/// Sym-variant spectrum of the sub-complex induced by `region`, computed
/// with orientations stripped so that splits do not depend on them.
pub fn local_spectrum(
    c: &SimplicialComplex,
    kappa: usize,
    region: &[usize],
    cache: Option<&SpectrumCache>,
) -> Result<Arc<LocalSpectrum>> {
    if let Some(cache) = cache {
        if let Some(hit) = cache.inner.lock().ok().and_then(|m| m.get(region).cloned()) {
            return Ok(hit);
        }
    }
    let l = local_laplacian_natural(c, kappa, region, Variant::Sym)?;
    let spectrum = symmetric_eigen(&l.matrix.to_dense()).map_err(|e| match e {
        Error::Eigen { reason, .. } => Error::Eigen { region: describe(region), reason },
        other => other,
    })?;
    let out = Arc::new(LocalSpectrum { spectrum, degrees: l.degrees, signs: region_signs(c, kappa, region) });
    if let Some(cache) = cache {
        if let Ok(mut m) = cache.inner.lock() {
            m.insert(region.to_vec(), out.clone());
        }
    }
    Ok(out)
}

fn describe(region: &[usize]) -> String {
    match region {
        [] => "[]".into(),
        [a] => format!("[{a}]"),
        [a, .., b] => format!("[{a}..{b}] ({} simplices)", region.len()),
    }
}

/// Fiedler data from a sym Laplacian; random-walk eigenvectors are recovered
/// as `D^{-1/2} ψ`.
pub fn fiedler(l_sym: &LaplacianMatrix) -> Result<FiedlerResult> {
    if l_sym.variant != Variant::Sym {
        return invalid("fiedler expects the sym Laplacian");
    }
    let spectrum = symmetric_eigen(&l_sym.matrix.to_dense())?;
    fiedler_from_spectrum(&spectrum, &l_sym.degrees)
}

pub fn fiedler_from_spectrum(spectrum: &Spectrum, degrees: &[f64]) -> Result<FiedlerResult> {
    let n = spectrum.len();
    if n < 2 {
        return invalid("Fiedler vector needs a region of at least two simplices");
    }
    let rw = |i: usize| {
        let mut v: Vec<f64> =
            spectrum.vectors.column(i).iter().zip(degrees).map(|(x, d)| x / d.sqrt()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        normalize_sign(&mut v);
        v
    };
    let phi0 = rw(0);
    let phi1 = rw(1);
    let p_star: Vec<i8> = phi0.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect();
    let fiedler = phi1.iter().zip(&p_star).map(|(x, &p)| x * f64::from(p)).collect();
    Ok(FiedlerResult {
        phi0,
        phi1,
        p_star,
        fiedler,
        lambda0: spectrum.values[0],
        lambda1: spectrum.values[1],
    })
}

/// Consistency cuts and the signed cut objectives of a bipartition `(A, B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutReport {
    /// `Ccut(A, B)`, signed.
    pub ccut: f64,
    pub ccut_plus: f64,
    pub ccut_minus: f64,
    pub cvol_plus_a: f64,
    pub cvol_minus_a: f64,
    pub cvol_plus_b: f64,
    pub cvol_minus_b: f64,
    /// Degree volumes `Σ_{σ∈A} Σ_τ |S_στ|`.
    pub degree_volume_a: f64,
    pub degree_volume_b: f64,
    pub kcut: f64,
    pub signed_ratio_cut: f64,
    pub signed_normalized_cut: f64,
}

fn balance_term(kcut: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        kcut / denom
    } else if kcut == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Evaluates the cut objectives of `A` against its complement under signed
/// adjacency `s` (normally `S^wt`).
pub fn cut_report(s: &SignedAdjacency, a: &[usize]) -> Result<CutReport> {
    let n = s.matrix.rows();
    let mut in_a = vec![false; n];
    for &i in a {
        if i >= n {
            return Err(Error::Index(format!("cut member {i} outside 0..{n}")));
        }
        in_a[i] = true;
    }
    let size_a = in_a.iter().filter(|&&x| x).count();
    if size_a == 0 || size_a == n {
        return invalid("cut side must be non-empty and proper");
    }
    let mut r = CutReport {
        ccut: 0.0,
        ccut_plus: 0.0,
        ccut_minus: 0.0,
        cvol_plus_a: 0.0,
        cvol_minus_a: 0.0,
        cvol_plus_b: 0.0,
        cvol_minus_b: 0.0,
        degree_volume_a: 0.0,
        degree_volume_b: 0.0,
        kcut: 0.0,
        signed_ratio_cut: 0.0,
        signed_normalized_cut: 0.0,
    };
    for row in 0..n {
        for (col, v) in s.matrix.row(row) {
            let (plus, minus) = (v.max(0.0), (-v).max(0.0));
            if in_a[row] {
                r.degree_volume_a += v.abs();
            } else {
                r.degree_volume_b += v.abs();
            }
            match (in_a[row], in_a[col]) {
                (true, false) => {
                    r.ccut += v;
                    r.ccut_plus += plus;
                    r.ccut_minus += minus;
                }
                (true, true) => {
                    r.cvol_plus_a += plus;
                    r.cvol_minus_a += minus;
                }
                (false, false) => {
                    r.cvol_plus_b += plus;
                    r.cvol_minus_b += minus;
                }
                (false, true) => {}
            }
        }
    }
    r.kcut = 2.0 * r.ccut_plus + r.cvol_minus_a + r.cvol_minus_b;
    let size_b = (n - size_a) as f64;
    r.signed_ratio_cut = (1.0 / size_a as f64 + 1.0 / size_b) * r.kcut;
    r.signed_normalized_cut =
        balance_term(r.kcut, r.degree_volume_a) + balance_term(r.kcut, r.degree_volume_b);
    Ok(r)
}

/// Connected components of the weak-adjacency graph restricted to `region`,
/// each sorted, in order of their smallest member.
pub fn components(c: &SimplicialComplex, kappa: usize, region: &[usize]) -> Vec<Vec<usize>> {
    let mut label: HashMap<usize, usize> = region.iter().map(|&g| (g, usize::MAX)).collect();
    let mut out = Vec::new();
    for &start in region {
        if label[&start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = vec![start];
        label.insert(start, id);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in c.weak_neighbors(kappa, x) {
                if label.get(&y) == Some(&usize::MAX) {
                    label.insert(y, id);
                    comp.push(y);
                    queue.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Splits `region` (sorted κ-simplex indices, at least two) into two
/// non-empty parts.
pub fn bipartition(c: &SimplicialComplex, kappa: usize, region: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    bipartition_cached(c, kappa, region, None)
}

pub fn bipartition_cached(
    c: &SimplicialComplex,
    kappa: usize,
    region: &[usize],
    cache: Option<&SpectrumCache>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if region.len() < 2 {
        return invalid("bipartition needs at least two simplices");
    }
    if region.len() == 2 {
        return Ok((vec![region[0]], vec![region[1]]));
    }
    let comps = components(c, kappa, region);
    if comps.len() > 1 {
        let mut largest = 0;
        for (i, comp) in comps.iter().enumerate() {
            if comp.len() > comps[largest].len() {
                largest = i;
            }
        }
        let mut rest: Vec<usize> =
            comps.iter().enumerate().filter(|&(i, _)| i != largest).flat_map(|(_, c)| c.iter().copied()).collect();
        rest.sort_unstable();
        return Ok((comps[largest].clone(), rest));
    }

    let local = local_spectrum(c, kappa, region, cache)?;
    let f = fiedler_from_spectrum(&local.spectrum, &local.degrees)?;
    let scale = f.fiedler.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (&g, &x) in region.iter().zip(&f.fiedler) {
        if x >= 0.0 || x.abs() <= ZERO_FRACTION * scale {
            pos.push(g);
        } else {
            neg.push(g);
        }
    }
    if !pos.is_empty() && !neg.is_empty() {
        return Ok((pos, neg));
    }

    // one-sided Fiedler vector: peel off the most weakly connected simplex
    let wt = local_laplacian_natural(c, kappa, region, Variant::Wt)?;
    let s = signed_adjacency(&wt);
    let mut weakest = 0;
    let mut weakest_sum = f64::INFINITY;
    for r in 0..region.len() {
        let sum: f64 = s.matrix.row(r).map(|(_, v)| v.abs()).sum();
        if sum < weakest_sum {
            weakest_sum = sum;
            weakest = r;
        }
    }
    let single = vec![region[weakest]];
    let rest = region.iter().copied().filter(|&g| g != region[weakest]).collect();
    Ok((single, rest))
}

/// One region `C^j_k` of the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// Sorted global κ-simplex indices.
    pub members: Vec<usize>,
    /// Index `k` of the parent region on level `j-1`.
    pub parent: Option<usize>,
    /// Indices on level `j+1`: two for a split, one for a leaf carried down,
    /// none on the last level.
    pub children: Vec<usize>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_split(&self) -> bool {
        self.children.len() == 2
    }
}

/// Hierarchical bipartition tree stored level by level. Every level covers
/// the whole stratum: leaves reached early are carried down unchanged, so
/// the last level `j_max` consists of singletons only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitionTree {
    pub kappa: usize,
    levels: Vec<Vec<Region>>,
}

struct Node {
    members: Vec<usize>,
    children: Option<Box<(Node, Node)>>,
}

impl Node {
    fn depth(&self) -> usize {
        self.children.as_ref().map_or(0, |ch| 1 + ch.0.depth().max(ch.1.depth()))
    }
}

fn split_recursive(
    c: &SimplicialComplex,
    kappa: usize,
    members: Vec<usize>,
    cache: Option<&SpectrumCache>,
) -> Result<Node> {
    if members.len() < 2 {
        return Ok(Node { members, children: None });
    }
    let (mut a, mut b) = bipartition_cached(c, kappa, &members, cache)?;
    if b[0] < a[0] {
        std::mem::swap(&mut a, &mut b);
    }
    let (left, right) = par::join(
        || split_recursive(c, kappa, a, cache),
        || split_recursive(c, kappa, b, cache),
    );
    Ok(Node { members, children: Some(Box::new((left?, right?))) })
}

impl BipartitionTree {
    /// Validates and wraps explicit levels.
    pub fn from_levels(kappa: usize, levels: Vec<Vec<Region>>) -> Result<Self> {
        let t = Self { kappa, levels };
        t.validate()?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.levels[0][0].len()
    }

    pub fn j_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<Region>] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &[Region] {
        &self.levels[j]
    }

    pub fn region(&self, j: usize, k: usize) -> &Region {
        &self.levels[j][k]
    }

    /// `K^j` for each level.
    pub fn regions_per_level(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Map from simplex index to its region index `k` on level `j`.
    pub fn region_of(&self, j: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n()];
        for (k, r) in self.levels[j].iter().enumerate() {
            for &m in &r.members {
                out[m] = k;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(format!("malformed tree: {msg}")));
        if self.levels.is_empty() || self.levels[0].len() != 1 {
            return bad("level 0 must hold exactly the root".into());
        }
        let n = self.levels[0][0].len();
        if self.levels[0][0].members != (0..n).collect::<Vec<_>>() {
            return bad("root must be the whole stratum 0..n".into());
        }
        let last = self.j_max();
        for (j, level) in self.levels.iter().enumerate() {
            let mut seen = vec![false; n];
            for (k, r) in level.iter().enumerate() {
                if r.members.is_empty() || r.members.windows(2).any(|w| w[0] >= w[1]) {
                    return bad(format!("region ({j},{k}) empty or unsorted"));
                }
                for &m in &r.members {
                    if m >= n || seen[m] {
                        return bad(format!("level {j} does not partition 0..{n}"));
                    }
                    seen[m] = true;
                }
                if (j == 0) != r.parent.is_none() {
                    return bad(format!("region ({j},{k}) parent link"));
                }
                if j == last {
                    if r.len() != 1 || !r.children.is_empty() {
                        return bad(format!("last level region ({j},{k}) must be a childless singleton"));
                    }
                    continue;
                }
                let kids = &r.children;
                let next = &self.levels[j + 1];
                let ok = match kids.len() {
                    1 => r.len() == 1 && next.get(kids[0]).is_some_and(|ch| ch.members == r.members),
                    2 => {
                        let (a, b) = (next.get(kids[0]), next.get(kids[1]));
                        match (a, b) {
                            (Some(a), Some(b)) => {
                                let mut u: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
                                u.sort_unstable();
                                u == r.members && a.members[0] < b.members[0]
                            }
                            _ => false,
                        }
                    }
                    _ => false,
                };
                if !ok {
                    return bad(format!("children of ({j},{k}) do not partition it"));
                }
                if kids.iter().any(|&ch| next[ch].parent != Some(k)) {
                    return bad(format!("child of ({j},{k}) points to another parent"));
                }
            }
            if seen.iter().any(|s| !s) {
                return bad(format!("level {j} does not cover 0..{n}"));
            }
        }
        Ok(())
    }

    fn from_root(kappa: usize, root: Node) -> Self {
        let depth = root.depth();
        let mut levels: Vec<Vec<Region>> = Vec::with_capacity(depth + 1);
        let mut nodes: Vec<&Node> = vec![&root];
        levels.push(vec![Region { members: root.members.clone(), parent: None, children: Vec::new() }]);
        for j in 0..depth {
            let mut next_nodes: Vec<&Node> = Vec::new();
            let mut next: Vec<Region> = Vec::new();
            for (k, node) in nodes.iter().enumerate() {
                let kids: Vec<&Node> = match &node.children {
                    Some(ch) => vec![&ch.0, &ch.1],
                    None => vec![*node],
                };
                for kid in kids {
                    levels[j][k].children.push(next.len());
                    next.push(Region { members: kid.members.clone(), parent: Some(k), children: Vec::new() });
                    next_nodes.push(kid);
                }
            }
            levels.push(next);
            nodes = next_nodes;
        }
        Self { kappa, levels }
    }
}

pub fn build_tree(c: &SimplicialComplex, kappa: usize) -> Result<BipartitionTree> {
    build_tree_cached(c, kappa, None)
}

/// Builds the tree; local spectra computed along the way land in `cache`.
pub fn build_tree_cached(
    c: &SimplicialComplex,
    kappa: usize,
    cache: Option<&SpectrumCache>,
) -> Result<BipartitionTree> {
    let n = c.len(kappa);
    if n == 0 {
        return invalid(format!("stratum {kappa} is empty"));
    }
    let root = split_recursive(c, kappa, (0..n).collect(), cache)?;
    Ok(BipartitionTree::from_root(kappa, root))
}
