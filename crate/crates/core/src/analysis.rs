//! Tree distance and Hölder seminorm, nonlinear approximation curves, and
//! k-means / K-score clustering evaluation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::SimplicialComplex;
use crate::dictionary::{Atom, Dictionary};
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::partition::BipartitionTree;
use crate::selection::{project, somp};

/// Size of the smallest tree region containing both simplices; 1 when
/// `sigma == tau`.
pub fn tree_distance(tree: &BipartitionTree, sigma: usize, tau: usize) -> usize {
    let mut size = tree.n();
    for j in 1..=tree.j_max() {
        let of = tree.region_of(j);
        if of[sigma] != of[tau] {
            break;
        }
        size = tree.region(j, of[sigma]).len();
    }
    size
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoelderProfile {
    pub alpha: f64,
    pub c_h: f64,
}

/// `sup_{σ≠τ} |f_σ − f_τ| / d(σ,τ)^α`. Pairs first separated by the split of
/// region `R` are at distance `|R|`, so the sup is taken split by split.
pub fn hoelder(tree: &BipartitionTree, f: &[f64], alpha: f64) -> Result<HoelderProfile> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("Hölder exponent must lie in (0, 1], got {alpha}"));
    }
    if f.len() != tree.n() {
        return Err(Error::Dimension { expected: tree.n(), got: f.len() });
    }
    let range = |m: &[usize]| {
        m.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(f[i]), hi.max(f[i])))
    };
    let mut c_h: f64 = 0.0;
    for j in 0..tree.j_max() {
        for r in tree.level(j) {
            if !r.is_split() {
                continue;
            }
            let (alo, ahi) = range(&tree.region(j + 1, r.children[0]).members);
            let (blo, bhi) = range(&tree.region(j + 1, r.children[1]).members);
            let gap = (ahi - blo).max(bhi - alo);
            c_h = c_h.max(gap / (r.len() as f64).powf(alpha));
        }
    }
    Ok(HoelderProfile { alpha, c_h })
}

/// Right-hand side of the coefficient decay bound for region `(j, k)`.
pub fn decay_bound(tree: &BipartitionTree, profile: &HoelderProfile, j: usize, k: usize) -> f64 {
    profile.c_h * (tree.region(j, k).len() as f64).powf(profile.alpha + 0.5)
}

/// `(Σ |c|^ρ)^{1/ρ}`.
pub fn rho_seminorm(coefficients: &[f64], rho: f64) -> f64 {
    coefficients.iter().map(|c| c.abs().powf(rho)).sum::<f64>().powf(1.0 / rho)
}

/// `|f|_ρ / m^β` with `β = 1/ρ − 1/2`.
pub fn m_term_bound(coefficients: &[f64], rho: f64, m: usize) -> f64 {
    rho_seminorm(coefficients, rho) / (m as f64).powf(1.0 / rho - 0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub method: String,
    /// Relative ℓ² error keeping `m` terms, for `m = 0..=n`.
    pub errors: Vec<f64>,
}

impl ErrorCurve {
    /// Non-increasing up to an absolute slack for rounding.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn last(&self) -> f64 {
        self.errors.last().copied().unwrap_or(0.0)
    }
}

/// Order in which terms enter a nonlinear approximation: decreasing
/// magnitude, lower position first on ties.
pub fn magnitude_order(coefficients: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coefficients.len()).collect();
    order.sort_by(|&a, &b| coefficients[b].abs().total_cmp(&coefficients[a].abs()).then(a.cmp(&b)));
    order
}

/// Nonlinear approximation in an orthonormal basis: for each `m`, keep the
/// `m` largest coefficients, reconstruct, and record `‖f − f_m‖₂ / ‖f‖₂`.
pub fn nla_curve(method: &str, basis: &[&Atom], f: &[f64]) -> ErrorCurve {
    let coefficients: Vec<f64> = par::map(basis, |a| a.dot(f));
    let total = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = if total > 0.0 { 1.0 / total } else { 0.0 };
    let mut residual = f.to_vec();
    let mut errors = Vec::with_capacity(basis.len() + 1);
    errors.push(if total > 0.0 { 1.0 } else { 0.0 });
    for i in magnitude_order(&coefficients) {
        basis[i].add_to(&mut residual, -coefficients[i]);
        errors.push(residual.iter().map(|x| x * x).sum::<f64>().sqrt() * scale);
    }
    ErrorCurve { method: method.to_string(), errors }
}

/// Curve from the residual norms of a pursuit.
pub fn pursuit_curve(method: &str, residual_norms: &[f64]) -> ErrorCurve {
    let total = residual_norms.first().copied().unwrap_or(0.0);
    let scale = if total > 0.0 { 1.0 / total } else { 0.0 };
    ErrorCurve { method: method.to_string(), errors: residual_norms.iter().map(|r| r * scale).collect() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = dist2(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub const KMEANS_MAX_ITER: usize = 300;

/// Lloyd iterations from a k-means++ start. Empty clusters keep their
/// previous centroid.
pub fn kmeans(features: &[Vec<f64>], d: usize, seed: u64) -> Result<KMeans> {
    if d == 0 {
        return invalid("k-means needs at least one cluster");
    }
    if d > features.len() {
        return invalid(format!("{d} clusters requested for {} points", features.len()));
    }
    let dim = features[0].len();
    if features.iter().any(|x| x.len() != dim) {
        return invalid("feature vectors differ in length");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = vec![features[rng.random_range(0..features.len())].clone()];
    while centroids.len() < d {
        let weights: Vec<f64> = features.iter().map(|x| nearest(x, &centroids).1).collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(w) => w.sample(&mut rng),
            // every point already coincides with a centroid
            Err(_) => centroids.len() % features.len(),
        };
        centroids.push(features[next].clone());
    }
    let mut assignments: Vec<usize> = vec![usize::MAX; features.len()];
    let mut iterations = 0;
    while iterations < KMEANS_MAX_ITER {
        iterations += 1;
        let next: Vec<usize> = par::map(features, |x| nearest(x, &centroids).0);
        if next == assignments {
            break;
        }
        assignments = next;
        let mut sums = vec![vec![0.0; dim]; d];
        let mut counts = vec![0usize; d];
        for (x, &a) in features.iter().zip(&assignments) {
            counts[a] += 1;
            sums[a].iter_mut().zip(x).for_each(|(s, v)| *s += v);
        }
        for j in 0..d {
            if counts[j] > 0 {
                centroids[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            }
        }
    }
    Ok(KMeans { centroids, assignments, iterations })
}

/// Mean squared distance from each feature vector to its nearest centroid.
pub fn kscore(features: &[Vec<f64>], centroids: &[Vec<f64>]) -> Result<f64> {
    if features.is_empty() {
        return invalid("K-score needs a non-empty validation set");
    }
    if centroids.is_empty() {
        return invalid("K-score needs at least one centroid");
    }
    Ok(features.iter().map(|x| nearest(x, centroids).1).sum::<f64>() / features.len() as f64)
}

/// Train/test/validation index split, proportional to `ratio`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

pub fn split_indices(count: usize, ratio: [usize; 3], seed: u64) -> Split {
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let total: usize = ratio.iter().sum::<usize>().max(1);
    let n_train = count * ratio[0] / total;
    let n_test = count * ratio[1] / total;
    let validation = idx.split_off(n_train + n_test);
    let test = idx.split_off(n_train);
    Split { train: idx, test, validation }
}

/// Split proportions (train, test, validation) of the buoy experiment.
pub const BUOY_SPLIT: [usize; 3] = [176, 83, 84];

#[derive(Clone, Debug, PartialEq)]
pub struct KScoreRow {
    pub clusters: usize,
    pub features: usize,
    pub method: String,
    pub score: f64,
}

/// For each feature count `m`: choose `m` atoms by simultaneous OMP on the
/// training split, use least-squares coefficients on those atoms as
/// features, fit k-means on the test split and score the validation split.
pub fn kscore_experiment(
    methods: &[(&str, &Dictionary)],
    signals: &[Vec<f64>],
    clusters: &[usize],
    feature_counts: &[usize],
    seed: u64,
) -> Result<Vec<KScoreRow>> {
    let split = split_indices(signals.len(), BUOY_SPLIT, seed);
    if split.train.is_empty() || split.test.is_empty() || split.validation.is_empty() {
        return invalid(format!("{} signals are too few for a three-way split", signals.len()));
    }
    let pick = |ids: &[usize]| ids.iter().map(|&i| signals[i].clone()).collect::<Vec<_>>();
    let (train, test, validation) = (pick(&split.train), pick(&split.test), pick(&split.validation));
    let mut rows = Vec::new();
    for &(name, dict) in methods {
        for &m in feature_counts {
            let atoms = somp(dict, &train, m)?;
            let feats = |set: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
                par::map(set, |f| project(dict, &atoms, f)).into_iter().collect()
            };
            let (ft, fv) = (feats(&test)?, feats(&validation)?);
            for &d in clusters {
                let km = kmeans(&ft, d, seed)?;
                rows.push(KScoreRow {
                    clusters: d,
                    features: m,
                    method: name.to_string(),
                    score: kscore(&fv, &km.centroids)?,
                });
            }
        }
    }
    rows.sort_by(|a, b| (a.clusters, a.features).cmp(&(b.clusters, b.features)));
    Ok(rows)
}

/// Edge flows of random walks on the 1-skeleton: each walk starts at one of
/// `groups` anchor vertices and adds ±1 to every traversed edge according to
/// the direction of travel relative to the edge orientation.
pub fn trajectory_signals(
    c: &SimplicialComplex,
    count: usize,
    steps: usize,
    groups: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if c.kappa_max() < 1 || c.len(1) == 0 {
        return invalid("trajectories need a complex with edges");
    }
    let nv = c.vertex_count();
    let mut nbrs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for e in 0..c.len(1) {
        let v = c.simplex(1, e).vertices();
        nbrs[v[0]].push((v[1], e));
        nbrs[v[1]].push((v[0], e));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let usable: Vec<usize> = (0..nv).filter(|&v| !nbrs[v].is_empty()).collect();
    let anchors: Vec<usize> = (0..groups.max(1)).map(|_| usable[rng.random_range(0..usable.len())]).collect();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut f = vec![0.0; c.len(1)];
        let mut at = anchors[i % anchors.len()];
        let mut prev = usize::MAX;
        for _ in 0..steps {
            let options: Vec<&(usize, usize)> = nbrs[at].iter().filter(|(v, _)| *v != prev).collect();
            let &(next, e) = if options.is_empty() { &nbrs[at][0] } else { options[rng.random_range(0..options.len())] };
            let forward = at < next;
            let sign = f64::from(c.simplex(1, e).orientation()) * if forward { 1.0 } else { -1.0 };
            f[e] += sign;
            prev = at;
            at = next;
        }
        out.push(f);
    }
    Ok(out)
}
