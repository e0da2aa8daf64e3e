//! Best-basis search, orthogonal matching pursuit and greedy pursuit over a
//! dictionary.

use std::fmt;
use std::str::FromStr;

use crate::dictionary::{Atom, Dictionary, DictionaryKind, Ordering};
use crate::error::{invalid, Error, Result};
use crate::par;

/// `⟨f, φ⟩` for every atom of a dictionary.
#[derive(Clone, Debug)]
pub struct CoefficientTable<'a> {
    pub dictionary: &'a Dictionary,
    pub coefficients: Vec<f64>,
    pub signal_norm: f64,
}

fn check_len(d: &Dictionary, f: &[f64]) -> Result<()> {
    if f.len() != d.n {
        return Err(Error::Dimension { expected: d.n, got: f.len() });
    }
    Ok(())
}

fn norm(f: &[f64]) -> f64 {
    f.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn analyze<'a>(d: &'a Dictionary, f: &[f64]) -> Result<CoefficientTable<'a>> {
    check_len(d, f)?;
    let coefficients = d.coefficients(f);
    Ok(CoefficientTable { dictionary: d, coefficients, signal_norm: norm(f) })
}

/// Additive block cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostSpec {
    L1,
    Lp(f64),
    /// `−Σ q log q` with `q = c² / ‖f‖²`.
    Entropy,
}

impl CostSpec {
    pub fn evaluate(&self, coefs: impl IntoIterator<Item = f64>, signal_norm: f64) -> f64 {
        match *self {
            CostSpec::L1 => coefs.into_iter().map(f64::abs).sum(),
            CostSpec::Lp(p) => coefs.into_iter().map(|c| c.abs().powf(p)).sum(),
            CostSpec::Entropy => {
                let e = signal_norm * signal_norm;
                if e == 0.0 {
                    return 0.0;
                }
                coefs
                    .into_iter()
                    .map(|c| {
                        let q = c * c / e;
                        if q > 0.0 {
                            -q * q.ln()
                        } else {
                            0.0
                        }
                    })
                    .sum()
            }
        }
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostSpec::L1 => f.write_str("l1"),
            CostSpec::Lp(p) => write!(f, "lp:{p}"),
            CostSpec::Entropy => f.write_str("entropy"),
        }
    }
}

impl FromStr for CostSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(CostSpec::L1),
            "entropy" => Ok(CostSpec::Entropy),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown cost {s:?}; use l1, lp:<p> or entropy")))?;
                if !(p > 0.0 && p <= 2.0) {
                    return invalid(format!("lp exponent must lie in (0, 2], got {p}"));
                }
                Ok(CostSpec::Lp(p))
            }
        }
    }
}

/// A node of the search tree: a group of atoms spanning the same space as
/// the union of its children's groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockNode {
    pub j: usize,
    /// Region `k` for C2F blocks, tag `l` for F2C blocks.
    pub key: usize,
    pub atoms: Vec<usize>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct BlockTree {
    pub direction: Ordering,
    pub nodes: Vec<BlockNode>,
    pub root: usize,
}

/// C2F blocks are tree regions `(j, k)`; F2C blocks group the atoms of level
/// `j` by tag, with `(j, l)` refined by `(j−1, 2l)` and `(j−1, 2l+1)`.
pub fn block_tree(d: &Dictionary, direction: Ordering) -> Result<BlockTree> {
    if d.kind == DictionaryKind::Haar {
        return Err(Error::Unsupported("the Haar basis is a single basis; there is nothing to search".into()));
    }
    if direction == Ordering::F2C && d.kind != DictionaryKind::Ghwt {
        return Err(Error::Unsupported(format!("F2C best basis needs a GHWT dictionary, got {}", d.kind)));
    }
    let tree = &d.tree;
    let j_max = tree.j_max();
    let mut nodes = Vec::new();
    match direction {
        Ordering::C2F => {
            let mut offset = vec![0usize; j_max + 2];
            for j in 0..=j_max {
                offset[j + 1] = offset[j] + tree.level(j).len();
            }
            for j in 0..=j_max {
                let mut by_region: Vec<Vec<usize>> = vec![Vec::new(); tree.level(j).len()];
                for id in d.level(j) {
                    by_region[d.atom(id).k].push(id);
                }
                for (k, atoms) in by_region.into_iter().enumerate() {
                    let children = tree.region(j, k).children.iter().map(|&c| offset[j + 1] + c).collect();
                    nodes.push(BlockNode { j, key: k, atoms, children });
                }
            }
            Ok(BlockTree { direction, nodes, root: 0 })
        }
        Ordering::F2C => {
            let mut index: Vec<std::collections::BTreeMap<usize, usize>> = vec![Default::default(); j_max + 1];
            for j in 0..=j_max {
                let mut by_tag: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
                for id in d.level(j) {
                    by_tag.entry(d.atom(id).l).or_default().push(id);
                }
                for (l, mut atoms) in by_tag {
                    atoms.sort_by_key(|&id| d.atom(id).k);
                    index[j].insert(l, nodes.len());
                    nodes.push(BlockNode { j, key: l, atoms, children: Vec::new() });
                }
            }
            for j in 1..=j_max {
                for (&l, &node) in &index[j] {
                    let kids: Vec<usize> =
                        [2 * l, 2 * l + 1].iter().filter_map(|t| index[j - 1].get(t).copied()).collect();
                    nodes[node].children = kids;
                }
            }
            let root = *index[j_max].get(&0).ok_or_else(|| Error::Invalid("finest level lacks tag 0".into()))?;
            Ok(BlockTree { direction, nodes, root })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisSelection {
    pub direction: Ordering,
    /// Selected `(j, key)` blocks.
    pub blocks: Vec<(usize, usize)>,
    /// Atom ids of the selected basis.
    pub atoms: Vec<usize>,
    pub cost: f64,
}

impl BasisSelection {
    /// Checks that the selected atoms form a basis-sized set: a tiling of
    /// the stratum by supports (C2F) or `n` distinct atoms from a search
    /// tree whose blocks are disjoint in span (F2C).
    pub fn validate(&self, d: &Dictionary) -> Result<()> {
        let mut seen = vec![false; d.len()];
        for &a in &self.atoms {
            if a >= d.len() || seen[a] {
                return invalid("selection repeats or misses atoms");
            }
            seen[a] = true;
        }
        if self.atoms.len() != d.n {
            return invalid(format!("selection has {} atoms, stratum has {}", self.atoms.len(), d.n));
        }
        if self.direction == Ordering::C2F {
            let mut cover = vec![0usize; d.n];
            for &(j, k) in &self.blocks {
                for &m in &d.tree.region(j, k).members {
                    cover[m] += 1;
                }
            }
            if cover.iter().any(|&c| c != 1) {
                return invalid("selected regions do not tile the stratum");
            }
        }
        Ok(())
    }
}

/// Bottom-up best-basis search: each block keeps its own atoms unless its
/// children's best selections cost strictly less.
pub fn best_basis(t: &CoefficientTable<'_>, cost: CostSpec, direction: Ordering) -> Result<BasisSelection> {
    let bt = block_tree(t.dictionary, direction)?;
    let block_cost: Vec<f64> = bt
        .nodes
        .iter()
        .map(|b| cost.evaluate(b.atoms.iter().map(|&i| t.coefficients[i]), t.signal_norm))
        .collect();
    let mut order = Vec::with_capacity(bt.nodes.len());
    let mut stack = vec![(bt.root, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            order.push(v);
        } else {
            stack.push((v, true));
            stack.extend(bt.nodes[v].children.iter().map(|&c| (c, false)));
        }
    }
    let mut best = vec![f64::NAN; bt.nodes.len()];
    let mut keep = vec![true; bt.nodes.len()];
    for &v in &order {
        let kids = &bt.nodes[v].children;
        if kids.is_empty() {
            best[v] = block_cost[v];
            continue;
        }
        let below = kids.iter().fold(0.0, |s, &c| s + best[c]);
        if below < block_cost[v] {
            best[v] = below;
            keep[v] = false;
        } else {
            best[v] = block_cost[v];
        }
    }
    let mut blocks = Vec::new();
    let mut atoms = Vec::new();
    let mut stack = vec![bt.root];
    while let Some(v) = stack.pop() {
        if keep[v] {
            blocks.push((bt.nodes[v].j, bt.nodes[v].key));
            atoms.extend(&bt.nodes[v].atoms);
        } else {
            stack.extend(bt.nodes[v].children.iter().rev());
        }
    }
    Ok(BasisSelection { direction, blocks, atoms, cost: best[bt.root] })
}

/// One selected atom and its coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub atom: usize,
    pub coefficient: f64,
}

#[derive(Clone, Debug)]
pub struct Pursuit {
    pub terms: Vec<Term>,
    /// `‖r_i‖₂` after `i` iterations; entry 0 is `‖f‖₂`.
    pub residual_norms: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Incremental orthonormal basis of the span of selected atoms, with the
/// triangular factor needed to recover coefficients.
struct Span {
    q: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
}

impl Span {
    fn new() -> Self {
        Self { q: Vec::new(), r: Vec::new() }
    }

    /// Adds `v`; returns false when it is numerically inside the span.
    fn push(&mut self, v: &[f64]) -> bool {
        let scale = norm(v);
        let mut w = v.to_vec();
        let mut col = vec![0.0; self.q.len() + 1];
        for _ in 0..2 {
            for (i, q) in self.q.iter().enumerate() {
                let h: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                col[i] += h;
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= h * y);
            }
        }
        let rest = norm(&w);
        if rest <= 1e-10 * scale {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= rest);
        col[self.q.len()] = rest;
        self.q.push(w);
        self.r.push(col);
        true
    }

    fn residual(&self, f: &[f64]) -> Vec<f64> {
        let mut r = f.to_vec();
        for q in &self.q {
            let h: f64 = q.iter().zip(f).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(x, y)| *x -= h * y);
        }
        r
    }

    /// Least-squares coefficients of `f` on the selected atoms.
    fn solve(&self, f: &[f64]) -> Vec<f64> {
        let m = self.q.len();
        let b: Vec<f64> = self.q.iter().map(|q| q.iter().zip(f).map(|(a, b)| a * b).sum()).collect();
        let mut x = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = ((i + 1)..m).map(|k| self.r[k][i] * x[k]).sum();
            x[i] = (b[i] - s) / self.r[i][i];
        }
        x
    }
}

fn argmax_abs(values: &[f64], allowed: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if allowed[i] && best.is_none_or(|b| v.abs() > values[b].abs()) {
            best = Some(i);
        }
    }
    best
}

/// Orthogonal matching pursuit. Stops after `m` atoms, once
/// `‖r‖₂ ≤ tol·‖f‖₂`, or when no remaining atom correlates with the residual.
/// The residual is recomputed from `f` and the full selected span every step.
pub fn omp(d: &Dictionary, f: &[f64], m: usize, tol: f64) -> Result<Pursuit> {
    check_len(d, f)?;
    if m > d.n {
        return invalid(format!("OMP term count {m} exceeds the stratum size {}", d.n));
    }
    let total = norm(f);
    let mut span = Span::new();
    let mut chosen: Vec<usize> = Vec::new();
    let mut allowed = vec![true; d.len()];
    let mut residual = f.to_vec();
    let mut residual_norms = vec![total];
    while chosen.len() < m && norm(&residual) > tol * total {
        let corr = d.coefficients(&residual);
        let Some(best) = argmax_abs(&corr, &allowed) else { break };
        if corr[best].abs() <= 1e-14 * total {
            break;
        }
        allowed[best] = false;
        if !span.push(&d.atom(best).dense(d.n)) {
            continue;
        }
        chosen.push(best);
        residual = span.residual(f);
        residual_norms.push(norm(&residual));
    }
    let x = span.solve(f);
    let terms = chosen.iter().zip(x).map(|(&atom, coefficient)| Term { atom, coefficient }).collect();
    Ok(Pursuit { terms, residual_norms, residual })
}

/// Matching pursuit: subtract the largest-coefficient atom's contribution
/// from the residual and re-analyze, `m` times. Atoms may repeat.
pub fn greedy_select(d: &Dictionary, f: &[f64], m: usize) -> Result<Pursuit> {
    check_len(d, f)?;
    let cap = d.n * (d.tree.j_max() + 1);
    if m > cap {
        return invalid(format!("greedy term count {m} exceeds n·(j_max+1) = {cap}"));
    }
    let mut residual = f.to_vec();
    let mut residual_norms = vec![norm(f)];
    let mut terms = Vec::with_capacity(m);
    let allowed = vec![true; d.len()];
    for _ in 0..m {
        let corr = d.coefficients(&residual);
        let Some(best) = argmax_abs(&corr, &allowed) else { break };
        let c = corr[best];
        d.atom(best).add_to(&mut residual, -c);
        terms.push(Term { atom: best, coefficient: c });
        residual_norms.push(norm(&residual));
    }
    Ok(Pursuit { terms, residual_norms, residual })
}

/// Simultaneous OMP: one atom set shared by all signals, chosen by the summed
/// absolute correlation with the residuals. Returns the atom ids.
pub fn somp(d: &Dictionary, signals: &[Vec<f64>], m: usize) -> Result<Vec<usize>> {
    for f in signals {
        check_len(d, f)?;
    }
    if m > d.n {
        return invalid(format!("SOMP term count {m} exceeds the stratum size {}", d.n));
    }
    let mut span = Span::new();
    let mut chosen = Vec::new();
    let mut allowed = vec![true; d.len()];
    let mut residuals: Vec<Vec<f64>> = signals.to_vec();
    while chosen.len() < m {
        let mut score = vec![0.0; d.len()];
        for c in par::map(&residuals, |r| d.coefficients(r)) {
            score.iter_mut().zip(c).for_each(|(s, x)| *s += x.abs());
        }
        let Some(best) = argmax_abs(&score, &allowed) else { break };
        if score[best] <= 1e-14 {
            break;
        }
        allowed[best] = false;
        if !span.push(&d.atom(best).dense(d.n)) {
            continue;
        }
        chosen.push(best);
        residuals = par::map(signals, |f| span.residual(f));
    }
    Ok(chosen)
}

/// Least-squares coefficients of `f` on the given atoms (which must be
/// linearly independent).
pub fn project(d: &Dictionary, atoms: &[usize], f: &[f64]) -> Result<Vec<f64>> {
    check_len(d, f)?;
    let mut span = Span::new();
    for &a in atoms {
        if !span.push(&d.atom(a).dense(d.n)) {
            return invalid(format!("atom {a} is linearly dependent on the others"));
        }
    }
    Ok(span.solve(f))
}

pub fn reconstruct(d: &Dictionary, terms: &[Term]) -> Vec<f64> {
    let mut out = vec![0.0; d.n];
    for t in terms {
        d.atom(t.atom).add_to(&mut out, t.coefficient);
    }
    out
}

/// Expansion of `f` in a selected basis, in selection order.
pub fn selection_terms(t: &CoefficientTable<'_>, s: &BasisSelection) -> Vec<Term> {
    s.atoms.iter().map(|&atom| Term { atom, coefficient: t.coefficients[atom] }).collect()
}

/// The atoms of one level as a basis.
pub fn level_atoms(d: &Dictionary, j: usize) -> Vec<&Atom> {
    d.level(j).map(|i| d.atom(i)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::close_under_faces;
    use crate::dictionary::ghwt;
    use crate::partition::build_tree;

    fn path_ghwt(n: usize) -> Dictionary {
        let c = close_under_faces(&(0..n - 1).map(|i| vec![i, i + 1]).collect::<Vec<_>>()).unwrap();
        ghwt(Arc::new(build_tree(&c, 0).unwrap())).unwrap()
    }

    #[test]
    fn cost_parsing() {
        assert_eq!("l1".parse::<CostSpec>().unwrap(), CostSpec::L1);
        assert_eq!("lp:1.5".parse::<CostSpec>().unwrap(), CostSpec::Lp(1.5));
        assert!("lp:3".parse::<CostSpec>().is_err());
        assert!("l2".parse::<CostSpec>().is_err());
        assert_eq!(CostSpec::Entropy.evaluate([1.0, 0.0], 1.0), 0.0);
    }

    #[test]
    fn single_atom_signal_selects_its_block() {
        let d = path_ghwt(8);
        for id in [0, 5, 13, 20] {
            let f = d.atom(id).dense(8);
            let t = analyze(&d, &f).unwrap();
            for dir in [Ordering::C2F, Ordering::F2C] {
                let s = best_basis(&t, CostSpec::L1, dir).unwrap();
                s.validate(&d).unwrap();
                assert!((s.cost - 1.0).abs() < 1e-12);
                assert!(s.atoms.iter().any(|&a| (t.coefficients[a].abs() - 1.0).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn omp_and_greedy_on_an_atom() {
        let d = path_ghwt(6);
        let f = d.atom(3).dense(6);
        let o = omp(&d, &f, 6, 1e-12).unwrap();
        assert_eq!(o.terms.len(), 1);
        assert_eq!(o.terms[0].atom, 3);
        let g = greedy_select(&d, &f, 1).unwrap();
        assert_eq!(g.terms[0].atom, 3);
        assert!(greedy_select(&d, &f, 0).unwrap().terms.is_empty());
    }
}
