//! File formats: complexes (JSON or edge list), signals, trees,
//! dictionaries, selections, coefficient tables and result CSVs.
//!
//! Vertex lists in files are the user's vertex labels. Trees and
//! dictionaries carry the κ-simplex vertex lists they were built on, so a
//! signal can be matched to them without the complex.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{ErrorCurve, KScoreRow};
use crate::citation::CoauthorRecord;
use crate::complex::{SimplexSpec, SimplicialComplex};
use crate::dictionary::{Atom, Dictionary, DictionaryKind, Ordering};
use crate::error::{Error, Result};
use crate::partition::{BipartitionTree, Region};
use crate::selection::{BasisSelection, CoefficientTable, Pursuit};

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), message: message.into() }
}

fn json_error(path: &Path, e: serde_json::Error) -> Error {
    parse_error(path, format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_error(path, e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| json_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn default_orientation() -> i8 {
    1
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexEntry {
    pub v: Vec<usize>,
    #[serde(default = "default_orientation")]
    pub p: i8,
    #[serde(default = "default_weight")]
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    pub simplices: Vec<SimplexEntry>,
}

impl ComplexFile {
    pub fn build(&self) -> Result<SimplicialComplex> {
        let specs: Vec<SimplexSpec> = self
            .simplices
            .iter()
            .map(|s| SimplexSpec { vertices: s.v.clone(), orientation: s.p, weight: s.w })
            .collect();
        SimplicialComplex::from_specs(self.vertices, &specs)
    }

    /// Every stored simplex, vertices included, so that isolated vertices,
    /// orientations and weights survive a round trip.
    pub fn from_complex(c: &SimplicialComplex) -> Self {
        let contiguous = c.labels().iter().enumerate().all(|(i, &l)| i == l);
        let simplices = (0..=c.kappa_max())
            .flat_map(|k| {
                (0..c.len(k)).map(move |i| {
                    let s = c.simplex(k, i);
                    SimplexEntry { v: c.simplex_labels(k, i), p: s.orientation(), w: s.weight() }
                })
            })
            .collect();
        Self { vertices: contiguous.then_some(c.vertex_count()), simplices }
    }
}

/// `u v [w]` per line; blank lines and `#` comments are skipped.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<SimplicialComplex> {
    let mut specs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| parse_error(path, format!("line {}: {msg}", no + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(at(format!("expected `u v [w]`, got {line:?}")));
        }
        let vertex = |s: &str| s.parse::<usize>().map_err(|_| at(format!("bad vertex {s:?}")));
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| at(format!("bad weight {s:?}")))?,
            None => 1.0,
        };
        if u == v {
            return Err(at(format!("self-loop on vertex {u}")));
        }
        specs.push(SimplexSpec { vertices: vec![u, v], orientation: 1, weight: w });
    }
    SimplicialComplex::from_specs(None, &specs).map_err(|e| parse_error(path, e.to_string()))
}

/// Reads a complex; `.json` files (or text starting with `{`) use the JSON
/// format, anything else the edge list.
pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    let text = read_text(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        let file: ComplexFile = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
        file.build().map_err(|e| parse_error(path, e.to_string()))
    } else {
        parse_edge_list(path, &text)
    }
}

pub fn write_complex(path: &Path, c: &SimplicialComplex) -> Result<()> {
    write_json(path, &ComplexFile::from_complex(c))
}

pub fn read_records(path: &Path) -> Result<Vec<CoauthorRecord>> {
    read_json(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalEntry {
    pub v: Vec<usize>,
    pub x: f64,
}

/// One real value per κ-simplex, keyed by vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    pub kappa: usize,
    pub values: Vec<SignalEntry>,
}

/// κ-simplex vertex lists in stratum order.
pub fn stratum_keys(c: &SimplicialComplex, kappa: usize) -> Vec<Vec<usize>> {
    (0..c.len(kappa)).map(|i| c.simplex_labels(kappa, i)).collect()
}

fn key_index(keys: &[Vec<usize>]) -> std::collections::HashMap<Vec<usize>, usize> {
    keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()
}

impl SignalFile {
    pub fn new(keys: &[Vec<usize>], kappa: usize, f: &[f64]) -> Self {
        let values = keys.iter().zip(f).map(|(v, &x)| SignalEntry { v: v.clone(), x }).collect();
        Self { kappa, values }
    }

    /// Orders the values by `keys`; every key must appear exactly once.
    pub fn resolve(&self, keys: &[Vec<usize>]) -> Result<Vec<f64>> {
        let index = key_index(keys);
        let mut out = vec![f64::NAN; keys.len()];
        let mut seen = vec![false; keys.len()];
        for e in &self.values {
            let mut v = e.v.clone();
            v.sort_unstable();
            let i = *index
                .get(&v)
                .ok_or_else(|| Error::Invalid(format!("signal key {:?} is not a {}-simplex", e.v, self.kappa)))?;
            if seen[i] {
                return Err(Error::Invalid(format!("signal key {:?} given twice", e.v)));
            }
            seen[i] = true;
            out[i] = e.x;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("signal has no value for {:?}", keys[i])));
        }
        Ok(out)
    }
}

pub fn read_signal(path: &Path, keys: &[Vec<usize>], kappa: usize) -> Result<Vec<f64>> {
    let file: SignalFile = read_json(path)?;
    if file.kappa != kappa {
        return Err(parse_error(path, format!("signal is on {}-simplices, expected {kappa}", file.kappa)));
    }
    file.resolve(keys).map_err(|e| parse_error(path, e.to_string()))
}

/// Several signals on one stratum, sharing a key list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSetFile {
    pub kappa: usize,
    pub simplices: Vec<Vec<usize>>,
    pub signals: Vec<Vec<f64>>,
}

pub fn read_signal_set(path: &Path, keys: &[Vec<usize>], kappa: usize) -> Result<Vec<Vec<f64>>> {
    let file: SignalSetFile = read_json(path)?;
    if file.kappa != kappa {
        return Err(parse_error(path, format!("signals are on {}-simplices, expected {kappa}", file.kappa)));
    }
    let index = key_index(keys);
    let mut perm = Vec::with_capacity(file.simplices.len());
    for v in &file.simplices {
        let mut s = v.clone();
        s.sort_unstable();
        perm.push(*index.get(&s).ok_or_else(|| parse_error(path, format!("key {v:?} is not a {kappa}-simplex")))?);
    }
    let mut check = perm.clone();
    check.sort_unstable();
    if check != (0..keys.len()).collect::<Vec<_>>() {
        return Err(parse_error(path, "simplex list must name every simplex exactly once"));
    }
    file.signals
        .iter()
        .enumerate()
        .map(|(s, values)| {
            if values.len() != keys.len() {
                return Err(parse_error(path, format!("signal {s} has {} values, expected {}", values.len(), keys.len())));
            }
            let mut out = vec![0.0; keys.len()];
            for (&i, &x) in perm.iter().zip(values) {
                out[i] = x;
            }
            Ok(out)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub j: usize,
    pub k: usize,
    pub members: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub kappa: usize,
    pub n: usize,
    /// Vertex lists of the κ-simplices, by index.
    pub simplices: Vec<Vec<usize>>,
    pub nodes: Vec<TreeNode>,
}

impl TreeFile {
    pub fn from_tree(t: &BipartitionTree, keys: &[Vec<usize>]) -> Self {
        let nodes = t
            .levels()
            .iter()
            .enumerate()
            .flat_map(|(j, level)| {
                level.iter().enumerate().map(move |(k, r)| TreeNode {
                    j,
                    k,
                    members: r.members.clone(),
                    parent: r.parent,
                    children: r.children.clone(),
                })
            })
            .collect();
        Self { kappa: t.kappa, n: t.n(), simplices: keys.to_vec(), nodes }
    }

    pub fn build(&self) -> Result<BipartitionTree> {
        let depth = self.nodes.iter().map(|n| n.j).max().map_or(0, |d| d + 1);
        let mut levels: Vec<Vec<Option<Region>>> = vec![Vec::new(); depth];
        for node in &self.nodes {
            let level = &mut levels[node.j];
            if level.len() <= node.k {
                level.resize(node.k + 1, None);
            }
            if level[node.k].is_some() {
                return Err(Error::Invalid(format!("tree node ({},{}) given twice", node.j, node.k)));
            }
            level[node.k] =
                Some(Region { members: node.members.clone(), parent: node.parent, children: node.children.clone() });
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(j, level)| {
                level
                    .into_iter()
                    .enumerate()
                    .map(|(k, r)| r.ok_or_else(|| Error::Invalid(format!("tree node ({j},{k}) missing"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let t = BipartitionTree::from_levels(self.kappa, levels)?;
        if t.n() != self.n || self.simplices.len() != self.n {
            return Err(Error::Invalid(format!("tree declares n = {} but holds {} simplices", self.n, t.n())));
        }
        Ok(t)
    }
}

pub fn read_tree(path: &Path) -> Result<(BipartitionTree, Vec<Vec<usize>>)> {
    let file: TreeFile = read_json(path)?;
    let t = file.build().map_err(|e| parse_error(path, e.to_string()))?;
    Ok((t, file.simplices))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionaryFile {
    pub kind: String,
    pub ordering: String,
    pub tree: TreeFile,
    pub atoms: Vec<AtomEntry>,
}

impl DictionaryFile {
    pub fn from_dictionary(d: &Dictionary, keys: &[Vec<usize>]) -> Self {
        Self {
            kind: d.kind.to_string(),
            ordering: d.ordering.to_string(),
            tree: TreeFile::from_tree(&d.tree, keys),
            atoms: d
                .atoms()
                .iter()
                .map(|a| AtomEntry { j: a.j, k: a.k, l: a.l, support: a.support.to_vec(), values: a.values.clone() })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Dictionary> {
        let kind: DictionaryKind = self.kind.parse()?;
        let ordering: Ordering = self.ordering.parse()?;
        let tree = Arc::new(self.tree.build()?);
        let mut shared: std::collections::HashMap<Vec<usize>, Arc<Vec<usize>>> = Default::default();
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let support = shared.entry(a.support.clone()).or_insert_with(|| Arc::new(a.support.clone())).clone();
                Atom { j: a.j, k: a.k, l: a.l, support, values: a.values.clone() }
            })
            .collect();
        Dictionary::from_parts(kind, ordering, tree, atoms)
    }
}

pub fn read_dictionary(path: &Path) -> Result<(Dictionary, Vec<Vec<usize>>)> {
    let file: DictionaryFile = read_json(path)?;
    let d = file.build().map_err(|e| parse_error(path, e.to_string()))?;
    Ok((d, file.tree.simplices))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub atom: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub coefficient: f64,
}

fn term_entry(d: &Dictionary, atom: usize, coefficient: f64) -> TermEntry {
    let a = d.atom(atom);
    TermEntry { atom, j: a.j, k: a.k, l: a.l, coefficient }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    pub kind: String,
    pub direction: String,
    pub cost_function: String,
    pub cost: f64,
    pub blocks: Vec<[usize; 2]>,
    pub atoms: Vec<TermEntry>,
}

impl SelectionFile {
    pub fn new(t: &CoefficientTable<'_>, s: &BasisSelection, cost_function: &str) -> Self {
        let d = t.dictionary;
        Self {
            kind: d.kind.to_string(),
            direction: s.direction.to_string(),
            cost_function: cost_function.to_string(),
            cost: s.cost,
            blocks: s.blocks.iter().map(|&(j, k)| [j, k]).collect(),
            atoms: s.atoms.iter().map(|&a| term_entry(d, a, t.coefficients[a])).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PursuitFile {
    pub method: String,
    pub kind: String,
    pub terms: Vec<TermEntry>,
    pub residual_norms: Vec<f64>,
}

impl PursuitFile {
    pub fn new(method: &str, d: &Dictionary, p: &Pursuit) -> Self {
        Self {
            method: method.to_string(),
            kind: d.kind.to_string(),
            terms: p.terms.iter().map(|t| term_entry(d, t.atom, t.coefficient)).collect(),
            residual_norms: p.residual_norms.clone(),
        }
    }
}

/// `atom,j,k,l,coefficient` for the given atom ids.
pub fn coefficients_csv(d: &Dictionary, atoms: impl IntoIterator<Item = (usize, f64)>) -> String {
    let mut s = String::from("atom,j,k,l,coefficient\n");
    for (id, c) in atoms {
        let a = d.atom(id);
        let _ = writeln!(s, "{id},{},{},{},{c:e}", a.j, a.k, a.l);
    }
    s
}

/// `m,rel_error,method` rows for each curve.
pub fn curves_csv(curves: &[ErrorCurve]) -> String {
    let mut s = String::from("m,rel_error,method\n");
    for c in curves {
        for (m, e) in c.errors.iter().enumerate() {
            let _ = writeln!(s, "{m},{e:e},{}", c.method);
        }
    }
    s
}

pub fn kscore_csv(rows: &[KScoreRow]) -> String {
    let mut s = String::from("clusters,features,method,score\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{:e}", r.clusters, r.features, r.method, r.score);
    }
    s
}
