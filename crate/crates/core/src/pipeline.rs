//! End-to-end approximation runs: one tree, the three dictionaries, and an
//! error curve per basis or selection method.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::analysis::{nla_curve, pursuit_curve, ErrorCurve};
use crate::complex::SimplicialComplex;
use crate::dictionary::{extract_walsh, ghwt, haar_basis, hglet_cached, Atom, Dictionary, DictionaryKind, Ordering};
use crate::error::{Error, Result};
use crate::hodge::Variant;
use crate::partition::{build_tree_cached, BipartitionTree, SpectrumCache};
use crate::selection::{analyze, best_basis, greedy_select, CostSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Delta,
    Fourier,
    Haar,
    Walsh,
    HgletBestBasis,
    GhwtC2F,
    GhwtF2C,
    Greedy,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Delta,
        Method::Fourier,
        Method::Haar,
        Method::Walsh,
        Method::HgletBestBasis,
        Method::GhwtC2F,
        Method::GhwtF2C,
        Method::Greedy,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Delta => "delta",
            Method::Fourier => "fourier",
            Method::Haar => "haar",
            Method::Walsh => "walsh",
            Method::HgletBestBasis => "hglet-bb",
            Method::GhwtC2F => "ghwt-c2f",
            Method::GhwtF2C => "ghwt-f2c",
            Method::Greedy => "greedy",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method {s:?}")))
    }
}

/// Tree and dictionaries of one stratum.
pub struct Transforms {
    pub tree: Arc<BipartitionTree>,
    pub haar: Dictionary,
    pub hglet: Dictionary,
    pub ghwt: Dictionary,
}

impl Transforms {
    /// Builds the tree and all dictionaries, sharing local spectra between
    /// the tree and the HGLET.
    pub fn build(c: &SimplicialComplex, kappa: usize) -> Result<Self> {
        let cache = SpectrumCache::new();
        let tree = Arc::new(build_tree_cached(c, kappa, Some(&cache))?);
        let hglet = hglet_cached(tree.clone(), c, Variant::Sym, Some(&cache))?;
        Ok(Self { haar: haar_basis(tree.clone())?, ghwt: ghwt(tree.clone())?, hglet, tree })
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// The global eigenbasis (HGLET level 0) as a one-level dictionary.
    pub fn fourier(&self) -> Result<Dictionary> {
        let atoms = self.hglet.level(0).map(|i| self.hglet.atom(i).clone()).collect();
        Dictionary::from_parts(DictionaryKind::Hglet, Ordering::C2F, self.tree.clone(), atoms)
    }

    /// Dictionaries compared by the clustering experiment, by name.
    pub fn kscore_dictionaries(&self) -> Result<Vec<(&'static str, Dictionary)>> {
        Ok(vec![
            ("fourier", self.fourier()?),
            ("haar", self.haar.clone()),
            ("hglet", self.hglet.clone()),
            ("ghwt", self.ghwt.clone()),
        ])
    }

    /// Error curve of `method` for signal `f`. Greedy runs `n` pursuit steps
    /// over the GHWT dictionary.
    pub fn curve(&self, method: Method, f: &[f64], cost: CostSpec) -> Result<ErrorCurve> {
        let name = method.to_string();
        let level = |d: &Dictionary, j: usize| -> Vec<Atom> { d.level(j).map(|i| d.atom(i).clone()).collect() };
        let selected = |d: &Dictionary, dir: Ordering| -> Result<Vec<Atom>> {
            let t = analyze(d, f)?;
            let s = best_basis(&t, cost, dir)?;
            Ok(s.atoms.iter().map(|&i| d.atom(i).clone()).collect())
        };
        let basis: Vec<Atom> = match method {
            Method::Delta => level(&self.ghwt, self.tree.j_max()),
            Method::Fourier => level(&self.hglet, 0),
            Method::Haar => self.haar.atoms().to_vec(),
            Method::Walsh => extract_walsh(&self.ghwt)?,
            Method::HgletBestBasis => selected(&self.hglet, Ordering::C2F)?,
            Method::GhwtC2F => selected(&self.ghwt, Ordering::C2F)?,
            Method::GhwtF2C => selected(&self.ghwt, Ordering::F2C)?,
            Method::Greedy => {
                let p = greedy_select(&self.ghwt, f, self.n())?;
                return Ok(pursuit_curve(&name, &p.residual_norms));
            }
        };
        let refs: Vec<&Atom> = basis.iter().collect();
        Ok(nla_curve(&name, &refs, f))
    }
}
