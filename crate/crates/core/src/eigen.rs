//! Dense symmetric eigensolver wrapper with a deterministic output contract.
//!
//! Eigenpairs come back in ascending eigenvalue order. Every eigenvector is
//! sign-normalized so its largest-magnitude entry (lowest index on ties) is
//! positive; exactly equal eigenvalues are ordered by comparing their
//! normalized eigenvectors lexicographically.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Eigendecomposition of the symmetric part of `m`.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<Spectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension { expected: n, got: m.ncols() });
    }
    if n == 0 {
        return Ok(Spectrum { values: Vec::new(), vectors: DMatrix::zeros(0, 0) });
    }
    if n == 1 {
        return Ok(Spectrum { values: vec![m[(0, 0)]], vectors: DMatrix::from_element(1, 1, 1.0) });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or_else(|| Error::Eigen {
        region: format!("{n}x{n}"),
        reason: "implicit QR did not converge".into(),
    })?;
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            normalize_sign(&mut v);
            (eig.eigenvalues[i], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok(Spectrum { values, vectors })
}

/// `max_i ‖M v_i − λ_i v_i‖₂ / ‖M‖_F`.
pub fn relative_residual(m: &DMatrix<f64>, s: &Spectrum) -> f64 {
    let fro = m.norm().max(f64::MIN_POSITIVE);
    let mv = m * &s.vectors;
    (0..s.len())
        .map(|i| (mv.column(i) - s.vectors.column(i) * s.values[i]).norm())
        .fold(0.0, f64::max)
        / fro
}
