//! Row-compressed sparse matrices, just enough for operator assembly.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new(), data: Vec::new() }
    }

    /// Duplicates are summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < rows && c < cols);
            if rows_of.last() == Some(&r) && indices.last() == Some(&c) {
                *data.last_mut().unwrap() += v;
            } else {
                rows_of.push(r);
                indices.push(c);
                data.push(v);
            }
        }
        let mut keep_i = Vec::with_capacity(indices.len());
        let mut keep_d = Vec::with_capacity(data.len());
        for ((r, c), v) in rows_of.into_iter().zip(indices).zip(data) {
            if v != 0.0 {
                indptr[r + 1] += 1;
                keep_i.push(c);
                keep_d.push(v);
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self { rows, cols, indptr, indices: keep_i, data: keep_d }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// `(column, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(p) => self.data[span.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.cols, self.rows, t)
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, got: other.rows });
        }
        let mut t = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Ok(Self::from_triplets(self.rows, other.cols, t))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// `diag(left) * self * diag(right)`.
    pub fn scaled(&self, left: &[f64], right: &[f64]) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for p in out.indptr[r]..out.indptr[r + 1] {
                out.data[p] *= left[r] * right[out.indices[p]];
            }
        }
        out
    }

    /// `diag(self) - self`, i.e. the negated off-diagonal part.
    pub fn negated_off_diagonal(&self) -> Self {
        let t = self.triplets().into_iter().filter(|&(r, c, _)| r != c).map(|(r, c, v)| (r, c, -v)).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        let mut t = self.triplets();
        t.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, -v)));
        Self::from_triplets(self.rows, self.cols, t).data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_abs_diff(&self.transpose()) <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Coordinate text, one `row col value` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {v:e}");
        }
        s
    }

    pub fn to_dense_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            let mut row = vec![0.0; self.cols];
            for (c, v) in self.row(r) {
                row[c] = v;
            }
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}
