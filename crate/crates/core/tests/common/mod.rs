#![allow(dead_code)]

use std::collections::BTreeSet;

use hodgetree::{close_under_faces, SimplicialComplex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two triangles sharing an edge.
pub fn fig1() -> SimplicialComplex {
    close_under_faces(&[vec![1, 2, 3], vec![2, 3, 4]]).unwrap()
}

/// Trapezoid of the triangular lattice with rows of 9, 7 and 5 triangles.
pub fn lattice21() -> SimplicialComplex {
    let width = [6usize, 5, 4, 3];
    let mut id = Vec::new();
    let mut next = 0;
    for &w in &width {
        id.push((next..next + w).collect::<Vec<_>>());
        next += w;
    }
    let mut tris = Vec::new();
    for r in 0..3 {
        for i in 0..width[r] - 1 {
            tris.push(vec![id[r][i], id[r][i + 1], id[r + 1][i]]);
        }
        for i in 0..width[r + 1] - 1 {
            tris.push(vec![id[r + 1][i], id[r + 1][i + 1], id[r][i + 1]]);
        }
    }
    close_under_faces(&tris).unwrap()
}

/// Face closure of random vertex sets of size `2..=dim+1` on `vertices`
/// vertices, with random orientations above the vertex stratum and random
/// weights on the top stratum.
pub fn random_complex(seed: u64, vertices: usize, sets: usize, dim: usize) -> SimplicialComplex {
    let mut r = rng(seed);
    let mut chosen = BTreeSet::new();
    for _ in 0..sets {
        let size = r.random_range(2..=dim + 1).min(vertices);
        let mut all: Vec<usize> = (0..vertices).collect();
        all.shuffle(&mut r);
        let mut s = all[..size].to_vec();
        s.sort_unstable();
        chosen.insert(s);
    }
    let mut c = close_under_faces(&chosen.into_iter().collect::<Vec<_>>()).unwrap();
    for k in 1..=c.kappa_max() {
        let p: Vec<i8> = (0..c.len(k)).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect();
        c = c.reoriented(k, &p).unwrap();
    }
    let top = c.kappa_max();
    let w: Vec<f64> = (0..c.len(top)).map(|_| r.random_range(0.5..2.0)).collect();
    c.with_weights(top, &w).unwrap()
}

/// Graph on `vertices` vertices with exactly `edges` random edges and every
/// triangle of the graph filled in.
pub fn random_flag_complex(seed: u64, vertices: usize, edges: usize) -> SimplicialComplex {
    let mut r = rng(seed);
    let mut all: Vec<(usize, usize)> = (0..vertices).flat_map(|a| (a + 1..vertices).map(move |b| (a, b))).collect();
    all.shuffle(&mut r);
    let chosen: BTreeSet<(usize, usize)> = all[..edges].iter().copied().collect();
    let mut sets: Vec<Vec<usize>> = chosen.iter().map(|&(a, b)| vec![a, b]).collect();
    for &(a, b) in &chosen {
        for c in b + 1..vertices {
            if chosen.contains(&(a, c)) && chosen.contains(&(b, c)) {
                sets.push(vec![a, b, c]);
            }
        }
    }
    close_under_faces(&sets).unwrap()
}

pub fn random_signal(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

pub fn random_orientation(r: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(a).max(f64::MIN_POSITIVE)
}
