#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mvfield::geometry::{assign_vectors, delaunay};
use mvfield::{build_complex, IlpInstance, SimplicialComplex, VectorAssignment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Delaunay complex on `n` uniform points with random unit-ish vectors.
pub fn random_delaunay(seed: u64, n: usize, dim: usize) -> (SimplicialComplex, VectorAssignment) {
    let mut r = rng(seed);
    let pts = random_points(&mut r, n, dim);
    let vecs = random_points(&mut r, n, dim);
    let k = delaunay(&pts, seed).expect("generic points triangulate");
    let a = assign_vectors(&k, &pts, &vecs).expect("every vertex has data");
    (k, a)
}

/// Random abstract complex of mixed dimension on `n_vertices` vertices.
pub fn random_abstract(seed: u64, n_vertices: usize, n_maximal: usize, max_size: usize) -> SimplicialComplex {
    let mut r = rng(seed);
    let mut raw = Vec::new();
    for _ in 0..n_maximal {
        let size = r.gen_range(1..=max_size.min(n_vertices));
        let mut s: Vec<usize> = Vec::new();
        while s.len() < size {
            let v = r.gen_range(0..n_vertices);
            if !s.contains(&v) {
                s.push(v);
            }
        }
        raw.push(s);
    }
    build_complex(&raw).expect("non-empty vertex lists")
}

/// Minimum over every feasible 0/1 vector; `None` when infeasible.
pub fn brute_force(inst: &IlpInstance) -> Option<(f64, Vec<f64>)> {
    let n = inst.n_vars();
    assert!(n <= 20, "brute force over {n} variables");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << n) {
        let z: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        if inst.is_feasible(&z) {
            let obj = inst.objective(&z);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, z));
            }
        }
    }
    best
}
