//! Brute-force Delaunay complex: a d-simplex is kept iff no other point lies
//! strictly inside its circumsphere.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_PERTURBATIONS: u32 = 8;

/// Delaunay complex of `points` (d = 2 or 3). Vertex ids are input indices.
///
/// Cocircular / cospherical ties (normalized in-sphere value within the
/// geometric tolerance) are broken by re-running on a copy jittered with
/// seeded noise of magnitude `1e-9 * bbox`, growing tenfold per retry.
pub fn delaunay<T: Scalar>(points: &[Vec<T>], seed: u64) -> Result<SimplicialComplex> {
    let d = points.first().map(Vec::len).unwrap_or(0);
    if !(2..=3).contains(&d) {
        return Err(Error::Parameter(format!("Delaunay needs 2D or 3D points, got dimension {d}")));
    }
    if points.iter().any(|p| p.len() != d || p.iter().any(|c| !c.is_finite())) {
        return Err(Error::Parameter("points must share one dimension and be finite".into()));
    }
    if points.len() < d + 1 {
        return Err(Error::DegenerateInput(format!("{} points cannot span dimension {d}", points.len())));
    }
    let scale = bbox_diagonal(points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = points.to_vec();
    let mut magnitude = T::of(1e-9) * scale;
    for _ in 0..=MAX_PERTURBATIONS {
        match empty_sphere_simplices(&work, d) {
            Scan::Done(simplices) if simplices.is_empty() => {
                return Err(Error::DegenerateInput("all points are collinear or coplanar".into()));
            }
            Scan::Done(simplices) => return SimplicialComplex::build(&simplices),
            Scan::Tie => {
                work = points
                    .iter()
                    .map(|p| p.iter().map(|&c| c + magnitude * T::of(rng.gen_range(-1.0..1.0))).collect())
                    .collect();
                magnitude = magnitude * T::of(10.0);
            }
        }
    }
    Err(Error::DegenerateInput("could not break cospherical ties by perturbation".into()))
}

enum Scan {
    Done(Vec<Vec<usize>>),
    Tie,
}

fn bbox_diagonal<T: Scalar>(points: &[Vec<T>]) -> T {
    let d = points[0].len();
    let mut sum = T::zero();
    for c in 0..d {
        let lo = points.iter().map(|p| p[c]).fold(T::infinity(), T::min);
        let hi = points.iter().map(|p| p[c]).fold(T::neg_infinity(), T::max);
        sum = sum + (hi - lo) * (hi - lo);
    }
    let diag = sum.sqrt();
    if diag > T::zero() {
        diag
    } else {
        T::one()
    }
}

fn empty_sphere_simplices<T: Scalar>(points: &[Vec<T>], d: usize) -> Scan {
    let n = points.len();
    let tol = T::geom_tol();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..=d).collect();
    loop {
        if let Some((center, r2)) = circumsphere(points, &combo, d) {
            let base = &points[combo[0]];
            let mut empty = true;
            let mut tie = false;
            for (q, p) in points.iter().enumerate() {
                if combo.contains(&q) {
                    continue;
                }
                let dist2: T = (0..d)
                    .map(|c| {
                        let x = p[c] - base[c] - center[c];
                        x * x
                    })
                    .sum();
                let s = (dist2 - r2) / r2;
                if s < -tol {
                    empty = false;
                    break;
                }
                if s <= tol {
                    tie = true;
                }
            }
            if empty {
                if tie {
                    return Scan::Tie;
                }
                out.push(combo.clone());
            }
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    Scan::Done(out)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Circumcenter relative to the first vertex and squared radius; `None` for
/// (nearly) flat simplices.
fn circumsphere<T: Scalar>(points: &[Vec<T>], combo: &[usize], d: usize) -> Option<(Vec<T>, T)> {
    let base = &points[combo[0]];
    let mut m = vec![vec![T::zero(); d + 1]; d];
    let mut edge_len = T::one();
    for (r, &idx) in combo[1..].iter().enumerate() {
        let mut sq = T::zero();
        for c in 0..d {
            let e = points[idx][c] - base[c];
            m[r][c] = e;
            sq = sq + e * e;
        }
        m[r][d] = sq / T::of(2.0);
        edge_len = edge_len * sq.sqrt();
    }
    let det = determinant(&m, d);
    if edge_len == T::zero() || (det / edge_len).abs() < T::of(1e-10) {
        return None;
    }
    let center = solve(m, d)?;
    let r2 = center.iter().map(|&c| c * c).sum();
    Some((center, r2))
}

fn determinant<T: Scalar>(m: &[Vec<T>], d: usize) -> T {
    match d {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Gaussian elimination with partial pivoting on an augmented `d x (d+1)` system.
fn solve<T: Scalar>(mut m: Vec<Vec<T>>, d: usize) -> Option<Vec<T>> {
    for col in 0..d {
        let piv = (col..d).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[piv][col] == T::zero() {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..d {
            let f = m[r][col] / m[col][col];
            for c in col..=d {
                let v = m[col][c];
                m[r][c] = m[r][c] - f * v;
            }
        }
    }
    let mut x = vec![T::zero(); d];
    for r in (0..d).rev() {
        let mut acc = m[r][d];
        for c in r + 1..d {
            acc = acc - m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}
