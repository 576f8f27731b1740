//! From raw `(position, velocity)` samples to a Delaunay complex carrying a
//! vector on every simplex.

mod delaunay;
mod kmeans;

pub use delaunay::delaunay;
pub use kmeans::{kmeans, kmeans_detailed, KMeansResult};

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar};

/// One data point: a position in state space and the observed velocity there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSample<T> {
    #[serde(rename = "x")]
    pub position: Vec<T>,
    #[serde(rename = "v")]
    pub velocity: Vec<T>,
}

impl<T: Scalar> VectorSample<T> {
    pub fn new(position: Vec<T>, velocity: Vec<T>) -> Result<Self> {
        let s = VectorSample { position, velocity };
        s.check()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }

    fn check(&self) -> Result<()> {
        let d = self.position.len();
        if d != self.velocity.len() {
            return Err(Error::Parameter(format!(
                "position has {} coordinates but velocity has {}",
                d,
                self.velocity.len()
            )));
        }
        if !(2..=3).contains(&d) {
            return Err(Error::Parameter(format!("unsupported dimension {d}, expected 2 or 3")));
        }
        if self.position.iter().chain(&self.velocity).any(|c| !c.is_finite()) {
            return Err(Error::Parameter("non-finite coordinate".into()));
        }
        Ok(())
    }
}

/// Checks that every sample is well formed and all share one dimension.
pub fn check_samples<T: Scalar>(samples: &[VectorSample<T>]) -> Result<usize> {
    let d = samples.first().map(VectorSample::dim).unwrap_or(0);
    for s in samples {
        s.check()?;
        if s.dim() != d {
            return Err(Error::Parameter("samples have mixed dimensions".into()));
        }
    }
    Ok(d)
}

/// Vector `V(sigma)` and barycenter `b(sigma)` for every simplex of a complex,
/// indexed by [`SimplexId`].
#[derive(Clone, Debug, PartialEq)]
pub struct VectorAssignment<T> {
    dim: usize,
    vectors: Vec<Vec<T>>,
    barycenters: Vec<Vec<T>>,
}

impl<T: Scalar> VectorAssignment<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, id: SimplexId) -> &[T] {
        &self.vectors[id.0]
    }

    pub fn barycenter(&self, id: SimplexId) -> &[T] {
        &self.barycenters[id.0]
    }

    /// `V(sigma)` counts as zero below the shared zero-vector threshold.
    pub fn is_zero(&self, id: SimplexId) -> bool {
        norm(self.vector(id)) < T::zero_vec_tol()
    }
}

/// Averages vertex data over every simplex: `V(sigma)` is the mean of the
/// vertex vectors and `b(sigma)` the mean of the vertex positions.
///
/// `positions[v]` and `vectors[v]` belong to vertex id `v`.
pub fn assign_vectors<T: Scalar>(
    complex: &SimplicialComplex,
    positions: &[Vec<T>],
    vectors: &[Vec<T>],
) -> Result<VectorAssignment<T>> {
    let mut dim = None;
    for v in complex.vertex_ids() {
        let (p, w) = match (positions.get(v), vectors.get(v)) {
            (Some(p), Some(w)) if !p.is_empty() && !w.is_empty() => (p, w),
            _ => return Err(Error::Assignment(format!("vertex {v} has no position or vector"))),
        };
        if p.len() != w.len() || dim.is_some_and(|d| d != p.len()) {
            return Err(Error::Assignment(format!("vertex {v} has inconsistent dimensions")));
        }
        dim = Some(p.len());
    }
    let dim = dim.unwrap_or(0);
    let mean = |rows: &[Vec<T>], verts: &[usize]| -> Vec<T> {
        let n = T::of(verts.len() as f64);
        (0..dim).map(|c| verts.iter().map(|&v| rows[v][c]).sum::<T>() / n).collect()
    };
    let mut out = VectorAssignment {
        dim,
        vectors: Vec::with_capacity(complex.len()),
        barycenters: Vec::with_capacity(complex.len()),
    };
    for id in complex.ids() {
        let verts = complex.vertices(id);
        out.vectors.push(mean(vectors, verts));
        out.barycenters.push(mean(positions, verts));
    }
    Ok(out)
}

/// `W(sigma, tau) = b(tau) - b(sigma)`.
pub fn w_map<T: Scalar>(assignment: &VectorAssignment<T>, sigma: SimplexId, tau: SimplexId) -> Result<Vec<T>> {
    if sigma == tau {
        return Err(Error::Domain(format!("W is undefined for sigma = tau = {sigma:?}")));
    }
    let (bs, bt) = (assignment.barycenter(sigma), assignment.barycenter(tau));
    Ok(bt.iter().zip(bs).map(|(&t, &s)| t - s).collect())
}

/// Reads a dataset as CSV (`x1..xd,v1..vd`, optional header) or as JSON
/// (`[{"x": [...], "v": [...]}, ...]`), picking the format from the first
/// non-blank character.
pub fn parse_dataset<T: Scalar>(text: &str) -> Result<Vec<VectorSample<T>>> {
    let trimmed = text.trim_start();
    let samples: Vec<VectorSample<T>> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?
    } else {
        parse_csv(text)?
    };
    check_samples(&samples)?;
    Ok(samples)
}

fn parse_csv<T: Scalar>(text: &str) -> Result<Vec<VectorSample<T>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            // a header row is allowed before any data
            Err(_) if out.is_empty() => continue,
            Err(e) => return Err(Error::Parse { line: lineno + 1, msg: e.to_string() }),
        };
        if values.len() % 2 != 0 {
            return Err(Error::Parse { line: lineno + 1, msg: format!("expected 2d columns, found {}", values.len()) });
        }
        let d = values.len() / 2;
        let conv: Vec<T> = values.into_iter().map(T::of).collect();
        out.push(VectorSample { position: conv[..d].to_vec(), velocity: conv[d..].to_vec() });
    }
    Ok(out)
}

/// CSV with a `x1..xd,v1..vd` header. Values use the shortest round-trip
/// representation.
pub fn write_dataset_csv<T: Scalar>(samples: &[VectorSample<T>]) -> String {
    let d = samples.first().map(VectorSample::dim).unwrap_or(2);
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.extend((1..=d).map(|i| format!("v{i}")));
    let mut out = header.join(",");
    out.push('\n');
    for s in samples {
        let row: Vec<String> = s.position.iter().chain(&s.velocity).map(|c| format!("{c}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use approx::assert_relative_eq;

    #[test]
    fn edge_vector_is_mean() {
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let pos = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let vec = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let a = assign_vectors(&k, &pos, &vec).unwrap();
        let e = k.id_of(&[0, 1]).unwrap();
        assert_eq!(a.vector(e), &[0.5, 0.5]);
        assert_eq!(a.barycenter(e), &[0.5, 0.0]);
        assert_eq!(a.vector(k.id_of(&[1]).unwrap()), &[0.0, 1.0]);
    }

    #[test]
    fn cancelling_triangle_is_zero() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let pos = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let vec = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 0.0]];
        let a = assign_vectors(&k, &pos, &vec).unwrap();
        let t = k.id_of(&[0, 1, 2]).unwrap();
        assert_eq!(a.vector(t), &[0.0, 0.0]);
        assert!(a.is_zero(t));
    }

    #[test]
    fn missing_vertex_vector() {
        let k = build_complex(&[vec![0, 3]]).unwrap();
        let pos = vec![vec![0.0, 0.0]];
        let vec = vec![vec![1.0, 0.0]];
        assert!(matches!(assign_vectors(&k, &pos, &vec), Err(Error::Assignment(_))));
    }

    #[test]
    fn w_map_examples() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let pos = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let a = assign_vectors(&k, &pos, &pos).unwrap();
        let v0 = k.id_of(&[0]).unwrap();
        let e = k.id_of(&[0, 1]).unwrap();
        let t = k.id_of(&[0, 1, 2]).unwrap();
        assert_eq!(w_map(&a, v0, e).unwrap(), vec![0.5, 0.0]);
        let w = w_map(&a, e, t).unwrap();
        assert_relative_eq!(w[0], -1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 1.0 / 3.0, epsilon = 1e-15);
        let back = w_map(&a, t, e).unwrap();
        assert_eq!(back, w.iter().map(|x| -x).collect::<Vec<_>>());
        assert!(matches!(w_map(&a, e, e), Err(Error::Domain(_))));
    }

    #[test]
    fn dataset_formats() {
        let csv = "x1,x2,v1,v2\n0,1,0.5,-1\n2,3,1,1\n";
        let s: Vec<VectorSample<f64>> = parse_dataset(csv).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].velocity, vec![0.5, -1.0]);
        let back: Vec<VectorSample<f64>> = parse_dataset(&write_dataset_csv(&s)).unwrap();
        assert_eq!(back, s);
        let json = r#"[{"x":[0,0,1],"v":[1,2,3]}]"#;
        let s: Vec<VectorSample<f64>> = parse_dataset(json).unwrap();
        assert_eq!(s[0].dim(), 3);
        assert!(parse_dataset::<f64>("1,2,3\n").is_err());
    }
}
