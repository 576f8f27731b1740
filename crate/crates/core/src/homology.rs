//! Relative simplicial homology over GF(2).
//!
//! For a locally closed set `A` the pair `(cl A, mo A)` has a relative chain
//! complex whose basis is exactly the simplices of `A`, so
//! `beta_k = |A_k| - rank d_k - rank d_{k+1}` with the boundary maps
//! restricted to `A`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplexSet, SimplicialComplex};
use crate::error::{Error, Result};

/// Betti numbers by degree `0..=dim K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn degree(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Rank over GF(2) of a matrix given by columns of row indices.
fn gf2_rank(n_rows: usize, columns: &[Vec<usize>]) -> usize {
    let words = n_rows.div_ceil(64);
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for col in columns {
        let mut bits = vec![0u64; words];
        for &r in col {
            bits[r / 64] ^= 1 << (r % 64);
        }
        while let Some(low) = highest_bit(&bits) {
            match pivots.get(&low) {
                Some(p) => bits.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                None => {
                    pivots.insert(low, bits);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// `H(cl A, mo A; GF(2))`. Fails with the convexity witness when `A` is not
/// locally closed.
pub fn relative_homology(k: &SimplicialComplex, a: &SimplexSet) -> Result<BettiVector> {
    if let Some((x, y, z)) = k.convexity_witness(a) {
        return Err(Error::NotConvex { x, y, z });
    }
    let top = k.dim();
    let mut by_dim: Vec<Vec<SimplexId>> = vec![Vec::new(); top + 1];
    for &s in a {
        by_dim[k.dim_of(s)].push(s);
    }
    let local: HashMap<SimplexId, usize> =
        by_dim.iter().flat_map(|layer| layer.iter().enumerate().map(|(i, &s)| (s, i))).collect();
    // rank of d_q : C_q -> C_{q-1}, for q = 1..=top
    let mut ranks = vec![0usize; top + 2];
    for q in 1..=top {
        let cols: Vec<Vec<usize>> = by_dim[q]
            .iter()
            .map(|&s| k.facets(s).iter().filter(|f| a.contains(f)).map(|f| local[f]).collect())
            .collect();
        ranks[q] = gf2_rank(by_dim[q - 1].len(), &cols);
    }
    let betti = (0..=top).map(|q| by_dim[q].len() - ranks[q] - ranks[q + 1]).collect();
    Ok(BettiVector(betti))
}

/// A multivector is critical when its relative homology is non-trivial.
pub fn is_critical(k: &SimplicialComplex, v: &SimplexSet) -> Result<bool> {
    Ok(!relative_homology(k, v)?.is_trivial())
}

/// Homological Conley index of an isolated invariant set given as a union of
/// multivectors.
pub fn conley_index(k: &SimplicialComplex, s: &SimplexSet) -> Result<BettiVector> {
    relative_homology(k, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Label {
    Attractor,
    Repeller,
    /// Consecutive Betti numbers pair up starting at degree `parity`.
    PeriodicOrbitCandidate {
        parity: u8,
    },
    Other,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Attractor => f.write_str("attractor"),
            Label::Repeller => f.write_str("repeller"),
            Label::PeriodicOrbitCandidate { parity } => write!(f, "periodic-orbit-candidate (r={parity})"),
            Label::Other => f.write_str("other"),
        }
    }
}

/// Reads an index against the fixed-point and periodic-orbit signatures of
/// ambient dimension `d`. Labels are heuristics, not proofs.
pub fn classify(index: &BettiVector, d: usize) -> Label {
    let len = index.0.len().max(d + 1);
    let b = |k: usize| index.degree(k);
    if index.is_trivial() {
        return Label::Other;
    }
    if b(0) == 1 && (1..len).all(|k| b(k) == 0) {
        return Label::Attractor;
    }
    if b(d) == 1 && (0..len).filter(|&k| k != d).all(|k| b(k) == 0) {
        return Label::Repeller;
    }
    for r in 0..2usize {
        if r == 1 && b(0) != 0 {
            continue;
        }
        if (0..).map(|n| 2 * n + r).take_while(|&k| k < len).all(|k| b(k) == b(k + 1)) {
            return Label::PeriodicOrbitCandidate { parity: r as u8 };
        }
    }
    Label::Other
}
