//! Objective coefficients for both optimization models.
//!
//! The base cost of a pair `(sigma, tau)` compares the vector on `sigma` with
//! the direction from the barycenter of `sigma` to that of `tau` using the
//! cosine dissimilarity. A vanishing `V(sigma)` gets the maximal cost 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{w_map, VectorAssignment};
use crate::scalar::{dot, norm, Scalar};

/// Costs aligned with a variable dictionary, plus the parameters used to
/// build them (only set for the generalized model).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostVector<T> {
    pub costs: Vec<T>,
    pub alpha: Option<T>,
    pub beta: Option<T>,
}

impl<T: Scalar> CostVector<T> {
    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Adds seeded uniform noise in `[0, 1e-6)` to every cost so that all
    /// entries become pairwise distinct with probability one.
    pub fn perturbed(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs = self.costs.iter().map(|&c| c + T::of(rng.gen::<f64>() * 1e-6)).collect();
        CostVector { costs, alpha: self.alpha, beta: self.beta }
    }

    pub fn all_distinct(&self) -> bool {
        let mut sorted: Vec<T> = self.costs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite costs"));
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// `1 - u.v / (|u| |v|)`, clamped to `[0, 2]`.
pub fn cosine_dissimilarity<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    let (nu, nv) = (norm(u), norm(v));
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::Domain("cosine dissimilarity of a zero vector".into()));
    }
    let d = T::one() - dot(u, v) / (nu * nv);
    Ok(d.max(T::zero()).min(T::of(2.0)))
}

/// Base cost of a non-loop pair.
pub fn pair_cost<T: Scalar>(assignment: &VectorAssignment<T>, sigma: SimplexId, tau: SimplexId) -> Result<T> {
    if assignment.is_zero(sigma) {
        return Ok(T::of(2.0));
    }
    let w = w_map(assignment, sigma, tau)?;
    cosine_dissimilarity(assignment.vector(sigma), &w)
}

fn check_coverage<T: Scalar>(complex: &SimplicialComplex, assignment: &VectorAssignment<T>) -> Result<()> {
    if assignment.len() != complex.len() {
        return Err(Error::Assignment(format!(
            "assignment covers {} simplices, complex has {}",
            assignment.len(),
            complex.len()
        )));
    }
    Ok(())
}

/// Costs of the one-toplex model, aligned with
/// [`SimplicialComplex::model2_variable_pairs`].
pub fn model2_costs<T: Scalar>(complex: &SimplicialComplex, assignment: &VectorAssignment<T>) -> Result<CostVector<T>> {
    check_coverage(complex, assignment)?;
    let costs =
        complex.model2_variable_pairs().into_iter().map(|(s, t)| pair_cost(assignment, s, t)).collect::<Result<_>>()?;
    Ok(CostVector { costs, alpha: None, beta: None })
}

/// `c'` of the generalized model, aligned with
/// [`SimplicialComplex::model1_variable_pairs`]: base cost minus `beta` on
/// pairs and `alpha` on loops.
pub fn model1_costs<T: Scalar>(
    complex: &SimplicialComplex,
    assignment: &VectorAssignment<T>,
    alpha: T,
    beta: T,
) -> Result<CostVector<T>> {
    check_coverage(complex, assignment)?;
    let costs = complex
        .model1_variable_pairs()
        .into_iter()
        .map(|(s, t)| if s == t { Ok(alpha) } else { Ok(pair_cost(assignment, s, t)? - beta) })
        .collect::<Result<_>>()?;
    Ok(CostVector { costs, alpha: Some(alpha), beta: Some(beta) })
}

/// `c''(sigma, tau) = c'(sigma, tau) - sum over sigma < rho < tau of c(sigma, rho)`
/// where `c` is the base (unshifted) cost. Loops keep `alpha`.
pub fn refined_costs<T: Scalar>(
    complex: &SimplicialComplex,
    assignment: &VectorAssignment<T>,
    alpha: T,
    beta: T,
) -> Result<CostVector<T>> {
    let prime = model1_costs(complex, assignment, alpha, beta)?;
    let pairs = complex.model1_variable_pairs();
    let costs = refine(complex, &pairs, &prime.costs, |s, r| pair_cost(assignment, s, r))?;
    Ok(CostVector { costs, alpha: Some(alpha), beta: Some(beta) })
}

fn refine<T: Scalar>(
    complex: &SimplicialComplex,
    pairs: &[(SimplexId, SimplexId)],
    prime: &[T],
    base: impl Fn(SimplexId, SimplexId) -> Result<T>,
) -> Result<Vec<T>> {
    pairs
        .iter()
        .zip(prime)
        .map(|(&(s, t), &cp)| {
            if s == t {
                return Ok(cp);
            }
            let mut acc = cp;
            for rho in complex.proper_faces(t) {
                if complex.lt(s, rho) {
                    acc = acc - base(s, rho)?;
                }
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::geometry::assign_vectors;
    use approx::assert_relative_eq;

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_dissimilarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_relative_eq!(cosine_dissimilarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(cosine_dissimilarity(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 2.0);
        assert!(cosine_dissimilarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    fn edge_fixture(v0: [f64; 2]) -> (SimplicialComplex, VectorAssignment<f64>) {
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let pos = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        let vec = vec![v0.to_vec(), vec![1.0, 0.0]];
        let a = assign_vectors(&k, &pos, &vec).unwrap();
        (k, a)
    }

    #[test]
    fn model2_cost_rules() {
        // pairs: ([0],[0,1]), ([1],[0,1]); W from [0] points along +x.
        let (k, a) = edge_fixture([3.0, 0.0]);
        let c = model2_costs(&k, &a).unwrap();
        assert_eq!(c.costs[0], 0.0);
        // [1] has V = (1, 0) but W points along -x
        assert_eq!(c.costs[1], 2.0);

        let (k, a) = edge_fixture([0.0, 0.0]);
        let c = model2_costs(&k, &a).unwrap();
        assert_eq!(c.costs[0], 2.0);
    }

    #[test]
    fn model1_cost_rules() {
        let (k, a) = edge_fixture([0.0, 1.0]);
        let base = model2_costs(&k, &a).unwrap();
        let pairs = k.model1_variable_pairs();
        let c0 = model1_costs(&k, &a, 0.3, 0.0).unwrap();
        let c2 = model1_costs(&k, &a, 0.3, 2.0).unwrap();
        let m2 = k.model2_variable_pairs();
        for (j, &(s, t)) in pairs.iter().enumerate() {
            if s == t {
                assert_eq!(c0.costs[j], 0.3);
            } else {
                let i = m2.iter().position(|&p| p == (s, t)).unwrap();
                assert_eq!(c0.costs[j], base.costs[i]);
                assert!(c2.costs[j] <= 0.0);
            }
        }
    }

    #[test]
    fn refinement_formula() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let pairs = k.model1_variable_pairs();
        let v0 = k.id_of(&[0]).unwrap();
        let t = k.id_of(&[0, 1, 2]).unwrap();
        let prime: Vec<f64> = pairs.iter().map(|&(s, tt)| if (s, tt) == (v0, t) { 1.2 } else { 0.7 }).collect();
        let out = refine(&k, &pairs, &prime, |_, _| Ok(0.5)).unwrap();
        let j = pairs.iter().position(|&p| p == (v0, t)).unwrap();
        assert_relative_eq!(out[j], 0.2, epsilon = 1e-15);
        // codimension one pairs have no intermediate simplex
        let e = k.id_of(&[0, 1]).unwrap();
        let j = pairs.iter().position(|&p| p == (e, t)).unwrap();
        assert_eq!(out[j], 0.7);
        let zero = refine(&k, &pairs, &prime, |_, _| Ok(0.0)).unwrap();
        assert_eq!(zero, prime);
    }

    #[test]
    fn perturbation_makes_distinct() {
        let c = CostVector { costs: vec![1.0; 50], alpha: None, beta: None };
        assert!(!c.all_distinct());
        let p = c.perturbed(4);
        assert!(p.all_distinct());
        assert!(p.costs.iter().all(|&x| (1.0..1.0 + 1e-6).contains(&x)));
        assert_eq!(p, c.perturbed(4));
    }
}
