//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used by geometry, costs and the LP/ILP solver.
///
/// Tolerances are per type: the f64 values are the ones the solver is tuned
/// for, the f32 values are loosened to match single precision.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Primal feasibility tolerance (row residuals, bound violations).
    fn feas_tol() -> Self;
    /// Optimality / pruning tolerance (reduced costs, objective comparison).
    fn opt_tol() -> Self;
    /// Smallest pivot magnitude accepted in ratio tests and factorizations.
    fn pivot_tol() -> Self;
    /// Vectors with a norm below this are treated as the zero vector.
    fn zero_vec_tol() -> Self;
    /// Tolerance of the normalized in-sphere predicate.
    fn geom_tol() -> Self;

    /// Lossy conversion from f64; every literal used in the crate fits.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn feas_tol() -> Self {
        1e-7
    }
    fn opt_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn zero_vec_tol() -> Self {
        1e-12
    }
    fn geom_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn feas_tol() -> Self {
        1e-4
    }
    fn opt_tol() -> Self {
        1e-5
    }
    fn pivot_tol() -> Self {
        1e-5
    }
    fn zero_vec_tol() -> Self {
        1e-6
    }
    fn geom_tol() -> Self {
        1e-5
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
