//! Empirical probe of LP-relaxation integrality under distinct costs.

use serde::{Deserialize, Serialize};

use super::bnb::solve_ilp;
use super::simplex::{solve_lp_relaxation, LpOptions};
use super::{IlpInstance, SolveStatus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralityRun {
    pub rep: usize,
    pub seed: u64,
    pub distinct_costs: bool,
    pub integral: bool,
    pub lp_objective: f64,
    pub ilp_objective: Option<f64>,
    /// For integral runs: LP and ILP objectives agree within `1e-9`.
    pub objectives_match: Option<bool>,
}

/// A fractional basic optimum found under pairwise-distinct costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub rep: usize,
    /// Serialized instance (with the perturbed costs).
    pub instance: String,
    pub lp_values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralityReport {
    /// Fraction of runs whose LP optimum is binary within `1e-7`.
    pub rate: f64,
    pub reps: usize,
    pub runs: Vec<IntegralityRun>,
    pub counterexamples: Vec<Counterexample>,
    /// Fractional optima seen with repeated costs; these do not count
    /// against the integrality hypothesis.
    pub flagged_fractional: usize,
    /// Integral runs whose objective disagreed with branch and bound.
    pub objective_mismatches: usize,
}

impl IntegralityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs `reps` relaxations with seeded cost perturbations (`seed + rep`).
pub fn check_integrality<T: Scalar>(inst: &IlpInstance<T>, reps: usize, seed: u64) -> Result<IntegralityReport> {
    check_integrality_with(inst, reps, seed, true)
}

/// As [`check_integrality`]; with `perturb = false` the instance costs are
/// used unchanged in every run.
pub fn check_integrality_with<T: Scalar>(
    inst: &IlpInstance<T>,
    reps: usize,
    seed: u64,
    perturb: bool,
) -> Result<IntegralityReport> {
    if reps == 0 {
        return Err(Error::Parameter("check_integrality needs reps >= 1".into()));
    }
    let int_tol = T::of(1e-7);
    let mut runs = Vec::with_capacity(reps);
    let mut counterexamples = Vec::new();
    let mut flagged = 0;
    let mut mismatches = 0;
    for rep in 0..reps {
        let run_seed = seed.wrapping_add(rep as u64);
        let costs = if perturb { inst.costs.perturbed(run_seed) } else { inst.costs.clone() };
        let distinct = costs.all_distinct();
        let probe = inst.with_costs(costs)?;
        let lp = solve_lp_relaxation(&probe, &LpOptions::default())?;
        if lp.status != SolveStatus::Optimal {
            return Err(Error::Numerical(format!("LP relaxation ended with {:?} in run {rep}", lp.status)));
        }
        let integral = lp.values.iter().all(|&v| (v - v.round()).abs() <= int_tol);
        let ilp = solve_ilp(&probe, None)?;
        let ilp_objective = (ilp.status == SolveStatus::Optimal).then(|| ilp.objective.to_f64_lossy());
        let objectives_match = if integral {
            let ok = ilp_objective.is_some_and(|o| (o - lp.objective.to_f64_lossy()).abs() <= 1e-9);
            if !ok {
                mismatches += 1;
            }
            Some(ok)
        } else {
            if distinct {
                counterexamples.push(Counterexample {
                    rep,
                    instance: probe.to_json(),
                    lp_values: lp.values.iter().map(|v| v.to_f64_lossy()).collect(),
                });
            } else {
                flagged += 1;
            }
            None
        };
        runs.push(IntegralityRun {
            rep,
            seed: run_seed,
            distinct_costs: distinct,
            integral,
            lp_objective: lp.objective.to_f64_lossy(),
            ilp_objective,
            objectives_match,
        });
    }
    let rate = runs.iter().filter(|r| r.integral).count() as f64 / reps as f64;
    Ok(IntegralityReport {
        rate,
        reps,
        runs,
        counterexamples,
        flagged_fractional: flagged,
        objective_mismatches: mismatches,
    })
}
