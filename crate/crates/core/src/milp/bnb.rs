//! Depth-first branch and bound over the LP relaxation.

use super::simplex::{solve_lp, LpOptions};
use super::{IlpInstance, Solution, SolveStats, SolveStatus};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BnbOptions<T> {
    pub lp: LpOptions<T>,
    pub node_limit: usize,
    /// A node is pruned when its bound is not below the incumbent by more than this.
    pub prune_tol: f64,
    /// Distance from 0/1 under which a value counts as integral.
    pub int_tol: f64,
}

impl<T> Default for BnbOptions<T> {
    fn default() -> Self {
        BnbOptions { lp: LpOptions::default(), node_limit: 1_000_000, prune_tol: 1e-9, int_tol: 1e-7 }
    }
}

/// Exact minimum of a binary instance. A feasible `warm_start` seeds the
/// incumbent and the root LP.
pub fn solve_ilp<T: Scalar>(inst: &IlpInstance<T>, warm_start: Option<&[T]>) -> Result<Solution<T>> {
    solve_ilp_with(inst, warm_start, &BnbOptions::default())
}

struct Node<T> {
    fixings: Vec<(usize, bool)>,
    warm: Option<Vec<T>>,
}

pub fn solve_ilp_with<T: Scalar>(
    inst: &IlpInstance<T>,
    warm_start: Option<&[T]>,
    options: &BnbOptions<T>,
) -> Result<Solution<T>> {
    let n = inst.n_vars();
    let prune_tol = T::of(options.prune_tol);
    let int_tol = T::of(options.int_tol);
    let mut stats = SolveStats::default();
    let mut incumbent: Option<(Vec<T>, T)> = None;
    let mut root_warm = None;
    if let Some(w) = warm_start {
        if w.len() == n {
            let rounded: Vec<T> = w.iter().map(|v| v.round()).collect();
            if inst.is_feasible(&rounded) {
                let obj = inst.objective(&rounded);
                incumbent = Some((rounded.clone(), obj));
            }
            root_warm = Some(rounded);
        }
    }

    let mut stack = vec![Node { fixings: Vec::new(), warm: root_warm }];
    let mut hit_limit = false;
    while let Some(node) = stack.pop() {
        if stats.nodes >= options.node_limit {
            hit_limit = true;
            break;
        }
        stats.nodes += 1;
        let mut lower = vec![T::zero(); n];
        let mut upper = vec![T::one(); n];
        for &(j, up) in &node.fixings {
            if up {
                lower[j] = T::one();
            } else {
                upper[j] = T::zero();
            }
        }
        let lp_opts = LpOptions { warm_point: node.warm, ..options.lp.clone() };
        let lp = solve_lp(inst, &lower, &upper, &lp_opts)?;
        stats.lp_iterations += lp.iterations;
        let is_root = node.fixings.is_empty();
        match lp.status {
            SolveStatus::Optimal | SolveStatus::Feasible => {}
            SolveStatus::Infeasible => continue,
            SolveStatus::IterationLimit => {
                hit_limit = true;
                continue;
            }
        }
        if is_root {
            stats.root_lp_objective = Some(lp.objective.to_f64_lossy());
        }
        if let Some((_, best)) = &incumbent {
            if lp.objective >= *best - prune_tol {
                if is_root {
                    stats.root_integral = Some(lp.is_integral());
                }
                continue;
            }
        }
        // most fractional, lowest index on ties
        let mut branch: Option<(usize, T)> = None;
        for (j, &v) in lp.values.iter().enumerate() {
            let frac = (v - v.floor()).min(v.ceil() - v);
            if frac > int_tol && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((j, frac));
            }
        }
        if is_root {
            stats.root_integral = Some(branch.is_none());
        }
        match branch {
            None => {
                let rounded: Vec<T> = lp.values.iter().map(|v| v.round()).collect();
                let obj = inst.objective(&rounded);
                if incumbent.as_ref().is_none_or(|(_, best)| obj < *best) {
                    incumbent = Some((rounded, obj));
                }
            }
            Some((j, _)) => {
                let up_first = lp.values[j] >= T::of(0.5);
                // the child explored first goes on top of the stack
                for up in [!up_first, up_first] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, up));
                    stack.push(Node { fixings, warm: Some(lp.values.clone()) });
                }
            }
        }
    }

    Ok(match incumbent {
        Some((values, objective)) => Solution {
            values,
            objective,
            status: if hit_limit { SolveStatus::IterationLimit } else { SolveStatus::Optimal },
            stats,
        },
        None => Solution {
            values: Vec::new(),
            objective: T::zero(),
            status: if hit_limit { SolveStatus::IterationLimit } else { SolveStatus::Infeasible },
            stats,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplexId;
    use crate::cost::CostVector;
    use crate::milp::{ComplexSummary, ModelKind, Row, VarTag};

    fn knapsack_like() -> IlpInstance<f64> {
        // min -x0 - x1 - x2, x0 + x1 <= 1.5, x1 + x2 <= 1.5: LP gives 2.25, ILP 2
        let row = |c: &[(usize, f64)], rhs| Row { name: String::new(), coeffs: c.to_vec(), rhs };
        IlpInstance {
            model: ModelKind::OneToplex,
            var_dict: (0..3).map(|j| VarTag { sigma: SimplexId(j), tau: SimplexId(9) }).collect(),
            var_names: (0..3).map(|j| format!("x{j}")).collect(),
            costs: CostVector { costs: vec![-1.0, -1.0, -1.0], alpha: None, beta: None },
            eq_rows: vec![],
            le_rows: vec![row(&[(0, 1.0), (1, 1.0)], 1.5), row(&[(1, 1.0), (2, 1.0)], 1.5)],
            summary: ComplexSummary { n_simplices: 0, n_toplexes: 0, pure_dim: None },
        }
    }

    #[test]
    fn branches_to_integer_optimum() {
        let i = knapsack_like();
        let s = solve_ilp(&i, None).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, -2.0);
        assert_eq!(s.values, vec![1.0, 0.0, 1.0]);
        assert!(s.stats.nodes > 1);
        assert_eq!(s.stats.root_integral, Some(false));
    }

    #[test]
    fn warm_start_is_incumbent() {
        let i = knapsack_like();
        let s = solve_ilp(&i, Some(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(s.objective, -2.0);
    }

    #[test]
    fn node_limit() {
        let i = knapsack_like();
        let opts = BnbOptions { node_limit: 1, ..Default::default() };
        let s = solve_ilp_with(&i, None, &opts).unwrap();
        assert_eq!(s.status, SolveStatus::IterationLimit);
    }
}
