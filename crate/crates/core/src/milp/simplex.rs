//! Bounded-variable revised primal simplex.
//!
//! Every row gets a logical variable (`A x + s = b`): equality rows pin it to
//! `[0, 0]`, `<=` rows give it `[0, inf)`. The starting basis is made of
//! logicals; rows whose logical would start out of bounds get an artificial
//! variable instead, and phase 1 minimizes the sum of artificials.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::lu::BasisFactor;
use super::{IlpInstance, SolveStatus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pricing {
    /// Most negative reduced cost, switching to Bland's rule after a run of
    /// degenerate pivots and back after the next non-degenerate one.
    #[default]
    DantzigBland,
    Dantzig,
    /// Smallest eligible index, smallest-index ratio test ties.
    Bland,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOptions<T> {
    pub pricing: Pricing,
    pub max_iterations: usize,
    pub refactor_every: usize,
    /// Degenerate pivots in a row before Bland's rule takes over.
    pub degenerate_limit: usize,
    /// Starting values for the structural variables, snapped to the nearest
    /// bound. A feasible binary point skips phase 1 entirely.
    pub warm_point: Option<Vec<T>>,
}

impl<T> Default for LpOptions<T> {
    fn default() -> Self {
        LpOptions {
            pricing: Pricing::default(),
            max_iterations: 2_000_000,
            refactor_every: 100,
            degenerate_limit: 50,
            warm_point: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome<T> {
    pub status: SolveStatus,
    /// Structural variable values (empty unless optimal).
    pub values: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    pub phase1_iterations: usize,
    /// Phase-2 objective after every basis change or bound flip.
    pub objective_trace: Vec<T>,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|&v| (v - v.round()).abs() <= T::feas_tol())
    }
}

/// LP relaxation with every variable in `[0, 1]`.
pub fn solve_lp_relaxation<T: Scalar>(inst: &IlpInstance<T>, options: &LpOptions<T>) -> Result<LpOutcome<T>> {
    let n = inst.n_vars();
    solve_lp(inst, &vec![T::zero(); n], &vec![T::one(); n], options)
}

/// Relaxation with explicit per-variable bounds (used by branch and bound).
pub fn solve_lp<T: Scalar>(
    inst: &IlpInstance<T>,
    lower: &[T],
    upper: &[T],
    options: &LpOptions<T>,
) -> Result<LpOutcome<T>> {
    let n = inst.n_vars();
    if lower.len() != n || upper.len() != n {
        return Err(Error::Parameter("bound vectors must match the variable count".into()));
    }
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Ok(LpOutcome {
            status: SolveStatus::Infeasible,
            values: Vec::new(),
            objective: T::zero(),
            iterations: 0,
            phase1_iterations: 0,
            objective_trace: Vec::new(),
        });
    }
    if let Some(w) = &options.warm_point {
        if w.len() != n {
            return Err(Error::Parameter(format!("warm point has {} entries, expected {n}", w.len())));
        }
    }
    Simplex::new(inst, lower, upper, options).run()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Simplex<'a, T> {
    opts: &'a LpOptions<T>,
    n: usize,
    m: usize,
    /// Structural costs.
    cost: Vec<T>,
    /// Structural columns.
    cols: Vec<Vec<(usize, T)>>,
    rhs: Vec<T>,
    /// Row and sign of each artificial variable (indices from `n + m`).
    art: Vec<(usize, T)>,
    lb: Vec<T>,
    ub: Vec<T>,
    x: Vec<T>,
    basis: Vec<usize>,
    /// Basis position of each variable, `usize::MAX` when nonbasic.
    pos: Vec<usize>,
    factor: Option<BasisFactor<T>>,
    pivots_since_refactor: usize,
    iterations: usize,
    trace: Vec<T>,
}

const NONBASIC: usize = usize::MAX;

impl<'a, T: Scalar> Simplex<'a, T> {
    fn new(inst: &IlpInstance<T>, lower: &[T], upper: &[T], opts: &'a LpOptions<T>) -> Self {
        let n = inst.n_vars();
        let m = inst.eq_rows.len() + inst.le_rows.len();
        let mut cols = vec![Vec::new(); n];
        let mut rhs = Vec::with_capacity(m);
        let mut lb = lower.to_vec();
        let mut ub = upper.to_vec();
        for (i, row) in inst.eq_rows.iter().chain(&inst.le_rows).enumerate() {
            for &(j, a) in &row.coeffs {
                if a != T::zero() {
                    cols[j].push((i, a));
                }
            }
            rhs.push(row.rhs);
        }
        for i in 0..m {
            lb.push(T::zero());
            ub.push(if i < inst.eq_rows.len() { T::zero() } else { T::infinity() });
        }
        let mut x: Vec<T> = (0..n)
            .map(|j| match &opts.warm_point {
                Some(w) if w[j] > (lb[j] + ub[j]) / T::of(2.0) => ub[j],
                _ => lb[j],
            })
            .collect();
        // logical values implied by the structural start
        let mut act = rhs.clone();
        for (j, col) in cols.iter().enumerate() {
            if x[j] != T::zero() {
                for &(i, a) in col {
                    act[i] = act[i] - a * x[j];
                }
            }
        }
        x.extend_from_slice(&act);
        Simplex {
            opts,
            n,
            m,
            cost: inst.costs.costs.clone(),
            cols,
            rhs,
            art: Vec::new(),
            lb,
            ub,
            x,
            basis: (n..n + m).collect(),
            pos: (0..n).map(|_| NONBASIC).chain(0..m).collect(),
            factor: None,
            pivots_since_refactor: 0,
            iterations: 0,
            trace: Vec::new(),
        }
    }

    fn n_total(&self) -> usize {
        self.n + self.m + self.art.len()
    }

    fn column(&self, j: usize) -> Vec<(usize, T)> {
        if j < self.n {
            self.cols[j].clone()
        } else if j < self.n + self.m {
            vec![(j - self.n, T::one())]
        } else {
            let (r, s) = self.art[j - self.n - self.m];
            vec![(r, s)]
        }
    }

    /// `y . a_j` without materializing the column.
    fn dot_column(&self, j: usize, y: &[T]) -> T {
        if j < self.n {
            self.cols[j].iter().map(|&(i, a)| a * y[i]).sum()
        } else if j < self.n + self.m {
            y[j - self.n]
        } else {
            let (r, s) = self.art[j - self.n - self.m];
            s * y[r]
        }
    }

    fn run(mut self) -> Result<LpOutcome<T>> {
        let tol = T::feas_tol();
        // Replace infeasible logicals by artificials.
        for i in 0..self.m {
            let j = self.n + i;
            let v = self.x[j];
            let target = v.max(self.lb[j]).min(self.ub[j]);
            if (v - target).abs() > tol {
                let sign = if v > target { T::one() } else { -T::one() };
                let a = self.n + self.m + self.art.len();
                self.art.push((i, sign));
                self.lb.push(T::zero());
                self.ub.push(T::infinity());
                self.x.push((v - target).abs());
                self.x[j] = target;
                self.pos[j] = NONBASIC;
                self.pos.push(i);
                self.basis[i] = a;
            }
        }
        self.refactor()?;

        let mut phase1_iterations = 0;
        if !self.art.is_empty() {
            let cost: Vec<T> =
                (0..self.n_total()).map(|j| if j >= self.n + self.m { T::one() } else { T::zero() }).collect();
            let end = self.phase(&cost, false)?;
            phase1_iterations = self.iterations;
            if end == PhaseEnd::IterationLimit {
                return Ok(self.outcome(SolveStatus::IterationLimit, phase1_iterations));
            }
            let infeas: T = (self.n + self.m..self.n_total()).map(|j| self.x[j].max(T::zero())).sum();
            if infeas > tol * T::of(10.0) {
                return Ok(self.outcome(SolveStatus::Infeasible, phase1_iterations));
            }
            for j in self.n + self.m..self.n_total() {
                self.ub[j] = T::zero();
                if self.pos[j] == NONBASIC {
                    self.x[j] = T::zero();
                }
            }
        }
        let mut cost = vec![T::zero(); self.n_total()];
        cost[..self.n].copy_from_slice(&self.cost);
        let end = self.phase(&cost, true)?;
        match end {
            PhaseEnd::Optimal => Ok(self.outcome(SolveStatus::Optimal, phase1_iterations)),
            PhaseEnd::IterationLimit => Ok(self.outcome(SolveStatus::IterationLimit, phase1_iterations)),
            PhaseEnd::Unbounded => Err(Error::Numerical("LP relaxation reported unbounded".into())),
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let cols: Vec<Vec<(usize, T)>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let factor =
            BasisFactor::new(self.m, &cols).map_err(|_| Error::Numerical("simplex basis became singular".into()))?;
        // x_B = B^{-1} (b - N x_N)
        let mut r = self.rhs.clone();
        for j in 0..self.n_total() {
            if self.pos[j] == NONBASIC && self.x[j] != T::zero() {
                for (i, a) in self.column(j) {
                    r[i] = r[i] - a * self.x[j];
                }
            }
        }
        let xb = factor.ftran(&r);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[p];
        }
        self.factor = Some(factor);
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn objective(&self, cost: &[T]) -> T {
        cost.iter().zip(&self.x).map(|(&c, &v)| c * v).sum()
    }

    /// Primal simplex iterations for `cost` until optimality.
    fn phase(&mut self, cost: &[T], record: bool) -> Result<PhaseEnd> {
        let dual_tol = T::opt_tol();
        let piv_tol = T::pivot_tol();
        let feas = T::feas_tol();
        let mut degenerate_run = 0usize;
        let mut obj = self.objective(cost);
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(PhaseEnd::IterationLimit);
            }
            let bland = match self.opts.pricing {
                Pricing::Bland => true,
                Pricing::Dantzig => false,
                Pricing::DantzigBland => degenerate_run >= self.opts.degenerate_limit,
            };
            let factor = self.factor.as_ref().expect("factorized");
            let cb: Vec<T> = self.basis.iter().map(|&j| cost[j]).collect();
            let y = factor.btran(&cb);

            // pricing
            let mut enter: Option<(usize, T)> = None;
            for j in 0..self.n_total() {
                if self.pos[j] != NONBASIC || self.lb[j] == self.ub[j] {
                    continue;
                }
                let d = cost[j] - self.dot_column(j, &y);
                let at_upper = self.ub[j].is_finite() && self.x[j] >= self.ub[j];
                let eligible = if at_upper { d > dual_tol } else { d < -dual_tol };
                if !eligible {
                    continue;
                }
                if bland {
                    enter = Some((j, d));
                    break;
                }
                if enter.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    enter = Some((j, d));
                }
            }
            let Some((q, dq)) = enter else { return Ok(PhaseEnd::Optimal) };
            let dir = if dq < T::zero() { T::one() } else { -T::one() };

            let mut aq = vec![T::zero(); self.m];
            for (i, a) in self.column(q) {
                aq[i] = a;
            }
            let alpha = factor.ftran(&aq);
            let range = self.ub[q] - self.lb[q];

            // ratio test: x_B(p) moves by -t * g_p
            let ratio = |p: usize, g: T, relax: T| -> Option<T> {
                let j = self.basis[p];
                if g > piv_tol {
                    Some((self.x[j] - self.lb[j] + relax) / g)
                } else if g < -piv_tol && self.ub[j].is_finite() {
                    Some((self.ub[j] + relax - self.x[j]) / -g)
                } else {
                    None
                }
            };
            let mut leave: Option<(usize, T)> = None;
            if bland {
                let mut best_var = usize::MAX;
                for p in 0..self.m {
                    let g = dir * alpha[p];
                    if let Some(r) = ratio(p, g, T::zero()) {
                        let r = r.max(T::zero());
                        let j = self.basis[p];
                        let better = match leave {
                            None => true,
                            Some((_, t)) => r < t || (r == t && j < best_var),
                        };
                        if better {
                            leave = Some((p, r));
                            best_var = j;
                        }
                    }
                }
            } else {
                let mut tmax = T::infinity();
                for p in 0..self.m {
                    if let Some(r) = ratio(p, dir * alpha[p], feas) {
                        tmax = tmax.min(r);
                    }
                }
                let mut best_g = T::zero();
                for p in 0..self.m {
                    let g = dir * alpha[p];
                    if let Some(r) = ratio(p, g, T::zero()) {
                        if r <= tmax && g.abs() > best_g {
                            best_g = g.abs();
                            leave = Some((p, r.max(T::zero())));
                        }
                    }
                }
            }

            let flip = match leave {
                None => true,
                Some((_, t)) => range <= t,
            };
            if flip && !range.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }
            let t = if flip { range } else { leave.expect("blocking row").1 };
            for p in 0..self.m {
                if alpha[p] != T::zero() {
                    let j = self.basis[p];
                    self.x[j] = self.x[j] - t * dir * alpha[p];
                }
            }
            self.x[q] = if flip {
                if dir > T::zero() {
                    self.ub[q]
                } else {
                    self.lb[q]
                }
            } else {
                self.x[q] + dir * t
            };
            if !flip {
                let (p, _) = leave.expect("blocking row");
                let out = self.basis[p];
                self.x[out] = if dir * alpha[p] > T::zero() { self.lb[out] } else { self.ub[out] };
                self.pos[out] = NONBASIC;
                self.pos[q] = p;
                self.basis[p] = q;
                self.factor.as_mut().expect("factorized").push_eta(p, &alpha);
                self.pivots_since_refactor += 1;
                if self.pivots_since_refactor >= self.opts.refactor_every.max(1) {
                    self.refactor()?;
                }
            }
            self.iterations += 1;
            obj = obj + dq * dir * t;
            if t <= T::epsilon() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if record {
                self.trace.push(obj);
            }
        }
    }

    fn outcome(mut self, status: SolveStatus, phase1_iterations: usize) -> LpOutcome<T> {
        let values: Vec<T> = if status == SolveStatus::Optimal {
            (0..self.n).map(|j| self.x[j].max(self.lb[j]).min(self.ub[j])).collect()
        } else {
            Vec::new()
        };
        let objective = values.iter().zip(&self.cost).map(|(&v, &c)| v * c).sum();
        LpOutcome {
            status,
            values,
            objective,
            iterations: self.iterations,
            phase1_iterations,
            objective_trace: std::mem::take(&mut self.trace),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplexId;
    use crate::cost::CostVector;
    use crate::milp::{ComplexSummary, ModelKind, Row, VarTag};

    fn inst(costs: Vec<f64>, eq: Vec<Row<f64>>, le: Vec<Row<f64>>) -> IlpInstance<f64> {
        let n = costs.len();
        IlpInstance {
            model: ModelKind::OneToplex,
            var_dict: (0..n).map(|j| VarTag { sigma: SimplexId(j), tau: SimplexId(j + 1) }).collect(),
            var_names: (0..n).map(|j| format!("x{j}")).collect(),
            costs: CostVector { costs, alpha: None, beta: None },
            eq_rows: eq,
            le_rows: le,
            summary: ComplexSummary { n_simplices: 0, n_toplexes: 0, pure_dim: None },
        }
    }

    fn row(coeffs: &[(usize, f64)], rhs: f64) -> Row<f64> {
        Row { name: String::new(), coeffs: coeffs.to_vec(), rhs }
    }

    #[test]
    fn picks_cheapest_in_assignment_row() {
        let i = inst(vec![3.0, 1.0, 2.0], vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)], vec![]);
        for pricing in [Pricing::Dantzig, Pricing::Bland, Pricing::DantzigBland] {
            let out = solve_lp_relaxation(&i, &LpOptions { pricing, ..Default::default() }).unwrap();
            assert_eq!(out.status, SolveStatus::Optimal);
            assert!((out.objective - 1.0).abs() < 1e-12);
            assert_eq!(out.values, vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn fractional_vertex() {
        // min -x0 - x1, x0 + x1 <= 1.5, both in [0, 1]
        let i = inst(vec![-1.0, -1.0], vec![], vec![row(&[(0, 1.0), (1, 1.0)], 1.5)]);
        let out = solve_lp_relaxation(&i, &LpOptions::default()).unwrap();
        assert!((out.objective + 1.5).abs() < 1e-12);
        assert!(!out.is_integral());
    }

    #[test]
    fn infeasible_detected() {
        let i = inst(vec![1.0, 1.0], vec![row(&[(0, 1.0), (1, 1.0)], 2.0)], vec![row(&[(0, 1.0)], 0.5)]);
        assert_eq!(solve_lp_relaxation(&i, &LpOptions::default()).unwrap().status, SolveStatus::Infeasible);
        let i = inst(vec![1.0], vec![], vec![]);
        let out = solve_lp(&i, &[1.0], &[0.0], &LpOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn negative_rhs_covering_row() {
        // -x0 - x1 <= -1 means x0 + x1 >= 1
        let i = inst(vec![2.0, 5.0], vec![], vec![row(&[(0, -1.0), (1, -1.0)], -1.0)]);
        let out = solve_lp_relaxation(&i, &LpOptions::default()).unwrap();
        assert_eq!(out.values, vec![1.0, 0.0]);
    }

    #[test]
    fn warm_feasible_point_skips_phase_one() {
        let i = inst(vec![3.0, 1.0, 2.0], vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)], vec![]);
        let opts = LpOptions { warm_point: Some(vec![1.0, 0.0, 0.0]), ..Default::default() };
        let out = solve_lp_relaxation(&i, &opts).unwrap();
        assert_eq!(out.phase1_iterations, 0);
        assert!((out.objective - 1.0).abs() < 1e-12);
        for w in out.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn iteration_limit_reported() {
        let i = inst(vec![3.0, 1.0, 2.0], vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)], vec![]);
        let out = solve_lp_relaxation(&i, &LpOptions { max_iterations: 0, ..Default::default() }).unwrap();
        assert_eq!(out.status, SolveStatus::IterationLimit);
    }
}
