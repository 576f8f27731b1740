//! Binary linear programs of both models, an LP relaxation solver and an
//! exact branch-and-bound on top of it.

mod bnb;
mod integrality;
mod lp_format;
pub mod lu;
mod simplex;

pub use bnb::{solve_ilp, solve_ilp_with, BnbOptions};
pub use integrality::{check_integrality, check_integrality_with, Counterexample, IntegralityReport, IntegralityRun};
pub use lp_format::{export_lp, parse_lp, ParsedLp};
pub use simplex::{solve_lp, solve_lp_relaxation, LpOptions, LpOutcome, Pricing};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplicialComplex};
use crate::cost::CostVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Generalized model: loops plus all pairs `sigma <= tau`.
    #[serde(rename = "1")]
    General,
    /// One toplex per multivector.
    #[serde(rename = "2")]
    OneToplex,
}

impl ModelKind {
    pub fn number(self) -> u8 {
        match self {
            ModelKind::General => 1,
            ModelKind::OneToplex => 2,
        }
    }
}

/// Direction of the coverage rows `D z ? 1` of the generalized model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageSense {
    /// Every simplex is in at least one selected pair.
    #[default]
    AtLeast,
    AtMost,
}

/// Variable `z(sigma, tau)`; a loop when both are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarTag {
    pub sigma: SimplexId,
    pub tau: SimplexId,
}

impl VarTag {
    pub fn is_loop(self) -> bool {
        self.sigma == self.tau
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row<T> {
    pub name: String,
    /// `(variable index, coefficient)`, sorted by variable.
    pub coeffs: Vec<(usize, T)>,
    pub rhs: T,
}

impl<T: Scalar> Row<T> {
    pub fn activity(&self, values: &[T]) -> T {
        self.coeffs.iter().map(|&(j, a)| a * values[j]).sum()
    }
}

/// Sizes of the complex an instance was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub n_simplices: usize,
    pub n_toplexes: usize,
    pub pure_dim: Option<usize>,
}

/// `min c.z` subject to `eq_rows` (`= rhs`), `le_rows` (`<= rhs`) and
/// `z in [0, 1]`, with binary requirements on every variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlpInstance<T> {
    pub model: ModelKind,
    pub var_dict: Vec<VarTag>,
    pub var_names: Vec<String>,
    pub costs: CostVector<T>,
    pub eq_rows: Vec<Row<T>>,
    pub le_rows: Vec<Row<T>>,
    pub summary: ComplexSummary,
}

impl<T: Scalar> IlpInstance<T> {
    pub fn n_vars(&self) -> usize {
        self.var_dict.len()
    }

    pub fn objective(&self, values: &[T]) -> T {
        self.costs.costs.iter().zip(values).map(|(&c, &z)| c * z).sum()
    }

    /// Largest violation over rows and `[0, 1]` bounds.
    pub fn max_violation(&self, values: &[T]) -> T {
        let mut worst = T::zero();
        for r in &self.eq_rows {
            worst = worst.max((r.activity(values) - r.rhs).abs());
        }
        for r in &self.le_rows {
            worst = worst.max(r.activity(values) - r.rhs);
        }
        for &v in values {
            worst = worst.max(-v).max(v - T::one());
        }
        worst
    }

    pub fn is_feasible(&self, values: &[T]) -> bool {
        values.len() == self.n_vars() && self.max_violation(values) <= T::feas_tol()
    }

    /// Same instance with another cost vector of matching length.
    pub fn with_costs(&self, costs: CostVector<T>) -> Result<Self> {
        if costs.len() != self.n_vars() {
            return Err(Error::Parameter(format!("{} costs for {} variables", costs.len(), self.n_vars())));
        }
        let mut out = self.clone();
        out.costs = costs;
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Feasible point without an optimality proof (constructed witnesses).
    Feasible,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub lp_iterations: usize,
    pub nodes: usize,
    pub root_lp_objective: Option<f64>,
    pub root_integral: Option<bool>,
}

/// Values are in `[0, 1]` for LP solutions and exactly 0/1 for ILP ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution<T> {
    pub values: Vec<T>,
    pub objective: T,
    pub status: SolveStatus,
    #[serde(default)]
    pub stats: SolveStats,
}

impl<T: Scalar> Solution<T> {
    /// Every value within the feasibility tolerance of 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.values
            .iter()
            .all(|&v| (v - v.round()).abs() <= T::feas_tol() && (v.round() == T::zero() || v.round() == T::one()))
    }

    /// Rounded 0/1 pattern.
    pub fn ones(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v > T::of(0.5)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

/// Name encoding `(sigma, tau)`: `z_<sigma ids>__<tau ids>` with `_`
/// between vertex ids.
pub fn var_name(complex: &SimplexId, tau: &SimplexId, k: &SimplicialComplex) -> String {
    let join = |id: &SimplexId| k.vertices(*id).iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_");
    format!("z_{}__{}", join(complex), join(tau))
}

fn summary(k: &SimplicialComplex) -> ComplexSummary {
    ComplexSummary { n_simplices: k.len(), n_toplexes: k.toplexes().len(), pure_dim: k.pure_dim() }
}

fn index_vars(vars: &[VarTag]) -> HashMap<(SimplexId, SimplexId), usize> {
    vars.iter().enumerate().map(|(j, v)| ((v.sigma, v.tau), j)).collect()
}

/// One-toplex model: one equality row per non-toplex simplex and one
/// `z(si, tau) - z(sj, tau) <= 0` row per triplet.
pub fn build_model2<T: Scalar>(k: &SimplicialComplex, costs: &CostVector<T>) -> Result<IlpInstance<T>> {
    let vars: Vec<VarTag> = k.model2_variable_pairs().into_iter().map(|(sigma, tau)| VarTag { sigma, tau }).collect();
    if costs.len() != vars.len() {
        return Err(Error::Parameter(format!("{} costs for {} model-2 variables", costs.len(), vars.len())));
    }
    let idx = index_vars(&vars);
    let mut by_sigma: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for (j, v) in vars.iter().enumerate() {
        by_sigma[v.sigma.0].push(j);
    }
    let eq_rows = k
        .ids()
        .filter(|&s| !k.is_toplex(s))
        .map(|s| Row {
            name: format!("assign_{}", s.0),
            coeffs: by_sigma[s.0].iter().map(|&j| (j, T::one())).collect(),
            rhs: T::one(),
        })
        .collect();
    let le_rows = k
        .model2_triplets()
        .into_iter()
        .enumerate()
        .map(|(r, (si, sj, t))| {
            let mut coeffs = vec![(idx[&(si, t)], T::one()), (idx[&(sj, t)], -T::one())];
            coeffs.sort_by_key(|e| e.0);
            Row { name: format!("convex_{r}"), coeffs, rhs: T::zero() }
        })
        .collect();
    Ok(IlpInstance {
        model: ModelKind::OneToplex,
        var_names: vars.iter().map(|v| var_name(&v.sigma, &v.tau, k)).collect(),
        var_dict: vars,
        costs: costs.clone(),
        eq_rows,
        le_rows,
        summary: summary(k),
    })
}

/// Generalized model: coverage rows plus the three convexity rows for every
/// strict chain `si < sj < tau`. All rows are stored as `<=`.
pub fn build_model1<T: Scalar>(
    k: &SimplicialComplex,
    costs: &CostVector<T>,
    sense: CoverageSense,
) -> Result<IlpInstance<T>> {
    let vars: Vec<VarTag> = k.model1_variable_pairs().into_iter().map(|(sigma, tau)| VarTag { sigma, tau }).collect();
    if costs.len() != vars.len() {
        return Err(Error::Parameter(format!("{} costs for {} model-1 variables", costs.len(), vars.len())));
    }
    let idx = index_vars(&vars);
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for (j, v) in vars.iter().enumerate() {
        touching[v.sigma.0].push(j);
        if !v.is_loop() {
            touching[v.tau.0].push(j);
        }
    }
    let mut le_rows = Vec::new();
    for s in k.ids() {
        let mut cols = touching[s.0].clone();
        cols.sort_unstable();
        let (sign, rhs) = match sense {
            CoverageSense::AtLeast => (-T::one(), -T::one()),
            CoverageSense::AtMost => (T::one(), T::one()),
        };
        le_rows.push(Row {
            name: format!("cover_{}", s.0),
            coeffs: cols.into_iter().map(|j| (j, sign)).collect(),
            rhs,
        });
    }
    let one = T::one();
    for (r, (si, sj, t)) in k.model1_triplets().into_iter().enumerate() {
        let (a, b, c) = (idx[&(si, t)], idx[&(sj, t)], idx[&(si, sj)]);
        let mut push = |name: String, mut coeffs: Vec<(usize, T)>, rhs: T| {
            coeffs.sort_by_key(|e| e.0);
            le_rows.push(Row { name, coeffs, rhs });
        };
        push(format!("conv1_{r}"), vec![(a, one), (b, -one)], T::zero());
        push(format!("conv2_{r}"), vec![(a, one), (b, one), (c, -one)], one);
        push(format!("conv3_{r}"), vec![(c, one), (b, one), (a, -one)], one);
    }
    Ok(IlpInstance {
        model: ModelKind::General,
        var_names: vars.iter().map(|v| var_name(&v.sigma, &v.tau, k)).collect(),
        var_dict: vars,
        costs: costs.clone(),
        eq_rows: Vec::new(),
        le_rows,
        summary: summary(k),
    })
}

/// Formula values for one reading of the dimension parameter `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaReading {
    pub d: usize,
    pub m: i64,
    pub n: i64,
    pub triplets_per_toplex: i64,
}

/// Enumerated sizes next to the closed-form size estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormComparison {
    pub toplex_dim: usize,
    /// `sum over toplexes of (2^(dim+1) - 2)`.
    pub enumerated_m_formula: usize,
    pub by_dimension: FormulaReading,
    pub by_vertex_count: FormulaReading,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDimensions {
    /// Number of variables.
    pub m: usize,
    pub n_eq: usize,
    pub n_le: usize,
    /// Present for one-toplex instances over pure complexes.
    pub closed_form: Option<ClosedFormComparison>,
}

pub fn instance_dimensions<T: Scalar>(inst: &IlpInstance<T>) -> InstanceDimensions {
    let (m, n_eq, n_le) = (inst.n_vars(), inst.eq_rows.len(), inst.le_rows.len());
    let closed_form = match (inst.model, inst.summary.pure_dim) {
        (ModelKind::OneToplex, Some(d)) if d > 0 => {
            let t = inst.summary.n_toplexes as i64;
            let kk = inst.summary.n_simplices as i64;
            let reading = |dd: usize| {
                let p = 1i64 << dd;
                let per = (dd as i64 + 1) * (p - 1);
                FormulaReading { d: dd, m: (p - 2) * t, n: (kk - t) + per * t, triplets_per_toplex: per }
            };
            let by_dimension = reading(d);
            let by_vertex_count = reading(d + 1);
            let mut mismatches = Vec::new();
            let n_total = (n_eq + n_le) as i64;
            for (label, r) in [("d = dim", &by_dimension), ("d = vertex count", &by_vertex_count)] {
                if r.m != m as i64 {
                    mismatches.push(format!("{label}: m formula {} vs enumerated {m}", r.m));
                }
                if r.n != n_total {
                    mismatches.push(format!("{label}: n formula {} vs enumerated {n_total}", r.n));
                }
                if r.triplets_per_toplex * t != n_le as i64 {
                    mismatches
                        .push(format!("{label}: triplet formula {} vs enumerated {n_le}", r.triplets_per_toplex * t));
                }
            }
            Some(ClosedFormComparison {
                toplex_dim: d,
                enumerated_m_formula: inst.summary.n_toplexes * ((1usize << (d + 1)) - 2),
                by_dimension,
                by_vertex_count,
                mismatches,
            })
        }
        _ => None,
    };
    InstanceDimensions { m, n_eq, n_le, closed_form }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn flat(n: usize) -> CostVector<f64> {
        CostVector { costs: vec![1.0; n], alpha: None, beta: None }
    }

    fn model2(raw: &[Vec<usize>]) -> IlpInstance<f64> {
        let k = build_complex(raw).unwrap();
        let n = k.model2_variable_pairs().len();
        build_model2(&k, &flat(n)).unwrap()
    }

    #[test]
    fn model2_sizes() {
        let i = model2(&[vec![0, 1, 2]]);
        assert_eq!((i.n_vars(), i.eq_rows.len(), i.le_rows.len()), (6, 6, 6));
        let i = model2(&[vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!((i.n_vars(), i.eq_rows.len(), i.le_rows.len()), (12, 9, 12));
        let i = model2(&[vec![4]]);
        assert_eq!((i.n_vars(), i.eq_rows.len(), i.le_rows.len()), (0, 0, 0));
    }

    #[test]
    fn model2_row_shapes() {
        let i = model2(&[vec![0, 1, 2], vec![1, 2, 3], vec![3, 4]]);
        assert_eq!(i.eq_rows.len(), i.summary.n_simplices - i.summary.n_toplexes);
        for r in &i.eq_rows {
            let s = i.var_dict[r.coeffs[0].0].sigma;
            assert!(r.coeffs.iter().all(|&(j, a)| a == 1.0 && i.var_dict[j].sigma == s));
        }
        for r in &i.le_rows {
            let mut c: Vec<f64> = r.coeffs.iter().map(|e| e.1).collect();
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(c, vec![-1.0, 1.0]);
        }
    }

    #[test]
    fn model1_sizes() {
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let n = k.model1_variable_pairs().len();
        assert_eq!(n, 5);
        let i = build_model1(&k, &flat(n), CoverageSense::AtLeast).unwrap();
        assert_eq!(i.le_rows.len(), 3);
        assert_eq!(i.var_dict.iter().filter(|v| v.is_loop()).count(), 3);

        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let n = k.model1_variable_pairs().len();
        let i = build_model1(&k, &flat(n), CoverageSense::AtLeast).unwrap();
        let count = |p: &str| i.le_rows.iter().filter(|r| r.name.starts_with(p)).count();
        assert_eq!((count("conv1_"), count("conv2_"), count("conv3_"), count("cover_")), (6, 6, 6, 7));
    }

    #[test]
    fn cost_length_checked() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert!(build_model2(&k, &flat(5)).is_err());
    }

    #[test]
    fn closed_form_comparison_records() {
        let d = instance_dimensions(&model2(&[vec![0, 1, 2]]));
        assert_eq!(d.m, 6);
        let l = d.closed_form.unwrap();
        assert_eq!(l.by_dimension.m, 2);
        assert_eq!(l.by_vertex_count.m, 6);
        assert_eq!(l.enumerated_m_formula, 6);

        let d = instance_dimensions(&model2(&[vec![0, 1, 2, 3]]));
        assert_eq!(d.n_le, 24);
        let l = d.closed_form.unwrap();
        assert_eq!(l.by_dimension.triplets_per_toplex, 28);
        assert!(!l.mismatches.is_empty());

        let d = instance_dimensions(&model2(&[vec![0], vec![1]]));
        assert_eq!(d.m, 0);
        assert!(d.closed_form.is_none());
    }
}
