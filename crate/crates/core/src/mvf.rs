//! Multivector fields: partitions of a complex into convex sets, built from
//! 0/1 solutions of either model.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplexSet, SimplicialComplex};
use crate::cost::CostVector;
use crate::error::{Error, Result};
use crate::milp::{ModelKind, Solution, SolveStats, SolveStatus};
use crate::scalar::Scalar;

const UNASSIGNED: usize = usize::MAX;

/// A family of simplex sets, normally a partition of the complex into
/// multivectors. Parts are ordered by their lowest simplex handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivectorField {
    parts: Vec<SimplexSet>,
    /// Part of each simplex (the first one if parts overlap).
    index: Vec<usize>,
}

impl MultivectorField {
    /// Wraps `parts` without checking them; see [`validate`].
    pub fn from_parts(k: &SimplicialComplex, parts: Vec<SimplexSet>) -> Self {
        let mut parts = parts;
        parts.sort_by_key(|p| p.first().copied().unwrap_or(SimplexId(usize::MAX)));
        let mut index = vec![UNASSIGNED; k.len()];
        for (i, p) in parts.iter().enumerate() {
            for s in p {
                if let Some(slot) = index.get_mut(s.0) {
                    if *slot == UNASSIGNED {
                        *slot = i;
                    }
                }
            }
        }
        MultivectorField { parts, index }
    }

    pub fn parts(&self) -> &[SimplexSet] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `[x]`: id of the part containing `x`.
    pub fn part_of(&self, x: SimplexId) -> Option<usize> {
        self.index.get(x.0).copied().filter(|&p| p != UNASSIGNED)
    }

    pub fn part(&self, id: usize) -> &SimplexSet {
        &self.parts[id]
    }

    /// Every output part lies inside exactly one part of `coarser`.
    pub fn refines(&self, coarser: &MultivectorField) -> bool {
        self.parts.iter().all(|p| {
            let mut owners = p.iter().map(|&s| coarser.part_of(s));
            match owners.next() {
                Some(Some(first)) => owners.all(|o| o == Some(first)),
                _ => false,
            }
        })
    }

    pub fn to_json(&self, k: &SimplicialComplex, model: ModelKind) -> String {
        let parts: Vec<Vec<Vec<usize>>> =
            self.parts.iter().map(|p| p.iter().map(|&s| k.vertices(s).to_vec()).collect()).collect();
        serde_json::to_string(&FieldFile { parts, model: model.number() }).expect("field serializes")
    }

    pub fn from_json(k: &SimplicialComplex, text: &str) -> Result<(Self, ModelKind)> {
        let file: FieldFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let model = match file.model {
            1 => ModelKind::General,
            2 => ModelKind::OneToplex,
            m => return Err(Error::Parse { line: 0, msg: format!("unknown model {m}") }),
        };
        let parts = file
            .parts
            .iter()
            .map(|p| p.iter().map(|v| k.require(v)).collect::<Result<SimplexSet>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::from_parts(k, parts), model))
    }
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    parts: Vec<Vec<Vec<usize>>>,
    model: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Violation {
    Overlap { simplex: SimplexId, parts: (usize, usize) },
    Uncovered { simplex: SimplexId },
    EmptyPart { part: usize },
    NonConvex { part: usize, witness: (SimplexId, SimplexId, SimplexId) },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the partition axioms and the convexity of every part.
pub fn validate(k: &SimplicialComplex, field: &MultivectorField) -> ValidationReport {
    let mut violations = Vec::new();
    let mut owner = vec![UNASSIGNED; k.len()];
    for (i, p) in field.parts.iter().enumerate() {
        if p.is_empty() {
            violations.push(Violation::EmptyPart { part: i });
        }
        for &s in p {
            if owner[s.0] == UNASSIGNED {
                owner[s.0] = i;
            } else {
                violations.push(Violation::Overlap { simplex: s, parts: (owner[s.0], i) });
            }
        }
    }
    for s in k.ids() {
        if owner[s.0] == UNASSIGNED {
            violations.push(Violation::Uncovered { simplex: s });
        }
    }
    for (i, p) in field.parts.iter().enumerate() {
        if let Some(witness) = k.convexity_witness(p) {
            violations.push(Violation::NonConvex { part: i, witness });
        }
    }
    ValidationReport { violations }
}

/// Toplex chosen for every simplex, read off a one-toplex solution.
fn model2_owner<T: Scalar>(k: &SimplicialComplex, values: &[T]) -> Result<Vec<SimplexId>> {
    let pairs = k.model2_variable_pairs();
    if values.len() != pairs.len() {
        return Err(Error::Contract(format!("{} values for {} model-2 variables", values.len(), pairs.len())));
    }
    let tol = T::feas_tol();
    let mut owner: Vec<Option<SimplexId>> = k.ids().map(|s| k.is_toplex(s).then_some(s)).collect();
    for (&(s, t), &v) in pairs.iter().zip(values) {
        let one = (v - T::one()).abs() <= tol;
        if !one && v.abs() > tol {
            return Err(Error::Contract(format!("value {v} of z({s:?}, {t:?}) is not binary")));
        }
        if one {
            if let Some(prev) = owner[s.0] {
                return Err(Error::Contract(format!("{s:?} assigned to both {prev:?} and {t:?}")));
            }
            owner[s.0] = Some(t);
        }
    }
    owner
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| Error::Contract(format!("#{i} is assigned to no toplex"))))
        .collect()
}

/// `V_tau = { sigma | z(sigma, tau) = 1 } + {tau}` for each toplex.
///
/// Rejects non-binary or infeasible input; the result always validates for
/// feasible input, and a failing validation is reported as a contract error.
pub fn extract_model2<T: Scalar>(k: &SimplicialComplex, values: &[T]) -> Result<MultivectorField> {
    let owner = model2_owner(k, values)?;
    for (si, sj, t) in k.model2_triplets() {
        if owner[si.0] == t && owner[sj.0] != t {
            return Err(Error::Contract(format!(
                "z({si:?}, {t:?}) = 1 but z({sj:?}, {t:?}) = 0 violates a convexity row"
            )));
        }
    }
    let parts = parts_from_owner(k, &owner);
    let field = MultivectorField::from_parts(k, parts);
    let report = validate(k, &field);
    if let Some(v) = report.violations.first() {
        return Err(Error::Contract(format!("extracted field is invalid: {v:?}")));
    }
    Ok(field)
}

fn parts_from_owner(k: &SimplicialComplex, owner: &[SimplexId]) -> Vec<SimplexSet> {
    k.toplexes().iter().map(|&t| k.ids().filter(|s| owner[s.0] == t).collect()).collect()
}

/// Toplex owning each simplex after the shaving procedure.
pub fn canonical_owner(k: &SimplicialComplex) -> Vec<SimplexId> {
    let tops_above: Vec<Vec<SimplexId>> =
        k.ids().map(|s| k.cofaces(s).into_iter().filter(|&c| k.is_toplex(c)).collect()).collect();
    let mut owner = vec![SimplexId(usize::MAX); k.len()];
    let mut work: Vec<SimplexSet> = k.connected_components().into_iter().map(|c| c.into_iter().collect()).collect();
    while let Some(part) = work.pop() {
        let tops: Vec<SimplexId> = part.iter().copied().filter(|&s| k.is_toplex(s)).collect();
        if tops.len() == 1 {
            for &s in &part {
                owner[s.0] = tops[0];
            }
            continue;
        }
        let tau = tops[0];
        // members whose only toplex inside the part is tau
        let (shaved, rest): (SimplexSet, SimplexSet) =
            part.iter().partition(|s| tops_above[s.0].iter().filter(|t| part.contains(t)).all(|&t| t == tau));
        work.push(rest);
        work.push(shaved);
    }
    owner
}

/// Feasible binary one-toplex solution from the shaving construction,
/// evaluated under `costs` (aligned with the model-2 variables).
pub fn canonical_feasible<T: Scalar>(k: &SimplicialComplex, costs: &CostVector<T>) -> Result<Solution<T>> {
    let pairs = k.model2_variable_pairs();
    if costs.len() != pairs.len() {
        return Err(Error::Parameter(format!("{} costs for {} model-2 variables", costs.len(), pairs.len())));
    }
    let owner = canonical_owner(k);
    let values: Vec<T> = pairs.iter().map(|&(s, t)| if owner[s.0] == t { T::one() } else { T::zero() }).collect();
    let objective = values.iter().zip(&costs.costs).map(|(&v, &c)| v * c).sum();
    Ok(Solution { values, objective, status: SolveStatus::Feasible, stats: SolveStats::default() })
}

/// Connected components of the relation `z(sigma, tau) = 1` on a
/// generalized-model solution. Convexity is not guaranteed.
pub fn extract_model1<T: Scalar>(k: &SimplicialComplex, values: &[T]) -> Result<MultivectorField> {
    let pairs = k.model1_variable_pairs();
    if values.len() != pairs.len() {
        return Err(Error::Contract(format!("{} values for {} model-1 variables", values.len(), pairs.len())));
    }
    let tol = T::feas_tol();
    let mut parent: Vec<usize> = (0..k.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut covered = vec![false; k.len()];
    for (&(s, t), &v) in pairs.iter().zip(values) {
        let one = (v - T::one()).abs() <= tol;
        if !one && v.abs() > tol {
            return Err(Error::Contract(format!("value {v} of z({s:?}, {t:?}) is not binary")));
        }
        if one {
            covered[s.0] = true;
            covered[t.0] = true;
            let (a, b) = (find(&mut parent, s.0), find(&mut parent, t.0));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Err(Error::Coverage(SimplexId(i)));
    }
    let mut groups: Vec<SimplexSet> = vec![SimplexSet::new(); k.len()];
    for s in k.ids() {
        let r = find(&mut parent, s.0);
        groups[r].insert(s);
    }
    groups.retain(|g| !g.is_empty());
    Ok(MultivectorField::from_parts(k, groups))
}

/// Splits parts until all are convex. A non-convex part with witness
/// `x < y < z` is first split as `cl(rho) & V` versus the rest for a maximal
/// `rho` in `V` above `x` (lowest handle first, both pieces must be convex);
/// otherwise `{z}` is peeled off. The output refines the input.
pub fn repair_convexity(k: &SimplicialComplex, field: &MultivectorField) -> MultivectorField {
    let mut done = Vec::new();
    let mut work: Vec<SimplexSet> = field.parts.iter().rev().cloned().collect();
    while let Some(part) = work.pop() {
        let Some((x, _, z)) = k.convexity_witness(&part) else {
            done.push(part);
            continue;
        };
        let maximal = part.iter().copied().filter(|&r| k.le(x, r) && !part.iter().any(|&o| k.lt(r, o)));
        let mut split = None;
        for rho in maximal {
            let inner: SimplexSet = k.closure(&BTreeSet::from([rho])).intersection(&part).copied().collect();
            let outer: SimplexSet = part.difference(&inner).copied().collect();
            if !outer.is_empty() && k.is_convex(&inner) && k.is_convex(&outer) {
                split = Some((inner, outer));
                break;
            }
        }
        match split {
            Some((a, b)) => {
                done.push(a);
                done.push(b);
            }
            None => {
                let rest: SimplexSet = part.iter().copied().filter(|&s| s != z).collect();
                done.push(BTreeSet::from([z]));
                work.push(rest);
            }
        }
    }
    MultivectorField::from_parts(k, done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::milp::{build_model1, build_model2, CoverageSense};

    fn flat(n: usize) -> CostVector<f64> {
        CostVector { costs: vec![0.0; n], alpha: None, beta: None }
    }

    fn ids(k: &SimplicialComplex, raw: &[&[usize]]) -> SimplexSet {
        raw.iter().map(|v| k.require(v).unwrap()).collect()
    }

    #[test]
    fn canonical_is_feasible_and_extracts() {
        for raw in [
            vec![vec![0, 1, 2]],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![vec![0, 1, 2, 3], vec![2, 3, 4], vec![4, 5], vec![7]],
        ] {
            let k = build_complex(&raw).unwrap();
            let n = k.model2_variable_pairs().len();
            let sol = canonical_feasible(&k, &flat(n)).unwrap();
            let inst = build_model2(&k, &flat(n)).unwrap();
            assert_eq!(inst.max_violation(&sol.values), 0.0);
            let f = extract_model2(&k, &sol.values).unwrap();
            assert_eq!(f.len(), k.toplexes().len());
            assert!(validate(&k, &f).is_valid());
        }
    }

    #[test]
    fn two_triangles_shared_faces_stay_with_retained_part() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let owner = canonical_owner(&k);
        let t2 = k.require(&[1, 2, 3]).unwrap();
        for shared in [&[1usize][..], &[2], &[1, 2]] {
            assert_eq!(owner[k.require(shared).unwrap().0], t2);
        }
        assert_eq!(owner[k.require(&[0, 1]).unwrap().0], k.require(&[0, 1, 2]).unwrap());
    }

    #[test]
    fn extraction_rejects_bad_input() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        assert!(extract_model2(&k, &[0.5; 6]).is_err());
        assert!(extract_model2(&k, &[1.0; 5]).is_err());
        // vertex [0] to the triangle without its edge [0,1]: violates a row
        let pairs = k.model2_variable_pairs();
        let bad: Vec<f64> =
            pairs.iter().map(|&(s, _)| if s == k.require(&[0, 1]).unwrap() { 0.0 } else { 1.0 }).collect();
        assert!(extract_model2(&k, &bad).is_err());
        let f = extract_model2(&k, &[1.0; 6]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.part(0).len(), 7);
    }

    #[test]
    fn isolated_vertices() {
        let k = build_complex(&[vec![0], vec![1], vec![2]]).unwrap();
        let f = extract_model2::<f64>(&k, &[]).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.parts().iter().all(|p| p.len() == 1));
    }

    #[test]
    fn validation_reports() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let all: SimplexSet = k.ids().collect();
        let f = MultivectorField::from_parts(&k, vec![all.clone(), ids(&k, &[&[0]]), SimplexSet::new()]);
        let r = validate(&k, &f);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Overlap { .. })));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::EmptyPart { .. })));
        let f = MultivectorField::from_parts(&k, vec![ids(&k, &[&[0], &[0, 1, 2]])]);
        let r = validate(&k, &f);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Uncovered { .. })));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::NonConvex { .. })));
    }

    /// Disk of three triangles around vertex 4, with a generalized-model
    /// solution whose big component skips the edge [1,3].
    fn counterexample() -> (SimplicialComplex, Vec<f64>) {
        let k = build_complex(&[vec![1, 2, 4], vec![2, 3, 4], vec![1, 3, 4]]).unwrap();
        let ones: Vec<(&[usize], &[usize])> = vec![
            (&[1], &[1, 2]),
            (&[1, 4], &[1, 2, 4]),
            (&[1, 4], &[1, 3, 4]),
            (&[2], &[1, 2]),
            (&[2], &[2, 3]),
            (&[2], &[2, 3, 4]),
            (&[2], &[2, 4]),
            (&[2, 3], &[2, 3, 4]),
            (&[2, 4], &[2, 3, 4]),
            (&[3, 4], &[1, 3, 4]),
            (&[3, 4], &[2, 3, 4]),
            (&[3], &[3]),
            (&[4], &[4]),
            (&[1, 3], &[1, 3]),
        ];
        let set: BTreeSet<(SimplexId, SimplexId)> =
            ones.iter().map(|(a, b)| (k.require(a).unwrap(), k.require(b).unwrap())).collect();
        let values = k.model1_variable_pairs().iter().map(|p| if set.contains(p) { 1.0 } else { 0.0 }).collect();
        (k, values)
    }

    #[test]
    fn model1_counterexample_and_repair() {
        let (k, values) = counterexample();
        let n = values.len();
        let inst = build_model1(&k, &flat(n), CoverageSense::AtLeast).unwrap();
        assert!(inst.is_feasible(&values));
        let raw = extract_model1(&k, &values).unwrap();
        let big = raw.parts().iter().find(|p| p.len() == 10).expect("10-simplex part");
        let (x, y, z) = k.convexity_witness(big).unwrap();
        assert_eq!(k.vertices(y), &[1, 3]);
        assert!(k.lt(x, y) && k.lt(y, z));

        let fixed = repair_convexity(&k, &raw);
        assert!(validate(&k, &fixed).is_valid());
        assert!(fixed.refines(&raw));
        assert!(fixed.len() > raw.len());
        let again = repair_convexity(&k, &fixed);
        assert_eq!(again, fixed);
    }

    #[test]
    fn model1_components_and_coverage() {
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let pairs = k.model1_variable_pairs();
        let loops: Vec<f64> = pairs.iter().map(|&(s, t)| if s == t { 1.0 } else { 0.0 }).collect();
        let f = extract_model1(&k, &loops).unwrap();
        assert_eq!(f.len(), 3);
        let chain: Vec<f64> = pairs.iter().map(|&(s, t)| if s != t { 1.0 } else { 0.0 }).collect();
        assert_eq!(extract_model1(&k, &chain).unwrap().len(), 1);
        let none = vec![0.0; pairs.len()];
        assert!(matches!(extract_model1(&k, &none), Err(Error::Coverage(_))));
    }

    #[test]
    fn json_round_trip() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let n = k.model2_variable_pairs().len();
        let f = extract_model2(&k, &canonical_feasible(&k, &flat(n)).unwrap().values).unwrap();
        let text = f.to_json(&k, ModelKind::OneToplex);
        let (g, model) = MultivectorField::from_json(&k, &text).unwrap();
        assert_eq!((g, model), (f, ModelKind::OneToplex));
    }
}
