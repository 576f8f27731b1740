//! Combinatorial dynamics of a multivector field: the multimap
//! `x -> [x] + cl x`, its digraph on parts, strongly connected components and
//! the resulting Morse decomposition.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplexSet, SimplicialComplex};
use crate::error::Result;
use crate::homology::{classify, conley_index, is_critical, BettiVector, Label};
use crate::mvf::MultivectorField;

/// `[x] + cl x`.
pub fn transition(k: &SimplicialComplex, field: &MultivectorField, x: SimplexId) -> SimplexSet {
    let mut out = k.closure(&BTreeSet::from([x]));
    if let Some(p) = field.part_of(x) {
        out.extend(field.part(p).iter().copied());
    }
    out
}

/// Digraph on the parts of a field. Every node implicitly carries a
/// self-loop; `edges` lists only `v -> w` with `v != w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDigraph {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    succ: Vec<Vec<usize>>,
}

impl TransitionDigraph {
    pub fn from_edges(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let mut succ = vec![Vec::new(); n_nodes];
        for &(a, b) in &set {
            succ[a].push(b);
        }
        TransitionDigraph { n_nodes, edges: set.into_iter().collect(), succ }
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }
}

/// Edge `V -> W` iff `W` meets `cl V`.
pub fn build_digraph(k: &SimplicialComplex, field: &MultivectorField) -> TransitionDigraph {
    let mut edges = Vec::new();
    for (v, part) in field.parts().iter().enumerate() {
        for s in k.closure(part) {
            if let Some(w) = field.part_of(s) {
                edges.push((v, w));
            }
        }
    }
    TransitionDigraph::from_edges(field.len(), edges)
}

/// Tarjan's algorithm (iterative). Components are sorted internally and
/// ordered by their lowest node.
pub fn strongly_connected_components(g: &TransitionDigraph) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.n_nodes;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next successor position)
        let mut call = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = g.succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseSet {
    /// Part ids of the field.
    pub parts: Vec<usize>,
    pub simplices: SimplexSet,
    /// `mo` of the simplex union.
    pub exit_set: SimplexSet,
    pub conley_index: Option<BettiVector>,
    pub label: Option<Label>,
    /// Why the index could not be computed, if it could not.
    pub index_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseReport {
    pub morse_sets: Vec<MorseSet>,
    /// `(q, p)` when a path runs from Morse set `q` to Morse set `p`.
    pub poset: Vec<(usize, usize)>,
    pub sccs: Vec<Vec<usize>>,
    /// Per-part criticality.
    pub critical: Vec<bool>,
}

impl MorseReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Criticality of every part of a validated field.
pub fn criticality(k: &SimplicialComplex, field: &MultivectorField) -> Result<Vec<bool>> {
    field.parts().iter().map(|p| is_critical(k, p)).collect()
}

/// Morse sets are SCCs with at least two parts, or a single critical part.
/// Each gets its exit set, Conley index and a label relative to
/// `ambient_dim`.
pub fn morse_decomposition(
    k: &SimplicialComplex,
    field: &MultivectorField,
    critical: &[bool],
    ambient_dim: usize,
) -> MorseReport {
    let g = build_digraph(k, field);
    let sccs = strongly_connected_components(&g);
    let mut scc_of = vec![0; g.n_nodes];
    for (c, comp) in sccs.iter().enumerate() {
        for &v in comp {
            scc_of[v] = c;
        }
    }
    let selected: Vec<usize> =
        (0..sccs.len()).filter(|&c| sccs[c].len() >= 2 || critical.get(sccs[c][0]).copied().unwrap_or(false)).collect();

    let mut cond: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    for &(a, b) in &g.edges {
        if scc_of[a] != scc_of[b] {
            cond[scc_of[a]].insert(scc_of[b]);
        }
    }
    let mut rank_of = vec![usize::MAX; sccs.len()];
    for (i, &c) in selected.iter().enumerate() {
        rank_of[c] = i;
    }
    let mut poset = Vec::new();
    for (i, &c) in selected.iter().enumerate() {
        let mut seen = vec![false; sccs.len()];
        let mut stack: Vec<usize> = cond[c].iter().copied().collect();
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            if rank_of[x] != usize::MAX {
                poset.push((i, rank_of[x]));
            }
            stack.extend(cond[x].iter().copied());
        }
    }
    poset.sort_unstable();

    let morse_sets = selected
        .iter()
        .map(|&c| {
            let simplices: SimplexSet = sccs[c].iter().flat_map(|&p| field.part(p).iter().copied()).collect();
            let exit_set = k.mouth(&simplices);
            let (conley_index, label, index_error) = match conley_index(k, &simplices) {
                Ok(b) => {
                    let l = classify(&b, ambient_dim);
                    (Some(b), Some(l), None)
                }
                Err(e) => (None, None, Some(e.to_string())),
            };
            MorseSet { parts: sccs[c].clone(), simplices, exit_set, conley_index, label, index_error }
        })
        .collect();
    MorseReport { morse_sets, poset, sccs, critical: critical.to_vec() }
}

/// Union of the parts that lie in no Morse set.
pub fn gradient_part(field: &MultivectorField, report: &MorseReport) -> SimplexSet {
    let inside: BTreeSet<usize> = report.morse_sets.iter().flat_map(|m| m.parts.iter().copied()).collect();
    (0..field.len()).filter(|p| !inside.contains(p)).flat_map(|p| field.part(p).iter().copied()).collect()
}

/// Condensation digraph in DOT; Morse sets are filled.
pub fn condensation_dot(g: &TransitionDigraph, report: &MorseReport) -> String {
    let mut scc_of = vec![0; g.n_nodes];
    for (c, comp) in report.sccs.iter().enumerate() {
        for &v in comp {
            scc_of[v] = c;
        }
    }
    let morse_of: std::collections::HashMap<usize, usize> =
        report.morse_sets.iter().enumerate().map(|(i, m)| (scc_of[m.parts[0]], i)).collect();
    let mut out = String::from("digraph condensation {\n  node [shape=box, fontname=\"Helvetica\"];\n");
    for (c, comp) in report.sccs.iter().enumerate() {
        match morse_of.get(&c) {
            Some(&m) => {
                let set = &report.morse_sets[m];
                let idx = set.conley_index.as_ref().map(|b| b.to_string()).unwrap_or_else(|| "?".into());
                let label = set.label.map(|l| l.to_string()).unwrap_or_else(|| "unknown".into());
                let _ = writeln!(
                    out,
                    "  c{c} [label=\"M{m}: {} parts\\nindex {idx}\\n{label}\\nexit {}\", style=filled, fillcolor=\"#f4a582\"];",
                    comp.len(),
                    set.exit_set.len()
                );
            }
            None => {
                let _ = writeln!(out, "  c{c} [label=\"part {}\"];", comp[0]);
            }
        }
    }
    let mut cedges = BTreeSet::new();
    for &(a, b) in &g.edges {
        if scc_of[a] != scc_of[b] {
            cedges.insert((scc_of[a], scc_of[b]));
        }
    }
    for (a, b) in cedges {
        let _ = writeln!(out, "  c{a} -> c{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn singletons(k: &SimplicialComplex) -> MultivectorField {
        MultivectorField::from_parts(k, k.ids().map(|s| BTreeSet::from([s])).collect())
    }

    #[test]
    fn transition_examples() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let f = singletons(&k);
        let v = k.require(&[0]).unwrap();
        assert_eq!(transition(&k, &f, v), BTreeSet::from([v]));
        let t = k.require(&[0, 1, 2]).unwrap();
        assert_eq!(transition(&k, &f, t).len(), 7);
    }

    #[test]
    fn digraph_edges_follow_closure() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let t = k.require(&[0, 1, 2]).unwrap();
        let rest: SimplexSet = k.ids().filter(|&s| s != t).collect();
        let f = MultivectorField::from_parts(&k, vec![BTreeSet::from([t]), rest]);
        let g = build_digraph(&k, &f);
        let (pt, pr) = (f.part_of(t).unwrap(), 1 - f.part_of(t).unwrap());
        assert!(g.has_edge(pt, pr));
        assert!(!g.has_edge(pr, pt));

        let whole = MultivectorField::from_parts(&k, vec![k.ids().collect()]);
        assert!(build_digraph(&k, &whole).edges.is_empty());
    }

    #[test]
    fn scc_shapes() {
        let dag = TransitionDigraph::from_edges(4, [(0, 1), (1, 2), (0, 3)]);
        assert_eq!(strongly_connected_components(&dag), vec![vec![0], vec![1], vec![2], vec![3]]);
        let cycle = TransitionDigraph::from_edges(10, (0..10).map(|i| (i, (i + 1) % 10)));
        assert_eq!(strongly_connected_components(&cycle), vec![(0..10).collect::<Vec<_>>()]);
        let two = TransitionDigraph::from_edges(5, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 4), (4, 2)]);
        assert_eq!(strongly_connected_components(&two), vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn morse_on_singleton_field() {
        // Every simplex alone: all parts critical, no cycles.
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let f = singletons(&k);
        let crit = criticality(&k, &f).unwrap();
        assert!(crit.iter().all(|&c| c));
        let r = morse_decomposition(&k, &f, &crit, 1);
        assert_eq!(r.morse_sets.len(), 3);
        let edge = r
            .morse_sets
            .iter()
            .position(|m| m.simplices.len() == 1 && k.dim_of(*m.simplices.first().unwrap()) == 1)
            .unwrap();
        assert_eq!(r.morse_sets[edge].label, Some(Label::Repeller));
        assert_eq!(r.morse_sets[edge].exit_set.len(), 2);
        assert!(r.poset.iter().filter(|&&(q, _)| q == edge).count() == 2);
        assert!(gradient_part(&f, &r).is_empty());
        assert!(condensation_dot(&build_digraph(&k, &f), &r).starts_with("digraph"));
    }

    #[test]
    fn gradient_field_has_no_morse_sets() {
        // [0] with [0,1], and [1] critical: only the vertex [1] survives
        let k = build_complex(&[vec![0, 1]]).unwrap();
        let a: SimplexSet = [k.require(&[0]).unwrap(), k.require(&[0, 1]).unwrap()].into();
        let f = MultivectorField::from_parts(&k, vec![a.clone(), BTreeSet::from([k.require(&[1]).unwrap()])]);
        let crit = criticality(&k, &f).unwrap();
        let r = morse_decomposition(&k, &f, &crit, 1);
        assert_eq!(r.morse_sets.len(), 1);
        assert_eq!(r.morse_sets[0].label, Some(Label::Attractor));
        assert_eq!(gradient_part(&f, &r), a);
    }
}
