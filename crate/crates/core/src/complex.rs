//! Finite simplicial complexes viewed as finite T0 spaces through their face
//! poset.
//!
//! Simplices get dense handles ([`SimplexId`]) assigned in lexicographic
//! order of their sorted vertex lists. Every downstream matrix (costs, LP
//! columns, boundary matrices) is indexed by these handles.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense handle of a simplex inside one [`SimplicialComplex`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexId(pub usize);

impl SimplexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for SimplexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Sorts the ids; fails on an empty list or a repeated vertex.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedSimplex { vertices, reason: "empty vertex list".into() });
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedSimplex { vertices, reason: "duplicate vertex".into() });
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Face test `self <= other` on sorted vertex lists.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        is_sorted_subset(&self.vertices, &other.vertices)
    }
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// A set of simplices of one complex, kept sorted by handle.
pub type SimplexSet = BTreeSet<SimplexId>;

/// Face-closed family of simplices with precomputed facet/cofacet adjacency.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
    lookup: HashMap<Vec<usize>, SimplexId>,
    facets: Vec<Vec<SimplexId>>,
    cofacets: Vec<Vec<SimplexId>>,
    toplexes: Vec<SimplexId>,
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    simplices: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Face closure of the given vertex lists.
    pub fn build(raw: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for list in raw {
            let s = Simplex::new(list.clone())?;
            if s.vertices.len() > 24 {
                return Err(Error::MalformedSimplex { vertices: s.vertices, reason: "more than 24 vertices".into() });
            }
            let verts = s.vertices();
            let n = verts.len();
            for mask in 1u32..(1u32 << n) {
                let face: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| verts[i]).collect();
                all.insert(face);
            }
        }
        let simplices: Vec<Simplex> = all.into_iter().map(|vertices| Simplex { vertices }).collect();
        let lookup: HashMap<Vec<usize>, SimplexId> =
            simplices.iter().enumerate().map(|(i, s)| (s.vertices.clone(), SimplexId(i))).collect();
        let mut facets = vec![Vec::new(); simplices.len()];
        let mut cofacets = vec![Vec::new(); simplices.len()];
        for (i, s) in simplices.iter().enumerate() {
            if s.vertices.len() < 2 {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let mut f = s.vertices.clone();
                f.remove(skip);
                let fid = lookup[&f];
                facets[i].push(fid);
                cofacets[fid.0].push(SimplexId(i));
            }
        }
        for list in facets.iter_mut().chain(cofacets.iter_mut()) {
            list.sort_unstable();
        }
        let toplexes = (0..simplices.len()).filter(|&i| cofacets[i].is_empty()).map(SimplexId).collect();
        Ok(SimplicialComplex { simplices, lookup, facets, cofacets, toplexes })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ComplexFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        Self::build(&file.simplices)
    }

    /// All simplices in handle order.
    pub fn to_json(&self) -> String {
        let file = ComplexFile { simplices: self.simplices.iter().map(|s| s.vertices.clone()).collect() };
        serde_json::to_string(&file).expect("complex serializes")
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = SimplexId> + ExactSizeIterator {
        (0..self.simplices.len()).map(SimplexId)
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id.0]
    }

    pub fn vertices(&self, id: SimplexId) -> &[usize] {
        &self.simplices[id.0].vertices
    }

    pub fn dim_of(&self, id: SimplexId) -> usize {
        self.simplices[id.0].dim()
    }

    /// Maximal simplex dimension; 0 for the empty complex.
    pub fn dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn id_of(&self, vertices: &[usize]) -> Option<SimplexId> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        self.lookup.get(&v).copied()
    }

    /// Like [`Self::id_of`] but reports an unknown simplex as an error.
    pub fn require(&self, vertices: &[usize]) -> Result<SimplexId> {
        self.id_of(vertices).ok_or_else(|| Error::UnknownSimplex(vertices.to_vec()))
    }

    pub fn facets(&self, id: SimplexId) -> &[SimplexId] {
        &self.facets[id.0]
    }

    pub fn cofacets(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofacets[id.0]
    }

    pub fn toplexes(&self) -> &[SimplexId] {
        &self.toplexes
    }

    pub fn is_toplex(&self, id: SimplexId) -> bool {
        self.cofacets[id.0].is_empty()
    }

    /// Vertex ids used by the complex, ascending.
    pub fn vertex_ids(&self) -> Vec<usize> {
        self.simplices.iter().filter(|s| s.vertices.len() == 1).map(|s| s.vertices[0]).collect()
    }

    /// Face order `a <= b`.
    pub fn le(&self, a: SimplexId, b: SimplexId) -> bool {
        a == b || self.simplices[a.0].is_face_of(&self.simplices[b.0])
    }

    /// Strict face order `a < b`.
    pub fn lt(&self, a: SimplexId, b: SimplexId) -> bool {
        a != b && self.simplices[a.0].is_face_of(&self.simplices[b.0])
    }

    /// All faces of `id` including itself, in handle order.
    pub fn faces(&self, id: SimplexId) -> Vec<SimplexId> {
        let verts = &self.simplices[id.0].vertices;
        let n = verts.len();
        let mut out: Vec<SimplexId> = (1u32..(1u32 << n))
            .map(|mask| {
                let face: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| verts[i]).collect();
                self.lookup[&face]
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Proper faces of `id`, in handle order.
    pub fn proper_faces(&self, id: SimplexId) -> Vec<SimplexId> {
        let mut f = self.faces(id);
        f.retain(|&x| x != id);
        f
    }

    /// All cofaces of `id` including itself.
    pub fn cofaces(&self, id: SimplexId) -> Vec<SimplexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend_from_slice(&self.cofacets[x.0]);
            }
        }
        seen.into_iter().collect()
    }

    /// `cl A = { x | x <= a for some a in A }`.
    pub fn closure(&self, a: &SimplexSet) -> SimplexSet {
        let mut out = SimplexSet::new();
        let mut stack: Vec<SimplexId> = a.iter().copied().collect();
        while let Some(x) = stack.pop() {
            if out.insert(x) {
                stack.extend(self.facets[x.0].iter().copied().filter(|f| !out.contains(f)));
            }
        }
        out
    }

    /// `mo A = cl A \ A`.
    pub fn mouth(&self, a: &SimplexSet) -> SimplexSet {
        let mut cl = self.closure(a);
        cl.retain(|x| !a.contains(x));
        cl
    }

    pub fn is_closed(&self, a: &SimplexSet) -> bool {
        a.iter().all(|x| self.facets[x.0].iter().all(|f| a.contains(f)))
    }

    /// First triple `x <= y <= z` with `x, z` in `a` and `y` outside, or
    /// `None` when `a` is convex. Triples are searched in handle order.
    pub fn convexity_witness(&self, a: &SimplexSet) -> Option<(SimplexId, SimplexId, SimplexId)> {
        for &z in a {
            for y in self.proper_faces(z) {
                if a.contains(&y) {
                    continue;
                }
                if let Some(x) = self.proper_faces(y).into_iter().find(|x| a.contains(x)) {
                    return Some((x, y, z));
                }
            }
        }
        None
    }

    pub fn is_convex(&self, a: &SimplexSet) -> bool {
        self.convexity_witness(a).is_none()
    }

    /// Connected components of the 1-skeleton, as lists of simplices
    /// (handle order); components are ordered by their lowest handle.
    pub fn connected_components(&self) -> Vec<Vec<SimplexId>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = Vec::new();
            let mut stack = vec![start];
            comp[start] = c;
            while let Some(x) = stack.pop() {
                members.push(SimplexId(x));
                for &y in self.facets[x].iter().chain(&self.cofacets[x]) {
                    if comp[y.0] == usize::MAX {
                        comp[y.0] = c;
                        stack.push(y.0);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Dimension of every toplex when they all agree.
    pub fn pure_dim(&self) -> Option<usize> {
        let mut dims = self.toplexes.iter().map(|&t| self.dim_of(t));
        let first = dims.next()?;
        dims.all(|d| d == first).then_some(first)
    }

    /// Pairs `(sigma, tau)` with `sigma` a proper face of a toplex `tau`,
    /// sorted by `(sigma, tau)`. These are the variables of the one-toplex
    /// model.
    pub fn model2_variable_pairs(&self) -> Vec<(SimplexId, SimplexId)> {
        let mut out: Vec<(SimplexId, SimplexId)> =
            self.toplexes.iter().flat_map(|&t| self.proper_faces(t).into_iter().map(move |s| (s, t))).collect();
        out.sort_unstable();
        out
    }

    /// Triples `(si, sj, tau)` with `si` a facet of `sj` and `sj` a proper
    /// face of the toplex `tau`, sorted.
    pub fn model2_triplets(&self) -> Vec<(SimplexId, SimplexId, SimplexId)> {
        let mut out = Vec::new();
        for &t in &self.toplexes {
            for sj in self.proper_faces(t) {
                for &si in &self.facets[sj.0] {
                    out.push((si, sj, t));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Pairs `(sigma, tau)` with `sigma <= tau`, loops included, sorted.
    /// These are the variables of the generalized model.
    pub fn model1_variable_pairs(&self) -> Vec<(SimplexId, SimplexId)> {
        let mut out: Vec<(SimplexId, SimplexId)> =
            self.ids().flat_map(|t| self.faces(t).into_iter().map(move |s| (s, t))).collect();
        out.sort_unstable();
        out
    }

    /// All strict chains `si < sj < tau`, sorted.
    pub fn model1_triplets(&self) -> Vec<(SimplexId, SimplexId, SimplexId)> {
        let mut out = Vec::new();
        for t in self.ids() {
            for sj in self.proper_faces(t) {
                for si in self.proper_faces(sj) {
                    out.push((si, sj, t));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Shorthand for [`SimplicialComplex::build`].
pub fn build_complex(raw: &[Vec<usize>]) -> Result<SimplicialComplex> {
    SimplicialComplex::build(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(k: &SimplicialComplex, lists: &[&[usize]]) -> SimplexSet {
        lists.iter().map(|v| k.id_of(v).unwrap()).collect()
    }

    fn triangle() -> SimplicialComplex {
        build_complex(&[vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn build_counts() {
        let k = triangle();
        assert_eq!(k.len(), 7);
        assert_eq!(k.toplexes().len(), 1);

        let k = build_complex(&[vec![0], vec![1]]).unwrap();
        assert_eq!((k.len(), k.toplexes().len()), (2, 2));

        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!((k.len(), k.toplexes().len()), (11, 2));
    }

    #[test]
    fn build_rejects_duplicates_and_empty() {
        assert!(matches!(build_complex(&[vec![0, 0, 1]]), Err(Error::MalformedSimplex { .. })));
        assert!(matches!(build_complex(&[vec![]]), Err(Error::MalformedSimplex { .. })));
    }

    #[test]
    fn handles_are_lexicographic() {
        let k = triangle();
        let lists: Vec<Vec<usize>> = k.ids().map(|i| k.vertices(i).to_vec()).collect();
        assert_eq!(lists, vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![1], vec![1, 2], vec![2]]);
    }

    #[test]
    fn closure_examples() {
        let k = triangle();
        let all: SimplexSet = k.ids().collect();
        assert_eq!(k.closure(&set(&k, &[&[0, 1, 2]])), all);
        assert!(k.closure(&SimplexSet::new()).is_empty());
        assert_eq!(k.closure(&set(&k, &[&[0, 1], &[2]])), set(&k, &[&[0], &[1], &[0, 1], &[2]]));
    }

    #[test]
    fn mouth_examples() {
        let k = triangle();
        assert!(k.mouth(&set(&k, &[&[1]])).is_empty());
        assert_eq!(k.mouth(&set(&k, &[&[0, 1, 2]])).len(), 6);
        assert!(k.mouth(&set(&k, &[&[0, 1], &[0], &[1]])).is_empty());
    }

    #[test]
    fn convexity_examples() {
        let k = triangle();
        assert!(k.is_convex(&set(&k, &[&[0], &[0, 1]])));
        let w = k.convexity_witness(&set(&k, &[&[0], &[0, 1, 2]])).unwrap();
        assert_eq!(w, (k.id_of(&[0]).unwrap(), k.id_of(&[0, 1]).unwrap(), k.id_of(&[0, 1, 2]).unwrap()));
    }

    #[test]
    fn counterexample_part_is_not_convex() {
        // Disk made of three triangles around x4, the set misses [x1, x3].
        let k = build_complex(&[vec![1, 2, 4], vec![2, 3, 4], vec![1, 3, 4]]).unwrap();
        let v = set(&k, &[&[1], &[1, 2], &[1, 4], &[1, 2, 4], &[2], &[2, 4], &[2, 3], &[2, 3, 4], &[3, 4], &[1, 3, 4]]);
        assert_eq!(v.len(), 10);
        let (x, y, z) = k.convexity_witness(&v).unwrap();
        assert_eq!(k.vertices(x), &[1]);
        assert_eq!(k.vertices(y), &[1, 3]);
        assert_eq!(k.vertices(z), &[1, 3, 4]);
    }

    #[test]
    fn model2_pairs_examples() {
        assert_eq!(triangle().model2_variable_pairs().len(), 6);
        let two = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(two.model2_variable_pairs().len(), 12);
        let pt = build_complex(&[vec![5]]).unwrap();
        assert!(pt.model2_variable_pairs().is_empty());
    }

    #[test]
    fn model2_triplet_examples() {
        assert_eq!(triangle().model2_triplets().len(), 6);
        let tet = build_complex(&[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(tet.model2_triplets().len(), 24);
        let edges = build_complex(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(edges.model2_triplets().is_empty());
    }

    #[test]
    fn model1_triplet_examples() {
        assert!(build_complex(&[vec![0, 1]]).unwrap().model1_triplets().is_empty());
        assert_eq!(triangle().model1_triplets().len(), 6);
        let tet = build_complex(&[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(tet.model1_triplets().len(), brute_force_chains(&tet));
        assert_eq!(tet.model1_triplets().len(), 60);
    }

    fn brute_force_chains(k: &SimplicialComplex) -> usize {
        let mut n = 0;
        for a in k.ids() {
            for b in k.ids() {
                for c in k.ids() {
                    if k.lt(a, b) && k.lt(b, c) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn json_roundtrip() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let k2 = SimplicialComplex::from_json(&k.to_json()).unwrap();
        assert_eq!(k.to_json(), k2.to_json());
        let k3 = SimplicialComplex::from_json(r#"{"simplices": [[2,1,0]]}"#).unwrap();
        assert_eq!(k3.len(), 7);
    }

    #[test]
    fn components() {
        let k = build_complex(&[vec![0, 1], vec![1, 2], vec![5, 6]]).unwrap();
        let c = k.connected_components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].len(), 5);
        assert_eq!(c[1].len(), 3);
    }
}
