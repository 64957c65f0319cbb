//! Finite simplicial complexes and the combinatorial operations on them.
//!
//! Vertices are non-negative integers. A [`Simplex`] is a strictly increasing
//! vertex list; a [`SimplicialComplex`] stores its full downward-closed face
//! family in canonical order: by dimension first, lexicographically within a
//! dimension. Every face therefore has a stable integer id which the chain
//! complexes and deleted products use as their basis order.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A non-empty simplex given by its strictly increasing vertex list.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Builds a simplex from vertices in any order. Duplicates and the empty
    /// list are rejected.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("a simplex needs at least one vertex"));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate vertex in {vertices:?}")));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// Codimension-one faces with their incidence signs: removing the `i`-th
    /// vertex carries sign `(-1)^i`. A vertex has no facets.
    pub fn facets(&self) -> impl Iterator<Item = (Simplex, i8)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            (Simplex(v), if i % 2 == 0 { 1 } else { -1 })
        })
    }

    /// All non-empty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1u64 << n))
            .map(|mask| {
                Simplex(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let set: BTreeSet<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        Simplex(set.into_iter().collect())
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl TryFrom<Vec<usize>> for Simplex {
    type Error = crate::Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

/// An ordered sequence of pairwise vertex-disjoint simplices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Simplex>", into = "Vec<Simplex>")]
pub struct FaceTuple(Vec<Simplex>);

impl FaceTuple {
    pub fn new(faces: Vec<Simplex>) -> Result<Self> {
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                if !faces[i].is_disjoint(&faces[j]) {
                    return Err(invalid(format!(
                        "faces {} and {} of the tuple intersect",
                        faces[i], faces[j]
                    )));
                }
            }
        }
        Ok(FaceTuple(faces))
    }

    pub fn empty() -> Self {
        FaceTuple(Vec::new())
    }

    pub fn faces(&self) -> &[Simplex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().map(Simplex::dim).sum()
    }

    /// Sorted union of the vertex sets of all faces.
    pub fn union_vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.0.iter().flat_map(|s| s.0.iter().copied()).collect();
        set.into_iter().collect()
    }
}

impl TryFrom<Vec<Simplex>> for FaceTuple {
    type Error = crate::Error;
    fn try_from(v: Vec<Simplex>) -> Result<Self> {
        FaceTuple::new(v)
    }
}

impl From<FaceTuple> for Vec<Simplex> {
    fn from(t: FaceTuple) -> Self {
        t.0
    }
}

/// Bitset over the vertex positions of one complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct VertexMask(Vec<u64>);

impl VertexMask {
    pub(crate) fn empty(n_vertices: usize) -> Self {
        VertexMask(vec![0; n_vertices.div_ceil(64).max(1)])
    }

    pub(crate) fn insert(&mut self, pos: usize) {
        self.0[pos / 64] |= 1 << (pos % 64);
    }

    pub(crate) fn intersects(&self, other: &VertexMask) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn union(&self, other: &VertexMask) -> VertexMask {
        VertexMask(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
}

/// A finite simplicial complex, possibly empty.
#[derive(Clone)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    faces: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    dim_ranges: Vec<Range<usize>>,
    facets: Vec<Simplex>,
    boundary: Vec<Vec<(usize, i8)>>,
    masks: Vec<VertexMask>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.faces == other.faces
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("facets", &self.facets)
            .finish()
    }
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::from_closed_set(BTreeSet::new())
    }

    /// Downward closure of the given facets. Facets contained in other facets
    /// are absorbed.
    pub fn from_facets<I, F>(facets: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: Into<Vec<usize>>,
    {
        let mut set = BTreeSet::new();
        for facet in facets {
            let s = Simplex::new(facet.into())?;
            if set.contains(&s) {
                continue;
            }
            set.extend(s.faces());
        }
        Ok(Self::from_closed_set(set))
    }

    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(simplices: I) -> Self {
        let mut set = BTreeSet::new();
        for s in simplices {
            if !set.contains(&s) {
                set.extend(s.faces());
            }
        }
        Self::from_closed_set(set)
    }

    /// Caller guarantees `set` is downward closed.
    fn from_closed_set(set: BTreeSet<Simplex>) -> Self {
        let faces: Vec<Simplex> = set.into_iter().collect();
        let index: HashMap<Simplex, usize> =
            faces.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let vertices: Vec<usize> = faces
            .iter()
            .take_while(|s| s.dim() == 0)
            .map(|s| s.0[0])
            .collect();
        let top = faces.last().map(|s| s.dim() + 1).unwrap_or(0);
        let mut dim_ranges = Vec::with_capacity(top);
        let mut start = 0;
        for k in 0..top {
            let end = start + faces[start..].iter().take_while(|s| s.dim() == k).count();
            dim_ranges.push(start..end);
            start = end;
        }
        let boundary: Vec<Vec<(usize, i8)>> = faces
            .iter()
            .map(|s| s.facets().map(|(f, sign)| (index[&f], sign)).collect())
            .collect();
        let position: HashMap<usize, usize> =
            vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let masks = faces
            .iter()
            .map(|s| {
                let mut m = VertexMask::empty(vertices.len());
                for v in &s.0 {
                    m.insert(position[v]);
                }
                m
            })
            .collect();
        let mut is_facet = vec![true; faces.len()];
        for b in &boundary {
            for (f, _) in b {
                is_facet[*f] = false;
            }
        }
        let mut facets: Vec<Simplex> = faces
            .iter()
            .zip(&is_facet)
            .filter(|(_, keep)| **keep)
            .map(|(s, _)| s.clone())
            .collect();
        facets.sort_by(|a, b| a.0.cmp(&b.0));
        SimplicialComplex {
            vertices,
            faces,
            index,
            dim_ranges,
            facets,
            boundary,
            masks,
        }
    }

    /// The full simplex on `{0,…,n}`.
    pub fn simplex(n: usize) -> Self {
        Self::from_simplices([Simplex((0..=n).collect())])
    }

    /// All proper non-empty subsets of `{0,…,n}`. For `n = 0` this is the
    /// empty complex (the boundary of a point).
    pub fn boundary_simplex(n: usize) -> Self {
        let full: Vec<usize> = (0..=n).collect();
        Self::from_simplices((0..=n).filter(|_| n > 0).map(|skip| {
            Simplex(full.iter().copied().filter(|v| *v != skip).collect())
        }))
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Faces in canonical order (dimension, then lexicographic).
    pub fn faces(&self) -> &[Simplex] {
        &self.faces
    }

    /// Maximal faces, sorted lexicographically.
    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Dimension of the complex; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.dim_ranges.len().checked_sub(1)
    }

    /// Ids of the faces of dimension `k`.
    pub fn dim_range(&self, k: usize) -> Range<usize> {
        self.dim_ranges.get(k).cloned().unwrap_or(0..0)
    }

    pub fn faces_of_dim(&self, k: usize) -> &[Simplex] {
        &self.faces[self.dim_range(k)]
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.dim_range(k).len()
    }

    /// Face counts per dimension (the f-vector).
    pub fn f_vector(&self) -> Vec<usize> {
        self.dim_ranges.iter().map(|r| r.len()).collect()
    }

    pub fn face(&self, id: usize) -> &Simplex {
        &self.faces[id]
    }

    pub fn face_id(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    /// Signed facets of face `id`, as face ids.
    pub fn face_boundary(&self, id: usize) -> &[(usize, i8)] {
        &self.boundary[id]
    }

    pub(crate) fn empty_mask(&self) -> VertexMask {
        VertexMask::empty(self.vertices.len())
    }

    /// Subcomplex of faces missing every vertex in `removed`.
    pub fn delete_vertices(&self, removed: &[usize]) -> Self {
        let set: BTreeSet<Simplex> = self
            .faces
            .iter()
            .filter(|s| !s.0.iter().any(|v| removed.contains(v)))
            .cloned()
            .collect();
        Self::from_closed_set(set)
    }

    /// `X − σ`: the faces that do not meet `σ`.
    pub fn delete(&self, sigma: &Simplex) -> Self {
        self.delete_vertices(&sigma.0)
    }

    /// `X − σ_1 − … − σ_i`; only the union of the deleted vertices matters.
    pub fn delete_tuple(&self, tuple: &FaceTuple) -> Self {
        self.delete_vertices(&tuple.union_vertices())
    }

    /// Like [`delete_tuple`](Self::delete_tuple) but for unchecked face lists;
    /// rejects intersecting faces.
    pub fn delete_faces(&self, faces: &[Simplex]) -> Result<Self> {
        let tuple = FaceTuple::new(faces.to_vec())?;
        Ok(self.delete_tuple(&tuple))
    }

    fn require_vertex(&self, v: usize) -> Result<()> {
        if self.vertices.binary_search(&v).is_err() {
            return Err(invalid(format!("{v} is not a vertex of the complex")));
        }
        Ok(())
    }

    /// Faces `τ` with `v ∉ τ` and `τ ∪ {v}` a face.
    pub fn link(&self, v: usize) -> Result<Self> {
        self.require_vertex(v)?;
        let set = self
            .faces
            .iter()
            .filter(|s| s.contains_vertex(v) && s.0.len() > 1)
            .map(|s| Simplex(s.0.iter().copied().filter(|w| *w != v).collect()))
            .collect();
        Ok(Self::from_closed_set(set))
    }

    /// Closed star: all faces of faces containing `v`.
    pub fn star(&self, v: usize) -> Result<Self> {
        self.require_vertex(v)?;
        Ok(Self::from_simplices(
            self.facets.iter().filter(|s| s.contains_vertex(v)).cloned(),
        ))
    }

    /// Cone with a fresh apex vertex.
    pub fn cone(&self, apex: usize) -> Result<Self> {
        if self.vertices.binary_search(&apex).is_ok() {
            return Err(invalid(format!("cone apex {apex} is already a vertex")));
        }
        let mut set: BTreeSet<Simplex> = self.faces.iter().cloned().collect();
        set.insert(Simplex(vec![apex]));
        for s in &self.faces {
            set.insert(s.union(&Simplex(vec![apex])));
        }
        Ok(Self::from_closed_set(set))
    }

    /// Smallest vertex id not used by the complex.
    pub fn fresh_vertex(&self) -> usize {
        self.vertices.last().map(|v| v + 1).unwrap_or(0)
    }

    /// Enumerates tuples of `len` pairwise disjoint faces.
    ///
    /// With `ordered`, every ordering is produced (the lexicographic order on
    /// face ids); otherwise only strictly increasing face-id sequences. When
    /// `dim_budget` is set, tuples with total dimension above it are skipped.
    pub fn disjoint_tuples(
        &self,
        len: usize,
        dim_budget: Option<usize>,
        ordered: bool,
    ) -> impl Iterator<Item = FaceTuple> + '_ {
        self.disjoint_tuple_ids(len, dim_budget, ordered)
            .map(|ids| FaceTuple(ids.iter().map(|id| self.faces[*id].clone()).collect()))
    }

    /// Face-id form of [`disjoint_tuples`](Self::disjoint_tuples).
    pub fn disjoint_tuple_ids(
        &self,
        len: usize,
        dim_budget: Option<usize>,
        ordered: bool,
    ) -> DisjointTupleIds<'_> {
        DisjointTupleIds {
            complex: self,
            len,
            budget: dim_budget,
            ordered,
            ids: Vec::with_capacity(len),
            cursor: vec![0],
            masks: vec![self.empty_mask()],
            dims: vec![0],
            pending_pop: false,
            done: false,
        }
    }
}

/// Lazy depth-first enumeration of disjoint face-id tuples.
pub struct DisjointTupleIds<'a> {
    complex: &'a SimplicialComplex,
    len: usize,
    budget: Option<usize>,
    ordered: bool,
    ids: Vec<usize>,
    cursor: Vec<usize>,
    masks: Vec<VertexMask>,
    dims: Vec<usize>,
    pending_pop: bool,
    done: bool,
}

impl Iterator for DisjointTupleIds<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.len == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        if self.pending_pop {
            self.pending_pop = false;
            self.pop();
        }
        let n = self.complex.faces.len();
        loop {
            let depth = self.ids.len();
            if depth == self.len {
                self.pending_pop = true;
                return Some(self.ids.clone());
            }
            let mut found = None;
            let mut id = self.cursor[depth];
            while id < n {
                let d = self.complex.faces[id].dim();
                if let Some(b) = self.budget {
                    if self.dims[depth] + d > b {
                        // faces are sorted by dimension
                        break;
                    }
                }
                if !self.complex.masks[id].intersects(&self.masks[depth]) {
                    found = Some(id);
                    break;
                }
                id += 1;
            }
            match found {
                Some(id) => {
                    self.cursor[depth] = id + 1;
                    let mask = self.masks[depth].union(&self.complex.masks[id]);
                    let dim = self.dims[depth] + self.complex.faces[id].dim();
                    self.ids.push(id);
                    self.cursor.push(if self.ordered { 0 } else { id + 1 });
                    self.masks.push(mask);
                    self.dims.push(dim);
                }
                None => {
                    if depth == 0 {
                        self.done = true;
                        return None;
                    }
                    self.pop();
                }
            }
        }
    }
}

impl DisjointTupleIds<'_> {
    fn pop(&mut self) {
        self.ids.pop();
        self.cursor.pop();
        self.masks.pop();
        self.dims.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(f: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::from_facets(f.iter().map(|s| s.to_vec())).unwrap()
    }

    #[test]
    fn closure_of_triangle() {
        let t = cx(&[&[0, 1, 2]]);
        assert_eq!(t.num_faces(), 7);
        assert_eq!(t.f_vector(), vec![3, 3, 1]);
        assert_eq!(t, SimplicialComplex::simplex(2));
    }

    #[test]
    fn empty_and_point_differ() {
        let e = SimplicialComplex::from_facets(Vec::<Vec<usize>>::new()).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.dim(), None);
        let p = cx(&[&[0]]);
        assert_ne!(e, p);
        assert_eq!(p.dim(), Some(0));
    }

    #[test]
    fn hollow_triangle() {
        let h = cx(&[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(h.num_faces(), 6);
        assert_eq!(h.count_of_dim(2), 0);
        assert_eq!(h, SimplicialComplex::boundary_simplex(2));
    }

    #[test]
    fn absorbed_facets_and_duplicates() {
        let c = cx(&[&[0, 1], &[0, 1, 2], &[2]]);
        assert_eq!(c.facets(), &[Simplex::new(vec![0, 1, 2]).unwrap()]);
        assert!(SimplicialComplex::from_facets(vec![vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn simplex_boundaries() {
        assert_eq!(SimplicialComplex::boundary_simplex(3).num_faces(), 14);
        assert_eq!(SimplicialComplex::boundary_simplex(3).f_vector(), vec![4, 6, 4]);
        let b1 = SimplicialComplex::boundary_simplex(1);
        assert_eq!(b1, cx(&[&[0], &[1]]));
        assert!(SimplicialComplex::boundary_simplex(0).is_empty());
        for n in 1..8 {
            assert_eq!(
                SimplicialComplex::boundary_simplex(n).num_faces(),
                (1 << (n + 1)) - 2
            );
        }
    }

    #[test]
    fn deletion() {
        let b3 = SimplicialComplex::boundary_simplex(3);
        let got = b3.delete(&Simplex::vertex(0));
        assert_eq!(got, cx(&[&[1, 2, 3]]));
        let b2 = SimplicialComplex::boundary_simplex(2);
        assert_eq!(b2.delete(&Simplex::new(vec![0, 1]).unwrap()), cx(&[&[2]]));
        let d2 = SimplicialComplex::simplex(2);
        assert!(d2.delete(&Simplex::new(vec![0, 1, 2]).unwrap()).is_empty());
    }

    #[test]
    fn tuple_deletion() {
        let b4 = SimplicialComplex::boundary_simplex(4);
        let t = FaceTuple::new(vec![Simplex::vertex(0), Simplex::new(vec![1, 2]).unwrap()]).unwrap();
        assert_eq!(b4.delete_tuple(&t), cx(&[&[3, 4]]));
        assert_eq!(b4.delete_tuple(&FaceTuple::empty()), b4);
        let b3 = SimplicialComplex::boundary_simplex(3);
        let got = b3.delete_faces(&[Simplex::vertex(0), Simplex::vertex(1)]).unwrap();
        assert_eq!(got, cx(&[&[2, 3]]));
        assert!(b3
            .delete_faces(&[Simplex::vertex(0), Simplex::new(vec![0, 1]).unwrap()])
            .is_err());
    }

    #[test]
    fn link_star_cone() {
        let b3 = SimplicialComplex::boundary_simplex(3);
        assert_eq!(b3.link(0).unwrap(), cx(&[&[1, 2], &[1, 3], &[2, 3]]));
        let b2 = SimplicialComplex::boundary_simplex(2);
        assert_eq!(b2.star(0).unwrap(), cx(&[&[0, 1], &[0, 2]]));
        let c = b2.cone(3).unwrap();
        assert_eq!(c.f_vector(), vec![4, 6, 3]);
        assert!(b2.cone(1).is_err());
        assert!(b2.link(7).is_err());
        assert!(b2.star(7).is_err());
    }

    #[test]
    fn tuples_of_edge() {
        let e = SimplicialComplex::simplex(1);
        let got: Vec<FaceTuple> = e.disjoint_tuples(2, None, true).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].faces(), &[Simplex::vertex(0), Simplex::vertex(1)]);
        assert_eq!(got[1].faces(), &[Simplex::vertex(1), Simplex::vertex(0)]);
    }

    #[test]
    fn tuples_of_hollow_triangle() {
        let b2 = SimplicialComplex::boundary_simplex(2);
        let got: Vec<FaceTuple> = b2.disjoint_tuples(2, None, true).collect();
        assert_eq!(got.len(), 12);
        let vv = got.iter().filter(|t| t.total_dim() == 0).count();
        assert_eq!(vv, 6);
        assert_eq!(b2.disjoint_tuples(2, None, false).count(), 6);
        assert_eq!(b2.disjoint_tuples(2, Some(0), true).count(), 6);
    }

    #[test]
    fn empty_tuple_is_enumerated_once() {
        for c in [SimplicialComplex::empty(), SimplicialComplex::simplex(3)] {
            let got: Vec<FaceTuple> = c.disjoint_tuples(0, None, true).collect();
            assert_eq!(got, vec![FaceTuple::empty()]);
        }
        assert_eq!(SimplicialComplex::empty().disjoint_tuples(1, None, true).count(), 0);
    }

    #[test]
    fn simplex_display_and_order() {
        let a = Simplex::new(vec![2, 0]).unwrap();
        assert_eq!(a.to_string(), "{0,2}");
        assert!(Simplex::vertex(5) < a);
        assert!(Simplex::new(vec![]).is_err());
    }
}
