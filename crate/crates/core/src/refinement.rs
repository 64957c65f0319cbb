//! Affine refinement witnesses.
//!
//! A witness places every vertex of a complex `A` inside a face of `B`
//! (its carrier) by barycentric coordinates, which fixes a map `|A| → |B|`
//! affine on each face. It also lists, for every face `τ` of `B`, the faces
//! of `A` whose images tile `τ`. [`check_refinement`] verifies this exactly:
//! containment, non-degeneracy, pairwise interiors disjoint (exact LP) and
//! volume fractions summing to one. Closed pieces of full total measure
//! inside `τ` then cover `τ`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{invalid, Error, Result, Verdict};
use crate::lp::feasible_point;
use crate::rational::{determinant, format_rational, rank, Q, Rational};

/// Default cap on the number of faces produced by [`iterated_subdivision`].
pub const DEFAULT_MAX_FACES: usize = 1_000_000;

/// A simplicial complex with rational vertex coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricComplex {
    complex: SimplicialComplex,
    coords: BTreeMap<usize, Vec<Rational>>,
}

impl GeometricComplex {
    /// Errors if a vertex lacks coordinates, the coordinate lengths differ,
    /// or some facet is affinely dependent.
    pub fn new(complex: SimplicialComplex, coords: BTreeMap<usize, Vec<Rational>>) -> Result<Self> {
        let len = coords.values().next().map_or(0, Vec::len);
        if let Some(v) = complex.vertices().iter().find(|v| !coords.contains_key(v)) {
            return Err(invalid(format!("vertex {v} has no coordinates")));
        }
        if coords.values().any(|c| c.len() != len) {
            return Err(invalid("coordinate vectors differ in length"));
        }
        for facet in complex.facets() {
            let base = &coords[&facet.vertices()[0]];
            let diffs: Vec<Vec<Rational>> = facet.vertices()[1..]
                .iter()
                .map(|v| coords[v].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            if rank(diffs) != facet.dim() {
                return Err(Error::DegenerateFace(facet.to_string()));
            }
        }
        Ok(GeometricComplex { complex, coords })
    }

    /// Vertex `i` (the `i`-th smallest label) at the `i`-th standard basis vector.
    pub fn standard(complex: SimplicialComplex) -> Self {
        let n = complex.vertices().len();
        let coords = complex
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut c = vec![Rational::zero(); n];
                c[i] = Rational::one();
                (*v, c)
            })
            .collect();
        GeometricComplex { complex, coords }
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn coords(&self, v: usize) -> Option<&[Rational]> {
        self.coords.get(&v).map(Vec::as_slice)
    }

    /// Point with barycentric `weights` on `face`.
    pub fn point(&self, face: &Simplex, weights: &[Rational]) -> Option<Vec<Rational>> {
        let len = self.coords.values().next().map_or(0, Vec::len);
        let mut y = vec![Rational::zero(); len];
        for (v, w) in face.vertices().iter().zip(weights) {
            for (acc, c) in y.iter_mut().zip(self.coords.get(v)?) {
                *acc += w * c;
            }
        }
        Some(y)
    }
}

/// Location of a vertex of `A`: a face of `B` and barycentric coordinates in it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Carrier {
    pub face: Simplex,
    pub bary: Vec<Rational>,
}

impl Carrier {
    pub fn vertex(v: usize) -> Self {
        Carrier { face: Simplex::vertex(v), bary: vec![Rational::one()] }
    }

    /// Weight per `B`-vertex, dropping zero coordinates.
    fn weights(&self) -> BTreeMap<usize, Rational> {
        self.face
            .vertices()
            .iter()
            .zip(&self.bary)
            .filter(|(_, w)| !w.is_zero())
            .map(|(v, w)| (*v, w.clone()))
            .collect()
    }

    fn from_weights(weights: BTreeMap<usize, Rational>) -> Result<Self> {
        let (vs, ws): (Vec<usize>, Vec<Rational>) =
            weights.into_iter().filter(|(_, w)| !w.is_zero()).unzip();
        Ok(Carrier { face: Simplex::new(vs)?, bary: ws })
    }
}

/// Carriers for the vertices of `A` and, for each face of `B`, the faces of
/// `A` whose images tile it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WitnessRepr", into = "WitnessRepr")]
pub struct RefinementWitness {
    pub carrier: BTreeMap<usize, Carrier>,
    pub image_map: BTreeMap<Simplex, Vec<Simplex>>,
}

#[derive(Serialize, Deserialize)]
struct CarrierRepr {
    vertex: usize,
    face: Simplex,
    bary: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct ImageRepr {
    face: Simplex,
    pieces: Vec<Simplex>,
}

#[derive(Serialize, Deserialize)]
struct WitnessRepr {
    carrier: Vec<CarrierRepr>,
    image_map: Vec<ImageRepr>,
}

impl TryFrom<WitnessRepr> for RefinementWitness {
    type Error = Error;
    fn try_from(r: WitnessRepr) -> Result<Self> {
        let mut carrier = BTreeMap::new();
        for c in r.carrier {
            let entry = Carrier { face: c.face, bary: c.bary.into_iter().map(|q| q.0).collect() };
            if carrier.insert(c.vertex, entry).is_some() {
                return Err(invalid(format!("vertex {} has two carriers", c.vertex)));
            }
        }
        let mut image_map = BTreeMap::new();
        for i in r.image_map {
            let face = i.face.clone();
            if image_map.insert(i.face, i.pieces).is_some() {
                return Err(invalid(format!("face {face} listed twice in the image map")));
            }
        }
        Ok(RefinementWitness { carrier, image_map })
    }
}

impl From<RefinementWitness> for WitnessRepr {
    fn from(w: RefinementWitness) -> Self {
        WitnessRepr {
            carrier: w
                .carrier
                .into_iter()
                .map(|(vertex, c)| CarrierRepr { vertex, face: c.face, bary: c.bary.into_iter().map(Q).collect() })
                .collect(),
            image_map: w.image_map.into_iter().map(|(face, pieces)| ImageRepr { face, pieces }).collect(),
        }
    }
}

impl RefinementWitness {
    /// Union of the carriers of the vertices of `face`, if all are known.
    pub fn face_carrier(&self, face: &Simplex) -> Option<Simplex> {
        let mut vs = BTreeSet::new();
        for v in face.vertices() {
            vs.extend(self.carrier.get(v)?.face.vertices().iter().copied());
        }
        Simplex::new(vs.into_iter().collect()).ok()
    }
}

/// `A = B`, every vertex carried by itself, every face tiled by itself.
pub fn identity_witness(b: &SimplicialComplex) -> RefinementWitness {
    RefinementWitness {
        carrier: b.vertices().iter().map(|v| (*v, Carrier::vertex(*v))).collect(),
        image_map: b.faces().iter().map(|s| (s.clone(), vec![s.clone()])).collect(),
    }
}

/// Image map listing every face of `a` whose dimension equals that of its carrier.
fn image_map_from_carriers(
    a: &SimplicialComplex,
    carrier: &BTreeMap<usize, Carrier>,
) -> BTreeMap<Simplex, Vec<Simplex>> {
    let w = RefinementWitness { carrier: carrier.clone(), image_map: BTreeMap::new() };
    let mut map: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for face in a.faces() {
        if let Some(c) = w.face_carrier(face) {
            if c.dim() == face.dim() {
                map.entry(c).or_default().push(face.clone());
            }
        }
    }
    map
}

/// First barycentric subdivision of `b`: vertex `i` of `A` is the barycenter
/// of face `i` of `b` and the simplices of `A` are chains of faces.
pub fn barycentric_subdivision_witness(
    b: &SimplicialComplex,
) -> Result<(SimplicialComplex, RefinementWitness)> {
    subdivide_capped(b, DEFAULT_MAX_FACES)
}

fn subdivide_capped(b: &SimplicialComplex, max_faces: usize) -> Result<(SimplicialComplex, RefinementWitness)> {
    if b.is_empty() {
        return Err(invalid("cannot subdivide the empty complex"));
    }
    let projected: usize = b.facets().iter().map(|f| (1..=f.vertices().len()).product::<usize>() << f.vertices().len()).sum();
    if projected > max_faces.saturating_mul(2) {
        return Err(Error::ResourceLimit { what: "faces of the subdivision".into(), limit: max_faces });
    }
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for facet in b.facets() {
        flags(b, facet.vertices(), &mut Vec::new(), &mut Vec::new(), &mut facets);
    }
    let a = SimplicialComplex::from_facets(facets)?;
    if a.num_faces() > max_faces {
        return Err(Error::ResourceLimit { what: "faces of the subdivision".into(), limit: max_faces });
    }
    let carrier: BTreeMap<usize, Carrier> = (0..b.num_faces())
        .map(|id| {
            let face = b.face(id).clone();
            let n = face.vertices().len() as i64;
            let bary = vec![crate::rational::rat(1, n); face.vertices().len()];
            (id, Carrier { face, bary })
        })
        .collect();
    let image_map = image_map_from_carriers(&a, &carrier);
    Ok((a, RefinementWitness { carrier, image_map }))
}

/// Full flags of faces of `vertices`, as chains of face ids, growing one vertex at a time.
fn flags(
    b: &SimplicialComplex,
    remaining: &[usize],
    prefix: &mut Vec<usize>,
    chain: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining.is_empty() {
        out.push(chain.clone());
        return;
    }
    for (i, v) in remaining.iter().enumerate() {
        prefix.push(*v);
        let face = Simplex::new(prefix.clone()).expect("distinct vertices");
        chain.push(b.face_id(&face).expect("subface of a face"));
        let rest: Vec<usize> = remaining.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, u)| *u).collect();
        flags(b, &rest, prefix, chain, out);
        chain.pop();
        prefix.pop();
    }
}

/// Witness for `A2` in `B` from witnesses `outer` (`A1` in `B`) and `inner` (`A2` in `A1`).
pub fn compose(
    outer: &RefinementWitness,
    inner: &RefinementWitness,
    a2: &SimplicialComplex,
) -> Result<RefinementWitness> {
    let mut carrier = BTreeMap::new();
    for (v, c) in &inner.carrier {
        let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
        for (u, w) in c.face.vertices().iter().zip(&c.bary) {
            let cu = outer
                .carrier
                .get(u)
                .ok_or_else(|| invalid(format!("vertex {u} has no carrier in the outer witness")))?;
            for (x, wx) in cu.weights() {
                *weights.entry(x).or_insert_with(Rational::zero) += w * wx;
            }
        }
        carrier.insert(*v, Carrier::from_weights(weights)?);
    }
    let image_map = image_map_from_carriers(a2, &carrier);
    Ok(RefinementWitness { carrier, image_map })
}

/// `k`-fold barycentric subdivision with the composed witness; `k = 0` is the identity.
pub fn iterated_subdivision(
    b: &SimplicialComplex,
    k: usize,
    max_faces: usize,
) -> Result<(SimplicialComplex, RefinementWitness)> {
    let mut a = b.clone();
    let mut w = identity_witness(b);
    for _ in 0..k {
        let (next, step) = subdivide_capped(&a, max_faces)?;
        w = compose(&w, &step, &next)?;
        a = next;
    }
    Ok((a, w))
}

/// Outcome of [`check_refinement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub vertices_checked: usize,
    pub faces_checked: usize,
    pub pieces_checked: usize,
    pub overlap_tests: usize,
}

/// Volume of each piece of `tau`, as a fraction of the volume of `tau`.
pub fn piece_volume_fractions(
    w: &RefinementWitness,
    tau: &Simplex,
) -> Result<Vec<(Simplex, Rational)>> {
    let pieces = w.image_map.get(tau).map(Vec::as_slice).unwrap_or(&[]);
    pieces
        .iter()
        .map(|p| {
            let m = bary_rows(w, p, tau)
                .ok_or_else(|| invalid(format!("piece {p} does not lie in {tau}")))?;
            Ok((p.clone(), determinant(m).abs()))
        })
        .collect()
}

/// Barycentric coordinates in `tau` of the vertices of `piece`, one row per vertex.
fn bary_rows(w: &RefinementWitness, piece: &Simplex, tau: &Simplex) -> Option<Vec<Vec<Rational>>> {
    piece
        .vertices()
        .iter()
        .map(|v| {
            let weights = w.carrier.get(v)?.weights();
            let row: Vec<Rational> = tau
                .vertices()
                .iter()
                .map(|t| weights.get(t).cloned().unwrap_or_else(Rational::zero))
                .collect();
            // every weight must sit on a vertex of tau
            (weights.keys().all(|x| tau.contains_vertex(*x))).then_some(row)
        })
        .collect()
}

/// True iff the interiors of two full-dimensional simplices meet, given by
/// barycentric rows in a common simplex.
fn interiors_meet(p: &[Vec<Rational>], q: &[Vec<Rational>]) -> bool {
    // Σ α_i p_i = Σ β_j q_j with α, β ≥ 1, after shifting α = 1 + α', β = 1 + β'
    let k = p[0].len();
    let nvars = p.len() + q.len();
    let mut a = vec![vec![Rational::zero(); nvars]; k];
    let mut b = vec![Rational::zero(); k];
    for c in 0..k {
        for (i, row) in p.iter().enumerate() {
            a[c][i] = row[c].clone();
            b[c] -= &row[c];
        }
        for (j, row) in q.iter().enumerate() {
            a[c][p.len() + j] = -row[c].clone();
            b[c] += &row[c];
        }
    }
    feasible_point(&a, &b).is_some()
}

/// Exact verification that `w` exhibits `a` as an affine refinement of `b`.
///
/// A degenerate face of `a` is an input error naming the face; every other
/// failure is reported in the verdict.
pub fn check_refinement(
    a: &SimplicialComplex,
    b: &GeometricComplex,
    w: &RefinementWitness,
) -> Result<RefinementReport> {
    let mut report = RefinementReport {
        verdict: Verdict::ok(),
        vertices_checked: 0,
        faces_checked: 0,
        pieces_checked: 0,
        overlap_tests: 0,
    };
    let fail = |mut r: RefinementReport, reason: String| {
        r.verdict = Verdict::fail(reason);
        Ok(r)
    };
    let bx = b.complex();

    // carriers of vertices
    if let Some(v) = w.carrier.keys().find(|v| a.vertices().binary_search(v).is_err()) {
        return fail(report, format!("carrier given for {v}, which is not a vertex of A"));
    }
    let mut positions = HashSet::new();
    for v in a.vertices() {
        let Some(c) = w.carrier.get(v) else {
            return fail(report, format!("vertex {v} has no carrier"));
        };
        if !bx.contains(&c.face) {
            return fail(report, format!("carrier {} of vertex {v} is not a face of B", c.face));
        }
        if c.bary.len() != c.face.vertices().len() {
            return fail(report, format!("vertex {v}: {} coordinates for carrier {}", c.bary.len(), c.face));
        }
        if let Some(q) = c.bary.iter().find(|q| q.is_negative()) {
            return fail(report, format!("vertex {v}: negative barycentric coordinate {}", format_rational(q)));
        }
        if c.bary.iter().any(Zero::is_zero) {
            return fail(report, format!("vertex {v}: carrier {} is not minimal", c.face));
        }
        let total = c.bary.iter().fold(Rational::zero(), |s, q| s + q);
        if !total.is_one() {
            return fail(report, format!("vertex {v}: coordinates sum to {}", format_rational(&total)));
        }
        if !positions.insert(c.clone()) {
            return fail(report, format!("vertex {v} shares its image with another vertex"));
        }
        report.vertices_checked += 1;
    }

    // each face maps affinely and injectively into a face of B
    for face in a.faces() {
        let carrier = w.face_carrier(face).expect("all vertices carried");
        if !bx.contains(&carrier) {
            return fail(report, format!("face {face} of A is not carried by a face of B"));
        }
        report.faces_checked += 1;
    }
    for facet in a.facets() {
        let carrier = w.face_carrier(facet).expect("all vertices carried");
        let rows = bary_rows(w, facet, &carrier).expect("carrier contains every vertex carrier");
        if rank(rows) != facet.vertices().len() {
            return Err(Error::DegenerateFace(facet.to_string()));
        }
    }

    // tiling of each face of B
    if let Some(tau) = w.image_map.keys().find(|t| !bx.contains(t)) {
        return fail(report, format!("image map lists {tau}, which is not a face of B"));
    }
    for tau in bx.faces() {
        let pieces = w.image_map.get(tau).map(Vec::as_slice).unwrap_or(&[]);
        let mut rows = Vec::with_capacity(pieces.len());
        let mut total = Rational::zero();
        for p in pieces {
            if !a.contains(p) {
                return fail(report, format!("piece {p} of {tau} is not a face of A"));
            }
            if p.dim() != tau.dim() {
                return fail(report, format!("piece {p} of {tau} has dimension {}, expected {}", p.dim(), tau.dim()));
            }
            let Some(m) = bary_rows(w, p, tau) else {
                return fail(report, format!("piece {p} does not lie in {tau}"));
            };
            let vol = determinant(m.clone()).abs();
            if vol.is_zero() {
                return Err(Error::DegenerateFace(p.to_string()));
            }
            total += vol;
            rows.push((p, m));
            report.pieces_checked += 1;
        }
        for (i, (p, mp)) in rows.iter().enumerate() {
            for (q, mq) in &rows[i + 1..] {
                report.overlap_tests += 1;
                if interiors_meet(mp, mq) {
                    return fail(report, format!("pieces {p} and {q} of {tau} overlap in positive measure"));
                }
            }
        }
        if total < Rational::one() {
            return fail(
                report,
                format!("volume deficit on the carrier {tau}: pieces cover {} of it", format_rational(&total)),
            );
        }
        if total > Rational::one() {
            return fail(
                report,
                format!("volume excess on the carrier {tau}: pieces cover {} of it", format_rational(&total)),
            );
        }
    }

    // every face of A with a same-dimensional carrier is listed under it
    for face in a.faces() {
        let carrier = w.face_carrier(face).expect("all vertices carried");
        if carrier.dim() == face.dim() && !w.image_map.get(&carrier).is_some_and(|ps| ps.contains(face)) {
            return fail(report, format!("face {face} of A is missing from the image of {carrier}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::reduced_betti;
    use crate::field::PrimeField;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn check(a: &SimplicialComplex, b: &SimplicialComplex, w: &RefinementWitness) -> Verdict {
        check_refinement(a, &GeometricComplex::standard(b.clone()), w).unwrap().verdict
    }

    #[test]
    fn subdivided_edge() {
        let b = SimplicialComplex::simplex(1);
        let (a, w) = barycentric_subdivision_witness(&b).unwrap();
        assert_eq!(a.f_vector(), vec![3, 2]);
        assert_eq!(w.image_map[&s(&[0, 1])].len(), 2);
        assert_eq!(check(&a, &b, &w), Verdict::ok());
    }

    #[test]
    fn subdivided_triangle() {
        let b = SimplicialComplex::simplex(2);
        let (a, w) = barycentric_subdivision_witness(&b).unwrap();
        assert_eq!(a.f_vector(), vec![7, 12, 6]);
        let vols = piece_volume_fractions(&w, &s(&[0, 1, 2])).unwrap();
        assert_eq!(vols.len(), 6);
        assert!(vols.iter().all(|(_, v)| *v == rat(1, 6)));
        assert_eq!(check(&a, &b, &w), Verdict::ok());
    }

    #[test]
    fn subdivided_circle() {
        let b = SimplicialComplex::boundary_simplex(2);
        let (a, w) = barycentric_subdivision_witness(&b).unwrap();
        assert_eq!(a.f_vector(), vec![6, 6]);
        assert_eq!(check(&a, &b, &w), Verdict::ok());
    }

    #[test]
    fn omitted_piece_is_a_volume_deficit() {
        let b = SimplicialComplex::simplex(2);
        let (a, mut w) = barycentric_subdivision_witness(&b).unwrap();
        w.image_map.get_mut(&s(&[0, 1, 2])).unwrap().pop();
        let v = check(&a, &b, &w);
        assert_eq!(v, Verdict::fail("volume deficit on the carrier {0,1,2}: pieces cover 5/6 of it"));
    }

    #[test]
    fn identity() {
        for b in [SimplicialComplex::simplex(3), SimplicialComplex::boundary_simplex(3)] {
            assert_eq!(check(&b, &b, &identity_witness(&b)), Verdict::ok());
        }
    }

    #[test]
    fn bad_carriers() {
        let b = SimplicialComplex::simplex(1);
        let (a, w) = barycentric_subdivision_witness(&b).unwrap();
        let mut bad = w.clone();
        bad.carrier.get_mut(&2).unwrap().bary = vec![rat(3, 2), rat(-1, 2)];
        assert!(check(&a, &b, &bad).reason.unwrap().contains("negative barycentric coordinate -1/2"));
        let mut bad = w.clone();
        bad.carrier.get_mut(&2).unwrap().bary = vec![int(1), int(0)];
        assert!(check(&a, &b, &bad).reason.unwrap().contains("not minimal"));
        let mut bad = w.clone();
        bad.carrier.get_mut(&2).unwrap().bary = vec![rat(1, 2), rat(1, 3)];
        assert!(check(&a, &b, &bad).reason.unwrap().contains("sum to 5/6"));
        let mut bad = w.clone();
        bad.carrier.remove(&2);
        assert_eq!(check(&a, &b, &bad), Verdict::fail("vertex 2 has no carrier"));
    }

    #[test]
    fn overlapping_pieces_detected() {
        // [0, 1/2] and [0, 3/4] share a segment
        let b = SimplicialComplex::simplex(1);
        let a = SimplicialComplex::from_facets(vec![vec![0, 2], vec![0, 3], vec![1, 3]]).unwrap();
        let w = RefinementWitness {
            carrier: [
                (0, Carrier::vertex(0)),
                (1, Carrier::vertex(1)),
                (2, Carrier { face: s(&[0, 1]), bary: vec![rat(1, 2), rat(1, 2)] }),
                (3, Carrier { face: s(&[0, 1]), bary: vec![rat(1, 4), rat(3, 4)] }),
            ]
            .into_iter()
            .collect(),
            image_map: [
                (s(&[0]), vec![s(&[0])]),
                (s(&[1]), vec![s(&[1])]),
                (s(&[0, 1]), vec![s(&[0, 2]), s(&[0, 3]), s(&[1, 3])]),
            ]
            .into_iter()
            .collect(),
        };
        let v = check(&a, &b, &w);
        assert_eq!(v, Verdict::fail("pieces {0,2} and {0,3} of {0,1} overlap in positive measure"));
    }

    #[test]
    fn degenerate_piece_is_an_error() {
        let b = SimplicialComplex::simplex(2);
        let a = SimplicialComplex::from_facets(vec![vec![0, 1, 3]]).unwrap();
        let mut carrier = identity_witness(&b).carrier;
        carrier.remove(&2);
        carrier.insert(3, Carrier { face: s(&[0, 1]), bary: vec![rat(1, 2), rat(1, 2)] });
        let w = RefinementWitness { carrier, image_map: BTreeMap::new() };
        let err = check_refinement(&a, &GeometricComplex::standard(b), &w).unwrap_err();
        assert_eq!(err, Error::DegenerateFace("{0,1,3}".into()));
    }

    #[test]
    fn iterated_counts() {
        let (a, w) = iterated_subdivision(&SimplicialComplex::simplex(2), 0, DEFAULT_MAX_FACES).unwrap();
        assert_eq!(a, SimplicialComplex::simplex(2));
        assert_eq!(w, identity_witness(&a));
        let (a, w) = iterated_subdivision(&SimplicialComplex::simplex(1), 2, DEFAULT_MAX_FACES).unwrap();
        assert_eq!(a.f_vector(), vec![5, 4]);
        let mut pos: Vec<Rational> = w
            .carrier
            .values()
            .map(|c| c.weights().get(&1).cloned().unwrap_or_else(Rational::zero))
            .collect();
        pos.sort();
        assert_eq!(pos, vec![int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]);
        let b = SimplicialComplex::simplex(2);
        let (a, w) = iterated_subdivision(&b, 2, DEFAULT_MAX_FACES).unwrap();
        assert_eq!(a.count_of_dim(2), 36);
        assert_eq!(check(&a, &b, &w), Verdict::ok());
        assert!(matches!(
            iterated_subdivision(&SimplicialComplex::simplex(3), 3, 1000),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn composition_is_associative() {
        let b = SimplicialComplex::simplex(2);
        let (a1, w1) = barycentric_subdivision_witness(&b).unwrap();
        let (a2, w2) = barycentric_subdivision_witness(&a1).unwrap();
        let (a3, w3) = barycentric_subdivision_witness(&a2).unwrap();
        let left = compose(&compose(&w1, &w2, &a2).unwrap(), &w3, &a3).unwrap();
        let inner = compose(&w2, &w3, &a3).unwrap();
        let right = compose(&w1, &inner, &a3).unwrap();
        assert_eq!(left, right);
        let (a, w) = iterated_subdivision(&b, 3, DEFAULT_MAX_FACES).unwrap();
        assert_eq!(a, a3);
        assert_eq!(w, left);
    }

    #[test]
    fn witness_json_round_trip() {
        let (_, w) = barycentric_subdivision_witness(&SimplicialComplex::simplex(1)).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains(r#"{"vertex":2,"face":[0,1],"bary":["1/2","1/2"]}"#));
        assert!(json.contains(r#"{"face":[0,1],"pieces":[[0,2],[1,2]]}"#));
        let back: RefinementWitness = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn geometric_complex_validation() {
        let b = SimplicialComplex::simplex(2);
        let flat: BTreeMap<usize, Vec<Rational>> =
            [(0, vec![int(0), int(0)]), (1, vec![int(1), int(1)]), (2, vec![int(2), int(2)])].into_iter().collect();
        assert_eq!(GeometricComplex::new(b.clone(), flat).unwrap_err(), Error::DegenerateFace("{0,1,2}".into()));
        let ok: BTreeMap<usize, Vec<Rational>> =
            [(0, vec![int(0), int(0)]), (1, vec![int(1), int(0)]), (2, vec![int(0), int(1)])].into_iter().collect();
        let g = GeometricComplex::new(b, ok).unwrap();
        assert_eq!(g.point(&s(&[1, 2]), &[rat(1, 2), rat(1, 2)]).unwrap(), vec![rat(1, 2), rat(1, 2)]);
    }

    /// Euclidean volumes of the pieces of `Δ_n` placed at `0, e_1, …, e_n`,
    /// computed from actual coordinates rather than barycentric fractions.
    #[test]
    fn euclidean_piece_volumes() {
        for n in 1..=3usize {
            let b = SimplicialComplex::simplex(n);
            let coords: BTreeMap<usize, Vec<Rational>> = (0..=n)
                .map(|v| (v, (0..n).map(|i| if v == i + 1 { int(1) } else { int(0) }).collect()))
                .collect();
            let g = GeometricComplex::new(b.clone(), coords).unwrap();
            let (_, w) = barycentric_subdivision_witness(&b).unwrap();
            let top = b.facets()[0].clone();
            let fact: i64 = (1..=n as i64).product();
            let pieces = &w.image_map[&top];
            assert_eq!(pieces.len() as i64, fact * (n as i64 + 1));
            for p in pieces {
                let pts: Vec<Vec<Rational>> =
                    p.vertices().iter().map(|v| g.point(&w.carrier[v].face, &w.carrier[v].bary).unwrap()).collect();
                let m: Vec<Vec<Rational>> =
                    pts[1..].iter().map(|q| q.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
                // |det| / n! is the volume; the whole simplex has volume 1/n!
                let vol = determinant(m).abs() / int(fact);
                assert_eq!(vol, int(1) / int(fact) / int(fact * (n as i64 + 1)));
            }
        }
    }

    fn small_complex() -> impl Strategy<Value = SimplicialComplex> {
        prop::collection::vec(prop::collection::btree_set(0usize..5, 1..4), 1..5).prop_map(|fs| {
            SimplicialComplex::from_facets(fs.into_iter().map(|f| f.into_iter().collect::<Vec<_>>())).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn subdivision_round_trips_and_keeps_homology(b in small_complex()) {
            let (a, w) = barycentric_subdivision_witness(&b).unwrap();
            prop_assert_eq!(check(&a, &b, &w), Verdict::ok());
            for p in [2, 3] {
                let f = PrimeField::new(p).unwrap();
                prop_assert_eq!(reduced_betti(&a, f).betti, reduced_betti(&b, f).betti);
            }
        }
    }
}
