//! Tverberg witnesses for maps that are affine on faces.
//!
//! A map `f: X → ℝ^d` is given by rational coordinates for every vertex and
//! extended affinely over each face. A witness is a tuple of pairwise
//! disjoint faces together with a common point of their images and the
//! barycentric weights that certify it. Searching is exhaustive over
//! unordered disjoint tuples, each decided by an exact rational LP.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{invalid, Error, Result, Verdict};
use crate::lp::feasible_point;
use crate::rational::{format_rational, rat, Rational, Q};

/// Seed used by the command line and tests when none is given.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// Number of tuples decided per parallel batch during a search.
const BATCH: usize = 1024;

/// Rational vertex coordinates in `ℝ^d`, extended affinely over faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AffineMapRepr", into = "AffineMapRepr")]
pub struct AffineMap {
    d: usize,
    coords: BTreeMap<usize, Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct AffineMapRepr {
    d: usize,
    coords: BTreeMap<usize, Vec<Q>>,
}

impl TryFrom<AffineMapRepr> for AffineMap {
    type Error = Error;
    fn try_from(r: AffineMapRepr) -> Result<Self> {
        AffineMap::new(r.d, r.coords.into_iter().map(|(v, c)| (v, c.into_iter().map(|q| q.0).collect())))
    }
}

impl From<AffineMap> for AffineMapRepr {
    fn from(m: AffineMap) -> Self {
        AffineMapRepr {
            d: m.d,
            coords: m.coords.into_iter().map(|(v, c)| (v, c.into_iter().map(Q).collect())).collect(),
        }
    }
}

impl AffineMap {
    pub fn new(d: usize, coords: impl IntoIterator<Item = (usize, Vec<Rational>)>) -> Result<Self> {
        let coords: BTreeMap<usize, Vec<Rational>> = coords.into_iter().collect();
        if let Some((v, c)) = coords.iter().find(|(_, c)| c.len() != d) {
            return Err(invalid(format!("vertex {v} has {} coordinates, expected {d}", c.len())));
        }
        Ok(AffineMap { d, coords })
    }

    /// Convenience constructor from integer `(numerator, denominator)` pairs.
    pub fn from_fractions(d: usize, coords: &[(usize, &[(i64, i64)])]) -> Result<Self> {
        AffineMap::new(
            d,
            coords.iter().map(|(v, c)| (*v, c.iter().map(|(n, q)| rat(*n, *q)).collect())),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self, v: usize) -> Option<&[Rational]> {
        self.coords.get(&v).map(Vec::as_slice)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    /// Errors unless every vertex of `x` has coordinates.
    pub fn check_covers(&self, x: &SimplicialComplex) -> Result<()> {
        match x.vertices().iter().find(|v| !self.coords.contains_key(v)) {
            Some(v) => Err(invalid(format!("the map has no coordinates for vertex {v}"))),
            None => Ok(()),
        }
    }

    /// Same map with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        AffineMap {
            d: self.d,
            coords: self
                .coords
                .iter()
                .map(|(v, c)| (*v, c.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }

    /// Image of the point with barycentric `weights` on `face`.
    pub fn image(&self, face: &Simplex, weights: &[Rational]) -> Option<Vec<Rational>> {
        let mut y = vec![Rational::zero(); self.d];
        for (v, w) in face.vertices().iter().zip(weights) {
            for (acc, c) in y.iter_mut().zip(self.coords.get(v)?) {
                *acc += w * c;
            }
        }
        Some(y)
    }
}

/// Seeded pseudorandom map: each coordinate is `n/q` with `n ∈ [-1000, 1000]`
/// and `q ∈ [1, 16]`, drawn from ChaCha8 so runs are reproducible.
pub fn random_affine_map(vertices: &[usize], d: usize, seed: u64) -> AffineMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = vertices
        .iter()
        .map(|v| {
            let c = (0..d)
                .map(|_| rat(rng.gen_range(-1000..=1000), rng.gen_range(1..=16)))
                .collect();
            (*v, c)
        })
        .collect();
    AffineMap { d, coords }
}

/// Pairwise disjoint faces whose images share `point`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TverbergWitness {
    pub faces: Vec<Simplex>,
    #[serde(with = "crate::rational::serde_vec")]
    pub point: Vec<Rational>,
    /// Per face, one weight per vertex in increasing vertex order.
    #[serde(with = "crate::rational::serde_vec_vec")]
    pub weights: Vec<Vec<Rational>>,
}

/// Exact check of disjointness, membership in `x`, non-negativity,
/// normalisation and the affine identity of every face.
pub fn verify_witness(x: &SimplicialComplex, f: &AffineMap, w: &TverbergWitness) -> Verdict {
    if w.faces.len() != w.weights.len() {
        return Verdict::fail(format!(
            "{} faces but {} weight vectors",
            w.faces.len(),
            w.weights.len()
        ));
    }
    if w.point.len() != f.d() {
        return Verdict::fail(format!("point has {} coordinates, expected {}", w.point.len(), f.d()));
    }
    for (i, a) in w.faces.iter().enumerate() {
        for b in &w.faces[i + 1..] {
            if !a.is_disjoint(b) {
                return Verdict::fail(format!("not disjoint: {a} and {b} share a vertex"));
            }
        }
    }
    for face in &w.faces {
        if !x.contains(face) {
            return Verdict::fail(format!("{face} is not a face of the complex"));
        }
        if let Some(v) = face.vertices().iter().find(|v| f.coords(**v).is_none()) {
            return Verdict::fail(format!("the map has no coordinates for vertex {v}"));
        }
    }
    for (face, weights) in w.faces.iter().zip(&w.weights) {
        if weights.len() != face.vertices().len() {
            return Verdict::fail(format!(
                "face {face} has {} vertices but {} weights",
                face.vertices().len(),
                weights.len()
            ));
        }
        if let Some(neg) = weights.iter().find(|q| q.is_negative()) {
            return Verdict::fail(format!("negative weight {} on face {face}", format_rational(neg)));
        }
        let total = weights.iter().fold(Rational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Verdict::fail(format!(
                "weights on face {face} sum to {}, not 1",
                format_rational(&total)
            ));
        }
    }
    let failing: Vec<String> = w
        .faces
        .iter()
        .zip(&w.weights)
        .filter(|(face, weights)| f.image(face, weights).as_deref() != Some(w.point.as_slice()))
        .map(|(face, _)| face.to_string())
        .collect();
    match failing.len() {
        0 => Verdict::ok(),
        1 => Verdict::fail(format!("affine identity fails for face {}", failing[0])),
        _ => Verdict::fail(format!("affine identity fails for faces {}", failing.join(", "))),
    }
}

/// Decides whether the images of `faces` share a point; returns the witness if so.
pub fn tuple_witness(f: &AffineMap, faces: &[Simplex]) -> Option<TverbergWitness> {
    let r = faces.len();
    let d = f.d();
    if boxes_separated(f, faces)? {
        return None;
    }
    let offsets: Vec<usize> = faces
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.vertices().len();
            Some(o)
        })
        .collect();
    let nvars: usize = faces.iter().map(|s| s.vertices().len()).sum();
    let mut a = Vec::with_capacity(r + (r.saturating_sub(1)) * d);
    let mut b = Vec::with_capacity(a.capacity());
    for (i, s) in faces.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        for k in 0..s.vertices().len() {
            row[offsets[i] + k] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    // f(face i) point equals f(face 0) point, coordinate by coordinate
    for i in 1..r {
        for c in 0..d {
            let mut row = vec![Rational::zero(); nvars];
            for (k, v) in faces[i].vertices().iter().enumerate() {
                row[offsets[i] + k] = f.coords(*v)?[c].clone();
            }
            for (k, v) in faces[0].vertices().iter().enumerate() {
                row[offsets[0] + k] = -f.coords(*v)?[c].clone();
            }
            a.push(row);
            b.push(Rational::zero());
        }
    }
    let lambda = feasible_point(&a, &b)?;
    let weights: Vec<Vec<Rational>> = faces
        .iter()
        .enumerate()
        .map(|(i, s)| lambda[offsets[i]..offsets[i] + s.vertices().len()].to_vec())
        .collect();
    let point = f.image(&faces[0], &weights[0])?;
    Some(TverbergWitness { faces: faces.to_vec(), point, weights })
}

/// True when some coordinate separates the bounding boxes of the images,
/// which rules out a common point without solving the LP.
fn boxes_separated(f: &AffineMap, faces: &[Simplex]) -> Option<bool> {
    for c in 0..f.d() {
        let mut lo: Option<&Rational> = None;
        let mut hi: Option<&Rational> = None;
        for s in faces {
            let mut mn: Option<&Rational> = None;
            let mut mx: Option<&Rational> = None;
            for v in s.vertices() {
                let x = &f.coords(*v)?[c];
                mn = Some(mn.map_or(x, |m| m.min(x)));
                mx = Some(mx.map_or(x, |m| m.max(x)));
            }
            lo = lo.max(mn);
            hi = Some(match (hi, mx) {
                (Some(h), Some(m)) => h.min(m),
                (None, m) => m?,
                (h, None) => h?,
            });
        }
        if lo > hi {
            return Some(true);
        }
    }
    Some(false)
}

/// Result of an exhaustive witness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub witness: Option<TverbergWitness>,
    /// Tuples decided, counting up to and including the witness tuple.
    pub tuples_checked: usize,
}

/// First witness among unordered `r`-tuples of pairwise disjoint faces, in
/// lexicographic order of increasing face ids.
pub fn search_witness(x: &SimplicialComplex, f: &AffineMap, r: usize) -> Result<SearchOutcome> {
    search_witness_capped(x, f, r, None)
}

/// [`search_witness`] that fails with a resource error instead of deciding
/// more than `max_tuples` tuples.
pub fn search_witness_capped(
    x: &SimplicialComplex,
    f: &AffineMap,
    r: usize,
    max_tuples: Option<usize>,
) -> Result<SearchOutcome> {
    if r < 2 {
        return Err(invalid(format!("r must be at least 2, got {r}")));
    }
    f.check_covers(x)?;
    let mut tuples = x.disjoint_tuple_ids(r, None, false);
    let mut checked = 0usize;
    loop {
        let batch: Vec<Vec<usize>> = tuples.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok(SearchOutcome { witness: None, tuples_checked: checked });
        }
        let hit = crate::par_find_map_first(&batch, |ids| {
            let faces: Vec<Simplex> = ids.iter().map(|id| x.face(*id).clone()).collect();
            tuple_witness(f, &faces)
        });
        if let Some((pos, witness)) = hit {
            checked += pos + 1;
            if let Some(limit) = max_tuples.filter(|l| checked > *l) {
                return Err(Error::ResourceLimit { what: "disjoint tuples".into(), limit });
            }
            return Ok(SearchOutcome { witness: Some(witness), tuples_checked: checked });
        }
        checked += batch.len();
        if let Some(limit) = max_tuples.filter(|l| checked > *l) {
            return Err(Error::ResourceLimit { what: "disjoint tuples".into(), limit });
        }
    }
}

/// True iff no `r` pairwise disjoint faces have intersecting images.
pub fn almost_r_embedding_check(x: &SimplicialComplex, f: &AffineMap, r: usize) -> Result<bool> {
    Ok(search_witness(x, f, r)?.witness.is_none())
}
