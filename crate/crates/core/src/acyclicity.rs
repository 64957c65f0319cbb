//! Complementary acyclicity: for every `i ≤ s` and pairwise disjoint faces
//! `σ_1, …, σ_i`, the complex `X − σ_1 − … − σ_i` must be
//! `(n − Σ dim σ_j)`-acyclic. Requirements below `−1` are vacuous.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::chain::{chain_complex, chain_is_n_acyclic, homology_upto, AcyclicityFailure};
use crate::complex::{FaceTuple, Simplex, SimplicialComplex};
use crate::deleted::{DeletedProductComplex, DEFAULT_MAX_CELLS};
use crate::error::{invalid, Error, Result};
use crate::field::{prime_power_exponent, PrimeField};
use crate::par_map;

/// Degree at which an acyclicity requirement fails; `"empty"` when the
/// complex has no faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailingDegree {
    Empty,
    Degree(i32),
}

impl Serialize for FailingDegree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FailingDegree::Empty => s.serialize_str("empty"),
            FailingDegree::Degree(k) => s.serialize_i32(*k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub faces: FaceTuple,
    pub degree: FailingDegree,
    /// Reduced Betti number in the failing degree (absent for emptiness).
    pub betti: Option<usize>,
    /// The acyclicity level that was required of the deletion.
    pub required: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementaryReport {
    pub holds: bool,
    pub s: usize,
    pub n: i32,
    pub p: u32,
    pub counterexample: Option<Counterexample>,
    /// Tuples whose deletion had a non-vacuous requirement.
    pub tuples_checked: usize,
    /// Checked tuples answered from the deletion cache.
    pub cache_hits: usize,
    /// Tuples with `n − Σ dim σ_j < −1`, which impose nothing.
    pub vacuous_tuples: usize,
}

/// Knobs for [`is_complementary_acyclic_with`].
#[derive(Clone, Copy, Debug)]
pub struct ComplementaryOptions {
    /// Memoize deletions by the union of deleted vertices.
    pub use_cache: bool,
    /// Visit tuples in reverse order; the report must not change.
    pub reverse: bool,
}

impl Default for ComplementaryOptions {
    fn default() -> Self {
        ComplementaryOptions {
            use_cache: true,
            reverse: false,
        }
    }
}

/// Reduced homology of a deletion up to the highest degree any tuple needs;
/// `None` for the empty complex.
type DeletionProfile = Option<Vec<usize>>;

fn deletion_profile(x: &SimplicialComplex, removed: &[usize], max_k: i32, f: PrimeField) -> DeletionProfile {
    let rest = x.delete_vertices(removed);
    if rest.is_empty() {
        return None;
    }
    if max_k < 0 {
        return Some(Vec::new());
    }
    let h = homology_upto(&chain_complex(&rest, f, true), max_k).expect("simplicial complex");
    Some((0..=max_k).map(|k| h.get(k)).collect())
}

fn verdict(profile: &DeletionProfile, k: i32) -> Option<(FailingDegree, Option<usize>)> {
    match profile {
        None => Some((FailingDegree::Empty, None)),
        Some(b) => (0..=k)
            .find(|j| b[*j as usize] != 0)
            .map(|j| (FailingDegree::Degree(j), Some(b[j as usize]))),
    }
}

pub fn is_complementary_acyclic(x: &SimplicialComplex, s: usize, n: i32, f: PrimeField) -> Result<ComplementaryReport> {
    is_complementary_acyclic_with(x, s, n, f, ComplementaryOptions::default())
}

/// Checks `s`-complementary `n`-acyclicity over unordered disjoint tuples
/// with `0 ≤ i ≤ s` faces. The counterexample, if any, is the first failing
/// tuple in order of size and then canonical face order, independently of
/// the visiting order.
pub fn is_complementary_acyclic_with(
    x: &SimplicialComplex,
    s: usize,
    n: i32,
    f: PrimeField,
    opts: ComplementaryOptions,
) -> Result<ComplementaryReport> {
    if s < 1 {
        return Err(invalid("s must be at least 1"));
    }
    if n < -1 {
        return Err(invalid("n must be at least -1"));
    }
    let mut report = ComplementaryReport {
        holds: true,
        s,
        n,
        p: f.p(),
        counterexample: None,
        tuples_checked: 0,
        cache_hits: 0,
        vacuous_tuples: 0,
    };
    for i in 0..=s {
        let mut level: Vec<(Vec<usize>, Vec<usize>, i32)> = Vec::new();
        for ids in x.disjoint_tuple_ids(i, None, false) {
            let dim: usize = ids.iter().map(|id| x.face(*id).dim()).sum();
            let k = n - dim as i32;
            if k < -1 {
                report.vacuous_tuples += 1;
                continue;
            }
            let mut union: Vec<usize> = ids.iter().flat_map(|id| x.face(*id).vertices().iter().copied()).collect();
            union.sort_unstable();
            level.push((ids, union, k));
        }
        if opts.reverse {
            level.reverse();
        }
        report.tuples_checked += level.len();

        let profiles: Vec<DeletionProfile> = if opts.use_cache {
            let mut need: HashMap<&[usize], i32> = HashMap::new();
            for (_, union, k) in &level {
                let e = need.entry(union.as_slice()).or_insert(*k);
                *e = (*e).max(*k);
            }
            report.cache_hits += level.len() - need.len();
            let mut keys: Vec<(&[usize], i32)> = need.into_iter().collect();
            keys.sort_unstable();
            let computed = par_map(&keys, |(u, k)| deletion_profile(x, u, *k, f));
            let table: HashMap<&[usize], &DeletionProfile> =
                keys.iter().map(|(u, _)| *u).zip(computed.iter()).collect();
            level.iter().map(|(_, u, _)| table[u.as_slice()].clone()).collect()
        } else {
            par_map(&level, |(_, u, k)| deletion_profile(x, u, *k, f))
        };

        let failure = level
            .iter()
            .zip(&profiles)
            .filter_map(|((ids, _, k), prof)| verdict(prof, *k).map(|v| (ids, *k, v)))
            .min_by(|a, b| a.0.cmp(b.0));
        if let Some((ids, k, (degree, betti))) = failure {
            report.holds = false;
            report.counterexample = Some(Counterexample {
                faces: FaceTuple::new(ids.iter().map(|id| x.face(*id).clone()).collect())?,
                degree,
                betti,
                required: k,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// `n = d(r − 1) − 1`.
pub fn tverberg_dimension(d: usize, r: usize) -> i32 {
    (d * (r - 1)) as i32 - 1
}

/// Checks whether `x` is `(r−1)`-complementary `n`-acyclic over `GF(p)` for
/// `n = d(r−1) − 1`, with `r` a power of `p`.
pub fn theorem_hypothesis_report(
    x: &SimplicialComplex,
    d: usize,
    r: usize,
    f: PrimeField,
) -> Result<ComplementaryReport> {
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    match prime_power_exponent(r as u64, f.p() as u64) {
        Some(m) if m >= 1 => {}
        _ => {
            return Err(invalid(format!(
                "r = {r} is not a positive power of the field characteristic {}",
                f.p()
            )))
        }
    }
    is_complementary_acyclic(x, r - 1, tverberg_dimension(d, r), f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberFailure {
    pub face: Simplex,
    pub required: i32,
    pub failure: AcyclicityFailure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub holds: bool,
    pub r: usize,
    pub n: i32,
    pub p: u32,
    pub faces_checked: usize,
    pub first_failure: Option<FiberFailure>,
}

/// For every face `σ`, builds `F_σ = (X − σ)^(r−1)` and tests it for
/// `(n − dim σ)`-acyclicity directly.
pub fn fiber_condition_check(x: &SimplicialComplex, r: usize, n: i32, f: PrimeField) -> Result<FiberReport> {
    fiber_condition_check_capped(x, r, n, f, DEFAULT_MAX_CELLS)
}

pub fn fiber_condition_check_capped(
    x: &SimplicialComplex,
    r: usize,
    n: i32,
    f: PrimeField,
    max_cells: usize,
) -> Result<FiberReport> {
    if r < 2 {
        return Err(invalid("the fiber condition needs r >= 2"));
    }
    let faces: Vec<&Simplex> = x
        .faces()
        .iter()
        .filter(|s| n - s.dim() as i32 >= -1)
        .collect();
    let results = par_map(&faces, |sigma| -> Result<Option<FiberFailure>> {
        let required = n - sigma.dim() as i32;
        let fiber = DeletedProductComplex::build_capped(&x.delete(sigma), r - 1, max_cells).map_err(
            |e| match e {
                Error::ResourceLimit { what, limit } => Error::ResourceLimit {
                    what: format!("{what} over face {sigma}"),
                    limit,
                },
                other => other,
            },
        )?;
        let v = chain_is_n_acyclic(&fiber.cellular_chain_complex(f, false), required)?;
        Ok(v.failure.map(|failure| FiberFailure {
            face: (*sigma).clone(),
            required,
            failure,
        }))
    });
    let mut first_failure = None;
    for res in results {
        if let Some(fail) = res? {
            first_failure = Some(fail);
            break;
        }
    }
    Ok(FiberReport {
        holds: first_failure.is_none(),
        r,
        n,
        p: f.p(),
        faces_checked: faces.len(),
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn sphere_two_is_one_complementary_one_acyclic() {
        let rep = is_complementary_acyclic(&SimplicialComplex::boundary_simplex(3), 1, 1, gf(2)).unwrap();
        assert!(rep.holds, "{rep:?}");
        // X itself plus 14 single faces; the triangles need only non-emptiness
        assert_eq!(rep.tuples_checked, 15);
        assert_eq!(rep.vacuous_tuples, 0);
    }

    #[test]
    fn two_edges_fail_at_the_start() {
        let x = SimplicialComplex::from_facets(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let rep = is_complementary_acyclic(&x, 1, 0, gf(2)).unwrap();
        assert!(!rep.holds);
        let ce = rep.counterexample.unwrap();
        assert!(ce.faces.is_empty());
        assert_eq!(ce.degree, FailingDegree::Degree(0));
        assert_eq!(ce.betti, Some(1));
    }

    #[test]
    fn boundary_of_four_simplex() {
        let rep = is_complementary_acyclic(&SimplicialComplex::boundary_simplex(4), 2, 1, gf(3)).unwrap();
        assert!(rep.holds);
        assert!(rep.cache_hits > 0);
    }

    #[test]
    fn hypothesis_instances() {
        let rep = theorem_hypothesis_report(&SimplicialComplex::boundary_simplex(3), 2, 2, gf(2)).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.n, 1);
        let rep = theorem_hypothesis_report(&SimplicialComplex::boundary_simplex(6), 2, 3, gf(3)).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.n, 3);
        let rep = theorem_hypothesis_report(&SimplicialComplex::simplex(1), 2, 2, gf(2)).unwrap();
        assert!(!rep.holds);
        let ce = rep.counterexample.unwrap();
        assert_eq!(ce.faces.faces(), &[Simplex::new(vec![0, 1]).unwrap()]);
        assert_eq!(ce.degree, FailingDegree::Empty);
        assert_eq!(ce.required, 0);
        assert!(theorem_hypothesis_report(&SimplicialComplex::simplex(1), 2, 6, gf(2)).is_err());
        assert!(theorem_hypothesis_report(&SimplicialComplex::simplex(1), 2, 1, gf(2)).is_err());
    }

    #[test]
    fn counterexample_serializes_degree() {
        let x = SimplicialComplex::simplex(1);
        let rep = theorem_hypothesis_report(&x, 2, 2, gf(2)).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["counterexample"]["degree"], "empty");
        assert_eq!(v["counterexample"]["faces"], serde_json::json!([[0, 1]]));
    }

    #[test]
    fn fiber_condition_instances() {
        assert!(fiber_condition_check(&SimplicialComplex::boundary_simplex(3), 2, 1, gf(2)).unwrap().holds);
        assert!(fiber_condition_check(&SimplicialComplex::boundary_simplex(2), 2, 0, gf(2)).unwrap().holds);
        assert!(fiber_condition_check(&SimplicialComplex::boundary_simplex(1), 2, 0, gf(2)).unwrap().holds);
        // the hexagon case: F of the triangle is empty, so n = 1 fails there
        let rep = fiber_condition_check(&SimplicialComplex::simplex(2), 2, 1, gf(2)).unwrap();
        assert!(!rep.holds);
        let fail = rep.first_failure.unwrap();
        assert_eq!(fail.failure, AcyclicityFailure::Empty);
        assert!(fiber_condition_check(&SimplicialComplex::simplex(2), 1, 1, gf(2)).is_err());
    }

    #[test]
    fn fiber_cap_names_the_face() {
        let err = fiber_condition_check_capped(&SimplicialComplex::boundary_simplex(5), 3, 3, gf(3), 5).unwrap_err();
        match err {
            Error::ResourceLimit { what, .. } => assert!(what.contains("over face {0}"), "{what}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cache_and_order_do_not_change_the_answer() {
        let cases = [
            (SimplicialComplex::boundary_simplex(4), 2, 1, 3),
            (SimplicialComplex::from_facets(vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]]).unwrap(), 2, 1, 2),
            (SimplicialComplex::simplex(3), 2, 2, 2),
        ];
        for (x, s, n, p) in cases {
            let base = is_complementary_acyclic(&x, s, n, gf(p)).unwrap();
            for (use_cache, reverse) in [(false, false), (true, true), (false, true)] {
                let other = is_complementary_acyclic_with(&x, s, n, gf(p), ComplementaryOptions { use_cache, reverse }).unwrap();
                assert_eq!(other.holds, base.holds);
                assert_eq!(other.counterexample, base.counterexample);
                assert_eq!(other.tuples_checked, base.tuples_checked);
                if use_cache {
                    assert_eq!(other.cache_hits, base.cache_hits);
                }
            }
        }
    }
}
