//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain values and returns a JSON string; the
//! page renders it. The `*_json` functions hold the logic and are what the
//! native tests call; the `#[wasm_bindgen]` wrappers turn errors into
//! JavaScript exceptions.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tverberg_core::acyclicity::theorem_hypothesis_report;
use tverberg_core::deleted::DeletedProductComplex;
use tverberg_core::io::generate;
use tverberg_core::rational::{format_rational, Rational};
use tverberg_core::refinement::{check_refinement, iterated_subdivision, GeometricComplex};
use tverberg_core::tverberg::{search_witness_capped, AffineMap};
use tverberg_core::{homology_of_chain_complex, reduced_betti, PrimeField, SimplicialComplex};

/// Largest deleted product the page will build.
pub const MAX_CELLS: usize = 200_000;
/// Largest number of points accepted by [`planar_tverberg`].
pub const MAX_POINTS: usize = 10;
/// Largest subdivision depth accepted by [`subdivide_triangle`].
pub const MAX_DEPTH: usize = 4;

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

fn float(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Homology of a generated complex and of its `r`-fold deleted product over GF(p),
/// plus the complementary-acyclicity hypothesis for target dimension `d`.
pub fn complex_summary_json(spec: &str, p: u32, r: usize, d: usize) -> Result<String, String> {
    let f = PrimeField::new(p).map_err(|e| e.to_string())?;
    let x = generate(spec).map_err(|e| e.to_string())?;
    let dp = DeletedProductComplex::build_capped(&x, r, MAX_CELLS).map_err(|e| e.to_string())?;
    let dh = homology_of_chain_complex(&dp.cellular_chain_complex(f, false)).map_err(|e| e.to_string())?;
    let hypothesis = match theorem_hypothesis_report(&x, d, r, f) {
        Ok(rep) => json!({ "holds": rep.holds, "n": rep.n, "counterexample": rep.counterexample }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let out = json!({
        "complex": spec,
        "f_vector": x.f_vector(),
        "reduced_betti": reduced_betti(&x, f).betti,
        "deleted_product": {
            "r": r,
            "cell_counts": dp.cell_counts(),
            "betti": dh.betti,
        },
        "hypothesis": hypothesis,
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn complex_summary(spec: &str, p: u32, r: usize, d: usize) -> Result<String, JsValue> {
    to_js(complex_summary_json(spec, p, r, d))
}

/// First Tverberg partition of planar points (`[[x, y], ...]`, integers or
/// `"p/q"` strings) into `r` parts, searching all pairwise disjoint subsets.
pub fn planar_tverberg_json(points: &str, r: usize) -> Result<String, String> {
    let pts: Vec<Value> = serde_json::from_str(points).map_err(|e| format!("points: {e}"))?;
    if pts.is_empty() || pts.len() > MAX_POINTS {
        return Err(format!("give between 1 and {MAX_POINTS} points"));
    }
    let coords = json!({ "d": 2, "coords": pts.iter().enumerate().map(|(i, p)| (i.to_string(), p.clone())).collect::<serde_json::Map<_, _>>() });
    let map: AffineMap = serde_json::from_value(coords).map_err(|e| format!("points: {e}"))?;
    let x = SimplicialComplex::simplex(pts.len() - 1);
    let out = search_witness_capped(&x, &map, r, Some(2_000_000)).map_err(|e| e.to_string())?;
    let result = match out.witness {
        None => json!({ "found": false, "tuples_checked": out.tuples_checked }),
        Some(w) => json!({
            "found": true,
            "parts": w.faces.iter().map(|s| s.vertices().to_vec()).collect::<Vec<_>>(),
            "point": w.point.iter().map(format_rational).collect::<Vec<_>>(),
            "point_xy": w.point.iter().map(float).collect::<Vec<_>>(),
            "tuples_checked": out.tuples_checked,
        }),
    };
    Ok(result.to_string())
}

#[wasm_bindgen]
pub fn planar_tverberg(points: &str, r: usize) -> Result<String, JsValue> {
    to_js(planar_tverberg_json(points, r))
}

/// The `k`-fold barycentric subdivision of a triangle with corners
/// `(0,0)`, `(1,0)`, `(0,1)`, as triangles in the plane, with its exact check.
pub fn subdivide_triangle_json(k: usize) -> Result<String, String> {
    if k > MAX_DEPTH {
        return Err(format!("depth at most {MAX_DEPTH}"));
    }
    let b = SimplicialComplex::simplex(2);
    let (a, w) = iterated_subdivision(&b, k, 1_000_000).map_err(|e| e.to_string())?;
    let corners = [(0, [0, 0]), (1, [1, 0]), (2, [0, 1])]
        .into_iter()
        .map(|(v, c)| (v, c.iter().map(|x| Rational::from_integer((*x).into())).collect()))
        .collect();
    let g = GeometricComplex::new(b, corners).map_err(|e| e.to_string())?;
    let report = check_refinement(&a, &g, &w).map_err(|e| e.to_string())?;
    let triangles: Vec<Vec<[f64; 2]>> = a
        .faces_of_dim(2)
        .iter()
        .map(|t| {
            t.vertices()
                .iter()
                .map(|v| {
                    let c = &w.carrier[v];
                    let p = g.point(&c.face, &c.bary).expect("carrier inside the triangle");
                    [float(&p[0]), float(&p[1])]
                })
                .collect()
        })
        .collect();
    let out = json!({
        "k": k,
        "f_vector": a.f_vector(),
        "triangles": triangles,
        "valid": report.verdict.valid,
        "reason": report.verdict.reason,
        "overlap_tests": report.overlap_tests,
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn subdivide_triangle(k: usize) -> Result<String, JsValue> {
    to_js(subdivide_triangle_json(k))
}
