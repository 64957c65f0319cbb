//! JSON form of simplicial complexes and named generators.
//!
//! A complex is `{"vertices": [...], "facets": [[...], ...]}`. The vertex
//! list is optional. When every label is a non-negative integer the labels
//! are used as they are; otherwise each distinct label gets an integer in
//! order of first appearance (vertex list first, then facets) and the
//! dictionary is returned alongside the complex. Listed vertices that occur
//! in no facet become isolated vertices.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::complex::SimplicialComplex;
use crate::error::{invalid, Result};
use crate::refinement::{iterated_subdivision, DEFAULT_MAX_FACES};

/// A parsed complex together with the original labels of renamed vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledComplex {
    pub complex: SimplicialComplex,
    /// Integer vertex → original label; empty when labels were integers already.
    pub labels: BTreeMap<usize, String>,
}

fn label_key(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_u64() => Ok(n.to_string()),
        other => Err(invalid(format!("vertex labels must be strings or non-negative integers, got {other}"))),
    }
}

pub fn parse_complex_json(text: &str) -> Result<LabelledComplex> {
    let value: Value = serde_json::from_str(text).map_err(|e| invalid(format!("complex JSON: {e}")))?;
    parse_complex_value(&value)
}

pub fn parse_complex_value(value: &Value) -> Result<LabelledComplex> {
    let obj = value.as_object().ok_or_else(|| invalid("a complex must be a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| *k != "vertices" && *k != "facets") {
        return Err(invalid(format!("unknown field {k:?} in complex JSON")));
    }
    let listed: Vec<&Value> = match obj.get("vertices") {
        None => Vec::new(),
        Some(Value::Array(vs)) => vs.iter().collect(),
        Some(_) => return Err(invalid("\"vertices\" must be an array")),
    };
    let facets: Vec<Vec<&Value>> = match obj.get("facets") {
        Some(Value::Array(fs)) => fs
            .iter()
            .map(|f| f.as_array().map(|a| a.iter().collect()).ok_or_else(|| invalid("each facet must be an array")))
            .collect::<Result<_>>()?,
        _ => return Err(invalid("a complex needs a \"facets\" array")),
    };
    let all_integers = listed.iter().chain(facets.iter().flatten()).all(|v| v.is_u64());

    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut labels = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut intern = |v: &Value, index: &mut BTreeMap<String, usize>| -> Result<usize> {
        if all_integers {
            return usize::try_from(v.as_u64().expect("checked integer"))
                .map_err(|_| invalid(format!("vertex label {v} is too large")));
        }
        let key = label_key(v)?;
        Ok(*index.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            order.len() - 1
        }))
    };
    let mut listed_ids = Vec::with_capacity(listed.len());
    for v in &listed {
        let id = intern(v, &mut index)?;
        if listed_ids.contains(&id) {
            return Err(invalid(format!("vertex {v} listed twice")));
        }
        listed_ids.push(id);
    }
    let mut facet_ids: Vec<Vec<usize>> = Vec::with_capacity(facets.len());
    for f in &facets {
        let ids = f.iter().map(|v| intern(v, &mut index)).collect::<Result<Vec<_>>>()?;
        if !listed.is_empty() {
            if let Some((v, _)) = f.iter().zip(&ids).find(|(_, id)| !listed_ids.contains(id)) {
                return Err(invalid(format!("facet uses vertex {v}, which is not in the vertex list")));
            }
        }
        facet_ids.push(ids);
    }
    if !all_integers {
        labels = order.into_iter().enumerate().collect();
    }
    for id in &listed_ids {
        if !facet_ids.iter().flatten().any(|u| u == id) {
            facet_ids.push(vec![*id]);
        }
    }
    let complex = SimplicialComplex::from_facets(facet_ids)?;
    Ok(LabelledComplex { complex, labels })
}

#[derive(Serialize)]
struct ComplexJson<'a> {
    vertices: &'a [usize],
    facets: Vec<&'a [usize]>,
}

/// Canonical JSON: sorted vertex list and lexicographically sorted facets.
pub fn complex_to_json(x: &SimplicialComplex) -> Value {
    let mut facets: Vec<&[usize]> = x.facets().iter().map(|f| f.vertices()).collect();
    facets.sort();
    serde_json::to_value(ComplexJson { vertices: x.vertices(), facets }).expect("plain data")
}

/// Builds a complex from a generator name:
///
/// * `simplex:n`, the full `n`-simplex on `0..=n`;
/// * `bd-simplex:n`, its boundary;
/// * `bary:<generator>:k`, the `k`-fold barycentric subdivision of another generator.
pub fn generate(spec: &str) -> Result<SimplicialComplex> {
    let bad = || invalid(format!("unknown complex generator {spec:?}"));
    let parse_n = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(rest) = spec.strip_prefix("bary:") {
        let (inner, k) = rest.rsplit_once(':').ok_or_else(bad)?;
        let (a, _) = iterated_subdivision(&generate(inner)?, parse_n(k)?, DEFAULT_MAX_FACES)?;
        return Ok(a);
    }
    let (name, n) = spec.split_once(':').ok_or_else(bad)?;
    let n = parse_n(n)?;
    match name {
        "simplex" => Ok(SimplicialComplex::simplex(n)),
        "bd-simplex" if n >= 1 => Ok(SimplicialComplex::boundary_simplex(n)),
        "bd-simplex" => Err(invalid("bd-simplex:0 is the empty complex; use n ≥ 1")),
        _ => Err(bad()),
    }
}
