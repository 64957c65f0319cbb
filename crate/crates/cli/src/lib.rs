//! The `tverberg` command line: every checker and builder of `tverberg-core`
//! behind one binary, with JSON reports on standard output.
//!
//! Exit codes: 0 when the property holds or the computation succeeded, 1
//! when the property fails (the report carries the counterexample), 2 for
//! input errors and 3 when a resource cap is hit.

use std::ffi::OsString;
use std::fs;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tverberg_core::acyclicity::{
    fiber_condition_check_capped, is_complementary_acyclic, theorem_hypothesis_report,
    tverberg_dimension,
};
use tverberg_core::deleted::{check_free_cellular_action, regular_representation, GroupAction, DEFAULT_MAX_CELLS};
use tverberg_core::field::as_prime_power;
use tverberg_core::io::{complex_to_json, generate, parse_complex_value, LabelledComplex};
use tverberg_core::refinement::{check_refinement, iterated_subdivision, GeometricComplex, RefinementWitness, DEFAULT_MAX_FACES};
use tverberg_core::spectral::{e1_page_capped, e2_row0, lemma_crcon_verify_capped};
use tverberg_core::tverberg::{
    random_affine_map, search_witness_capped, verify_witness, AffineMap, TverbergWitness, DEFAULT_SEED,
};
use tverberg_core::{betti, chain_complex, is_n_acyclic, reduced_betti, DeletedProductComplex, Error, PrimeField};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Default cap on disjoint tuples decided by `tverberg`.
pub const DEFAULT_MAX_TUPLES: usize = 10_000_000;

const COMPLEX_HELP: &str =
    "complex: a JSON file path, inline JSON {\"facets\": [...]}, or a generator \
     (simplex:n, bd-simplex:n, bary:<generator>:k)";

#[derive(Parser, Debug)]
#[command(name = "tverberg", version, about = "Exact topology checks around Tverberg-type theorems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; defaults to the available parallelism. Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Add wall-clock timings to the report (the output is then no longer byte-stable).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti numbers over GF(p), reduced unless --unreduced.
    Betti(BettiArgs),
    /// Whether the complex is n-acyclic over GF(p).
    Acyclic(AcyclicArgs),
    /// Whether deleting any at most s disjoint faces leaves an (n − Σ dim)-acyclic complex.
    CompAcyclic(CompAcyclicArgs),
    /// The (r−1)-complementary (d(r−1)−1)-acyclicity hypothesis for r a power of p.
    Hypothesis(HypothesisArgs),
    /// Cells, homology and freeness of the Z_a^m action on the deleted product X^(r).
    Delprod(DelprodArgs),
    /// Compares dim H_s of the deleted product X^(r) with dim H_s(X) for s ≤ n.
    Lemma3(Lemma3Args),
    /// E¹ page of the first-factor filtration against fiber homology.
    E1(E1Args),
    /// Verifies a refinement witness exactly.
    RefineCheck(RefineCheckArgs),
    /// k-fold barycentric subdivision with its refinement witness.
    Subdivide(SubdivideArgs),
    /// Searches for a Tverberg witness of an affine map.
    Tverberg(TverbergArgs),
    /// Verifies a Tverberg witness exactly.
    VerifyWitness(VerifyWitnessArgs),
}

#[derive(Args, Debug, Serialize)]
struct BettiArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Unreduced Betti numbers.
    #[arg(long)]
    unreduced: bool,
    /// Include the boundary matrices as triplet text.
    #[arg(long)]
    dump: bool,
}

#[derive(Args, Debug, Serialize)]
struct AcyclicArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long, allow_negative_numbers = true)]
    n: i32,
    #[arg(long, default_value_t = 2)]
    p: u32,
}

#[derive(Args, Debug, Serialize)]
struct CompAcyclicArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    s: usize,
    #[arg(long, allow_negative_numbers = true)]
    n: i32,
    #[arg(long, default_value_t = 2)]
    p: u32,
}

#[derive(Args, Debug, Serialize)]
struct HypothesisArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    p: u32,
}

#[derive(Args, Debug, Serialize)]
struct DelprodArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Prime a of the acting group Z_a^m (default: r = a^m when r is a prime power).
    #[arg(long, requires = "m")]
    a: Option<u32>,
    #[arg(long, requires = "a")]
    m: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Args, Debug, Serialize)]
struct Lemma3Args {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    r: usize,
    /// Top degree; defaults to d(r−1)−1 when --d is given.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i32>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Args, Debug, Serialize)]
struct E1Args {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Largest total degree p + q; defaults to n + 1.
    #[arg(long)]
    cap: Option<usize>,
    /// Acyclicity level; enables the row-zero and quotient comparisons.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i32>,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Args, Debug, Serialize)]
struct RefineCheckArgs {
    /// The coarse complex B.
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    /// The refining complex A, in the same forms as --complex.
    #[arg(long)]
    refined: String,
    /// Witness JSON (file or inline).
    #[arg(long)]
    witness: String,
    /// Vertex coordinates of B as JSON {"vertex": ["p/q", ...]}; standard basis vectors by default.
    #[arg(long)]
    coords: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct SubdivideArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_FACES)]
    max_faces: usize,
}

#[derive(Args, Debug, Serialize)]
struct TverbergArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    /// Map JSON {"d": .., "coords": {..}} (file or inline) or random:<d>[:<seed>].
    #[arg(long)]
    map: String,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_TUPLES)]
    max_tuples: usize,
}

#[derive(Args, Debug, Serialize)]
struct VerifyWitnessArgs {
    #[arg(long, help = COMPLEX_HELP)]
    complex: String,
    #[arg(long)]
    map: String,
    #[arg(long)]
    witness: String,
}

/// What a finished invocation printed and returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    tool_version: &'a str,
    inputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counters: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Value>,
}

struct Outcome {
    code: i32,
    result: Value,
    counters: Value,
    /// Extra input facts, such as the label dictionary of a complex.
    notes: Vec<(&'static str, Value)>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Execution { code, stdout: text, stderr: String::new() }
            } else {
                Execution { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            };
        }
    };
    let (name, inputs) = describe(&cli.command);
    let start = Instant::now();
    let outcome = match cli.workers {
        Some(0) => Err(Error::InvalidInput("--workers must be at least 1".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::InvalidInput(format!("cannot start {w} workers: {e}"))),
        },
        None => execute(&cli.command),
    };
    let elapsed = start.elapsed();
    let timings = cli.timings.then(|| json!({ "wall_ms": elapsed.as_secs_f64() * 1e3 }));
    let mut report = RunReport {
        command: name,
        tool_version: env!("CARGO_PKG_VERSION"),
        inputs,
        result: None,
        error: None,
        counters: None,
        timings,
    };
    let (code, stderr) = match outcome {
        Ok(out) => {
            for (k, v) in out.notes {
                report.inputs[k] = v;
            }
            report.result = Some(out.result);
            report.counters = Some(out.counters);
            (out.code, String::new())
        }
        Err(e) => {
            let (kind, code) = match &e {
                Error::ResourceLimit { .. } => ("resource_limit", EXIT_RESOURCE),
                Error::DegenerateFace(_) => ("degenerate_face", EXIT_INPUT),
                Error::Inconsistent(_) => ("inconsistent", EXIT_INPUT),
                Error::InvalidInput(_) => ("invalid_input", EXIT_INPUT),
            };
            report.error = Some(json!({ "kind": kind, "message": e.to_string() }));
            (code, format!("error: {e}\n"))
        }
    };
    let mut stdout = serde_json::to_string_pretty(&report).expect("JSON values serialize");
    stdout.push('\n');
    Execution { code, stdout, stderr }
}

fn describe(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Betti(a) => ("betti", to_json(a)),
        Command::Acyclic(a) => ("acyclic", to_json(a)),
        Command::CompAcyclic(a) => ("comp-acyclic", to_json(a)),
        Command::Hypothesis(a) => ("hypothesis", to_json(a)),
        Command::Delprod(a) => ("delprod", to_json(a)),
        Command::Lemma3(a) => ("lemma3", to_json(a)),
        Command::E1(a) => ("e1", to_json(a)),
        Command::RefineCheck(a) => ("refine-check", to_json(a)),
        Command::Subdivide(a) => ("subdivide", to_json(a)),
        Command::Tverberg(a) => ("tverberg", to_json(a)),
        Command::VerifyWitness(a) => ("verify-witness", to_json(a)),
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn field(p: u32) -> Result<PrimeField, Error> {
    PrimeField::new(p)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn read_source(spec: &str) -> Result<String, Error> {
    let t = spec.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(spec.to_string());
    }
    fs::read_to_string(spec).map_err(|e| invalid(format!("cannot read {spec}: {e}")))
}

fn parse_json(spec: &str, what: &str) -> Result<Value, Error> {
    serde_json::from_str(&read_source(spec)?).map_err(|e| invalid(format!("{what} JSON: {e}")))
}

fn load_complex(spec: &str) -> Result<LabelledComplex, Error> {
    let generator = ["simplex:", "bd-simplex:", "bary:"].iter().any(|p| spec.starts_with(p));
    if generator {
        return Ok(LabelledComplex { complex: generate(spec)?, labels: Default::default() });
    }
    parse_complex_value(&parse_json(spec, "complex")?)
}

fn label_notes(c: &LabelledComplex) -> Vec<(&'static str, Value)> {
    if c.labels.is_empty() {
        Vec::new()
    } else {
        vec![("labels", to_json(&c.labels))]
    }
}

fn load_map(spec: &str, vertices: &[usize]) -> Result<AffineMap, Error> {
    if let Some(rest) = spec.strip_prefix("random:") {
        let mut parts = rest.split(':');
        let d = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| invalid(format!("bad map spec {spec:?}")))?;
        let seed = match parts.next() {
            Some(s) => s.parse().map_err(|_| invalid(format!("bad seed in {spec:?}")))?,
            None => DEFAULT_SEED,
        };
        if parts.next().is_some() {
            return Err(invalid(format!("bad map spec {spec:?}")));
        }
        return Ok(random_affine_map(vertices, d, seed));
    }
    serde_json::from_value(parse_json(spec, "map")?).map_err(|e| invalid(format!("map: {e}")))
}

fn holds(b: bool) -> i32 {
    if b {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}

fn execute(cmd: &Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Betti(a) => {
            let c = load_complex(&a.complex)?;
            let f = field(a.p)?;
            let x = &c.complex;
            let profile = if a.unreduced { betti(x, f) } else { reduced_betti(x, f) };
            let mut result = json!({
                "reduced": profile.reduced,
                "p": profile.p,
                "betti": profile.betti,
                "euler_characteristic": profile.euler_characteristic(),
                "f_vector": x.f_vector(),
            });
            if a.dump {
                result["chain_complex"] = Value::String(chain_complex(x, f, !a.unreduced).dump());
            }
            Ok(Outcome { code: EXIT_HOLDS, result, counters: json!({ "faces": x.num_faces() }), notes: label_notes(&c) })
        }
        Command::Acyclic(a) => {
            let c = load_complex(&a.complex)?;
            let v = is_n_acyclic(&c.complex, a.n, field(a.p)?);
            Ok(Outcome {
                code: holds(v.acyclic),
                result: json!({ "n": a.n, "p": a.p, "acyclic": v.acyclic, "failure": v.failure }),
                counters: json!({ "faces": c.complex.num_faces() }),
                notes: label_notes(&c),
            })
        }
        Command::CompAcyclic(a) => {
            let c = load_complex(&a.complex)?;
            let rep = is_complementary_acyclic(&c.complex, a.s, a.n, field(a.p)?)?;
            Ok(Outcome {
                code: holds(rep.holds),
                counters: json!({
                    "faces": c.complex.num_faces(),
                    "tuples_checked": rep.tuples_checked,
                    "cache_hits": rep.cache_hits,
                }),
                result: to_json(&rep),
                notes: label_notes(&c),
            })
        }
        Command::Hypothesis(a) => {
            let c = load_complex(&a.complex)?;
            let rep = theorem_hypothesis_report(&c.complex, a.d, a.r, field(a.p)?)?;
            let mut result = to_json(&rep);
            result["d"] = json!(a.d);
            result["r"] = json!(a.r);
            Ok(Outcome {
                code: holds(rep.holds),
                counters: json!({
                    "faces": c.complex.num_faces(),
                    "tuples_checked": rep.tuples_checked,
                    "cache_hits": rep.cache_hits,
                }),
                result,
                notes: label_notes(&c),
            })
        }
        Command::Delprod(a) => {
            let c = load_complex(&a.complex)?;
            let f = field(a.p)?;
            let d = DeletedProductComplex::build_capped(&c.complex, a.r, a.max_cells)?;
            let action = match (a.a, a.m) {
                (Some(pa), Some(m)) => Some(regular_representation(pa, m)?),
                _ if a.r == 1 => Some(GroupAction::trivial()),
                _ => match as_prime_power(a.r as u64) {
                    Some((pa, m)) => Some(regular_representation(pa as u32, m)?),
                    None => None,
                },
            };
            let freeness = action.as_ref().map(|g| check_free_cellular_action(&d, g)).transpose()?;
            let homology = tverberg_core::homology_of_chain_complex(&d.cellular_chain_complex(f, false))?;
            let free = freeness.as_ref().is_none_or(|r| r.free);
            Ok(Outcome {
                code: holds(free),
                result: json!({
                    "r": a.r,
                    "dim": d.dim(),
                    "cell_counts": d.cell_counts(),
                    "num_cells": d.num_cells(),
                    "homology": homology,
                    "group": action.as_ref().map(|g| json!({ "a": g.a, "m": g.m, "order": g.r })),
                    "freeness": freeness,
                }),
                counters: json!({ "faces": c.complex.num_faces(), "cells": d.num_cells() }),
                notes: label_notes(&c),
            })
        }
        Command::Lemma3(a) => {
            let c = load_complex(&a.complex)?;
            let n = match (a.n, a.d) {
                (Some(n), _) => n,
                (None, Some(d)) => tverberg_dimension(d, a.r),
                (None, None) => return Err(invalid("lemma3 needs --n or --d")),
            };
            let rep = lemma_crcon_verify_capped(&c.complex, a.r, n, field(a.p)?, a.max_cells)?;
            Ok(Outcome {
                code: holds(rep.equal),
                counters: json!({ "faces": c.complex.num_faces(), "cells": rep.cells }),
                result: to_json(&rep),
                notes: label_notes(&c),
            })
        }
        Command::E1(a) => {
            let c = load_complex(&a.complex)?;
            let f = field(a.p)?;
            let cap = match (a.cap, a.n) {
                (Some(cap), _) => cap,
                (None, Some(n)) => (n + 1).max(0) as usize,
                (None, None) => return Err(invalid("e1 needs --cap or --n")),
            };
            let page = e1_page_capped(&c.complex, a.r, f, cap, a.n, a.max_cells)?;
            let row0 = a.n.map(|n| e2_row0(&c.complex, a.r, f, n)).transpose()?;
            let fibers = match a.n {
                Some(n) if a.r >= 2 => Some(fiber_condition_check_capped(&c.complex, a.r, n, f, a.max_cells)?),
                _ => None,
            };
            let ok = page.all_match
                && page.strata_stack
                && page.quotient_check.as_ref().is_none_or(|q| q.holds)
                && row0.as_ref().is_none_or(|r| r.matches);
            let mut result = to_json(&page);
            result["row0_comparison"] = to_json(&row0);
            result["fiber_condition"] = to_json(&fibers);
            Ok(Outcome {
                code: holds(ok),
                result,
                counters: json!({ "faces": c.complex.num_faces(), "entries": page.entries.len() }),
                notes: label_notes(&c),
            })
        }
        Command::RefineCheck(a) => {
            let b = load_complex(&a.complex)?;
            let refined = load_complex(&a.refined)?;
            let w: RefinementWitness = serde_json::from_value(parse_json(&a.witness, "witness")?)
                .map_err(|e| invalid(format!("witness: {e}")))?;
            let geometric = match &a.coords {
                None => GeometricComplex::standard(b.complex.clone()),
                Some(spec) => {
                    let coords: std::collections::BTreeMap<usize, Vec<tverberg_core::rational::Q>> =
                        serde_json::from_value(parse_json(spec, "coordinates")?)
                            .map_err(|e| invalid(format!("coordinates: {e}")))?;
                    let coords = coords.into_iter().map(|(v, c)| (v, tverberg_core::rational::from_q(&c))).collect();
                    GeometricComplex::new(b.complex.clone(), coords)?
                }
            };
            let rep = check_refinement(&refined.complex, &geometric, &w)?;
            Ok(Outcome {
                code: holds(rep.verdict.valid),
                counters: json!({
                    "vertices_checked": rep.vertices_checked,
                    "faces_checked": rep.faces_checked,
                    "pieces_checked": rep.pieces_checked,
                    "overlap_tests": rep.overlap_tests,
                }),
                result: to_json(&rep),
                notes: label_notes(&b),
            })
        }
        Command::Subdivide(a) => {
            let b = load_complex(&a.complex)?;
            let (sub, w) = iterated_subdivision(&b.complex, a.k, a.max_faces)?;
            let rep = check_refinement(&sub, &GeometricComplex::standard(b.complex.clone()), &w)?;
            Ok(Outcome {
                code: holds(rep.verdict.valid),
                counters: json!({ "faces": sub.num_faces(), "overlap_tests": rep.overlap_tests }),
                result: json!({
                    "k": a.k,
                    "f_vector": sub.f_vector(),
                    "complex": complex_to_json(&sub),
                    "witness": w,
                    "check": rep.verdict,
                }),
                notes: label_notes(&b),
            })
        }
        Command::Tverberg(a) => {
            let c = load_complex(&a.complex)?;
            let map = load_map(&a.map, c.complex.vertices())?;
            let out = search_witness_capped(&c.complex, &map, a.r, Some(a.max_tuples))?;
            let verified = out.witness.as_ref().map(|w| verify_witness(&c.complex, &map, w));
            let mut notes = label_notes(&c);
            if a.map.starts_with("random:") {
                notes.push(("map_coordinates", to_json(&map)));
            }
            Ok(Outcome {
                code: EXIT_HOLDS,
                result: json!({
                    "r": a.r,
                    "d": map.d(),
                    "almost_embedding": out.witness.is_none(),
                    "witness": out.witness,
                    "verified": verified,
                }),
                counters: json!({ "faces": c.complex.num_faces(), "tuples_checked": out.tuples_checked }),
                notes,
            })
        }
        Command::VerifyWitness(a) => {
            let c = load_complex(&a.complex)?;
            let map = load_map(&a.map, c.complex.vertices())?;
            let w: TverbergWitness = serde_json::from_value(parse_json(&a.witness, "witness")?)
                .map_err(|e| invalid(format!("witness: {e}")))?;
            let v = verify_witness(&c.complex, &map, &w);
            Ok(Outcome {
                code: holds(v.valid),
                result: to_json(&v),
                counters: json!({ "witness_faces": w.faces.len() }),
                notes: label_notes(&c),
            })
        }
    }
}
