use std::process::Command;

use serde_json::Value;
use tverberg_core::complex::Simplex;
use tverberg_core::{is_n_acyclic, PrimeField, SimplicialComplex};

const SQUARE: &str = r#"{"d":2,"coords":{"0":["0","0"],"1":["1","0"],"2":["0","1"],"3":["1","1"]}}"#;
const TWO_EDGES: &str = r#"{"facets":[[0,1],[2,3]]}"#;

fn tverberg(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tverberg")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, String::from_utf8(out.stderr).unwrap())
}

fn raw(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_tverberg")).args(args).output().expect("binary runs");
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn hypothesis_on_tetrahedron_boundary() {
    let (code, j, _) = tverberg(&["hypothesis", "--complex", "bd-simplex:3", "--d", "2", "--r", "2", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(j["command"], "hypothesis");
    assert_eq!(j["result"]["n"], 1);
    assert_eq!(j["result"]["holds"], true);
}

#[test]
fn lemma3_tables_agree() {
    let (code, j, _) = tverberg(&["lemma3", "--complex", "bd-simplex:3", "--r", "2", "--n", "1", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["deleted_product"], j["result"]["base"]);
    assert_eq!(j["result"]["equal"], true);
    let (code, j, _) = tverberg(&["lemma3", "--complex", "bd-simplex:3", "--r", "2", "--d", "2"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["n"], 1);
    assert_eq!(tverberg(&["lemma3", "--complex", "bd-simplex:3", "--r", "2"]).0, 2);
}

#[test]
fn betti_of_two_edges() {
    let (code, j, _) = tverberg(&["betti", "--complex", TWO_EDGES, "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["betti"]["0"], 1);
    assert_eq!(j["result"]["reduced"], true);
    let (_, j, _) = tverberg(&["betti", "--complex", TWO_EDGES, "--unreduced", "--dump"]);
    assert_eq!(j["result"]["betti"]["0"], 2);
    assert!(j["result"]["chain_complex"].as_str().unwrap().starts_with("# p 2"));
}

#[test]
fn failing_comp_acyclicity_counterexample_is_confirmed() {
    let (code, j, _) = tverberg(&["comp-acyclic", "--complex", TWO_EDGES, "--s", "1", "--n", "0"]);
    assert_eq!(code, 1);
    let cx = &j["result"]["counterexample"];
    assert_eq!(cx["degree"], 0);
    assert_eq!(cx["betti"], 1);
    // delete the reported faces independently and recheck
    let faces: Vec<Simplex> = serde_json::from_value(cx["faces"].clone()).unwrap();
    let x = SimplicialComplex::from_facets(vec![vec![0, 1], vec![2, 3]]).unwrap();
    let rest = x.delete_faces(&faces).unwrap();
    let required = cx["required"].as_i64().unwrap() as i32;
    assert!(!is_n_acyclic(&rest, required, PrimeField::new(2).unwrap()).acyclic);
}

#[test]
fn acyclic_and_hypothesis_failures_exit_one() {
    let (code, j, _) = tverberg(&["acyclic", "--complex", "bd-simplex:2", "--n", "1"]);
    assert_eq!(code, 1);
    assert_eq!(j["result"]["failure"]["degree"]["degree"], 1);
    assert_eq!(tverberg(&["acyclic", "--complex", "simplex:3", "--n", "5"]).0, 0);
    assert_eq!(tverberg(&["acyclic", "--complex", "simplex:3", "--n", "-1"]).0, 0);
    let (code, j, _) = tverberg(&["hypothesis", "--complex", "simplex:1", "--d", "2", "--r", "2"]);
    assert_eq!(code, 1);
    assert_eq!(j["result"]["counterexample"]["degree"], "empty");
}

#[test]
fn radon_search_and_verification() {
    let (code, j, _) = tverberg(&["tverberg", "--complex", "bd-simplex:3", "--r", "2", "--map", SQUARE]);
    assert_eq!(code, 0);
    let w = &j["result"]["witness"];
    assert_eq!(w["faces"], serde_json::json!([[0, 3], [1, 2]]));
    assert_eq!(w["point"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(j["result"]["almost_embedding"], false);
    let witness = w.to_string();
    let (code, j, _) = tverberg(&["verify-witness", "--complex", "bd-simplex:3", "--map", SQUARE, "--witness", &witness]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["valid"], true);
}

#[test]
fn bad_witnesses_exit_one() {
    let overlapping = r#"{"faces":[[0],[0,1]],"point":["0","0"],"weights":[["1"],["1","0"]]}"#;
    let (code, j, _) = tverberg(&["verify-witness", "--complex", "bd-simplex:3", "--map", SQUARE, "--witness", overlapping]);
    assert_eq!(code, 1);
    assert!(j["result"]["reason"].as_str().unwrap().starts_with("not disjoint"));
    let off = r#"{"faces":[[0,3],[1,2]],"point":["0","0"],"weights":[["1","0"],["1/2","1/2"]]}"#;
    let (code, j, _) = tverberg(&["verify-witness", "--complex", "bd-simplex:3", "--map", SQUARE, "--witness", off]);
    assert_eq!(code, 1);
    assert_eq!(j["result"]["reason"], "affine identity fails for face {1,2}");
}

#[test]
fn edge_is_an_almost_embedding() {
    let map = r#"{"d":2,"coords":{"0":[0,0],"1":[1,2]}}"#;
    let (code, j, _) = tverberg(&["tverberg", "--complex", "simplex:1", "--r", "2", "--map", map]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["almost_embedding"], true);
    assert_eq!(j["result"]["witness"], Value::Null);
}

#[test]
fn random_map_witness_verifies_through_the_cli() {
    let (code, j, _) = tverberg(&["tverberg", "--complex", "bd-simplex:6", "--r", "3", "--map", "random:2:11"]);
    assert_eq!(code, 0);
    let map = j["inputs"]["map_coordinates"].to_string();
    let witness = j["result"]["witness"].to_string();
    let (code, _, _) = tverberg(&["verify-witness", "--complex", "bd-simplex:6", "--map", &map, "--witness", &witness]);
    assert_eq!(code, 0);
}

#[test]
fn subdivision_round_trips_through_refine_check() {
    let (code, j, _) = tverberg(&["subdivide", "--complex", "simplex:2", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["f_vector"], serde_json::json!([7, 12, 6]));
    let a = j["result"]["complex"].to_string();
    let w = j["result"]["witness"].to_string();
    let (code, j2, _) = tverberg(&["refine-check", "--complex", "simplex:2", "--refined", &a, "--witness", &w]);
    assert_eq!(code, 0);
    assert_eq!(j2["result"]["valid"], true);
    // drop one piece of the triangle
    let mut wj = j["result"]["witness"].clone();
    for entry in wj["image_map"].as_array_mut().unwrap() {
        if entry["face"] == serde_json::json!([0, 1, 2]) {
            entry["pieces"].as_array_mut().unwrap().pop();
        }
    }
    let (code, j3, _) =
        tverberg(&["refine-check", "--complex", "simplex:2", "--refined", &a, "--witness", &wj.to_string()]);
    assert_eq!(code, 1);
    assert!(j3["result"]["reason"].as_str().unwrap().starts_with("volume deficit on the carrier {0,1,2}"));
    // explicit planar coordinates give the same verdict
    let coords = r#"{"0":["0","0"],"1":["1","0"],"2":["0","1"]}"#;
    let (code, _, _) =
        tverberg(&["refine-check", "--complex", "simplex:2", "--refined", &a, "--witness", &w, "--coords", coords]);
    assert_eq!(code, 0);
}

#[test]
fn delprod_and_e1() {
    let (code, j, _) = tverberg(&["delprod", "--complex", "simplex:2", "--r", "2", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["num_cells"], 12);
    assert_eq!(j["result"]["homology"]["betti"], serde_json::json!({"0": 1, "1": 1}));
    assert_eq!(j["result"]["freeness"]["free"], true);
    let (code, j, _) = tverberg(&["delprod", "--complex", "bd-simplex:4", "--r", "6"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["group"], Value::Null);
    let (code, j, _) = tverberg(&["e1", "--complex", "bd-simplex:3", "--r", "2", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["all_match"], true);
    assert_eq!(j["result"]["row0_comparison"]["matches"], true);
    assert_eq!(tverberg(&["e1", "--complex", "bd-simplex:3", "--r", "2"]).0, 2);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["betti"],
        vec!["betti", "--complex", "{\"facets\": [[0,0]]}"],
        vec!["betti", "--complex", "bd-simplex:3", "--p", "4"],
        vec!["betti", "--complex", "/nonexistent/complex.json"],
        vec!["betti", "--complex", "cube:3"],
        vec!["hypothesis", "--complex", "bd-simplex:3", "--d", "2", "--r", "6", "--p", "2"],
        vec!["tverberg", "--complex", "bd-simplex:3", "--r", "2", "--map", "{\"d\":2,\"coords\":{}}"],
        vec!["tverberg", "--complex", "bd-simplex:3", "--r", "2", "--map", "random:x"],
        vec!["betti", "--complex", "simplex:1", "--workers", "0"],
    ] {
        let (code, _, stderr) = tverberg(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!stderr.is_empty(), "{args:?}");
    }
    let (code, j, _) = tverberg(&["betti", "--complex", "bd-simplex:3", "--p", "4"]);
    assert_eq!(code, 2);
    assert_eq!(j["error"]["kind"], "invalid_input");
}

#[test]
fn caps_exit_three() {
    let (code, j, _) = tverberg(&["delprod", "--complex", "bd-simplex:5", "--r", "3", "--max-cells", "100"]);
    assert_eq!(code, 3);
    assert_eq!(j["error"]["kind"], "resource_limit");
    let (code, _, _) = tverberg(&["tverberg", "--complex", "bd-simplex:6", "--r", "3", "--map", "random:1", "--max-tuples", "1"]);
    assert_eq!(code, 3);
    let (code, _, _) = tverberg(&["subdivide", "--complex", "simplex:3", "--k", "3", "--max-faces", "1000"]);
    assert_eq!(code, 3);
}

#[test]
fn string_labels_are_reported() {
    let c = r#"{"vertices":["a","b","c"],"facets":[["a","b"],["b","c"],["c","a"]]}"#;
    let (code, j, _) = tverberg(&["betti", "--complex", c]);
    assert_eq!(code, 0);
    assert_eq!(j["inputs"]["labels"], serde_json::json!({"0": "a", "1": "b", "2": "c"}));
    assert_eq!(j["result"]["betti"]["1"], 1);
}

#[test]
fn complex_from_file() {
    let path = std::env::temp_dir().join(format!("tverberg-cli-test-{}.json", std::process::id()));
    std::fs::write(&path, TWO_EDGES).unwrap();
    let (code, j, _) = tverberg(&["betti", "--complex", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 0);
    assert_eq!(j["result"]["betti"]["0"], 1);
}

#[test]
fn output_is_byte_stable_and_timings_are_opt_in() {
    let args = ["comp-acyclic", "--complex", "bd-simplex:5", "--s", "1", "--n", "3", "--p", "3"];
    let (c1, first) = raw(&args);
    for workers in ["1", "3"] {
        let mut with = args.to_vec();
        with.extend(["--workers", workers]);
        let (c2, again) = raw(&with);
        assert_eq!((c1, &first), (c2, &again));
    }
    assert!(!String::from_utf8_lossy(&first).contains("timings"));
    let (_, j, _) = tverberg(&["betti", "--complex", "simplex:1", "--timings"]);
    assert!(j["timings"]["wall_ms"].is_number());
}

#[test]
fn help_and_version() {
    let (code, out) = raw(&["--help"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    for cmd in ["betti", "comp-acyclic", "lemma3", "refine-check", "verify-witness"] {
        assert!(text.contains(cmd));
    }
    let (code, out) = raw(&["--version"]);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["tverberg", "betti", "--complex", "bd-simplex:4", "--p", "5"];
    let exec = tverberg_cli::run(args);
    let (code, out) = raw(&args[1..]);
    assert_eq!(exec.code, code);
    assert_eq!(exec.stdout.as_bytes(), out.as_slice());
}
