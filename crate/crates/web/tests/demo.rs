use serde_json::Value;
use tverberg_web::{complex_summary_json, planar_tverberg_json, subdivide_triangle_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn summary_of_hexagon() {
    let j = parse(complex_summary_json("simplex:2", 2, 2, 2).unwrap());
    assert_eq!(j["deleted_product"]["cell_counts"], serde_json::json!([6, 6]));
    assert_eq!(j["deleted_product"]["betti"], serde_json::json!({"0": 1, "1": 1}));
    assert_eq!(j["reduced_betti"]["0"], 0);
    assert_eq!(j["hypothesis"]["holds"], false);
    let j = parse(complex_summary_json("bd-simplex:3", 2, 2, 2).unwrap());
    assert_eq!(j["hypothesis"]["holds"], true);
    assert_eq!(j["hypothesis"]["n"], 1);
    assert!(complex_summary_json("cube:3", 2, 2, 2).is_err());
    assert!(complex_summary_json("simplex:2", 4, 2, 2).is_err());
    let j = parse(complex_summary_json("bd-simplex:3", 2, 6, 2).unwrap());
    assert!(j["hypothesis"]["error"].is_string());
}

#[test]
fn square_has_crossing_diagonals() {
    let j = parse(planar_tverberg_json("[[0,0],[4,0],[0,4],[4,4]]", 2).unwrap());
    assert_eq!(j["found"], true);
    assert_eq!(j["parts"], serde_json::json!([[0, 3], [1, 2]]));
    assert_eq!(j["point"], serde_json::json!(["2/1", "2/1"]));
    assert_eq!(j["point_xy"], serde_json::json!([2.0, 2.0]));
}

#[test]
fn too_few_points_for_three_parts() {
    // six points in convex position: no 3-fold Tverberg point among these
    let j = parse(planar_tverberg_json("[[0,0],[1,0],[2,1],[2,2],[1,3],[0,2]]", 3).unwrap());
    assert_eq!(j["found"], false);
    let j = parse(planar_tverberg_json("[[0,0],[10,0],[20,5],[20,15],[10,20],[0,15],[10,9]]", 3).unwrap());
    assert_eq!(j["found"], true);
    assert!(planar_tverberg_json("[]", 2).is_err());
    assert!(planar_tverberg_json("not json", 2).is_err());
    assert!(planar_tverberg_json("[[0,0],[1,1]]", 1).is_err());
}

#[test]
fn subdivided_triangle_tiles() {
    let j = parse(subdivide_triangle_json(2).unwrap());
    assert_eq!(j["valid"], true);
    let tris = j["triangles"].as_array().unwrap();
    assert_eq!(tris.len(), 36);
    let area: f64 = tris
        .iter()
        .map(|t| {
            let p: Vec<[f64; 2]> = serde_json::from_value(t.clone()).unwrap();
            ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs() / 2.0
        })
        .sum();
    assert!((area - 0.5).abs() < 1e-12);
    assert!(subdivide_triangle_json(9).is_err());
}
