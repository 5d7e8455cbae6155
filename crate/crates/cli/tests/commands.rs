use qcl_core::{classify4, shared_geometry, Field, QuadricClass};
use serde_json::Value;

fn qcl(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qcl").chain(args.iter().copied());
    let code = qcl_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn qcl_json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let (code, out, err) = qcl(&full);
    let report = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad json ({e}); stderr: {err}"));
    (code, report)
}

#[test]
fn classify_orbits() {
    let (code, r) = qcl_json(&["classify", "--q", "3", "--form", "x0*x1+x2*x3"]);
    assert_eq!(code, 0);
    assert_eq!(r["class"], "hyperbolic");
    assert_eq!(r["points"], 16);
    assert_eq!(r["reguli"], serde_json::json!([4, 4]));
    assert_eq!(r["schema"], 1);

    let (code, r) = qcl_json(&["classify", "--q", "4", "--form", "x0^2"]);
    assert_eq!(code, 0);
    assert_eq!(r["class"], "repeated-plane");
    assert_eq!(r["points"], 21);

    let (code, r) = qcl_json(&["classify", "--q", "3", "--form", "x0*x1+x2^2"]);
    assert_eq!(code, 0);
    assert_eq!(r["class"], "cone");
    assert_eq!(r["vertex"], "(0:0:0:1)");
    assert_eq!(r["singular_points"].as_array().unwrap().len(), 1);
}

#[test]
fn classify_line_pair_matches_library() {
    let field = Field::with_order(3).unwrap();
    let geom = shared_geometry(3).unwrap();
    let f = qcl_cli::parse_form("x0^2+x0*x1+2*x1^2", &field).unwrap();
    let class = classify4(&geom, &f).unwrap();
    assert_eq!(class, QuadricClass::LineRank2);
    let (code, r) = qcl_json(&["classify", "--q", "3", "--form", "x0^2+x0*x1+2*x1^2"]);
    assert_eq!(code, 0);
    assert_eq!(r["class"], class.name());
    assert_eq!(r["points"], 4);
}

#[test]
fn field_arguments() {
    let (code, r) = qcl_json(&["classify", "--q", "9", "--p", "3", "--m", "2", "--form", "(a)*x0*x1+x2*x3"]);
    assert_eq!(code, 0);
    assert_eq!(r["field"]["q"], 9);
    assert_eq!(r["field"]["p"], 3);
    assert_eq!(r["field"]["m"], 2);
    assert_eq!(r["class"], "hyperbolic");

    let (code, _, err) = qcl(&["classify", "--q", "9", "--p", "2", "--m", "3", "--form", "x0^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("GF(8)"));
    assert_eq!(qcl(&["classify", "--q", "6", "--form", "x0^2"]).0, 2);
    assert_eq!(qcl(&["classify", "--q", "9", "--p", "3", "--form", "x0^2"]).0, 2);
}

#[test]
fn parse_errors_exit_two() {
    let (code, _, err) = qcl(&["classify", "--q", "3", "--form", "x0x1"]);
    assert_eq!(code, 2);
    assert!(err.contains("column 3"), "{err}");
    let (code, _, err) = qcl(&["classify", "--q", "3", "--form", "x5^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("out of range"));
    let (code, _, err) = qcl(&["classify", "--q", "5", "--form", "7*x0^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("not in GF(5)"));
}

#[test]
fn usage_errors() {
    assert_eq!(qcl(&["frobnicate"]).0, 2);
    assert_eq!(qcl(&["code", "--q", "3"]).0, 2);
    assert_eq!(qcl(&["code", "--q", "3", "--surface", "cone", "--form", "x0^2"]).0, 2);
    assert_eq!(qcl(&["words", "--q", "3", "--surface", "cone", "--tier", "w3"]).0, 2);
    let (code, out, _) = qcl(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-bounds"));
    // a plane pair carries no code
    assert_eq!(qcl(&["code", "--q", "3", "--form", "x0*x1"]).0, 2);
}

#[test]
fn code_elliptic_q4() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ell4");
    let (code, r) = qcl_json(&["code", "--q", "4", "--surface", "elliptic", "--emit", prefix.to_str().unwrap()]);
    assert_eq!(code, 0);
    let p = &r["parameters"];
    assert_eq!((p["n"].as_u64(), p["k"].as_u64(), p["d"].as_u64()), (Some(17), Some(9), Some(7)));
    assert_eq!((p["w2"].as_u64(), p["w3"].as_u64()), (Some(8), Some(9)));
    assert_eq!(r["status"], "match");
    assert!(r["match"].as_object().unwrap().values().all(|v| v == true));

    let csv = std::fs::read_to_string(dir.path().join("ell4.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("weight,count"));
    let total: u64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 4u64.pow(9));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ell4.json")).unwrap()).unwrap();
    assert_eq!(saved["parameters"], r["parameters"]);
    assert!(saved["invocation"].as_array().unwrap().iter().any(|a| a == "--emit"));
}

#[test]
fn code_cone_q3_is_documented_deviation() {
    let (code, r) = qcl_json(&["code", "--q", "3", "--surface", "cone"]);
    assert_eq!(code, 0);
    assert_eq!(r["parameters"]["k"], 8);
    assert_eq!(r["expected"]["k"], 9);
    assert_eq!(r["match"]["k"], false);
    assert_eq!(r["status"], "documented-deviation");
}

#[test]
fn code_workers_agree() {
    let (_, one) = qcl_json(&["code", "--q", "5", "--surface", "hyperbolic", "--workers", "1"]);
    let (_, four) = qcl_json(&["code", "--q", "5", "--surface", "hyperbolic", "--workers", "4"]);
    assert_eq!(one["distribution"], four["distribution"]);
    assert_eq!(four["workers"], 4);
    assert_eq!(one["status"], "match");
}

#[test]
fn code_size_guard() {
    let (code, _, err) = qcl(&["code", "--q", "13", "--surface", "elliptic"]);
    assert_eq!(code, 3);
    assert!(err.contains("exceeds the limit"));
}

#[test]
fn verify_bounds_sample_q3() {
    let args = ["verify-bounds", "--q", "3", "--mode", "sample", "--samples", "200", "--seed", "7"];
    let (code, r) = qcl_json(&args);
    assert_eq!(code, 0);
    assert_eq!(r["passed"], true);
    assert_eq!(r["bounds"]["violations"], 0);
    assert_eq!(r["spectra"].as_array().unwrap().len(), 3);
    // the elliptic maximum 2(q+1) is met by a hyperbolic partner
    let elliptic = r["spectra"].as_array().unwrap().iter().find(|s| s["class"] == "Elliptic").unwrap();
    assert_eq!(elliptic["max1"], 8);
    let mixed = r["bounds"]["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["case"] == "elliptic-vs-cone-or-hyperbolic")
        .unwrap();
    let attained: Vec<u64> = mixed["attained"].as_array().unwrap().iter().map(|e| e[0].as_u64().unwrap()).collect();
    assert_eq!(attained.iter().max(), Some(&8));

    let (_, again) = qcl_json(&args);
    assert_eq!(r["bounds"], again["bounds"]);
    assert_eq!(r["spectra"], again["spectra"]);
}

#[test]
fn verify_bounds_exhaustive_guard() {
    let (code, _, err) = qcl(&["verify-bounds", "--q", "4", "--mode", "exhaustive"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn words_reports() {
    let (code, r) = qcl_json(&["words", "--q", "4", "--surface", "hyperbolic", "--tier", "w2"]);
    assert_eq!(code, 0);
    assert_eq!(r["listed"].as_array().unwrap().len(), 3);
    assert_eq!(r["unmatched_count"], 0);
    assert_eq!(r["tier_weight"], 12);

    let (code, r) = qcl_json(&["words", "--q", "4", "--surface", "elliptic", "--tier", "w2"]);
    assert_eq!(code, 0);
    assert_eq!(r["census_only"], true);

    // the vertex-off-X cone type needs q(q-1)/2 >= q+1 bisecants, so q = 3 misses it
    let (code, r) = qcl_json(&["words", "--q", "3", "--surface", "elliptic", "--tier", "w1"]);
    assert_eq!(code, 1);
    assert_eq!(r["unmatched_count"], 0);
    assert_eq!(r["missing"], serde_json::json!(["ConeAllBisecants"]));
}

#[test]
fn binary_reads_worker_env() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qcl"))
        .args(["code", "--q", "3", "--surface", "hyperbolic", "--json"])
        .env("QCL_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["workers"], 2);
    assert_eq!(r["parameters"]["d"], 4);

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qcl"))
        .args(["classify", "--q", "3", "--form", "x0*"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
