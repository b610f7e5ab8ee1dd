use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn example(name: &str) -> String {
    examples().join(name).display().to_string()
}

fn eulerchi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerchi"))
        .args(args)
        .env_remove("EULERCHI_RECURSION_CAP")
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--report", "json"];
    all.extend_from_slice(args);
    let out = eulerchi(&all);
    let v =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().expect("exit code"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn chi_of_bundled_spaces() {
    let (r, code) = json_report(&["chi", &example("so3_r3_orbit.json")]);
    assert_eq!((r["result"].as_i64(), code), (Some(0), 0));
    let (r, _) = json_report(&["chi", &example("closed_interval.json")]);
    assert_eq!(r["result"], 1);
    assert_eq!(r["inputs"][0]["sha256"].as_str().map(str::len), Some(64));
}

#[test]
fn malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"cells":[{"id":"v","dim":0},{"id":"e"}]}"#).unwrap();
    let out = eulerchi(&["chi", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cells[1]"), "{}", stderr(&out));
    assert!(stderr(&out).contains("dim"), "{}", stderr(&out));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let sep = dir.path().join("sep.json");
    std::fs::write(&sep, r#"{"cells":[{"id":"a⊗b","dim":0}]}"#).unwrap();
    let out = eulerchi(&["chi", sep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("a⊗b"), "{}", stderr(&out));

    let dup = r#"{"cells":[{"id":"a","dim":0},{"id":"a","dim":1}]}"#;
    assert_eq!(eulerchi(&["chi", dup]).status.code(), Some(1));
    assert_eq!(eulerchi(&["chi", "/definitely/not/here.json"]).status.code(), Some(1));
    assert_eq!(eulerchi(&["no-such-command"]).status.code(), Some(1));

    let not_group =
        r#"{"group":{"order":2,"table":[[0,1],[0,1]]},"cells":[{"id":"pt","dim":0}],"action":{"1":{"pt":"pt"}}}"#;
    let out = eulerchi(&["translation", not_group, "--gamma", r#"{"kind":"trivial"}"#]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));

    let dim_change = r#"{"group":{"order":2,"table":[[0,1],[1,0]]},"cells":[{"id":"v","dim":0},{"id":"e","dim":1}],"action":{"1":{"v":"e","e":"v"}}}"#;
    let out = eulerchi(&["translation", dim_change, "--gamma", r#"{"kind":"trivial"}"#]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gamma_chi_values_and_breakdown() {
    let (r, code) = json_report(&["gamma-chi", &example("so2_s2.json"), "--gamma", r#"{"kind":"cyclic","order":3}"#]);
    assert_eq!((r["result"].as_i64(), code), (Some(5), 0));
    assert_eq!(r["breakdown"].as_array().map(Vec::len), Some(3));
    let (r, _) = json_report(&["gamma-chi", &example("so2_s2.json"), "--gamma", &example("gamma_z2.json")]);
    assert_eq!(r["result"], -1);
    let (r, _) = json_report(&["gamma-chi", &example("so3_r3.json"), "--gamma", &example("gamma_z.json"), "--chi-z"]);
    assert_eq!(r["result"], 1);
    assert_eq!(r["assertions"].as_array().map(Vec::len), Some(2));
}

#[test]
fn unsupported_combination_exits_two_naming_stratum() {
    let (r, code) = json_report(&["gamma-chi", &example("so3_r3.json"), "--gamma", &example("gamma_z2.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "unsupported_combination");
    assert_eq!(r["error"]["stratum"], "origin");
    assert_eq!(r["error"]["model"], "SO3");
    assert_eq!(r["error"]["presentation"], "free_abelian(2)");
}

#[test]
fn custom_entries_are_flagged() {
    let groupoid = r#"{"strata":[{"id":"pt","dim":0,"isotropy":{"kind":"custom","name":"K","chi":{"cyclic(3)":7}}}]}"#;
    let (r, code) = json_report(&["gamma-chi", groupoid, "--gamma", &example("gamma_c3.json")]);
    assert_eq!((r["result"].as_i64(), code), (Some(7), 0));
    assert!(r["warnings"][0].as_str().unwrap().contains("user-supplied"));
    let (_, code) = json_report(&["gamma-chi", groupoid, "--gamma", &example("gamma_z.json")]);
    assert_eq!(code, 2);
}

#[test]
fn translation_methods_agree() {
    for (gamma, v) in [("gamma_z.json", 3), ("gamma_z2.json", 8), ("gamma_trivial.json", 1)] {
        let (r, code) = json_report(&["translation", &example("s3_point.json"), "--gamma", &example(gamma)]);
        assert_eq!(code, 0);
        for m in ["strata", "inertia", "noniter"] {
            assert_eq!(r["result"][m], v, "{gamma} {m}");
        }
        assert!(r["assertions"].as_array().unwrap().iter().all(|a| a["pass"] == true));
    }
    let (r, _) = json_report(&[
        "translation",
        &example("s3_point.json"),
        "--gamma",
        &example("gamma_z.json"),
        "--method",
        "inertia",
    ]);
    assert_eq!(r["result"], serde_json::json!({ "inertia": 3 }));
}

#[test]
fn order_ell_and_recursion_cap() {
    let (r, code) = json_report(&["order-ell", &example("s3_point.json"), "--ell", "2"]);
    assert_eq!((r["result"].as_i64(), code), (Some(8), 0));
    let (r, _) = json_report(&["order-ell", &example("q8_point.json"), "--ell", "1"]);
    assert_eq!(r["result"], 5);
    let (r, _) = json_report(&["order-ell", &example("q8_point.json"), "--ell", "0"]);
    assert_eq!(r["result"], 1);

    let (r, code) = json_report(&["order-ell", &example("q8_point.json"), "--ell", "5"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "recursion_cap");
    let out = Command::new(env!("CARGO_BIN_EXE_eulerchi"))
        .args(["order-ell", &example("q8_point.json"), "--ell", "5"])
        .env("EULERCHI_RECURSION_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (_, code) = json_report(&["--cap", "5", "order-ell", &example("q8_point.json"), "--ell", "5"]);
    assert_eq!(code, 0);
}

#[test]
fn inertia_and_emitted_complex() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("inertia.json");
    let (r, code) = json_report(&[
        "inertia",
        &example("c2_flipped_interval.json"),
        "--gamma",
        &example("gamma_z.json"),
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["lambda_chi"], 2);
    let (r, code) = json_report(&["chi", emitted.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["result"], 2);
}

#[test]
fn atlas_records_disjointness() {
    let (r, code) = json_report(&["atlas", &example("atlas.json"), "--gamma", &example("gamma_z.json")]);
    assert_eq!((r["result"].as_i64(), code), (Some(3), 0));
    assert!(r["warnings"][0].as_str().unwrap().contains("asserted"));
}

#[test]
fn extension_counterexample_is_informational() {
    let (r, code) = json_report(&[
        "extension",
        "--fiber",
        &example("torus1.json"),
        "--complex",
        &example("c2_point.json"),
        "--ell",
        "1",
        "--actual",
        &example("o2.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["predicted"], 0);
    assert_eq!(r["result"]["actual"], 2);
    assert_eq!(r["result"]["formula_holds"], false);

    let (_, code) = json_report(&[
        "extension",
        "--fiber",
        &example("o2.json"),
        "--complex",
        &example("c2_point.json"),
        "--ell",
        "1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn pushforward_and_integrate() {
    let (r, code) = json_report(&["pushforward", &example("square_to_interval.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"], serde_json::json!({ "e": 1, "v0": 1, "v1": 1 }));
    let (r, _) = json_report(&[
        "pushforward",
        &example("square_to_interval.json"),
        "--function",
        &example("square_height.json"),
    ]);
    assert_eq!(r["assertions"][0]["pass"], true);
    let (r, _) = json_report(&["integrate", &example("square_height.json")]);
    assert_eq!(r["result"], 1);
    let (_, code) = json_report(&[
        "pushforward",
        &example("square_to_interval.json"),
        "--function",
        &example("closed_interval.json"),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn out_flag_and_text_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let out = eulerchi(&["--out", path.to_str().unwrap(), "chi", &example("closed_interval.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("chi: 1\n"));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out =
            eulerchi(&["--report", "json", "--out", path.to_str().unwrap(), "verify", "--seed", "42", "--cases", "30"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn injected_fault_is_caught_and_dumped() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("ce.json");
    let (r, code) =
        json_report(&["verify", "--seed", "42", "--cases", "10", "--inject-fault", "--dump", dump.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(r["assertions"].as_array().unwrap().iter().any(|a| a["pass"] == false));
    let ce: Value = serde_json::from_slice(&std::fs::read(&dump).unwrap()).unwrap();
    assert_eq!(ce["check"], "three_way");
    assert_eq!(ce["complex"]["cells"].as_array().map(|c| c.iter().all(|c| c["dim"] == 1)), Some(true));

    // the dumped complex loads back and the honest computation agrees
    let complex = serde_json::to_string(&ce["complex"]).unwrap();
    let gamma = serde_json::to_string(&ce["gamma"]).unwrap();
    let (r, code) = json_report(&["translation", &complex, "--gamma", &gamma]);
    assert_eq!(code, 0, "{r}");
}
