use std::fs;
use std::path::Path;
use std::process::Command;

use rubber_cli::cache::signature_key;
use rubber_core::chambers::validate;
use rubber_core::strata::total_class;
use serde_json::Value;

struct Run {
    code: i32,
    json: Value,
    stdout: String,
    stderr: String,
}

fn rubber(args: &[&str], cache: Option<&Path>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rubber"));
    cmd.args(args).env_remove("RUBBER_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("RUBBER_CACHE_DIR", dir);
    }
    let out = cmd.output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(stdout.trim()).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap(), json, stdout, stderr: String::from_utf8(out.stderr).unwrap() }
}

fn row(run: &Run, n: usize) -> &Value {
    &run.json["result"]["rows"][n - 2]
}

#[test]
fn table_rows() {
    let r = rubber(&["table", "--max-n", "10"], None);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["command"], "table");
    assert!(r.json["timing_ms"].is_number());
    assert_eq!(row(&r, 10)["chi_mbar"].to_string(), "734772384");
    assert_eq!(row(&r, 4)["chi_mbar0"].to_string(), "7");
    assert_eq!(r.json["result"]["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn full_table_is_exact() {
    let r = rubber(&["table", "--max-n", "19"], None);
    assert_eq!(row(&r, 19)["chi_mbar"].to_string(), "544879611875655894561850368");
    assert_eq!(row(&r, 19)["chi_mbar0"].to_string(), "449326835001457846");
}

#[test]
fn euler_and_class() {
    assert_eq!(rubber(&["euler", "--x", "2,-1,-1"], None).json["result"]["euler"], 1);
    assert_eq!(rubber(&["euler", "--x", "3,-1,-1,-1"], None).json["result"]["euler"], 2);
    let c = rubber(&["class", "--x", "3,-1,-1,-1"], None);
    assert_eq!(c.json["result"]["class"], serde_json::json!([1, 1]));
    // leading minus sign is accepted as a value
    assert_eq!(rubber(&["euler", "--x", "-3,1,1,1"], None).json["result"]["euler"], 2);
}

#[test]
fn invalid_input_is_reported() {
    for x in ["1,-1,2,-2", "1,2,-4", "1,0,-1", "1,-1", "a,b"] {
        let r = rubber(&["chamber", "--x", x], None);
        assert_eq!(r.code, 1, "{x}");
        assert_eq!(r.json["error"]["kind"], "invalid_input", "{x}");
        assert_eq!(r.json["command"], "chamber");
    }
    let r = rubber(&["euler", "--x", "9,-1,-1,-1,-1,-1,-1,-1,-1,-1"], None);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert!(r.json["error"]["message"].as_str().unwrap().contains("bound"));
    assert_eq!(rubber(&["nonsense"], None).code, 1);
    assert_eq!(rubber(&["table", "--max-n", "1"], None).code, 1);
    assert_eq!(rubber(&["wallcross", "--x", "2,-1,-1", "--y", "3,-1,-1,-1"], None).code, 1);
}

#[test]
fn chamber_report() {
    let r = rubber(&["chamber", "--x", "5,-2,-4,1"], None);
    assert_eq!(r.code, 0);
    let sig = &r.json["result"]["signature"];
    assert_eq!(sig["walls"], 7);
    assert_eq!(sig["signs"].as_str().unwrap().len(), 7);
    assert!(sig["negative"].as_array().unwrap().contains(&serde_json::json!([1, 2, 3])));
    assert_eq!(r.json["result"]["validation"]["valid"], true);
}

#[test]
fn wallcross_matches_library_difference() {
    let (xs, ys) = ("5,-2,-4,1", "2,-4,-1,3");
    let r = rubber(&["wallcross", "--x", xs, "--y", ys], None);
    assert_eq!(r.code, 0);
    let x = validate(&[5, -2, -4, 1]).unwrap();
    let y = validate(&[2, -4, -1, 3]).unwrap();
    let want = total_class(&x).unwrap() - total_class(&y).unwrap();
    let got: Vec<String> = r.json["result"]["difference"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
    assert_eq!(got, want.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    assert!(!r.json["result"]["walls"].as_array().unwrap().is_empty());
}

#[test]
fn verify_exit_codes() {
    let ok = rubber(&["verify", "--suite", "oracle", "--max-n", "5"], None);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert_eq!(ok.json["result"]["passed"], true);
    let strata = rubber(&["verify", "--suite", "strata", "--max-n", "5"], None);
    assert_eq!(strata.code, 0, "{}", strata.stdout);

    let all = rubber(&["verify", "--suite", "all", "--max-n", "5"], None);
    assert_eq!(all.code, 2);
    let failed: Vec<&str> = all.json["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["pde_residual_printed_form", "ratio_strictly_decreasing"]);
    assert_eq!(rubber(&["verify", "--max-n", "12"], None).code, 1);
}

#[test]
fn ratio_output() {
    let r = rubber(&["ratio", "--max-n", "19"], None);
    let rows = r.json["result"]["ratios"].as_array().unwrap();
    assert_eq!(rows.len(), 18);
    assert_eq!(rows[0]["numerator"], 1);
    assert_eq!(r.json["result"]["strictly_decreasing"], false);
    assert_eq!(r.json["result"]["strictly_decreasing_from_3"], true);
    assert!(rows[17]["approx"].as_f64().unwrap() < 1e-9);
}

#[test]
fn csv_output() {
    let r = rubber(&["table", "--max-n", "4", "--format", "csv"], None);
    assert_eq!(r.stdout, "n,chi_mbar,chi_mbar0\n2,1,1\n3,2,2\n4,10,7\n");
    let c = rubber(&["class", "--x", "3,-1,-1,-1", "--format", "csv"], None);
    assert_eq!(c.stdout, "degree,coefficient\n0,1\n1,1\n");
    let e = rubber(&["euler", "--x", "3,-1,-1,-1", "--format", "csv"], None);
    assert_eq!(e.stdout, "x,euler\n\"3,-1,-1,-1\",2\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["class", "--x", "7,-2,4,-6,-3", "--threads", "3"];
    let a = rubber(&args, None);
    let b = rubber(&args, None);
    assert_eq!(a.json["result"], b.json["result"]);
    assert_eq!(a.json["input"], b.json["input"]);
}

#[test]
fn table_cache_round_trip_and_hits() {
    let dir = tempfile::tempdir().unwrap();
    let first = rubber(&["table", "--max-n", "19"], Some(dir.path()));
    let path = dir.path().join("table-n19-order20.json");
    let stored = fs::read_to_string(&path).unwrap();
    let second = rubber(&["table", "--max-n", "19"], Some(dir.path()));
    assert_eq!(first.json["result"], second.json["result"]);
    assert_eq!(fs::read_to_string(&path).unwrap(), stored);

    // a hit is served without recomputation: a planted value comes back
    let mut v: Value = serde_json::from_str(&stored).unwrap();
    v["rows"][0][0] = Value::String("42".into());
    fs::write(&path, v.to_string()).unwrap();
    let planted = rubber(&["table", "--max-n", "19"], Some(dir.path()));
    assert_eq!(row(&planted, 2)["chi_mbar"], 42);
}

#[test]
fn corrupt_or_stale_table_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table-n6-order20.json");
    fs::write(&path, "{ not json").unwrap();
    let r = rubber(&["table", "--max-n", "6"], Some(dir.path()));
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("corrupt"), "{}", r.stderr);
    assert_eq!(row(&r, 6)["chi_mbar"], 1108);
    let rewritten: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rewritten["format_version"], 1);

    let mut stale = rewritten.clone();
    stale["format_version"] = 0.into();
    stale["rows"][0][0] = Value::String("42".into());
    fs::write(&path, stale.to_string()).unwrap();
    let r = rubber(&["table", "--max-n", "6"], Some(dir.path()));
    assert!(r.stderr.contains("format version"), "{}", r.stderr);
    assert_eq!(row(&r, 2)["chi_mbar"], 1);
}

#[test]
fn class_cache_is_keyed_by_chamber() {
    let dir = tempfile::tempdir().unwrap();
    let x = validate(&[7, -2, 4, -6, -3]).unwrap();
    let a = rubber(&["class", "--x", "7,-2,4,-6,-3"], Some(dir.path()));
    let path = dir.path().join(format!("class-{}.json", signature_key(&x).unwrap()));
    assert!(path.exists());

    // plant a marker; a same-chamber query must be served from the file
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["coefficients"] = serde_json::json!([99]);
    fs::write(&path, v.to_string()).unwrap();
    let b = rubber(&["class", "--x", "14,-4,8,-12,-6"], Some(dir.path()));
    assert_eq!(b.json["result"]["class"], serde_json::json!([99]));

    // a representative outside the chamber is rejected and recomputed
    v["representative"] = serde_json::json!([-7, 2, -4, 6, 3]);
    fs::write(&path, v.to_string()).unwrap();
    let c = rubber(&["class", "--x", "7,-2,4,-6,-3"], Some(dir.path()));
    assert!(c.stderr.contains("does not match"), "{}", c.stderr);
    assert_eq!(c.json["result"], a.json["result"]);
}

#[test]
fn cache_dir_flag_overrides_nothing_when_absent() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("nested");
    let r = Command::new(env!("CARGO_BIN_EXE_rubber"))
        .args(["table", "--max-n", "5", "--cache-dir"])
        .arg(&sub)
        .env_remove("RUBBER_CACHE_DIR")
        .output()
        .unwrap();
    assert!(r.status.success());
    assert!(sub.join("table-n5-order20.json").exists());
}
