use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn finetti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finetti"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = finetti(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_of(args: &[&str]) -> (i32, Value) {
    let out = finetti(args);
    assert!(out.stdout.is_empty());
    let err = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    (out.status.code().expect("exit code"), err)
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fraction(num: u128, den: u128) -> String {
    let g = gcd(num, den);
    if den / g == 1 {
        format!("{}", num / g)
    } else {
        format!("{}/{}", num / g, den / g)
    }
}

fn choose(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

const URN: [&str; 6] = ["--urn", "12", "4", "6", "2/3", "1/3"];

fn with_urn<'a>(rest: &[&'a str]) -> Vec<&'a str> {
    URN.iter().copied().chain(rest.iter().copied()).collect()
}

#[test]
fn occupancy_tables() {
    let v = json_ok(&["occupancy", "4", "--uniform"]);
    assert_eq!(v["omega"], serde_json::json!(["1/5", "1/5", "1/5", "1/5", "1/5"]));
    let v = json_ok(&["occupancy", "3", "--constant", "1"]);
    assert_eq!(v["omega"][3], "1");

    // Mixture weights {2, 16, 63, 16, 2}/99 on l/6, l = 0..=4.
    let weights = [2u128, 16, 63, 16, 2];
    let v = json_ok(&with_urn(&["occupancy", "6"]));
    for h in 0..=6u128 {
        let num: u128 = weights
            .iter()
            .enumerate()
            .map(|(l, w)| w * choose(6, h) * (l as u128).pow(h as u32) * (6 - l as u128).pow(6 - h as u32))
            .sum();
        assert_eq!(v["omega"][h as usize], fraction(num, 99 * 6u128.pow(6)), "h={h}");
    }
}

#[test]
fn csv_and_float_output() {
    let out = finetti(&["occupancy", "2", "--uniform", "--output", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "h,omega\n0,1/3\n1,1/3\n2,1/3\n");
    let v = json_ok(&["occupancy", "2", "--constant", "1/3", "--backend", "float"]);
    assert_eq!(v["backend"], "float");
    assert_eq!(v["omega"][1], serde_json::json!(0.444444));
    let v = json_ok(&["--precision", "3", "occupancy", "1", "--constant", "0.1234", "--backend", "float"]);
    assert_eq!(v["omega"][1], serde_json::json!(0.123));
    assert_eq!(error_of(&["--precision", "18", "occupancy", "1", "--uniform"]).0, 2);
}

#[test]
fn conditioning() {
    let v = json_ok(&["condition", "3", "2", "--constant", "2/7"]);
    assert_eq!(v, json_ok(&["condition", "0", "0", "--constant", "2/7"]));
    assert_eq!(v["atoms"], serde_json::json!([{"p": "2/7", "weight": "1"}]));

    let v = json_ok(&["condition", "1", "0", "--uniform", "--depth", "10"]);
    assert_eq!(v["kind"], "moments");
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 10);
    for (h, x) in values.iter().enumerate() {
        assert_eq!(*x, Value::String(fraction(2, h as u128 + 2)));
    }

    let (code, err) = error_of(&["condition", "1", "0", "--constant", "0"]);
    assert_eq!(code, 3);
    assert_eq!(err["error"], "ImpossibleEvidence");
    let (code, err) = error_of(&["condition", "6", "0", "--uniform", "--depth", "5"]);
    assert_eq!(code, 3);
    assert_eq!(err["error"], "DepthExceeded");
}

#[test]
fn emitted_phenomena_are_accepted_back() {
    let dir = tempfile::tempdir().unwrap();
    let docs = [
        json_ok(&["condition", "2", "1", "--uniform", "--depth", "30"]),
        json_ok(&with_urn(&["condition", "1", "2"])),
        json_ok(&["condition", "1", "1", "--atoms", "0.2:1/2,0.7:1/2", "--backend", "float"]),
    ];
    for (i, doc) in docs.iter().enumerate() {
        let spec = write(dir.path(), &format!("doc{i}.json"), doc);
        let again = json_ok(&["condition", "0", "0", "--spec", &spec]);
        assert_eq!(again, *doc);
        json_ok(&["occupancy", "5", "--spec", &spec]);
        json_ok(&["sample", "5", "50", "--interval", "0", "1/2", "--spec", &spec]);
        let out = finetti(&["limit", "--cdf-grid", "--points", "5", "--spec", &spec]);
        match doc["kind"].as_str() {
            Some("atomic") => assert!(out.status.success()),
            _ => assert_eq!(out.status.code(), Some(3)),
        }
    }
}

#[test]
fn spec_backend_rules() {
    let dir = tempfile::tempdir().unwrap();
    let exact = json_ok(&["condition", "0", "0", "--constant", "1/4"]);
    let spec = write(dir.path(), "exact.json", &exact);
    let (code, err) = error_of(&["occupancy", "2", "--spec", &spec, "--backend", "float"]);
    assert_eq!((code, err["error"].as_str()), (2, Some("MixedBackend")));
    let lying = serde_json::json!({"kind": "atomic", "backend": "float", "atoms": [{"p": "1/4", "weight": "1"}]});
    let spec = write(dir.path(), "lying.json", &lying);
    assert_eq!(error_of(&["occupancy", "2", "--spec", &spec]).0, 2);
    let invalid = serde_json::json!({"kind": "moments", "backend": "exact", "values": ["1", "1/2", "3/5"]});
    let spec = write(dir.path(), "invalid.json", &invalid);
    let (code, err) = error_of(&["occupancy", "2", "--spec", &spec]);
    assert_eq!((code, err["error"].as_str()), (2, Some("NotCompletelyMonotone")));
    assert_eq!(error_of(&["occupancy", "2", "--spec", "/nonexistent.json"]).0, 2);
    assert_eq!(error_of(&["occupancy", "2", "--uniform", "--constant", "1/2"]).0, 2);
    assert_eq!(error_of(&["occupancy", "2"]).0, 2);
}

#[test]
fn hypothesis_model_specs() {
    let dir = tempfile::tempdir().unwrap();
    let model = serde_json::json!({
        "kind": "hypotheses",
        "components": [
            {"label": "fair", "prior": "1/2", "phenomenon": {"kind": "atomic", "backend": "exact", "atoms": [{"p": "1/2", "weight": "1"}]}},
            {"label": "biased", "prior": "1/2", "phenomenon": {"kind": "atomic", "backend": "exact", "atoms": [{"p": "3/4", "weight": "1"}]}}
        ]
    });
    let spec = write(dir.path(), "model.json", &model);
    let v = json_ok(&["posterior", "W", "--spec", &spec]);
    // (1/2 · 1/2) / (1/2 · 1/2 + 1/2 · 3/4) = 2/5
    assert_eq!(v["posterior"][0]["value"], "2/5");
    assert_eq!(v["posterior"][1]["label"], "biased");
    let v = json_ok(&["occupancy", "1", "--spec", &spec]);
    assert_eq!(v["omega"], serde_json::json!(["3/8", "5/8"]));
}

#[test]
fn posteriors() {
    let v = json_ok(&with_urn(&["posterior", "WWWWWW"]));
    assert_eq!(v["posterior"][1]["label"], "b");
    assert_eq!(v["posterior"][1]["decimal"], "0.088353");
    assert_eq!(v["posterior"][1]["value"], "22/249");
    assert_eq!(v["trace"].as_array().unwrap().len(), 7);
    assert_eq!(v["trace"][0]["posterior"], serde_json::json!(["2/3", "1/3"]));

    let v = json_ok(&with_urn(&["posterior", ""]));
    assert_eq!(v["posterior"][0]["value"], "2/3");
    assert_eq!(v["posterior"][1]["value"], "1/3");
    assert_eq!(v["trace"].as_array().unwrap().len(), 1);

    let v = json_ok(&with_urn(&["posterior", "BBBBBB"]));
    assert_eq!(v["posterior"][1]["value"], "1408/6387");
    assert_eq!(v["posterior"][1]["decimal"], "0.220448");

    let v = json_ok(&with_urn(&["posterior", "WBW"]));
    assert_eq!((v["r"].as_u64(), v["s"].as_u64()), (Some(2), Some(1)));

    let out = finetti(&with_urn(&["posterior", "WB", "--output", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("step,draw,r,s,a,b,predictive"));
    assert_eq!(text.lines().count(), 4);

    assert_eq!(error_of(&with_urn(&["posterior", "WXB"])).0, 2);
    assert_eq!(error_of(&["posterior", "W", "--uniform"]).0, 2);
    let (code, err) = error_of(&["--urn", "12", "0", "6", "1/2", "1/2", "posterior", "W"]);
    assert_eq!((code, err["error"].as_str()), (3, Some("ImpossibleEvidence")));
    let (code, err) = error_of(&["--urn", "12", "4", "5", "1/2", "1/2", "posterior", "W"]);
    assert_eq!((code, err["error"].as_str()), (2, Some("InvalidUrnGeometry")));
}

#[test]
fn limits() {
    let v = json_ok(&["limit", "--uniform", "--interval", "0.2", "0.5"]);
    assert_eq!(v["limit"], "3/10");
    let v = json_ok(&["limit", "--uniform", "--interval", "1/5", "1/2", "--n", "10"]);
    // Φ_10 uses the midpoint rule: (5 + 1/2)/11 − (2 + 1/2)/11.
    assert_eq!(v["finite"]["value"], "3/11");

    let v = json_ok(&with_urn(&["limit", "--posterior-limit", "1/3"]));
    assert_eq!(v["weights"][1]["value"], "11/21");
    assert_eq!(v["weights"][1]["decimal"], "0.523810");
    let v = json_ok(&with_urn(&["limit", "--posterior-limit", "0.9"]));
    assert_eq!(v["weights"][1]["value"], "0");
    let v = json_ok(&with_urn(&["limit", "--posterior-limit", "tie:1/6,1/3"]));
    assert_eq!(v["weights"][1]["value"], "33/79");
    let v = json_ok(&with_urn(&["limit", "--posterior-limit", "0.24352920263397"]));
    assert_eq!(v["near_tie"], true);
    let v = json_ok(&with_urn(&["limit", "--posterior-limit", "1/3", "--n", "30"]));
    assert_eq!(v["finite"]["r"], 10);

    let v = json_ok(&["limit", "--cdf-grid", "--points", "3", "--constant", "1/2"]);
    assert_eq!(v["grid"], serde_json::json!([["0", "0"], ["1/2", "1/2"], ["1", "1"]]));
    assert_eq!(v["cdf"]["atoms"][0]["p"], "1/2");
    let out = finetti(&["limit", "--cdf-grid", "--points", "3", "--uniform", "--n", "2", "--output", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "xi,phi,phi_n\n0,0,1/6\n1/2,1/2,1/2\n1,1,5/6\n"
    );

    let dir = tempfile::tempdir().unwrap();
    let moments = json_ok(&["condition", "0", "0", "--uniform", "--depth", "4"]);
    let spec = write(dir.path(), "m.json", &moments);
    let (code, err) = error_of(&["limit", "--interval", "0", "1/2", "--spec", &spec]);
    assert_eq!((code, err["error"].as_str()), (3, Some("NotAtomic")));
    assert_eq!(error_of(&["limit", "--interval", "1/2", "1/4", "--constant", "1/2"]).0, 2);
    assert_eq!(error_of(&["limit", "--constant", "1/2"]).0, 2);
}

#[test]
fn sampling() {
    let args = ["sample", "100", "10000", "--interval", "0.4", "0.6", "--seed", "42", "--constant", "1/2"];
    let first = finetti(&args);
    assert!(first.status.success());
    let second = finetti(&args);
    assert_eq!(first.stdout, second.stdout);

    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    let hits: u128 = (41..=60).map(|h| choose(100, h)).sum();
    assert_eq!(v["exact"], Value::String(fraction(hits, 1u128 << 100)));
    let exact = hits as f64 / 2f64.powi(100);
    let stderr = v["stderr"].as_f64().unwrap();
    assert!((stderr - (exact * (1.0 - exact) / 1e4).sqrt()).abs() < 1e-12);
    assert!((v["empirical"].as_f64().unwrap() - exact).abs() <= 3.0 * stderr);
    assert_eq!((v["seed"].as_u64(), v["n"].as_u64(), v["trials"].as_u64()), (Some(42), Some(100), Some(10000)));

    let other = finetti(&["sample", "100", "10000", "--interval", "0.4", "0.6", "--seed", "43", "--constant", "1/2"]);
    assert_ne!(first.stdout, other.stdout);

    assert_eq!(error_of(&["sample", "100", "0", "--interval", "0.4", "0.6", "--constant", "1/2"]).0, 2);
    let (code, err) = error_of(&["sample", "20", "10", "--interval", "0", "1", "--uniform", "--depth", "10"]);
    assert_eq!((code, err["error"].as_str()), (3, Some("DepthExceeded")));
}
