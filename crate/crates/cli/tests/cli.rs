use std::process::{Command, Output};

use serde_json::Value;

fn cmroot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmroot")).args(args).env_remove("CMROOT_PRECISION").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn rootnum_lists_places_and_ratio() {
    let out = cmroot(&["rootnum", "--d", "-1+2i", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["digits"], 31);
    let places = v["places"].as_array().unwrap();
    assert_eq!(places[0]["place"], "infinity");
    assert_eq!(places[0]["certificate"], "-i");
    assert_eq!(places[1]["place"], "-1+2i");
    assert!(places[1]["oracle_distance"].as_f64().unwrap() < 1e-9);
    assert!(v["global_ratio"]["certificate"].is_string());
    assert!(v["global"]["unavailable"].is_string());
}

#[test]
fn symbol_routes() {
    let out = cmroot(&["symbol", "--alpha", "3+2i", "--beta", "-1+2i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["symbol"], "-1");
    assert_eq!(v["routes_agree"], true);
    let out = cmroot(&["symbol", "--alpha", "i", "--beta", "3+2i", "--mode", "oracle"]);
    assert_eq!(json(&out)["symbol"], "-i");
}

#[test]
fn average_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("avg.csv");
    let out = cmroot(&["experiment", "average", "--d", "-1+2i", "--X", "100,1000,10000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "X,size,mean_re,mean_im,abs_mean,digits");
    assert_eq!(lines.len(), 4);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = cmroot(&["experiment", "density", "--points", "8", "--eps", "0.2", "--format", "json", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn selftest_quick_is_green() {
    let out = cmroot(&["selftest", "--quick", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,passed,detail,digits"));
    assert!(!text.contains(",false,"));
}

#[test]
fn exit_codes() {
    assert_eq!(cmroot(&["rootnum", "--d", "2+2x"]).status.code(), Some(2));
    assert_eq!(cmroot(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cmroot(&["--precision", "40", "curve", "--d", "5"]).status.code(), Some(2));
    assert_eq!(cmroot(&["--precision", "10", "curve", "--d", "5"]).status.code(), Some(2));
    // nonzero d is required; a computation error exits 1
    assert_eq!(cmroot(&["curve", "--d", "0"]).status.code(), Some(1));
    // shape violation in the averaging sweep
    assert_eq!(cmroot(&["experiment", "average", "--d", "i", "--X", "10"]).status.code(), Some(1));
    // the place above 2 is not a bad odd place
    assert_eq!(cmroot(&["hecke", "--d", "1", "--prime", "1+i"]).status.code(), Some(1));
}

#[test]
fn env_overrides_precision() {
    let out = Command::new(env!("CARGO_BIN_EXE_cmroot"))
        .args(["rootnum", "--d", "-3"])
        .env("CMROOT_PRECISION", "15")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["digits"], 15);
}

#[test]
fn curve_and_hecke() {
    let v = json(&cmroot(&["curve", "--d", "16i"]));
    assert_eq!(v["d"], "0+1i");
    assert_eq!(v["even_reduction"]["kodaira"], "II");
    let out = cmroot(&["hecke", "--d", "1", "--prime", "3+2i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trace_formula_holds"], true);
    assert_eq!(v["points"].as_u64().unwrap() as i64, 14 - v["trace"].as_str().unwrap().parse::<i64>().unwrap());
}
