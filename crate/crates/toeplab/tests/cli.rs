use std::process::Command;

use serde_json::Value;
use toeplab::cli::run;

fn call(args: &[&str]) -> toeplab::cli::RunOutput {
    let mut argv = vec!["toeplab"];
    argv.extend_from_slice(args);
    run(&argv)
}

fn records(out: &str) -> Vec<Value> {
    out.lines()
        .map(|l| {
            check_schema(l);
            serde_json::from_str(l).unwrap()
        })
        .collect()
}

fn strip_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

fn scratch_file(name: &str, body: &str) -> String {
    let p = std::env::temp_dir().join(format!("toeplab-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

/// Keys allowed in a record, in output order.
const SCHEMA: &[&str] =
    &["task", "params", "n", "exact", "predicted", "predicted_value", "abs_err", "rel_err", "result", "wall_time_ms"];

fn check_schema(line: &str) {
    let v: Value = serde_json::from_str(line).unwrap();
    let obj = v.as_object().expect("record is an object");
    for k in obj.keys() {
        assert!(SCHEMA.contains(&k.as_str()), "unexpected key {k}");
    }
    // top-level keys appear in schema order
    let offsets: Vec<usize> =
        SCHEMA.iter().filter(|k| obj.contains_key(**k)).map(|k| line.find(&format!("\"{k}\":")).unwrap()).collect();
    assert!(offsets.windows(2).all(|w| w[0] < w[1]), "{line}");
    assert!(obj["task"].is_string());
    assert!(obj["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert!(obj["params"].as_object().unwrap().values().all(|v| v.is_string()));
    if let Some(e) = obj.get("exact") {
        assert!(e["logmod"].is_f64() && e["phase"].is_f64());
    }
    for t in obj.get("predicted").and_then(|p| p.as_array()).into_iter().flatten() {
        assert!(t.get("p").is_some());
    }
    for k in ["abs_err", "rel_err"] {
        if let Some(x) = obj.get(k) {
            assert!(x.as_f64().unwrap() >= 0.0);
        }
    }
}

#[test]
fn det_diag_record() {
    let out = call(&["det", "--symbol", "diag", "--k-ons", "0.5", "--n", "40"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = records(&out.stdout);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["task"], "det");
    assert_eq!(r[0]["n"], 40);
    let d = r[0]["exact"]["logmod"].as_f64().unwrap().exp();
    assert!((d - 0.75f64.powf(0.25)).abs() < 1e-6);
    // absent fields are left out rather than zero-filled
    assert!(r[0].get("predicted").is_none() && r[0].get("rel_err").is_none());
}

#[test]
fn compare_basor_tracy_sweep() {
    let out = call(&["compare", "--symbol", "bt", "--n-from", "4", "--n-to", "64", "--step", "even"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = records(&out.stdout);
    assert_eq!(r.len(), 31);
    let ns: Vec<u64> = r.iter().map(|v| v["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, (4..=64).step_by(2).collect::<Vec<u64>>());
    for v in &r {
        assert_eq!(v["predicted"].as_array().unwrap().len(), 2);
    }
    let rel: Vec<f64> = r.iter().map(|v| v["rel_err"].as_f64().unwrap()).collect();
    assert!(rel[rel.len() - 1] < 1e-3 && rel[rel.len() - 1] < rel[0]);
}

#[test]
fn every_subcommand_emits_valid_records() {
    let cases: &[&[&str]] = &[
        &["predict", "--symbol", "exp_cos", "--t", "0.5", "--n", "3"],
        &["compare", "--symbol", "pure_fh", "--alpha", "0.3", "--beta", "0.1+0.2i", "--n-from", "2", "--n-to", "5"],
        &["ising", "--critical", "--n-from", "2", "--n-to", "4"],
        &["ising", "--kind", "row", "--k-ons", "0.7", "--n", "5"],
        &["eigen", "--symbol", "laurent", "--param", "c.0=2", "--param", "c.1=-1", "--param", "c.-1=-1", "--n", "6", "--bulk-x", "0.5"],
        &["scale", "--r", "0.5,1"],
        &["scale", "--painleve", "p5", "--r", "0.5,1"],
        &["gap", "--s", "0.5,2"],
        &["boson", "-N", "4", "--t", "0.5,1.0"],
        &["lis", "--n", "1,2,3"],
    ];
    for args in cases {
        let out = call(args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        let r = records(&out.stdout);
        assert!(!r.is_empty(), "{args:?}");
        for v in &r {
                assert_eq!(v["task"], args[0]);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["compare", "--symbol", "diag", "--k-ons", "0.3", "--n-from", "1", "--n-to", "12"];
    let a: Vec<Value> = records(&call(&args).stdout).into_iter().map(strip_time).collect();
    let b: Vec<Value> = records(&call(&args).stdout).into_iter().map(strip_time).collect();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn jobs_keep_sweep_order() {
    let base = ["det", "--symbol", "lenard", "--t", "2.0", "--n-from", "1", "--n-to", "40"];
    let serial: Vec<Value> = records(&call(&base).stdout).into_iter().map(strip_time).collect();
    let mut par_args = base.to_vec();
    par_args.extend(["--jobs", "4"]);
    let par: Vec<Value> = records(&call(&par_args).stdout).into_iter().map(strip_time).collect();
    assert_eq!(serial, par);
    let ns: Vec<u64> = par.iter().map(|v| v["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, (1..=40).collect::<Vec<u64>>());
}

#[test]
fn input_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["det", "--symbol", "diag", "--n", "4", "--bogus"],
        &["frobnicate"],
        &["det", "--symbol", "no_such_symbol", "--n", "4"],
        &["det", "--symbol", "diag", "--k-ons", "0.5"],
        &["det", "--symbol", "diag", "--k-ons", "0.5", "--n-from", "9", "--n-to", "3"],
        &["det", "--symbol", "diag", "--k-ons", "0.5", "--n-from", "1", "--n-to", "3", "--step", "0"],
        &["gap", "--s", "2", "--widom-mu", "0.6", "--size", "10"],
        &["det", "--symbol-file", "/nonexistent/file", "--n", "3"],
        &["scale", "--r", "1", "--sign", "sideways"],
    ];
    for args in cases {
        let out = call(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_3() {
    let out = call(&["gap", "--s", "40", "--nodes", "32"]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("nodes"));
}

#[test]
fn help_and_version_succeed() {
    let out = call(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("extended"));
    assert_eq!(call(&["--version"]).code, 0);
}

#[test]
fn csv_output() {
    let out = call(&["compare", "--symbol", "diag", "--k-ons", "0.5", "--n-from", "3", "--n-to", "5", "--csv"]);
    assert_eq!(out.code, 0);
    let mut rd = csv::Reader::from_reader(out.stdout.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["task", "params", "n", "exact_logmod", "exact_phase", "predicted", "abs_err", "rel_err", "result", "wall_time_ms"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for (row, n) in rows.iter().zip(3..) {
        assert_eq!(row.len(), header.len());
        assert_eq!(&row[0], "compare");
        assert_eq!(row[2], n.to_string());
        assert!(row[3].parse::<f64>().unwrap() < 0.0);
        let predicted: Value = serde_json::from_str(&row[5]).unwrap();
        assert_eq!(predicted.as_array().unwrap().len(), 1);
        assert!(row[7].parse::<f64>().unwrap() < 1e-3);
    }
}

#[test]
fn plot_data_output() {
    let out = call(&["det", "--symbol", "exp_cos", "--t", "1", "--n-from", "1", "--n-to", "6", "--plot-data"]);
    assert_eq!(out.code, 0);
    let pts: Vec<(f64, f64)> = out
        .stdout
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(pts.len(), 6);
    assert_eq!(pts[0].0, 1.0);
    // log D_n of exp(2 cos theta) increases towards 1
    assert!(pts.windows(2).all(|w| w[0].1 < w[1].1));
    assert!((pts[5].1 - 1.0).abs() < 1e-3);
    assert_eq!(call(&["det", "--symbol", "diag", "--n", "3", "--csv", "--plot-data"]).code, 2);
}

#[test]
fn config_file_and_override() {
    let cfg = scratch_file("cfg", "# defaults\nsymbol = diag\nk_ons = 0.5\nn = 10\n");
    let from_file = call(&["--config", &cfg, "det"]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    let r = records(&from_file.stdout);
    assert_eq!(r[0]["n"], 10);
    assert_eq!(r[0]["params"]["k_ons"], "0.5");
    let overridden = call(&["--config", &cfg, "det", "--n", "12", "--k-ons", "0.25"]);
    let r = records(&overridden.stdout);
    assert_eq!(r[0]["n"], 12);
    assert_eq!(r[0]["params"]["k_ons"], "0.25");
    let bad = scratch_file("bad", "symbol diag\n");
    assert_eq!(call(&["--config", &bad, "det"]).code, 2);
    assert_eq!(call(&["--config", "/nonexistent/cfg", "det"]).code, 2);
}

#[test]
fn symbol_file_matches_builtin() {
    let f = scratch_file("sym", "kind=diag\nk_ons=0.5\n");
    let a = records(&call(&["det", "--symbol-file", &f, "--n", "9"]).stdout);
    let b = records(&call(&["det", "--symbol", "diag", "--k-ons", "0.5", "--n", "9"]).stdout);
    assert_eq!(a[0]["exact"], b[0]["exact"]);
    let bad = scratch_file("badsym", "kind=fh\nbogus=1\n");
    let out = call(&["det", "--symbol-file", &bad, "--n", "3"]);
    assert_eq!(out.code, 2);
}

#[test]
fn extended_precision_route() {
    let out = call(&["--precision", "extended", "gap", "--widom-mu", "0.6", "--size", "40"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = records(&out.stdout);
    let est = r[0]["result"]["constant_estimate"].as_f64().unwrap();
    let cst = r[0]["result"]["constant"].as_f64().unwrap();
    assert!((est - cst).abs() < 1e-2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_toeplab");
    let ok = Command::new(bin).args(["det", "--symbol", "identity", "--n", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["exact"]["logmod"], 0.0);
    let bad = Command::new(bin).args(["det", "--n", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let num = Command::new(bin).args(["gap", "--s", "40", "--nodes", "32"]).output().unwrap();
    assert_eq!(num.status.code(), Some(3));
}
