use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use pickdecomp::cache::CacheFile;
use pickdecomp_core::{compute_moments, MultiIndex};
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pickdecomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout holds a JSON report")
}

fn checks(v: &Value) -> &Vec<Value> {
    v["checks"].as_array().unwrap()
}

#[test]
fn certify_trivial_bidisk_passes() {
    let out = run(&["certify", "--input", &fixture("trivial_bidisk.json"), "--no-cache"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(checks(&v).len() > 20);
    for c in checks(&v) {
        assert_eq!(c["pass"], Value::Bool(true), "{c}");
        for key in ["id", "paper_anchor", "kernel", "n_points", "min_eig", "max_residual", "tol"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(v["config"]["moment_convention"], "C_gamma = int z^gamma dmu");
    assert_eq!(v["polynomial"]["degree"], serde_json::json!([1, 1]));
}

#[test]
fn stability_rejects_boundary_zero() {
    let out = run(&["stability", "--input", &fixture("two_minus_sum.json")]);
    assert_eq!(out.status.code(), Some(2));
    let v = report(&out);
    assert_eq!(v["results"]["stable"], Value::Bool(false));
    assert_eq!(v["pass"], Value::Bool(false));
}

#[test]
fn stability_accepts_affine() {
    let out = run(&["stability", "--input", &fixture("affine.json")]);
    assert_eq!(out.status.code(), Some(0));
    let margin = report(&out)["results"]["margin"].as_f64().unwrap();
    assert!((margin - 2.0).abs() < 1e-9);
}

#[test]
fn measure_commands_embed_verdict_for_unstable_input() {
    for cmd in ["moments", "decompose", "certify", "sweep"] {
        let out = run(&[cmd, "--input", &fixture("two_minus_sum.json"), "--no-cache"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        let v = report(&out);
        assert_eq!(v["results"]["stable"], Value::Bool(false), "{cmd}");
        assert_eq!(checks(&v)[0]["id"], "stability");
    }
}

#[test]
fn decompose_ladder_drops_tenfold() {
    let out = run(&[
        "decompose",
        "--input",
        &fixture("affine.json"),
        "--S",
        "1",
        "--N",
        "4,8,16",
        "--points",
        "random:12:0.5:42",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let res: Vec<f64> = rows.iter().map(|r| r["max_residual"].as_f64().unwrap()).collect();
    assert!(res[0] >= 10.0 * res[1] && res[1] >= 10.0 * res[2], "{res:?}");
    assert!(res[2] < 1e-5);
    assert_eq!(v["results"]["n_points"], 14);
}

#[test]
fn failed_certificate_exits_one() {
    let out = run(&[
        "decompose",
        "--input",
        &fixture("affine.json"),
        "--N",
        "4,8",
        "--tol-identity",
        "1e-12",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(v["pass"], Value::Bool(false));
    assert!(checks(&v).iter().any(|c| c["id"] == "identity.ladder S={1}" && c["pass"] == false));
}

#[test]
fn malformed_json_reports_line() {
    let out = run(&["stability", "--input", &fixture("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("malformed.json:5:"), "{err}");
}

#[test]
fn semantic_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"d": 2, "degree": [1, 1], "coefficients": [{"index": [2, 0], "re": 1.0, "im": 0.0}]}"#, "outside the degree box"),
        (r#"{"d": 2, "degree": [1], "coefficients": []}"#, "\"degree\" has 1 entries"),
        (r#"{"d": 2, "degree": [1, 1], "coefficients": [{"index": [0, 0], "re": 1.0}, {"index": [0, 0], "re": 2.0}]}"#, "duplicate index"),
        (r#"{"d": 2, "degree": [1, 1], "coefficients": [], "extra": 1}"#, "unknown field"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.json"));
        fs::write(&path, text).unwrap();
        let out = run(&["stability", "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn bad_flags_exit_two() {
    let input = fixture("affine.json");
    for extra in [
        vec!["--S", "3"],
        vec!["--S", "1,2"],
        vec!["--M", "100"],
        vec!["--N", "8,4"],
        vec!["--points", "random:12:1.5:1"],
        vec!["--points", "grid:12:0.5:1"],
        vec!["--j", "2", "--k", "2"],
    ] {
        let mut args = vec!["certify", "--input", input.as_str(), "--no-cache"];
        args.extend(extra.iter());
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["decompose"]).status.code(), Some(2));
}

#[test]
fn certify_is_deterministic_across_cache_states() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("report{i}.json"));
            let out = run(&[
                "certify",
                "--input",
                &fixture("affine.json"),
                "--cache-dir",
                cache.to_str().unwrap(),
                "--output",
                path.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            assert_eq!(out.stderr.is_empty(), i == 0);
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
}

#[test]
fn moments_cache_is_shared_and_bypassable() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c");
    let input = fixture("affine.json");
    let base = ["--input", input.as_str(), "--N", "4,8,16", "--cache-dir", cache.to_str().unwrap()];

    let first = run(&[&["moments"][..], &base[..]].concat());
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let stored: Value = serde_json::from_slice(&fs::read(&files[0]).unwrap()).unwrap();
    assert_eq!(stored["header"]["convention"], "C_gamma = int z^gamma dmu");
    assert_eq!(stored["header"]["R"], serde_json::json!([15, 15]));
    assert_eq!(stored["values"].as_array().unwrap().len(), 31 * 31);

    let second = run(&[&["decompose"][..], &base[..]].concat());
    assert_eq!(second.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));

    let other = dir.path().join("unused");
    let bypass = run(&["sweep", "--input", &input, "--N", "4,8,16", "--no-cache", "--cache-dir", other.to_str().unwrap()]);
    assert_eq!(bypass.status.code(), Some(0));
    assert!(!other.exists());
}

#[test]
fn corrupt_cache_file_is_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("affine.json");
    let args = ["moments", "--input", input.as_str(), "--N", "4", "--cache-dir", dir.path().to_str().unwrap()];
    assert_eq!(run(&args).status.code(), Some(0));
    let file = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    fs::write(&file, "{ not json").unwrap();
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt"));
    let again = run(&args);
    assert!(String::from_utf8_lossy(&again.stderr).contains("cache hit"));
}

#[test]
fn cache_file_round_trips_bit_exactly() {
    let p = pickdecomp::polyjson::read_polynomial(fixture("affine.json").as_ref()).unwrap();
    let table = compute_moments(&p, &MultiIndex::from([3, 2]), 64).unwrap();
    let text = serde_json::to_string(&CacheFile::from_table(&table)).unwrap();
    let back = serde_json::from_str::<CacheFile>(&text).unwrap().into_table().unwrap();
    assert_eq!(back, table);
}

#[test]
fn csv_kernels_dump_one_file_per_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "decompose",
        "--input",
        &fixture("affine.json"),
        "--N",
        "4,8,16",
        "--points",
        "random:5:0.5:3",
        "--no-cache",
        "--csv-kernels",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["K_S1_N16.csv", "K_S2_N16.csv", "L_S1_N16.csv", "L_S2_N16.csv", "P_N16.csv"]);

    let mut rdr = csv::Reader::from_path(dir.path().join("P_N16.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["i", "j", "z_i", "z_j", "re", "im"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let n = 7;
    assert_eq!(rows.len(), n * n);
    let entry = |i: usize, j: usize| {
        let r = &rows[i * n + j];
        (r[4].parse::<f64>().unwrap(), r[5].parse::<f64>().unwrap())
    };
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (entry(i, j), entry(j, i));
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
        }
    }
    // the origin is the first structured point: P(0,0) = |p(0)|^2 - |p~(0)|^2 = 16
    assert!((entry(0, 0).0 - 16.0).abs() < 1e-12);
}

#[test]
fn sweep_reports_contractivity_in_three_variables() {
    let out = run(&["sweep", "--input", &fixture("affine_d3.json"), "--N", "4,8", "--S", "1,2", "--no-cache"]);
    let v = report(&out);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(v["results"]["S"], serde_json::json!([1, 2]));
    let r: Vec<f64> = rows.iter().map(|r| r["max_residual"].as_f64().unwrap()).collect();
    assert!(r[0] > r[1]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("certify"));
}
