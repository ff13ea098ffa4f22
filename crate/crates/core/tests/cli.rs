use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn resum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resum")).args(args).output().expect("binary runs")
}

fn resum_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resum")).env("RESUM_THREADS", threads).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let o = resum(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,re_f,im_f,err"));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// Same keys and types everywhere; numbers equal up to roundoff.
fn same_shape(a: &Value, b: &Value, path: &str) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            assert_eq!(kx, ky, "keys differ at {path}");
            for k in x.keys() {
                same_shape(&x[k], &y[k], &format!("{path}.{k}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "length differs at {path}");
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                same_shape(p, q, &format!("{path}[{i}]"));
            }
        }
        // error estimates are reported, not pinned
        (Value::Number(p), Value::Number(_)) if path.ends_with("err") => {
            assert!(p.as_f64().unwrap() >= 0.0, "{path}");
        }
        (Value::Number(p), Value::Number(q)) => {
            let (p, q) = (p.as_f64().unwrap(), q.as_f64().unwrap());
            assert!((p - q).abs() <= 1e-12 + 1e-9 * q.abs(), "{path}: {p} vs {q}");
        }
        _ => assert_eq!(a, b, "at {path}"),
    }
}

fn golden(name: &str, args: &[&str]) {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    same_shape(&json_out(args), &expected, name);
}

#[test]
fn json_schema_golden_files() {
    golden("coeffs_f1.json", &["coeffs", "f1", "--k", "1..5", "--format", "json"]);
    golden("eval_f1.json", &["eval", "f1", "--z", "0.5", "--z=-3+1i", "--format", "json"]);
    golden("singularity_f1.json", &["singularity", "f1", "--eps", "0.05", "--format", "json"]);
    golden("scan_f3.json", &["scan", "f3-stirling", "--from=-2", "--to", "2", "--count", "3", "--format", "json"]);
    golden("sums_eqsum.json", &["sums", "eqsum", "--a", "2", "--format", "json"]);
    golden("sums_limit1.json", &["sums", "limit1", "--format", "json"]);
    golden("borel_sqrt.json", &["borel", "borel-sqrt", "--z", "0.05", "--format", "json"]);
}

#[test]
fn coeffs_are_inverse_square_roots() {
    let file = format!("{}/models/f1.resum.json", env!("CARGO_MANIFEST_DIR"));
    for model in [file.as_str(), "f1"] {
        let v = json_out(&["coeffs", model, "--k", "1..5", "--format", "json"]);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 5);
        for (i, r) in rows.iter().enumerate() {
            let k = (i + 1) as f64;
            assert_eq!(f(&r["k"]), k);
            assert!((f(&r["re"]) - 1.0 / k.sqrt()).abs() < 1e-12);
            assert!((f(&r["closed_re"]) - 1.0 / k.sqrt()).abs() < 1e-15);
        }
    }
    // --model and the positional form are interchangeable
    let a = resum(&["coeffs", "--model", "f1", "--k", "3"]);
    let b = resum(&["coeffs", "f1", "--k", "3..3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn coeffs_json_round_trips() {
    let o = resum(&["coeffs", "f2", "--k", "1..4", "--format", "json"]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn coeffs_usage_errors() {
    for k in ["0..", "0..5", "0", "5..2", "1..", "x"] {
        let o = resum(&["coeffs", "f1", "--k", k]);
        assert_eq!(o.status.code(), Some(2), "--k {k}");
    }
    assert!(stderr(&resum(&["coeffs", "f1", "--k", "0.."])).contains("k = 1"));
}

fn f1_direct(x: f64) -> f64 {
    (1..400).map(|k| x.powi(k) / (k as f64).sqrt()).sum()
}

#[test]
fn eval_dispatch_and_cut_handling() {
    let v = json_out(&["eval", "f1", "--z", "0.5", "--format", "json"]);
    assert!((f(&v["points"][0]["re_f"]) - f1_direct(0.5)).abs() < 1e-12);

    let o = resum(&["eval", "f1", "--z", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = resum(&["eval", "f1", "--z", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("side"), "{}", stderr(&o));

    // near the singularity both sides are finite and complex conjugate
    let up = json_out(&["eval", "f1", "--z", "1.1", "--side", "upper", "--format", "json"]);
    let lo = json_out(&["eval", "f1", "--z", "1.1", "--side", "lower", "--format", "json"]);
    let (u, l) = (&up["points"][0], &lo["points"][0]);
    assert!(f(&u["re_f"]).is_finite() && f(&u["im_f"]) != 0.0);
    assert!((f(&u["re_f"]) - f(&l["re_f"])).abs() < 1e-10);
    assert!((f(&u["im_f"]) + f(&l["im_f"])).abs() < 1e-10);
    // jump across the cut equals 2 pi i / sqrt(pi ln z)
    let jump = f(&u["im_f"]) - f(&l["im_f"]);
    assert!((jump - 2.0 * PI / (PI * 1.1f64.ln()).sqrt()).abs() < 1e-8);

    // eps and tail move the contour, not the value
    let moved = json_out(&["eval", "f1", "--z", "1.1", "--side", "upper", "--eps", "0.3", "--tail", "60", "--format", "json"]);
    assert!((f(&moved["points"][0]["im_f"]) - f(&u["im_f"])).abs() < 1e-9);
    assert_eq!(resum(&["eval", "f3-stirling", "--z", "1", "--eps", "0.3"]).status.code(), Some(2));

    // entire and Borel models dispatch to their own evaluators
    let e = json_out(&["eval", "f3-stirling", "--z", "1", "--format", "json"]);
    let direct: f64 = (1..60).map(|n| (n as f64).powf(-(n as f64) - 1.0)).sum();
    assert!((f(&e["points"][0]["re_f"]) - direct).abs() < 1e-12);
    let b = json_out(&["eval", "borel-sqrt", "--z", "0.05", "--format", "json"]);
    let bb = json_out(&["borel", "borel-sqrt", "--z", "0.05", "--format", "json"]);
    assert_eq!(b["points"][0]["re_f"], bb["points"][0]["re_f"]);
}

#[test]
fn singularity_report_surfaces_local_parts() {
    let v = json_out(&["singularity", "f1", "--eps", "0.01,0.1", "--format", "json"]);
    for p in v["probes"].as_array().unwrap() {
        let off = f(&p["offset"]);
        let g = 1.0 / (PI * (1.0 + off).ln()).sqrt();
        // pi i times the local density on the upper side
        assert!((f(&p["im_local_upper"]) - PI * g).abs() < 1e-10 * PI * g);
        let local_jump = f(&p["im_local_upper"]) - f(&p["im_local_lower"]);
        assert!((local_jump - f(&p["im_measured_jump"])).abs() < 1e-6);
        assert!((f(&p["im_measured_jump"]) - f(&p["im_predicted_jump"])).abs() < 1e-8);
    }
    assert_eq!(resum(&["singularity", "f1", "--j", "3"]).status.code(), Some(2));
    assert_eq!(resum(&["singularity", "f3-stirling"]).status.code(), Some(2));
}

/// sum (-x)^k / sqrt(k) as a Fermi-Dirac type integral, trapezoid rule.
fn f1_negative(x: f64) -> f64 {
    let h = 0.01;
    let g = |u: f64| 1.0 / ((u * u - x.ln()).exp() + 1.0);
    let mut s = 0.5 * g(0.0);
    let mut i = 1;
    loop {
        let v = g(i as f64 * h);
        s += v;
        if v < 1e-18 {
            break;
        }
        i += 1;
    }
    -2.0 / PI.sqrt() * s * h
}

#[test]
fn scan_f1_negative_axis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = resum(&["scan", "f1", "--from=-50", "--to=-1", "--count", "100", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 100);
    assert_eq!((rows[0][0], rows[99][0]), (-50.0, -1.0));
    for r in rows.iter().step_by(11) {
        let o = f1_negative(-r[0]);
        assert!((r[2] - o).abs() < 1e-9 * o.abs(), "z={}: {} vs {o}", r[0], r[2]);
        assert!(r[3].abs() < 1e-12);
    }
}

#[test]
fn scan_f3_growth_envelope() {
    let o = resum(&["scan", "f3-stirling", "--from=-30", "--to", "0", "--count", "31"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 31);
    for r in &rows {
        let x = r[0];
        // sum x^n / n^{n+1}; the largest term bounds the cancellation error
        let terms: Vec<f64> = (1..150).map(|n| x.powi(n) / (n as f64).powi(n + 1)).collect();
        let direct: f64 = terms.iter().sum();
        let big = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        assert!((r[2] - direct).abs() < 1e-12 * big.max(1.0), "x={x}: {} vs {direct}", r[2]);
        assert!(r[2].abs() <= 2.0 * (x.abs() / std::f64::consts::E).exp());
    }
}

#[test]
fn scan_single_point_and_grid() {
    let o = resum(&["scan", "f1", "--from", "0.3", "--count", "1"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 1);
    let o = resum(&["scan", "f1", "--grid", "-0.5,0.5,3,-0.25,0.25,2"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[0][0], rows[0][1], rows[5][0], rows[5][1]), (-0.5, -0.25, 0.5, 0.25));
    assert_eq!(resum(&["scan", "f1", "--from", "0.3", "--count", "0"]).status.code(), Some(2));
    assert_eq!(resum(&["scan", "f1", "--grid", "0,1,0,0,1,2"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["scan", "f1", "--from=-3+1i", "--to", "2-0.5i", "--count", "12"];
    let base = resum(&args);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(resum(&args).stdout, base.stdout);
    for t in ["1", "2", "4"] {
        assert_eq!(resum_env(&args, t).stdout, base.stdout, "RESUM_THREADS={t}");
    }
    assert_eq!(resum_env(&args, "zero").status.code(), Some(2));
}

#[test]
fn sums_compare_with_oracles() {
    let v = json_out(&["sums", "limit1", "--format", "json"]);
    assert_eq!(v["reading"], "derived");
    assert!(f(&v["difference"]) < 1e-8);
    let p = json_out(&["sums", "limit1", "--reading", "printed", "--format", "json"]);
    assert!(f(&p["difference"]) > 0.1);
    for (a, tol) in [("1", 1e-3), ("2", 1e-4), ("4", 1e-6)] {
        let v = json_out(&["sums", "eqsum", "--a", a, "--format", "json"]);
        assert!(f(&v["difference"]) < tol, "a={a}");
    }
    assert_eq!(resum(&["sums", "eqsum", "--a", "0.5"]).status.code(), Some(2));
    assert_eq!(resum(&["sums", "limit1", "--reading", "other"]).status.code(), Some(2));
}

#[test]
fn borel_against_truncation_and_ei() {
    let v = json_out(&["borel", "borel-sqrt", "--z", "0.05", "--format", "json"]);
    let p = &v["points"][0];
    let d = (f(&p["re_f"]) - f(&p["re_truncated"])).abs();
    assert!(d <= 2.0 * f(&p["truncation_floor"]), "{d}");
    assert!((f(&p["re_f"]) - f(&p["re_ei"])).abs() < 1e-12);
    assert_eq!(resum(&["borel", "f1", "--z", "0.05"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(resum(&["--help"]).status.code(), Some(0));
    assert_eq!(resum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(resum(&["eval", "no-such-model", "--z", "0.5"]).status.code(), Some(2));
    assert_eq!(resum(&["eval", "f1", "--z", "1+"]).status.code(), Some(2));
    assert_eq!(resum(&["eval", "f1", "--z", "0.5", "--tol", "0"]).status.code(), Some(2));
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), r#"{"kind":"finite_radius","terms":[]}"#).unwrap();
    assert_eq!(resum(&["eval", bad.path().to_str().unwrap(), "--z", "0.5"]).status.code(), Some(2));
    // numerical failures: a singular Laplace direction and an unmet tolerance
    let o = resum(&["borel", "borel-sqrt", "--z", "0.1", "--lateral", "direct"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("singular direction"));
    assert_eq!(resum(&["eval", "f1", "--z", "0.5", "--tol", "1e-20"]).status.code(), Some(3));
    assert_eq!(resum(&["coeffs", "f1", "--k", "1..2", "--tol", "1e-20"]).status.code(), Some(3));
}

#[test]
fn library_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = resum::cli::run(["resum", "coeffs", "f1", "--k", "4", "--format", "csv"], &mut out, &mut err);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,re_f,im_f,err,re_closed,im_closed"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "4");
    assert!((row[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-13);
}
