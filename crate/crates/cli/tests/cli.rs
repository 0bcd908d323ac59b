use std::process::{Command, Output};

use potalg::representation::{self, SpectrumMode};
use potalg::{Family, ModelParams};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_potalg"));
    cmd.args(args).env_remove("SPECALG_DEFAULT_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn energies(v: &Value) -> Vec<f64> {
    v["payload"]["lines"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["energy"].as_f64().unwrap())
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn envelope_shape() {
    let v = json(&["spectrum", "--family", "rosen-morse", "--j", "4", "--g", "1"]);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["params"]["family"], "rosen-morse");
    assert!(v["warnings"].as_array().unwrap().is_empty());
    assert!(v.get("run").is_none());
    let verbose = json(&["spectrum", "--family", "rosen-morse", "--j", "4", "--g", "1", "--verbose"]);
    assert!(verbose["run"]["version"].is_string());
    assert_eq!(verbose["payload"], v["payload"]);
}

#[test]
fn spectrum_examples() {
    let rm = energies(&json(&["spectrum", "--family", "rosen-morse", "--j", "4", "--g", "1"]));
    assert_eq!(rm.len(), 2);
    assert!(close(rm[0], -82.0 / 9.0, 1e-14) && close(rm[1], -4.25, 1e-14));

    let flat = energies(&json(&["spectrum", "--family", "flat", "--j", "1/2", "--g", "1", "--n-max", "2"]));
    assert_eq!(flat.len(), 3);
    for (e, want) in flat.iter().zip([-4.0, -4.0 / 9.0, -0.16]) {
        assert!(close(*e, want, 1e-14), "{e} vs {want}");
    }

    let out = run(&["spectrum", "--family", "hyperbolic", "--j", "1/2", "--g", "0.04"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("g <= 1/4"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn spectrum_input_errors() {
    for args in [
        &["spectrum", "--family", "flat", "--j", "1/2", "--g", "1"][..],
        &["spectrum", "--family", "flat", "--j", "1", "--g", "1", "--n-max", "2"],
        &["spectrum", "--family", "flat", "--j", "1.7", "--g", "1", "--n-max", "2"],
        &["spectrum", "--family", "hyperbolic", "--j", "7/2", "--g", "9"],
        &["spectrum", "--family", "flat", "--j", "1/2", "--g", "-1", "--n-max", "2"],
        &["spectrum", "--family", "sphere", "--j", "1/2", "--g", "1"],
        &["spectrum", "--family", "flat", "--j", "x", "--g", "1", "--n-max", "2"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    // the hyperbolic window is printed
    let out = run(&["spectrum", "--family", "hyperbolic", "--j", "7/2", "--g", "9"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1/2, sqrt(g))"));
}

#[test]
fn extended_mode_accepts_real_j() {
    let v = json(&[
        "spectrum", "--family", "flat", "--j", "1.7", "--g", "1", "--n-max", "1", "--mode", "extended",
    ]);
    let e = energies(&v);
    assert!(close(e[0], -1.0 / (1.7 * 1.7), 1e-14));
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn json_round_trip() {
    let v = json(&["spectrum", "--family", "flat", "--j", "1/2", "--g", "3", "--n-max", "6"]);
    let p = ModelParams::parse(Family::FlatKepler, "1/2", 3.0).unwrap();
    let want = representation::spectrum(&p, Some(6), SpectrumMode::Strict).unwrap();
    assert_eq!(energies(&v), want.energies());
}

#[test]
fn csv_round_trip() {
    let out = run(&[
        "spectrum", "--family", "hyperbolic", "--j", "1/2", "--g", "30", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["n", "energy", "j_end"]);
    let p = ModelParams::parse(Family::HyperbolicKepler, "1/2", 30.0).unwrap();
    let want = representation::spectrum(&p, None, SpectrumMode::Strict).unwrap();
    let got: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(got, want.energies());
}

#[test]
fn deterministic_output() {
    let args = ["verify", "--family", "spherical", "--j", "1/2", "--g", "1", "--levels", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let sweep = ["sweep", "--family", "hyperbolic", "--g-range", "0.3:20:12", "--j", "1/2", "--quantity", "spectrum"];
    assert_eq!(run(&sweep).stdout, run(&sweep).stdout);
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "--family", "hyperbolic", "--g", "9", "--nu-max", "4"]);
    let reps = v["payload"]["representations"].as_array().unwrap();
    let dims: Vec<u64> = reps.iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    let nus: Vec<f64> = reps.iter().map(|r| r["nu"].as_f64().unwrap()).collect();
    assert_eq!(dims, [1, 3, 5]);
    assert_eq!(nus, [0.5, 1.5, 2.5]);
    let bands: Vec<(f64, f64)> = v["payload"]["regions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["kind"] == "excluded")
        .map(|r| (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap()))
        .collect();
    assert_eq!(bands, [(-3.0, -2.0), (3.0, 4.0)]);

    let flat = json(&["classify", "--family", "flat", "--g", "1", "--nu", "2"]);
    assert_eq!(flat["payload"]["representations"][0]["kind"], "excluded");

    let special = json(&["classify", "--family", "hyperbolic", "--g", "0.16"]);
    let reps = special["payload"]["representations"].as_array().unwrap();
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0]["kind"], "one-dim-special");
    assert!(close(reps[0]["nu"].as_f64().unwrap(), 0.2, 1e-14));

    let out = run(&["classify", "--family", "flat", "--g", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn classify_range_csv() {
    let out = run(&["classify", "--family", "hyperbolic", "--g", "9", "--nu-range", "-5:5:21", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[0], "kind");
    assert_eq!(rows.len(), 21);
    let kind_at = |nu: f64| {
        rows.iter().find(|r| r[1].parse::<f64>().unwrap() == nu).map(|r| r[0].clone()).unwrap()
    };
    assert_eq!(kind_at(-5.0), "infinite-lowering");
    assert_eq!(kind_at(-2.5), "excluded");
    assert_eq!(kind_at(1.5), "finite-dim");
    assert_eq!(kind_at(3.5), "excluded");
    assert_eq!(kind_at(5.0), "infinite-raising");
}

/// Composite Simpson on uniform samples.
fn simpson(ys: &[f64], h: f64) -> f64 {
    assert!(ys.len() % 2 == 1);
    let n = ys.len() - 1;
    let inner: f64 = (1..n).map(|i| if i % 2 == 1 { 4.0 * ys[i] } else { 2.0 * ys[i] }).sum();
    h / 3.0 * (ys[0] + inner + ys[n])
}

#[test]
fn wavefunction_examples() {
    let v = json(&["wavefunction", "--family", "flat", "--j", "1/2", "--g", "1", "--grid", "0,20,799"]);
    let xs: Vec<f64> = v["payload"]["x"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let ps: Vec<f64> = v["payload"]["psi"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(xs.len(), 801);
    assert_eq!((xs[0], xs[800]), (0.0, 20.0));
    let ratio = |i: usize| ps[i] / (xs[i].sqrt() * (-2.0 * xs[i]).exp());
    let c = ratio(1);
    assert!(c > 0.0);
    for i in (1..400).step_by(7) {
        assert!(close(ratio(i), c, 1e-12), "{} vs {c}", ratio(i));
    }

    let out = run(&[
        "wavefunction", "--family", "spherical", "--j", "3/2", "--g", "2", "--n", "2", "--grid", "0,pi,1001",
        "--normalize", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["x", "psi"]);
    let xs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let sq: Vec<f64> = ps.iter().map(|p| p * p).collect();
    let n2 = simpson(&sq, xs[1] - xs[0]);
    assert!((n2 - 1.0).abs() < 1e-6, "norm^2 {n2}");
    assert!(ps.iter().skip(1).find(|p| **p != 0.0).unwrap() > &0.0);
}

#[test]
fn wavefunction_errors() {
    for args in [
        &["wavefunction", "--family", "hyperbolic", "--j", "1/2", "--g", "9", "--n", "3"][..],
        &["wavefunction", "--family", "flat", "--j", "1/2", "--g", "1", "--grid", "-1,20,799"],
        &["wavefunction", "--family", "flat", "--j", "1/2", "--g", "1", "--grid", "0,20,800"],
        &["wavefunction", "--family", "rosen-morse", "--j", "2", "--g", "1"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn potential_examples() {
    let out = run(&["potential", "--family", "rosen-morse", "--j", "1", "--g", "1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["x", "potential"]);
    let zero = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == 0.0).expect("x = 0 row");
    assert_eq!(zero[1].parse::<f64>().unwrap(), 0.0);

    let flat = json(&["potential", "--family", "flat", "--j", "1", "--g", "1", "--grid", "0,10,200"]);
    let v: Vec<f64> = flat["payload"]["potential"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(v.len(), 200);
    assert!(v.windows(2).all(|w| w[1] > w[0]));

    let pot = json(&["potential", "--family", "hyperbolic", "--j", "3/2", "--g", "9"]);
    let spec = json(&["spectrum", "--family", "hyperbolic", "--j", "3/2", "--g", "9"]);
    assert_eq!(pot["payload"]["levels"], spec["payload"]["lines"]);

    let out = run(&[
        "potential", "--family", "flat", "--j", "1/2", "--g", "1", "--n-max", "2", "--grid", "0,10,20",
        "--format", "csv",
    ]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["x", "potential", "E_0", "E_1", "E_2"]);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == -4.0));

    let out = run(&["potential", "--family", "spherical", "--j", "1/2", "--g", "1", "--grid", "0,4,100"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_examples() {
    let v = json(&["verify", "--family", "spherical", "--j", "1/2", "--g", "1", "--levels", "3"]);
    assert_eq!(v["payload"]["pass"], true);
    let levels = v["payload"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert!(levels.iter().all(|l| l["rel_delta"].as_f64().unwrap() <= 1e-3));

    let v = json(&["verify", "--family", "hyperbolic", "--j", "3/2", "--g", "9"]);
    assert_eq!(v["payload"]["pass"], true);
    assert_eq!(v["payload"]["count"]["numeric"], 2);
    assert_eq!(v["payload"]["count"]["algebraic"], 2);

    let v = json(&["verify", "--probe-excluded", "--family", "hyperbolic", "--g", "4", "--j", "2.5"]);
    assert_eq!(v["payload"]["pass"], true);
    assert_eq!(v["payload"]["count"]["numeric"], 0);
}

#[test]
fn verify_exit_codes() {
    let base = ["verify", "--family", "rosen-morse", "--j", "4", "--g", "1"];
    assert_eq!(code(&run(&base)), 0);

    let mut strict = base.to_vec();
    strict.extend(["--tol-rel", "1e-12"]);
    let out = run(&strict);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["pass"], false);

    assert_eq!(code(&run_env(&base, &[("SPECALG_DEFAULT_TOL", "1e-12")])), 3);
    // an explicit flag beats the environment
    let mut loose = base.to_vec();
    loose.extend(["--tol-rel", "1e-3"]);
    assert_eq!(code(&run_env(&loose, &[("SPECALG_DEFAULT_TOL", "1e-12")])), 0);

    assert_eq!(code(&run(&["verify", "--family", "rosen-morse", "--j", "2", "--g", "1"])), 2);
    assert_eq!(code(&run(&["verify", "--family", "flat", "--j", "1/2", "--g", "1", "--grid", "0,10"])), 2);
    assert_eq!(code(&run(&["verify", "--probe-excluded", "--family", "flat", "--j", "1/2", "--g", "1"])), 2);
}

#[test]
fn verify_csv_and_out_file() {
    let dir = std::env::temp_dir().join(format!("potalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("verify.csv");
    let out = run(&[
        "verify", "--family", "flat", "--j", "3/2", "--g", "2", "--levels", "2", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check,n,algebraic,numeric,abs_delta,rel_delta,ratio,pass");
    assert_eq!(lines.filter(|l| l.starts_with("level,")).count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_special_curve() {
    let out = run(&["sweep", "--family", "hyperbolic", "--g-range", "0.05:0.24:20"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[..4], ["g", "j", "kind", "nu"]);
    assert_eq!(rows.len(), 20);
    for r in &rows {
        let g: f64 = r[0].parse().unwrap();
        let nu: f64 = r[3].parse().unwrap();
        assert_eq!(r[2], "one-dim-special");
        assert!(close(nu, 0.5 - (0.25 - g).sqrt(), 1e-15));
    }
}

#[test]
fn sweep_empty_and_malformed() {
    let out = run(&["sweep", "--family", "hyperbolic", "--g-range", "0.05:0.25:0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "g,j,kind,nu,dim,n,energy,pass,max_rel_delta,status\n");
    for range in ["1:2", "a:2:3", "1:2:-1", "1:inf:3"] {
        assert_eq!(code(&run(&["sweep", "--family", "hyperbolic", "--g-range", range])), 2, "{range}");
    }
    assert_eq!(code(&run(&["sweep", "--family", "flat", "--j-range", "0.5:1.5:3"])), 2);
}

#[test]
fn sweep_rows_match_commands() {
    let out = run(&[
        "sweep", "--family", "flat", "--j-range", "0.5:2.5:5", "--g", "2", "--quantity", "spectrum", "--n-max", "2",
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = csv_rows(&out);
    for j in ["1/2", "3/2", "5/2"] {
        let want = energies(&json(&["spectrum", "--family", "flat", "--j", j, "--g", "2", "--n-max", "2"]));
        let jv = j.parse::<potalg::HalfInteger>().unwrap().value();
        let got: Vec<f64> = rows
            .iter()
            .filter(|r| r[1].parse::<f64>().unwrap() == jv)
            .map(|r| r[6].parse().unwrap())
            .collect();
        assert_eq!(got, want);
    }
    // integer j rows carry the error instead of energies
    assert!(rows.iter().any(|r| r[1].parse::<f64>().unwrap() == 1.0 && r[9].contains("quantization")));

    let out = run(&["sweep", "--family", "hyperbolic", "--g-range", "9:9:1", "--j", "3/2", "--quantity", "verify"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = csv_rows(&out);
    let single = json(&["verify", "--family", "hyperbolic", "--j", "3/2", "--g", "9"]);
    let max_rel = single["payload"]["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["rel_delta"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(rows[0][7], "true");
    assert_eq!(rows[0][8].parse::<f64>().unwrap(), max_rel);
}

#[test]
fn sweep_json_format() {
    let v = json(&["sweep", "--family", "rosen-morse", "--j-range", "3:5:3", "--g", "1", "--quantity", "classify", "--format", "json"]);
    assert_eq!(v["command"], "sweep");
    let rows = v["payload"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["status"] == "ok"));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

        #[test]
        fn emitted_floats_parse_back_exactly(g in 0.3f64..60.0, k in 0i64..4) {
            let twice = 2 * k + 1;
            let j = format!("{twice}/2");
            prop_assume!(((twice as f64) / 2.0).powi(2) < g);
            let gs = format!("{g:?}");
            let v = json(&["spectrum", "--family", "hyperbolic", "--j", &j, "--g", &gs]);
            let p = ModelParams::parse(Family::HyperbolicKepler, &j, g).unwrap();
            let want = representation::spectrum(&p, None, SpectrumMode::Strict).unwrap();
            prop_assert_eq!(energies(&v), want.energies());
            prop_assert_eq!(v["params"]["g"].as_f64().unwrap(), g);
        }
    }
}
