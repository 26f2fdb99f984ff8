use std::path::PathBuf;
use std::process::{Command, Output};

use reflekt_core::Scalar;
use serde_json::Value;

fn reflekt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reflekt"))
        .args(args)
        .env("REFLEKT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = reflekt(&a);
    let v = serde_json::from_slice(&out.stdout).expect("valid json");
    (v, out.status.code().unwrap())
}

fn without_timing(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("wall_time");
    }
    v
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("reflekt-{}-{name}", std::process::id()))
}

#[test]
fn report_schema() {
    let (v, code) = json(&["verify", "re"]);
    assert_eq!(code, 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["model"], "a1-affine");
    let c = &v["checks"][0];
    for key in ["name", "status", "inputs", "residual_nonzero_entries", "scale", "derived", "wall_time"] {
        assert!(c.get(key).is_some(), "missing {key}");
    }
    assert_eq!(c["status"], "pass");
    assert_eq!(c["residual_nonzero_entries"], 0);
    let k = &c["derived"]["K(z)"];
    let expected: Scalar = "(xi - z^2)/(xi*z^2 - 1)".parse().unwrap();
    assert_eq!(k[1][1], expected.to_string());
    assert_eq!(k[0][1], "0");
}

#[test]
fn empty_suite() {
    let (v, code) = json(&["verify"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"], Value::Array(vec![]));
}

#[test]
fn deterministic_modulo_timing() {
    let args = ["verify", "dual-re", "ybe", "--specialize", "xi=5/3"];
    let (a, _) = json(&args);
    let (b, _) = json(&args);
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn derived_scalars_round_trip() {
    let (v, _) = json(&["transfer", "--sites", "1", "--hamiltonian"]);
    let mut seen = 0;
    for c in v["checks"].as_array().unwrap() {
        for (_, g) in c["derived"].as_object().unwrap() {
            for row in g.as_array().unwrap() {
                for e in row.as_array().unwrap() {
                    let s = e.as_str().unwrap();
                    let x: Scalar = s.parse().unwrap();
                    assert_eq!(x.to_string(), s);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn exit_code_tracks_failures() {
    // The spectral-parameter convention makes the unit-scale crossing
    // statement fail; the report must say so and the exit code follow.
    let (v, code) = json(&["verify", "crossing"]);
    assert_eq!(code, 1);
    assert_eq!(v["checks"][0]["status"], "fail");
    assert!(v["checks"][0]["scale"].is_string());
    // A check that cannot run on the chosen model fails rather than aborts.
    let (v, code) = json(&["verify", "quasi-k"]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["error"].is_string());
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(reflekt(&["verify", "re", "--specialize", "nope=1"]).status.code(), Some(2));
    assert_eq!(reflekt(&["verify", "re", "--spin", "1/3"]).status.code(), Some(2));
    assert_eq!(reflekt(&["verify", "re", "--model", "e8"]).status.code(), Some(2));
}

#[test]
fn config_file_and_out_path() {
    let cfg = scratch("job.toml");
    let out = scratch("report.json");
    std::fs::write(
        &cfg,
        "[datum]\nkind = \"a1\"\n\n[modules]\nspin = \"1\"\n\n[run]\nformat = \"json\"\n",
    )
    .unwrap();
    let o = reflekt(&[
        "--config",
        cfg.to_str().unwrap(),
        "verify",
        "quasi-k",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["model"], "a1");
    assert_eq!(v["config"]["spin"], "1");
    assert_eq!(v["checks"][0]["derived"]["Upsilon"].as_array().unwrap().len(), 3);
    let _ = std::fs::remove_file(cfg);
    let _ = std::fs::remove_file(out);
}

#[test]
fn hamiltonian_with_transfer() {
    let (v, code) = json(&["transfer", "--sites", "2", "--aux-spin", "1/2", "--hamiltonian"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["transfer", "hamiltonian"]);
    let h = &v["checks"][1];
    assert_eq!(h["residual_nonzero_entries"], 0);
    assert_eq!(h["derived"]["H"].as_array().unwrap().len(), 4);
}

#[test]
fn finite_suites() {
    let (v, code) = json(&["--model", "a1", "finite", "trivial"]);
    assert_eq!(code, 0);
    let q: Scalar = "q + 1/q".parse().unwrap();
    assert_eq!(v["checks"][0]["derived"]["value on spin 1/2"][0][0], q.to_string());
    let (_, code) = json(&["--model", "a1", "finite", "kolb", "--spin", "1"]);
    assert_eq!(code, 0);
}

#[test]
fn text_report() {
    let o = reflekt(&["verify", "re", "coideal"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("PASS re")));
    assert!(s.lines().any(|l| l.starts_with("PASS coideal")));
}
