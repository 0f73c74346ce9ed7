//! End-to-end tests driving the compiled binary: happy paths, output
//! stability, and the exit-code taxonomy (0 ok, 1 input problems, 2
//! domain rejections).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epitoy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit={:?} stderr={}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const S_FIDUCIAL: &str = r#"{"p": 2, "Q": [[0.1, 0.9], [0.1, 0.9], [0.8, 0.2]]}"#;
const S_WEIGHTS: &str = r#"{"p": 2, "mode": "standard", "P": [0.0, 0.1, 0.1, 0.8]}"#;
const SCENARIO: &str = r#"{
  "S": {"p": 2, "Q": [[0.1, 0.9], [0.1, 0.9], [0.8, 0.2]]},
  "Sprime": {"p": 2, "Q": [[0.1, 0.9], [0.8, 0.2], [0.1, 0.9]]}
}"#;
/// The order at which the example state is pure (solved offline to full
/// precision; the solve-r test below re-derives it).
const R_STAR: &str = "-0.1473960612626175";

#[test]
fn measure_reads_both_state_forms() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let p = write(dir.path(), "sw.json", S_WEIGHTS);
    for path in [&q, &p] {
        let out = run(&["measure", "--input", path, "--r", "1"]);
        let v = stdout_json(&out);
        assert!((v["measure"].as_f64().unwrap() - 0.66).abs() <= 1e-12);
        assert_eq!(v["p"], 2);
    }
}

#[test]
fn solve_r_finds_the_pure_order() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let out = run(&["solve-r", "--input", &q, "--target", "0.5"]);
    let r = stdout_json(&out)["r"].as_f64().unwrap();
    assert!(r > -0.149 && r < -0.145, "r={r}");
}

#[test]
fn purity_confirms_at_the_solved_order() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let out = run(&["purity", "--input", &q, "--r", R_STAR, "--tol", "1e-9"]);
    let v = stdout_json(&out);
    assert_eq!(v["pure"], true);
    assert_eq!(v["level"], 0.5);
    let out = run(&["purity", "--input", &q, "--r", "1"]);
    assert_eq!(stdout_json(&out)["pure"], false);
}

#[test]
fn convert_roundtrips_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let p_path = dir.path().join("p.json");
    let out = run(&["convert", "--input", &q, "--out", p_path.to_str().unwrap()]);
    assert!(out.status.success());
    let p_file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p_path).unwrap()).unwrap();
    assert_eq!(p_file["mode"], "extended");
    let w = p_file["P"].as_array().unwrap();
    let expect = [0.0, 0.1, 0.1, 0.8];
    for (x, e) in w.iter().zip(expect) {
        assert!((x.as_f64().unwrap() - e).abs() <= 1e-12);
    }
    // Back to fiducial form.
    let out = run(&["convert", "--input", p_path.to_str().unwrap()]);
    let v = stdout_json(&out);
    let rows = v["Q"].as_array().unwrap();
    let expect_rows = [[0.1, 0.9], [0.1, 0.9], [0.8, 0.2]];
    for (row, er) in rows.iter().zip(expect_rows) {
        for (x, e) in row.as_array().unwrap().iter().zip(er) {
            assert!((x.as_f64().unwrap() - e).abs() <= 1e-12);
        }
    }
    // Identical invocations produce identical bytes.
    let a = run(&["convert", "--input", &q]);
    let b = run(&["convert", "--input", &q]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn complement_flips_into_a_negative_weight_state() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let c_path = dir.path().join("comp.json");
    let out = run(&["complement", "--input", &q, "--out", c_path.to_str().unwrap()]);
    assert!(out.status.success());
    let out = run(&["witness", "--input", c_path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["classical"], false);
    let cells = v["negative_cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0]["x_a"], 1);
    assert_eq!(cells[0]["x_b"], 1);
    assert!((cells[0]["weight"].as_f64().unwrap() + 0.3).abs() <= 1e-12);
    // The original state is classical.
    let out = run(&["witness", "--input", &q]);
    assert_eq!(stdout_json(&out)["classical"], true);
}

#[test]
fn bell_reports_exact_correlators_and_no_signaling() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "scenario.json", SCENARIO);
    let out = run(&["bell", "--scenario", &sc, "--r", R_STAR, "--tables"]);
    let v = stdout_json(&out);
    let c = &v["correlators"];
    assert!((c["a_s"].as_f64().unwrap() - 0.8).abs() <= 1e-12);
    assert!((c["b_s"].as_f64().unwrap() - 0.8).abs() <= 1e-12);
    assert!((c["a_sprime"].as_f64().unwrap() - 0.8).abs() <= 1e-12);
    assert!((c["b_sprime"].as_f64().unwrap() + 0.6).abs() <= 1e-12);
    assert!((v["chsh"].as_f64().unwrap() - 3.0).abs() <= 1e-12);
    assert_eq!(v["no_signaling"], true);
    // Tables are present, nonnegative, and normalized.
    for key in ["a_s", "b_s", "a_sprime", "b_sprime"] {
        let t = v["tables"][key].as_array().unwrap();
        let mut total = 0.0;
        for row in t {
            for x in row.as_array().unwrap() {
                let x = x.as_f64().unwrap();
                assert!(x >= -1e-12);
                total += x;
            }
        }
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn bell_sampling_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "scenario.json", SCENARIO);
    let args = ["bell", "--scenario", &sc, "--r", R_STAR, "--sample", "2000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&[
        "bell", "--scenario", &sc, "--r", R_STAR, "--sample", "2000", "--seed", "8",
    ]);
    let va = stdout_json(&a);
    let vo = stdout_json(&other);
    assert_ne!(va["sample"]["correlators"], vo["sample"]["correlators"]);
    // The finite sample tracks the exact value.
    let exact = va["chsh"].as_f64().unwrap();
    let sampled = va["sample"]["b_value"].as_f64().unwrap();
    assert!((exact - sampled).abs() < 0.2);
}

#[test]
fn sweep_csv_has_the_documented_header_and_values() {
    let out = run(&["sweep", "--r-grid", "1", "--mode", "extended", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,b_max,mode,q0_S,q1_S,q2_S,q0_Sp,q1_Sp,q2_Sp"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "1");
    assert_eq!(fields[2], "extended");
    let b: f64 = fields[1].parse().unwrap();
    assert!((b - 2.0 * std::f64::consts::SQRT_2).abs() <= 1e-6, "b={b}");
}

#[test]
fn sweep_json_carries_both_state_forms() {
    let out = run(&["sweep", "--r-grid", "1", "--mode", "nonneg"]);
    let v = stdout_json(&out);
    let pt = &v.as_array().unwrap()[0];
    assert!((pt["b_max"].as_f64().unwrap() - 8.0 / 3.0).abs() <= 1e-6);
    assert_eq!(pt["mode"], "nonneg");
    assert_eq!(pt["argmax_s"]["Q"].as_array().unwrap().len(), 3);
    assert_eq!(pt["argmax_s"]["P"].as_array().unwrap().len(), 4);
}

#[test]
fn validate_joint_accepts_the_correlated_pair() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write(
        dir.path(),
        "pair.json",
        r#"{"p": 2, "n": 2,
            "P": [0.25,0,0,0, 0,0.25,0,0, 0,0,0.25,0, 0,0,0,0.25]}"#,
    );
    let out = run(&["validate-joint", "--input", &pair, "--r", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn validate_joint_reports_violations_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    // Uniform over pairs sharing x_a with the second x_b pinned to 0:
    // conditioning system 0 tells us too much about system 1.
    let over = write(
        dir.path(),
        "over.json",
        r#"{"p": 2, "n": 2,
            "P": [0.25,0,0,0, 0.25,0,0,0, 0,0,0.25,0, 0,0,0.25,0]}"#,
    );
    let out = run(&["validate-joint", "--input", &over, "--r", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    let violations = v["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert!(
        violations.iter().any(|s| s.as_str().unwrap().contains("after observable")),
        "{violations:?}"
    );
}

#[test]
fn render_matches_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "sw.json", S_WEIGHTS);
    let out = run(&["render", "--input", &p]);
    let text = String::from_utf8(out.stdout).unwrap();
    let expect = "\
p = 2, mode = standard
x_b=1 | + +
x_b=0 | . +
      +----
        0 1  x_a
legend: '#' 1, 'o' 1/p, '+' other positive, '.' zero, '*' negative
";
    assert_eq!(text, expect);
}

#[test]
fn observables_lists_the_family() {
    let out = run(&["observables", "--prime", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let expect = "index,coeff_a,coeff_b\n0,1,0\n1,0,1\n2,1,1\n3,2,1\n";
    assert_eq!(text, expect);
    let out = run(&["observables", "--prime", "5"]);
    let v = stdout_json(&out);
    assert_eq!(v["observables"].as_array().unwrap().len(), 6);
}

#[test]
fn missing_file_exits_one_with_io_error() {
    let out = run(&["measure", "--input", "/nonexistent/state.json", "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");
}

#[test]
fn malformed_json_exits_one_with_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", "{not json");
    let out = run(&["measure", "--input", &path, "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "parse");
}

#[test]
fn state_with_both_forms_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "both.json",
        r#"{"p": 2, "P": [0.25,0.25,0.25,0.25], "Q": [[0.5,0.5],[0.5,0.5],[0.5,0.5]]}"#,
    );
    let out = run(&["measure", "--input", &path, "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "input");
}

#[test]
fn domain_rejections_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Negative weight in standard mode.
    let neg = write(
        dir.path(),
        "neg.json",
        r#"{"p": 2, "mode": "standard", "P": [-0.1, 0.3, 0.4, 0.4]}"#,
    );
    let out = run(&["measure", "--input", &neg, "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "domain");

    // Order at the boundary of the admissible range.
    let q = write(dir.path(), "s.json", S_FIDUCIAL);
    let out = run(&["measure", "--input", &q, "--r", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    // Ill-posed order solve: the maximally mixed state has constant measure.
    let mm = write(
        dir.path(),
        "mm.json",
        r#"{"p": 2, "P": [0.25, 0.25, 0.25, 0.25]}"#,
    );
    let out = run(&["solve-r", "--input", &mm, "--target", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_json(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("constant"), "{msg}");

    // Extended-mode search at a non-odd order.
    let out = run(&["sweep", "--r-grid", "2", "--mode", "extended"]);
    assert_eq!(out.status.code(), Some(2));

    // A non-prime field order.
    let out = run(&["observables", "--prime", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["measure", "--input"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-verb"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
