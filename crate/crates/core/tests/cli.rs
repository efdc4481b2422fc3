use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv = vec![
        "difq".to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = difq::cli::run(argv, &mut so, &mut se);
    (
        code,
        String::from_utf8(so).unwrap(),
        String::from_utf8(se).unwrap(),
    )
}

fn report(out: &Path) -> Value {
    serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn difq_of_a_polynomial_is_exact() {
    let d = tempfile::tempdir().unwrap();
    let (code, so, _) = run(
        d.path(),
        &[
            "difq", "--expr", "x1^2", "--at", "1", "--dir", "1", "--t", "1/2",
        ],
    );
    assert_eq!(code, 0);
    // ((1 + 1/2)² − 1)/(1/2) = 5/2
    assert_eq!(so.lines().next(), Some("2.5"));
    let r = report(d.path());
    assert_eq!(r["results"]["exact"][0], "5/2");
    assert_eq!(r["schema"], 1);
    assert_eq!(r["passed"], true);
}

#[test]
fn difq_at_zero_step_uses_the_variation() {
    let d = tempfile::tempdir().unwrap();
    let (code, so, _) = run(
        d.path(),
        &[
            "difq", "--expr", "exp(x1)", "--at", "0", "--dir", "2", "--t", "0",
        ],
    );
    assert_eq!(code, 0);
    let v: f64 = so.lines().next().unwrap().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-9);
}

#[test]
fn var_reports_exact_and_numeric_values() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        d.path(),
        &["var", "--expr", "x1*x2", "--at", "2,3", "--dir", "1,1"],
    );
    assert_eq!(code, 0);
    let r = report(d.path());
    assert_eq!(r["results"]["exact"][0], "5/1");
    let v = r["results"]["value"][0].as_f64().unwrap();
    assert!((v - 5.0).abs() < 1e-9);
}

#[test]
fn second_variation_from_repeated_dirs() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        d.path(),
        &[
            "var", "--expr", "x1^3", "--at", "1", "--dir", "1", "--dir", "1",
        ],
    );
    assert_eq!(code, 0);
    let v = report(d.path())["results"]["value"][0].as_f64().unwrap();
    assert!((v - 6.0).abs() < 1e-6, "{v}");
}

#[test]
fn integrate_writes_a_convergence_table() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        d.path(),
        &["integrate", "--expr", "x1^2", "--a", "0", "--b", "3"],
    );
    assert_eq!(code, 0);
    let v = report(d.path())["results"]["value"][0].as_f64().unwrap();
    assert!((v - 9.0).abs() < 1e-8);
    let csv = fs::read_to_string(d.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("cells,sum_1,diff\n"));
}

#[test]
fn verify_suites_pass() {
    for (suite, ring) in [
        ("axioms", "F7"),
        ("rings", "Q"),
        ("division", "Q"),
        ("integrals", "Q"),
    ] {
        let d = tempfile::tempdir().unwrap();
        let (code, so, se) = run(
            d.path(),
            &["verify", suite, "--ring", ring, "--trials", "10"],
        );
        assert_eq!(code, 0, "{suite}: {so}{se}");
        assert_eq!(report(d.path())["passed"], true);
    }
    let d = tempfile::tempdir().unwrap();
    run(
        d.path(),
        &["verify", "axioms", "--ring", "Q", "--trials", "5"],
    );
    let posts = &report(d.path())["results"]["postulates"];
    assert!(posts.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn demos_write_their_data_files() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["demo", "sharp", "--n", "400"]).0, 0);
    for f in [
        "u0.dat",
        "u1.dat",
        "h_u1.dat",
        "summary.json",
        "report.json",
    ] {
        assert!(d.path().join(f).exists(), "{f}");
    }
    let summary: Value =
        serde_json::from_slice(&fs::read(d.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);

    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["demo", "shift"]).0, 0);
    let csv = fs::read_to_string(d.path().join("shift_convergence.csv")).unwrap();
    assert!(csv.starts_with("n,sup_error\n"));
    assert_eq!(csv.lines().count(), 5);

    let d = tempfile::tempdir().unwrap();
    let (code, so, _) = run(d.path(), &["demo", "fixed-point"]);
    assert_eq!(code, 0);
    assert!(so.contains("x(1) = 1.4987"), "{so}");
    assert!(d.path().join("x.dat").exists());
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, se) = run(
        d.path(),
        &[
            "difq", "--expr", "x1/", "--at", "1", "--dir", "1", "--t", "1",
        ],
    );
    assert_eq!(code, 2);
    assert!(se.contains("position 4"), "{se}");
    assert_eq!(
        run(
            d.path(),
            &["difq", "--expr", "x1", "--at", "1,2", "--dir", "1", "--t", "1"]
        )
        .0,
        2
    );
    assert_eq!(run(d.path(), &["verify", "axioms", "--ring", "f64"]).0, 2);
    assert_eq!(run(d.path(), &["verify", "nothing"]).0, 2);
    assert_eq!(run(d.path(), &["demo", "sharp", "--eta0", "0.1"]).0, 2);
    assert_eq!(run(d.path(), &["--seed", "abc", "verify", "rings"]).0, 2);
}

#[test]
fn non_convergence_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, se) = run(
        d.path(),
        &["integrate", "--expr", "exp(x1)", "--tol", "1e-300"],
    );
    assert_eq!(code, 3, "{se}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# integral of x^2\nexpr = x1^2\nb = 2\ntrials = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (code, _, _) = run(d.path(), &["--config", c, "integrate", "--b", "3"]);
    assert_eq!(code, 0);
    let v = report(d.path())["results"]["value"][0].as_f64().unwrap();
    assert!((v - 9.0).abs() < 1e-8);

    fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(d.path(), &["--config", c, "verify", "rings"]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_difq");
    let st = Command::new(bin)
        .args([
            "--out",
            d.path().to_str().unwrap(),
            "verify",
            "rings",
            "--trials",
            "5",
        ])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let st = Command::new(bin).arg("frobnicate").status().unwrap();
    assert_eq!(st.code(), Some(2));
    let o = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify"));
}
