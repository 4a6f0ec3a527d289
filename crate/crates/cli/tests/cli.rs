use std::path::Path;
use std::process::{Command, Output};

fn cvclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvclone")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn csv_rows(s: &str) -> Vec<Vec<f64>> {
    s.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').filter_map(|c| c.parse().ok()).collect())
        .collect()
}

fn summary_value(stderr: &str, key: &str) -> f64 {
    stderr
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {stderr}"))
        .parse()
        .unwrap()
}

fn sweep(out: &Path) -> Output {
    cvclone(&[
        "sweep",
        "--lambda-min",
        "1",
        "--lambda-max",
        "8",
        "--steps",
        "15",
        "--alpha",
        "1,0",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn sweep_approaches_minimum_uncertainty_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&sweep(&p1)), 0);
    assert_eq!(code(&sweep(&p2)), 0);
    let a = std::fs::read(&p1).unwrap();
    assert_eq!(a, std::fs::read(&p2).unwrap());

    let s = text(&a);
    assert_eq!(s.lines().next().unwrap(), cvclone_cli::SWEEP_COLUMNS);
    let rows = csv_rows(&s);
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r.len() == 9));
    let product = |r: &Vec<f64>| r[6];
    assert!((product(&rows[14]) - 0.25).abs() < 1e-3, "{}", product(&rows[14]));
    assert!(product(&rows[0]) > product(&rows[14]));
    // every number carries 12 significant digits
    let cell = s.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(cell, "1.00000000000e0");
}

#[test]
fn clone_fidelities_reach_two_thirds() {
    let o = cvclone(&["clone", "--lambda", "8", "--alpha", "0.7,-0.4", "--backend", "gaussian"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&text(&o.stdout));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!((r[4] - 2.0 / 3.0).abs() < 1e-3, "{r:?}");
        assert!((r[0] - 0.7).abs() < 1e-3 && (r[1] + 0.4).abs() < 1e-3);
    }
}

#[test]
fn fock_clone_reports_trace_distance() {
    let o = cvclone(&["clone", "--lambda", "6", "--alpha", "0.5,0", "--backend", "fock", "--truncation", "16"]);
    assert_eq!(code(&o), 0);
    let d = summary_value(&text(&o.stderr), "trace_distance");
    assert!(d < 1e-3, "{d}");
}

#[test]
fn unit_gain_at_the_twin_beam_point() {
    let l = format!("{}", (1.0f64 / 3.0).atanh());
    let o = cvclone(&["clone", "--lambda", &l, "--alpha", "0,0", "--backend", "gaussian"]);
    assert_eq!(code(&o), 0);
    assert!((summary_value(&text(&o.stderr), "G1") - 1.0).abs() < 1e-10);
}

#[test]
fn povm_grid_for_orthogonal_quadratures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("povm.csv");
    let o = cvclone(&[
        "povm",
        "--lambda",
        "3",
        "--phi",
        "0",
        "--theta",
        &format!("{}", std::f64::consts::FRAC_PI_2),
        "--grid",
        "61,5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let s = std::fs::read_to_string(&out).unwrap();
    let header: Vec<&str> = s.lines().take_while(|l| l.starts_with('#')).collect();
    let field = |name: &str| -> f64 {
        header
            .iter()
            .flat_map(|l| l.trim_start_matches('#').split_whitespace())
            .find_map(|kv| kv.strip_prefix(&format!("{name}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(field("E").abs() < 1e-15);
    let integral = field("integral");
    assert!((0.99..=1.01).contains(&integral), "{integral}");
    let rows = csv_rows(&s);
    assert_eq!(rows.len(), 61 * 61);
    assert!(rows.iter().all(|r| r[2] >= 0.0));
}

#[test]
fn povm_rejects_reversed_angles() {
    let o = cvclone(&["povm", "--lambda", "3", "--phi", "1.0", "--theta", "0.5", "--grid", "11,4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_passes_and_skips_at_low_truncation() {
    let o = cvclone(&["verify", "--truncation", "8"]);
    assert_eq!(code(&o), 0);
    let s = text(&o.stdout);
    assert_eq!(s.lines().filter(|l| l.starts_with("SKIP")).count(), 3);
    assert!(s.lines().all(|l| !l.starts_with("FAIL")));
    assert!(s.contains("PASS gains-consistency"));
    assert!(s.lines().filter(|l| !l.starts_with("SKIP")).all(|l| l.ends_with(" s]")));
}

#[test]
fn verify_full_run() {
    let o = cvclone(&["verify", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stdout));
    assert_eq!(text(&o.stdout).lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn corrupted_gains_fail_by_name() {
    let o = cvclone(&["verify", "--truncation", "8", "--corrupt-gains"]);
    assert_eq!(code(&o), 1);
    assert!(text(&o.stdout).contains("FAIL gains-consistency"));
    assert!(text(&o.stderr).contains("gains-consistency"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# clone settings\nlambda = 8\nalpha = 2,0\nbackend = gaussian\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = cvclone(&["--config", c, "clone"]);
    assert_eq!(code(&from_file), 0);
    assert!((summary_value(&text(&from_file.stderr), "lambda") - 8.0).abs() < 1e-12);
    assert!((csv_rows(&text(&from_file.stdout))[0][0] - 2.0).abs() < 1e-3);

    let flagged = cvclone(&["--config", c, "clone", "--lambda", "5"]);
    assert_eq!(code(&flagged), 0);
    assert!((summary_value(&text(&flagged.stderr), "lambda") - 5.0).abs() < 1e-12);
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "lambda=3\nwarp=9\n").unwrap();
    assert_eq!(code(&cvclone(&["--config", bad.to_str().unwrap(), "clone"])), 2);
    assert_eq!(code(&cvclone(&["clone", "--lambda", "13"])), 2);
    assert_eq!(code(&cvclone(&["clone", "--backend", "wigner"])), 2);
    assert_eq!(code(&cvclone(&["verify", "--truncation", "40"])), 2);
    assert_eq!(code(&cvclone(&["sweep", "--lambda-min", "1"])), 2);
    assert_eq!(code(&cvclone(&["frobnicate"])), 2);
}

#[test]
fn io_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(code(&sweep(&missing)), 3);
    let absent_cfg = dir.path().join("absent.cfg");
    assert_eq!(code(&cvclone(&["--config", absent_cfg.to_str().unwrap(), "verify"])), 3);
}

#[test]
fn help_documents_formats_and_exit_codes() {
    let o = cvclone(&["--help"]);
    assert_eq!(code(&o), 0);
    let s = text(&o.stdout);
    assert!(s.contains(cvclone_cli::SWEEP_COLUMNS));
    assert!(s.contains("3 I/O error"));
    assert!(!s.contains("corrupt"));
}

#[test]
fn povm_at_large_lambda_matches_husimi_moments() {
    let o = cvclone(&[
        "povm",
        "--lambda",
        "8",
        "--theta",
        &format!("{}", std::f64::consts::FRAC_PI_2),
        "--grid",
        "121,6",
        "--alpha",
        "0.5,0.3",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&text(&o.stdout));
    let total: f64 = rows.iter().map(|r| r[2]).sum();
    let moment = |f: &dyn Fn(&Vec<f64>) -> f64| rows.iter().map(|r| f(r) * r[2]).sum::<f64>() / total;
    let (mx, my) = (moment(&|r| r[0]), moment(&|r| r[1]));
    let (vx, vy) = (moment(&|r| (r[0] - mx).powi(2)), moment(&|r| (r[1] - my).powi(2)));
    // Q of |α⟩ has mean (Re α, Im α) and variance 1/2; outcomes are its negation
    let worst = [mx + 0.5, my + 0.3, vx - 0.5, vy - 0.5].into_iter().fold(0.0f64, |m, d| m.max(d.abs()));
    assert!(worst < 0.02, "{worst}");
}
