use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BREACH: &str = "\
# squeezed-readout measurement at the contraction time
[system]
tau = contraction

[model]
kind = contractive
xi = 1.4142135623730951

[run]
trials = 500
seed = 3
";

fn qmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeas")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn field(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    report.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap().parse().unwrap()
}

#[test]
fn repeat_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "breach.cfg", BREACH);
    let log_a = dir.path().join("a.csv");
    let log_b = dir.path().join("b.csv");
    let a = qmeas(&["repeat", "--config", &cfg, "--trial-log", log_a.to_str().unwrap()]);
    let b = qmeas(&["repeat", "--config", &cfg, "--trial-log", log_b.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let log = fs::read(&log_a).unwrap();
    assert_eq!(log, fs::read(&log_b).unwrap());
    let log = String::from_utf8(log).unwrap();
    assert_eq!(log.lines().next().unwrap(), "trial,first_readout,prediction,second_readout,squared_error");
    assert_eq!(log.lines().count(), 501);

    let other = qmeas(&["repeat", "--config", &cfg, "--seed", "4"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn repeat_analytic_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "breach.cfg", BREACH);
    let out = qmeas(&["repeat", "--config", &cfg, "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert!(report.contains("model = contractive"));
    assert!(report.contains("monte_carlo_trials = 0"));
    assert!((field(&report, "predictive_variance") - 1.0 / 6.0).abs() < 1e-10);
    assert!((field(&report, "sql_ratio") - 1.0 / (4.0 * 2f64.sqrt())).abs() < 1e-10);
    assert!(field(&report, "prior_independence_residual").abs() < 1e-9);
}

#[test]
fn report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "breach.cfg", BREACH);
    let path = dir.path().join("report.txt");
    let out = qmeas(&["repeat", "--config", &cfg, "--trials", "0", "--report", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(path).unwrap().starts_with("model = contractive\n"));
}

#[test]
fn malformed_config_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "[system]\ntau = 1\n[model]\nkind = contractive\nxi = oops\n");
    let out = qmeas(&["repeat", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn too_few_trials_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "breach.cfg", BREACH);
    let out = qmeas(&["repeat", "--config", &cfg, "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[system]\ntau = 1\n[model]\nkind = von_neumann\ndelta_q = 0.5\n[prior]\nx0 = 19\n\
                [grid]\nx_min = -20\nx_max = 20\nn = 1024\n";
    let cfg = write(dir.path(), "edge.cfg", text);
    let out = qmeas(&["repeat", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_at_contraction_time() {
    let out = qmeas(&["sweep", "--xi", "0.5,1,2,5,25", "--at-contraction-time"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "xi,tau,predictive_variance,sql_bound,sql_ratio");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r[4] - 1.0 / (4.0 * r[0])).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn sweep_over_fixed_times() {
    let out = qmeas(&["sweep", "--xi", "1,2", "--tau", "0.25,0.5,1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 7);
    let out = qmeas(&["sweep", "--xi", "-1", "--at-contraction-time"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qmeas(&["sweep", "--xi", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tcs_moments_and_curve() {
    let out = qmeas(&["tcs", "--mu-re", "1.4142135623730951", "--nu-im", "1"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let get = |k: &str| -> f64 {
        csv.lines().find_map(|l| l.strip_prefix(&format!("{k},"))).unwrap().parse().unwrap()
    };
    assert!((get("var_x") - 1.5).abs() < 1e-10);
    assert!((get("contraction_time") - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-10);

    let out = qmeas(&["tcs", "--xi", "1", "--curve", "2", "--points", "5"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 1e-9 * v[1]);
    }

    let out = qmeas(&["tcs", "--mu-re", "1", "--nu-re", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dilate_demo_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // two-outcome unsharp qubit measurement
    let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
    let text = format!(
        "# unsharp sigma_z\noutcome up\nmatrix 2 2\n{a},0 0,0\n0,0 {b},0\noutcome down\nmatrix 2 2\n{b},0 0,0\n0,0 {a},0\n"
    );
    let input = write(dir.path(), "m.txt", &text);
    let out = qmeas(&["dilate-demo", "--input", &input]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("object_dim 2\n"));
    assert!(text.contains("projector up") && text.contains("projector down"));
    let value = |k: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(&format!("{k} "))).unwrap().parse().unwrap()
    };
    assert!(value("round_trip_residual") < 1e-10);
    assert!(value("unitarity_defect") < 1e-10);

    let bad = write(dir.path(), "bad.txt", "outcome up\nmatrix 2 2\n1,0 0,0\n");
    let out = qmeas(&["dilate-demo", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));

    let incomplete = write(dir.path(), "incomplete.txt", "outcome up\nmatrix 1 1\n0.5,0\n");
    let out = qmeas(&["dilate-demo", "--input", &incomplete]);
    assert_eq!(out.status.code(), Some(2));
}
