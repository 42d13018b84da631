use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rpm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn rpm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_writes_solution_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("A.csv"), "1\n1\n2\n").unwrap();
    fs::write(p.join("b.csv"), "1\n0.5\n2\n").unwrap();
    fs::write(p.join("phi.csv"), "1\n").unwrap();
    let o = rpm(
        &[
            "solve", "--matrix", "A.csv", "--b", "b.csv", "--phi", "phi.csv", "--lambda",
            "2.3333333333333335", "--out-x", "x.csv", "--out-e", "e.csv", "--lp-dump", "lp.txt",
        ],
        p,
    );
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("status=optimal objective=0.5"));
    assert_eq!(fs::read_to_string(p.join("x.csv")).unwrap(), "0.5\n");
    assert_eq!(fs::read_to_string(p.join("e.csv")).unwrap().lines().count(), 3);
    let dump = rpm_core::lp::parse_lp_dump(&fs::read_to_string(p.join("lp.txt")).unwrap()).unwrap();
    assert_eq!((dump.num_vars(), dump.num_constraints()), (4, 6));
}

#[test]
fn solve_rejects_mismatched_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("A.csv"), "1,2\n3,4\n").unwrap();
    fs::write(p.join("b.csv"), "1\n").unwrap();
    fs::write(p.join("phi.csv"), "1,0\n").unwrap();
    let o = rpm(&["solve", "--matrix", "A.csv", "--b", "b.csv", "--phi", "phi.csv"], p);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_prints_one_schema_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = rpm(&["simulate", "--n", "8", "--m", "160", "--seed", "4"], dir.path());
    assert!(o.status.success());
    let rows = rpm_core::trial::parse_trial_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].success);
    assert_eq!(rows[0].runtime_ms, None);

    let o = rpm(&["simulate", "--n", "8", "--m", "160", "--timings"], dir.path());
    let rows = rpm_core::trial::parse_trial_csv(&stdout(&o)).unwrap();
    assert!(rows[0].runtime_ms.is_some());
}

#[test]
fn sweep_from_config_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("grid.cfg"),
        "# small grid\nn = 5\nratios = 4, 10\ndeltas = 0, 0.2\ntrials = 2\nseed = 42\n",
    )
    .unwrap();
    for out in ["a.csv", "b.csv"] {
        let o = rpm(&["sweep", "--config", "grid.cfg", "--out", out, "--plot", "map.svg"], p);
        assert!(o.status.success(), "{o:?}");
    }
    let a = fs::read(p.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(p.join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 8);
    let summary = fs::read_to_string(p.join("a_summary.csv")).unwrap();
    assert_eq!(rpm_core::sweep::parse_summary_csv(&summary).unwrap().len(), 4);
    let svg = fs::read_to_string(p.join("map.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="cell""#).count(), 4);

    // flags override the file; thread cap is honored
    let o = Command::new(env!("CARGO_BIN_EXE_rpm"))
        .args(["sweep", "--config", "grid.cfg", "--trials", "1", "--deltas", "0", "--out", "c.csv"])
        .env("RPM_THREADS", "1")
        .current_dir(p)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(p.join("c.csv")).unwrap().lines().count(), 1 + 2);
}

#[test]
fn configuration_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("bad.cfg"), "n = 5\nwhat = 1\n").unwrap();
    let o = rpm(&["sweep", "--config", "bad.cfg", "--out", "x.csv"], p);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = rpm(&["sweep", "--deltas", "1.0", "--out", "x.csv"], p);
    assert_eq!(o.status.code(), Some(2));
    let o = rpm(&["simulate", "--anchor-err", "0.5"], p);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_rpm"))
        .args(["simulate"])
        .env("RPM_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn heatmap_names_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("s.csv"), "ratio,delta,success_rate\n4,0,1\n").unwrap();
    let o = rpm(&["heatmap", "--summary", "s.csv", "--x-axis", "ratio", "--y-axis", "kappa", "--out", "h.svg"], p);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa"));
    let o = rpm(&["heatmap", "--summary", "s.csv", "--out", "h.svg"], p);
    assert!(o.status.success());
    assert!(p.join("h.svg").exists());
}

#[test]
fn verify_lemmas_csv_report_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // at m = 2000 the covariance bound cannot hold, so the run must fail
    let o = rpm(&["verify-lemmas", "--report", "csv", "--m", "2000", "--samples", "20000"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("check,observed,relation,target,tolerance,passed"));
    assert_eq!(lines.count(), 10);
    assert!(out.contains(",false"));
}
