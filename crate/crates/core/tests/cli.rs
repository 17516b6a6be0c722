use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_timoshenko"));
    c.env_remove("TIMOSHENKO_PRECISION");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--out", "r", "damping=undamped", "L=1", "Nx=8", "T=2", "snapshots=0,1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("r");
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,t,E_paper,E_phys,dissipation_rate,identity_residual\n"));
    // h = 1/9, dt = 0.2/9, T = 2 -> 90 steps
    assert_eq!(trace.lines().count(), 92);
    let snaps: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().into_string().unwrap())
        .filter(|n| n.starts_with("snapshot_"))
        .collect();
    assert_eq!(snaps.len(), 2);
    let snap = std::fs::read_to_string(out.join("snapshot_000000.csv")).unwrap();
    assert_eq!(snap.lines().count(), 11);
    for f in ["plot_t.csv", "plot_logt.csv", "plot_loglogt.csv", "fit_report.txt", "config.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("beam.cfg"), "# undamped\ndamping=undamped\nL=1\nNx=4\nT=5\n").unwrap();
    let o = run_in(dir.path(), &["run", "--config", "beam.cfg", "--out", "a", "T=1"]);
    assert!(o.status.success());
    let cfg = std::fs::read_to_string(dir.path().join("a/config.txt")).unwrap();
    assert!(cfg.contains("T=1\n"));
    assert!(cfg.contains("damping=undamped\n"));
}

#[test]
fn precision_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--out", "p", "damping=undamped", "L=1", "Nx=4", "T=0.5"])
        .env("TIMOSHENKO_PRECISION", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let trace = std::fs::read_to_string(dir.path().join("p/trace.csv")).unwrap();
    assert!(trace.lines().nth(1).unwrap().starts_with("0,0.0000e0,"));

    let o = bin()
        .args(["run", "--out", "p"])
        .env("TIMOSHENKO_PRECISION", "40")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let usage = [
        vec!["run", "c=0.9"],
        vec!["run", "bogus=1"],
        vec!["run", "T=abc"],
        vec!["nosuch"],
        vec!["sweep", "--levels", "1"],
        vec!["run", "--preset", "fig9"],
        vec!["run", "--window-fraction", "1.5"],
    ];
    for args in usage {
        let o = run_in(dir.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run_in(dir.path(), &["run", "c=0.9"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`c`"));

    // unstable explicit run blows up
    let o = run_in(
        dir.path(),
        &["run", "--out", "x", "L=1", "Nx=20", "T=200", "c=1.5", "allow_unstable=true", "damping=undamped"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step"));

    assert_eq!(run_in(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn fit_subcommand_reads_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["preset", "fig4", "--out", "f4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("selected exponential"));
    let o = run_in(dir.path(), &["fit", "f4/trace.csv", "--out", "refit"]);
    assert!(o.status.success());
    let report = stdout(&o);
    assert!(report.contains("selected exponential"));
    assert_eq!(report.lines().filter(|l| l.contains("r2=")).count(), 3);
    assert!(dir.path().join("refit/fit_report.txt").exists());

    std::fs::write(dir.path().join("bad.csv"), "nope\n").unwrap();
    assert_eq!(run_in(dir.path(), &["fit", "bad.csv"]).status.code(), Some(1));
    let short = "step,t,E_paper,E_phys,dissipation_rate,identity_residual\n0,0e0,1e0,1e0,NaN,NaN\n";
    std::fs::write(dir.path().join("short.csv"), short).unwrap();
    assert_eq!(run_in(dir.path(), &["fit", "short.csv"]).status.code(), Some(2));
}

#[test]
fn sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["sweep", "--levels", "3", "--out", "s", "damping=undamped", "L=1", "Nx=10", "T=2", "N=1"],
    );
    assert!(o.status.success());
    let table = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 4);
    let order: f64 = rows[3].split(',').nth(6).unwrap().parse().unwrap();
    assert!(order >= 1.9, "{order}");
}

#[test]
fn preset_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["preset"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 8);
}
