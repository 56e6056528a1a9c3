use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn csd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csd"))
        .args(args)
        .output()
        .expect("csd runs")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(format!("{name}.cfg")).display().to_string()
}

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("test.cfg");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn list_scenarios_names_every_scenario() {
    let out = csd(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["run", "convergence", "charge", "scaling", "delgado", "global_bound", "picard", "probe_bilinear"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn transport_run_writes_diagnostics_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("t");
    let out = csd(&["run", "--config", &cfg("transport"), "--out", out_dir.to_str().unwrap(), "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diag = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(
        lines.next(),
        Some("t,charge,constraint_residual,source_l2,sup_uN_plus,sup_uN_minus,A_plus_Hr,A_minus_Hr")
    );
    // Step 0 has no centered constraint residual and no Delgado columns.
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 8);
    assert_eq!(first[2], "");
    assert_eq!(first[4], "");
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.starts_with("transport_error\t"));
    assert!(summary.trim_end().ends_with("PASS"));
}

#[test]
fn unknown_key_fails_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let path = write_cfg(dir.path(), "scenario=run\ngrid.N=64\ngrid.spacing=0.5\n");
    let out = csd(&["run", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("grid.spacing"), "{err}");
    assert!(!out_dir.exists());
}

#[test]
fn failed_assertion_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_cfg(
        dir.path(),
        "scenario=y_embed\ngrid.L=4\ngrid.N=32\nembed.samples=4\ntol.embed=-0.99\n",
    );
    let out_dir = dir.path().join("o");
    let out = csd(&["run", "--config", &path, "--out", out_dir.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("FAIL"));
}

#[test]
fn solver_errors_are_distinct_from_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_cfg(dir.path(), "scenario=run\ngrid.L=4\ngrid.N=64\nrun.T=0.3\n");
    let out = csd(&["run", "--config", &path, "--out", dir.path().join("o").to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("solver"));
}

#[test]
fn probe_subcommand_checks_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o");
    let out = csd(&["probe", "bilinear", "--config", &cfg("probe_dilation"), "--out", o.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = csd(&["probe", "nonsense", "--config", &cfg("probe_dilation")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let o = dir.path().join(sub);
        let out = Command::new(env!("CARGO_BIN_EXE_csd"))
            .args(["probe", "product", "--config", &cfg("probe_product"), "--seed", "17", "--quiet"])
            .args(["--out", o.to_str().unwrap()])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.code().is_some());
        std::fs::read(o.join("probe.csv")).unwrap()
    };
    let one = run("1", "a");
    let four = run("4", "b");
    assert_eq!(one, four);
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("# schema=1\nprobe,mode,exponents,quantity,N,ensemble,q50,q90,max,seed,estimate\n"));
    assert!(text.contains(",17,"));
}
