use std::path::Path;
use std::process::{Command, Output};

fn caldef(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caldef"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run caldef")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn certify_passes_for_g2() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["certify", "--model", "g2", "--trials", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("verdict model=g2 pass=true"));
    assert!(out.contains("cohomology model=g2 j=2 modes=49 formula=49 agrees=true"));
}

#[test]
fn certify_fails_for_the_degenerate_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["certify", "--model", "degenerate-symplectic", "--trials", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("pass=false"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(caldef(&["certify"], dir.path()).status.code(), Some(1));
    assert_eq!(caldef(&["certify", "--model", "e8"], dir.path()).status.code(), Some(1));
    assert_eq!(caldef(&["certify", "--model", "g2", "--trials", "0"], dir.path()).status.code(), Some(1));
    assert_eq!(caldef(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(caldef(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"g2\"\ntrails = 10\n").unwrap();
    let o = caldef(&["certify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("trails"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"degenerate-symplectic\"\ntrials = 5\n").unwrap();
    let o = caldef(&["certify", "--config", cfg.to_str().unwrap(), "--model", "g2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn degenerate_deformation_is_obstructed_and_writes_the_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["deform", "--model", "degenerate-symplectic"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stdout(&o).contains("obstruction model=degenerate-symplectic order=2"));
    let class = std::fs::read_to_string(dir.path().join("obstruction-class.field")).unwrap();
    let field = caldef::torus::read_field(&class).unwrap();
    assert!(field.num_modes() > 0);
}

#[test]
fn class_file_goes_to_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["deform", "--model", "degenerate-symplectic", "--out", "reports"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("reports/obstruction-class.field").exists());
    assert!(dir.path().join("reports/deform.txt").exists());
}

#[test]
fn large_t_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["deform", "--model", "g2", "--orders", "5", "--t", "0.05,50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: t = 50 exceeds the radius estimate"));
    let out = stdout(&o);
    assert!(out.contains("eval t=0.05"));
    assert!(out.contains("warning t=50"));
    assert!(out.contains("majorant b="));
}

#[test]
fn explicit_modes_and_saved_config_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "model = \"symplectic\"\nparams = \"n=2\"\norders = 3\nout = \"first\"\n\n[a1]\nkind = \"modes\"\n\
         modes = [{ k = [1, 0, 0, 0], re = [0,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0], im = [0,0,0,0, 1,0,0,0, 0,0,0,0, 0,0,0,0] }]\n",
    )
    .unwrap();
    let first = caldef(&["deform", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    for f in ["deform.txt", "config.toml", "a1.field", "a3.field"] {
        assert!(dir.path().join("first").join(f).exists(), "{f}");
    }
    let saved = dir.path().join("first/config.toml");
    let second = caldef(&["deform", "--config", saved.to_str().unwrap(), "--out", "second"], dir.path());
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn a1_field_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["deform", "--model", "cy", "--orders", "2", "--out", "run"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let again = caldef(&["deform", "--model", "cy", "--orders", "2", "--a1", "run/a1.field"], dir.path());
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    let lines = |o: &Output| stdout(o).lines().filter(|l| l.starts_with("order=")).map(String::from).collect::<Vec<_>>();
    assert_eq!(lines(&o), lines(&again));
}

#[test]
fn dims_matches_the_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["dims"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("golden/dims.txt");
    assert_eq!(stdout(&o), golden);
}

#[test]
fn verify_identities_reports_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let o = caldef(&["verify-identities", "--trials", "10", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("identity name=commutator")).unwrap();
    assert!(line.contains("lhs_norm=") && line.contains("rhs_norm=") && line.contains("pass=true"));
    assert_eq!(out.lines().filter(|l| l.starts_with("identity name=")).count(), 5);
}
