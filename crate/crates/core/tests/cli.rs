use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn symmis(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symmis"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("symmis runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout {}\nstderr {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const WORKED_DISTANCES: &str = "v1-1,v2-1,v2-3,v3-1,v3-5
0,4,4,4,4
4,0,1,2,2
4,1,0,2,2
4,2,2,0,1
4,2,2,1,0
";

const WORKED_LABELS: &str = "name,subject,day,label
v1-1,v1,1,Control
v2-1,v2,1,PreTx
v2-3,v2,3,PreTx
v3-1,v3,1,PreTx
v3-5,v3,5,PreTx
";

#[test]
fn evaluate_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.csv"), WORKED_DISTANCES).unwrap();
    fs::write(dir.path().join("l.csv"), WORKED_LABELS).unwrap();
    ok(&symmis(
        &["evaluate", "d.csv", "--labels", "l.csv", "--n", "1", "--trials", "0", "--out", "ev"],
        dir.path(),
    ));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("ev/report.json")).unwrap()).unwrap();
    assert_eq!(report["total_class_conc"], 0.8);
    assert_eq!(report["total_subj_conc"].as_f64().unwrap(), 2.0 / 3.0);

    // Two clusters split off the lone control day.
    ok(&symmis(&["evaluate", "d.csv", "--labels", "l.csv", "--n", "2", "--trials", "50", "--out", "ev2"], dir.path()));
    let assignment = fs::read_to_string(dir.path().join("ev2/assignment.csv")).unwrap();
    assert_eq!(
        assignment,
        "subject,day,label,cluster\nv1,1,Control,0\nv2,1,PreTx,1\nv2,3,PreTx,1\nv3,1,PreTx,1\nv3,5,PreTx,1\n"
    );
}

#[test]
fn stages_chain_and_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&symmis(&["synth", "--subjects", "3", "--days", "2", "--day-seconds", "12", "--csv", "--seed", "4", "--out", "c"], d));
    ok(&symmis(
        &["segment", "--input", "c/C01_d0.csv", "--sample-rate", "8000", "--subject", "C01", "--label", "Control", "--out", "one", "--csv"],
        d,
    ));
    assert!(d.join("one/C01_d0.seg").is_file());
    assert!(d.join("one/C01_d0.csv").is_file());
    ok(&symmis(&["symbolize", "one/C01_d0.seg", "--out", "one"], d));

    ok(&symmis(&["segment", "--manifest", "c/manifest.toml", "--out", "segs", "--no-cache"], d));
    ok(&symmis(&["symbolize", "segs", "--out", "sym"], d));
    ok(&symmis(&["mismatch", "sym/symbols.txt", "--out", "mm"], d));
    ok(&symmis(&["sweep", "mm/mismatch.csv", "--from", "2", "--to", "10", "--trials", "20", "--out", "sw"], d));
    let sweep = fs::read_to_string(d.join("sw/sweep.csv")).unwrap();
    // One comparison (PreTx/Con), so one line per n.
    assert_eq!(sweep.lines().count() - 1, 9);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("sw/sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn run_is_cached_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.toml"), "seed = 9\n[evaluation]\nn = 3\ntrials = 100\nsweep = [2, 4]\n").unwrap();
    ok(&symmis(&["synth", "--preset", "treatment", "--subjects", "2", "--days", "3", "--day-seconds", "12", "--seed", "9", "--out", "c"], d));
    let common = ["run", "--config", "cfg.toml", "--manifest", "c/manifest.toml"];
    ok(&symmis(&[&common[..], &["--out", "a", "--workers", "2"]].concat(), d));
    let rerun = symmis(&[&common[..], &["--out", "a", "--workers", "3", "-v"]].concat(), d);
    ok(&rerun);
    let log = String::from_utf8_lossy(&rerun.stderr);
    assert!(log.contains("cache hit"), "{log}");
    ok(&symmis(&[&common[..], &["--out", "b", "--no-cache", "--workers", "1"]].concat(), d));
    for name in [
        "report.json",
        "run_manifest.json",
        "symbols.txt",
        "mismatch.csv",
        "mismatch_dbspl.csv",
        "concentration.csv",
        "sweep.csv",
        "heatmap_pretx_con.csv",
        "assignment_posttx_con.csv",
        "ecdf_pretx_con.csv",
    ] {
        assert_eq!(fs::read(d.join("a").join(name)).unwrap(), fs::read(d.join("b").join(name)).unwrap(), "{name}");
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("a/report.json")).unwrap()).unwrap();
    assert_eq!(report["intra_subject"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| symmis(args, d).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["run", "--out", "x"]), Some(1));
    let missing = symmis(&["run", "--manifest", "nope.toml", "--out", "x"], d);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.toml"));
    fs::write(d.join("bad.toml"), "[evaluation]\nclusters = 4\n").unwrap();
    fs::write(d.join("m.toml"), "").unwrap();
    let bad = symmis(&["run", "--config", "bad.toml", "--manifest", "m.toml"], d);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("clusters"));
    fs::write(d.join("d.csv"), WORKED_DISTANCES).unwrap();
    fs::write(d.join("l.csv"), WORKED_LABELS).unwrap();
    assert_eq!(code(&["evaluate", "d.csv", "--labels", "l.csv", "--n", "9"]), Some(2));
}
