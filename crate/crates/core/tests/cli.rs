use std::path::Path;
use std::process::{Command, Output};

fn vpmcf(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpmcf")).args(args).env("VPMCF_OUT", out_dir).output().expect("spawn vpmcf")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cylinder_run_keeps_volume_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "initial = cylinder\nradius = 1\nintervals = 32\nt_end = 0.1\noutput_every = 50\nsvg = true\n",
    );
    let o = vpmcf(&["run", "--config", &cfg, "--strict"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("status = reached_t_end"));

    let mut reader = csv::Reader::from_path(out.join("timeseries.csv")).unwrap();
    let col = reader.headers().unwrap().iter().position(|h| h == "volume").unwrap();
    let volumes: Vec<String> = reader.records().map(|r| r.unwrap()[col].to_string()).collect();
    assert!(volumes.len() >= 2);
    assert!(volumes.iter().all(|v| v == &volumes[0]));

    for file in ["census.csv", "monitors.txt", "snapshots/0000.csv", "snapshots/0000.svg"] {
        assert!(out.join(file).exists(), "{file}");
    }
    assert!(!out.join("fit.txt").exists());
}

#[test]
fn plain_cylinder_run_reports_type_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "mode = plain_mcf\nintervals = 16\noutput_every = 500\nrecord_a2_growth = 1.3\nt_end = 1\n",
    );
    let o = vpmcf(&["run", "--config", &cfg], &out);
    assert!(o.status.success());
    let fit = std::fs::read_to_string(out.join("fit.txt")).unwrap();
    assert!(fit.contains("classification = type_I"), "{fit}");

    let o = vpmcf(&["fit", out.join("timeseries.csv").to_str().unwrap()], &out);
    assert!(o.status.success());
    assert!(stdout(&o).contains("classification = type_I"));

    let snap = out.join("snapshots/0000.csv");
    let o = vpmcf(&["rescale", snap.to_str().unwrap(), "--alpha", "2", "--center", "auto"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("0,2,"), "{first}");
}

#[test]
fn malformed_config_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "intervals = 32\n\nthis is not a pair\n");
    let o = vpmcf(&["run", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn fit_without_columns_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    std::fs::write(&path, "t,h\n0,1\n").unwrap();
    let o = vpmcf(&["fit", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_A2"));
}

#[test]
fn identities_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = vpmcf(&["verify", "--suite", "identities"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("criterion  1 PASS"));
}
