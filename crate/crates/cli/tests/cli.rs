use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bubblemesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bubblemesh"))
        .args(args)
        .output()
        .unwrap()
}

fn small_plate(dir: &Path) -> String {
    let cfg = dir.join("plate.toml");
    fs::write(
        &cfg,
        "record_time = false\n[plate]\nwidth = 6.0\nheight = 4.0\nradius = 0.25\nholes = [{ center = [3.0, 2.0], radius = 1.0 }]\n",
    )
    .unwrap();
    cfg.to_str().unwrap().to_owned()
}

#[test]
fn plane_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_plate(dir.path());
    let out = dir.path().join("out");
    let run = bubblemesh(&["plane", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "3"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.starts_with("Mesh\tTotal Triangles\tMinimum Angle"), "{stdout}");
    for f in ["mesh.obj", "mesh.off", "mesh.svg", "trace.csv", "report.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report = bubblemesh(&["report", out.join("mesh.off").to_str().unwrap()]);
    assert!(report.status.success());
    let row = |o: &[u8]| {
        String::from_utf8_lossy(o)
            .lines()
            .nth(1)
            .unwrap()
            .split('\t')
            .skip(1)
            .collect::<Vec<_>>()
            .join("\t")
    };
    assert_eq!(row(&report.stdout), row(stdout.as_bytes()));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let remesh = bubblemesh(&["remesh", "--out", out.to_str().unwrap()]);
    assert!(!remesh.status.success());
    let err = String::from_utf8_lossy(&remesh.stderr);
    assert!(err.contains("[config]"), "{err}");

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "bogus = 1\n").unwrap();
    let run = bubblemesh(&["plane", "--config", bad.to_str().unwrap()]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("[config]"));

    let report = bubblemesh(&["report", dir.path().join("missing.obj").to_str().unwrap()]);
    assert!(!report.status.success());
    assert!(String::from_utf8_lossy(&report.stderr).contains("[load]"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_plate(dir.path());
    let mut meshes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let run = bubblemesh(&["plane", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5"]);
        assert!(run.status.success());
        meshes.push((
            fs::read(out.join("mesh.obj")).unwrap(),
            fs::read(out.join("trace.csv")).unwrap(),
        ));
    }
    assert!(meshes[0] == meshes[1]);
}
