mod common;

use std::fs;
use std::path::Path;

use bubblemesh::mesh::{hausdorff_estimate, load_mesh, quality_report};
use bubblemesh::pipeline::config::{CompareCase, Mode, PipelineConfig};
use bubblemesh::pipeline::{
    initial_surface_mesh, report_for_file, run, run_compare_qc, run_plane_pipeline, run_remesh, run_surface_pipeline,
};
use bubblemesh::sizing::g_of_eps;
use common::{small_plate, small_sphere};

#[test]
fn sphere_vertices_stay_within_the_initial_chord_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        output_dir: dir.path().into(),
        ..small_sphere()
    };
    let out = run_surface_pipeline(&cfg).unwrap();
    let chord = hausdorff_estimate(&out.initial, &cfg.surface.surface, 8).unwrap();
    let worst = out
        .surface
        .vertices
        .iter()
        .map(|p| (p.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= chord + 1e-9, "{worst} > {chord}");
    // initial vertices sit on the sphere
    assert!(out.initial.vertices.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
    for f in [
        "initial.obj",
        "initial_flat.svg",
        "final_flat.svg",
        "final.obj",
        "final.off",
        "trace.csv",
        "report.txt",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert!(out.final_report.min_angle > out.initial_report.min_angle);
}

#[test]
fn initial_sphere_edges_respect_the_sizing_bound() {
    let cfg = small_sphere();
    let eps = cfg.surface.epsilon;
    let mesh = initial_surface_mesh(&cfg.surface.surface, cfg.surface.sizing().unwrap()).unwrap();
    // unit sphere, radius clamps inactive: allowable 3D edge is g(eps); the
    // Delaunay edges of a packing run up to about 1.5 bubble diameters
    let g = g_of_eps(eps).unwrap();
    assert!(mesh.max_edge_length() <= 1.5 * g, "{} vs {g}", mesh.max_edge_length());
    // a triangle with longest edge l fits in a disk of radius l / sqrt(3),
    // whose cap on the unit sphere has depth 1 - sqrt(1 - l^2 / 3)
    let l = mesh.max_edge_length();
    let cap = 1.0 - (1.0 - l * l / 3.0).sqrt();
    let d = hausdorff_estimate(&mesh, &cfg.surface.surface, 8).unwrap();
    assert!(d <= cap, "{d} vs {cap}");
}

#[test]
fn plate_files_reproduce_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        output_dir: dir.path().into(),
        ..small_plate()
    };
    let out = run_plane_pipeline(&cfg).unwrap();
    for f in ["mesh.obj", "mesh.off", "mesh.svg", "trace.csv", "report.txt"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    for f in ["mesh.obj", "mesh.off"] {
        let back = load_mesh::<f64>(dir.path().join(f)).unwrap();
        assert_eq!(quality_report(&back).unwrap(), out.report, "{f}");
    }
    let table = report_for_file(dir.path().join("mesh.obj")).unwrap();
    assert!(table.contains(&out.report.triangle_count.to_string()));
    assert!(out.report.fraction_at_least_30() > 0.95);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), out.trace.records.len() + 1);
}

#[test]
fn remesh_reads_a_written_surface() {
    let dir = tempfile::tempdir().unwrap();
    let first = PipelineConfig {
        output_dir: dir.path().join("a"),
        ..small_sphere()
    };
    run_surface_pipeline(&first).unwrap();
    let cfg = PipelineConfig {
        mode: Mode::Remesh,
        input_mesh: Some(dir.path().join("a/initial.obj")),
        output_dir: dir.path().join("b"),
        ..first
    };
    let out = run_remesh(&cfg).unwrap();
    assert!(dir.path().join("b/final.obj").is_file());
    assert!(out.final_report.triangle_count > 0);
}

#[test]
fn failing_stage_is_named_and_earlier_outputs_kept() {
    let dir = tempfile::tempdir().unwrap();
    // a closed surface cannot be flattened
    let tet = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 4\nf 1 4 3\n";
    let input = dir.path().join("tet.obj");
    fs::write(&input, tet).unwrap();
    let cfg = PipelineConfig {
        mode: Mode::Remesh,
        input_mesh: Some(input),
        output_dir: dir.path().join("out"),
        ..PipelineConfig::default()
    };
    let err = run(&cfg).unwrap_err().to_string();
    assert!(err.starts_with("[flatten]"), "{err}");
    assert!(dir.path().join("out").is_dir());

    let missing = PipelineConfig {
        input_mesh: Some(dir.path().join("nope.obj")),
        ..cfg
    };
    assert!(run(&missing).unwrap_err().to_string().starts_with("[config]"));
}

#[test]
fn compare_qc_writes_paired_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        mode: Mode::CompareQc,
        compare_case: CompareCase::Plate,
        output_dir: dir.path().into(),
        record_time: false,
        ..small_plate()
    };
    let summary = run_compare_qc(&cfg).unwrap();
    for f in ["trace_new.csv", "trace_original.csv", "summary.txt", "min_angle.svg"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let text = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert_eq!(text, summary.to_text(false));
    assert!(summary.new.trace.sweeps() > 0 && summary.original.trace.sweeps() > 0);
    let svg = fs::read_to_string(dir.path().join("min_angle.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn config_file_paths_resolve_against_its_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("anchors.csv"), "x,y,radius\n1.0,1.0,0.2\n").unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "anchors_file = \"anchors.csv\"\n[plate]\nwidth = 6.0\nheight = 4.0\nholes = []\n",
    )
    .unwrap();
    let cfg = PipelineConfig::load(dir.path().join("run.toml")).unwrap();
    assert_eq!(
        cfg.anchors_file.as_deref(),
        Some(dir.path().join("anchors.csv").as_path())
    );
    cfg.validate().unwrap();
    let bubbles = bubblemesh::pipeline::plane_initial_bubbles(&cfg).unwrap();
    assert!(bubbles.iter().any(|b| b.is_anchor() && (b.radius - 0.2).abs() < 1e-15));
}

#[test]
fn shipped_configs_load_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = PipelineConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 6);
}
