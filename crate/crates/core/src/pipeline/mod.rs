//! End-to-end runs: plate meshing, surface meshing through the flattened
//! domain, re-meshing of an existing surface mesh, and the side-by-side
//! comparison of the two quantity-control strategies.
//!
//! Every `run_*` function writes its artifacts into the configured output
//! directory as it goes, so that a failing stage leaves the earlier outputs
//! in place. Errors carry the label of the stage that failed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bubble::Bubble;
use crate::conformal::{flatten, FlattenResult};
use crate::error::{Error, Result, StageExt};
use crate::geom::Vec2;
use crate::mapping::{delaunay_triangulate, inverse_map};
use crate::mesh::io::obj_string;
use crate::mesh::{load_mesh, quality_report, save_mesh, write_svg, MeshQualityReport, PlanarMesh, TriangleMesh};
use crate::pack::{load_anchor_csv, pack_boundary, pack_interior_quadtree, PackingDomain, Sizing};
use crate::relax::{relax_until_converged, snapshot_min_angle, ConvergenceTrace, Strategy};
use crate::remesh::{initial_bubbles, remesh_planar};
use crate::sizing::{BuiltinSurface, ParametricSurface, SizingParams};

mod chart;
pub mod config;
pub mod plate;

pub use chart::min_angle_chart;
pub use config::{CompareCase, Mode, PipelineConfig, QcKind};
pub use plate::{graded_anchors, plate_bubbles, plate_domain, polygonize_circle};

/// Minimum-angle slack, in degrees, under which two runs count as equal
/// quality. Matches the stall tolerance of the relaxation.
pub const EQUAL_QUALITY_TOL: f64 = 0.1;

/// Result of [`run_plane_pipeline`].
#[derive(Debug, Clone)]
pub struct PlaneOutcome {
    pub bubbles: Vec<Bubble<f64>>,
    pub mesh: PlanarMesh<f64>,
    pub report: MeshQualityReport,
    pub trace: ConvergenceTrace,
}

/// Result of [`run_surface_pipeline`] and [`run_remesh`].
#[derive(Debug, Clone)]
pub struct SurfaceOutcome {
    /// Discrete surface before re-meshing.
    pub initial: TriangleMesh<f64>,
    pub flattened: FlattenResult<f64>,
    /// Re-meshed flat domain.
    pub new_flat: PlanarMesh<f64>,
    /// Re-meshed surface.
    pub surface: TriangleMesh<f64>,
    pub initial_report: MeshQualityReport,
    pub final_report: MeshQualityReport,
    pub trace: ConvergenceTrace,
}

/// One strategy's part of a [`CompareSummary`].
#[derive(Debug, Clone)]
pub struct QcRun {
    pub label: &'static str,
    pub strategy: Strategy<f64>,
    pub trace: ConvergenceTrace,
    pub bubbles: Vec<Bubble<f64>>,
    /// Minimum angle of the returned bubble state.
    pub min_angle: f64,
    pub report: MeshQualityReport,
}

/// Result of [`run_compare_qc`].
#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub initial_count: usize,
    pub new: QcRun,
    pub original: QcRun,
}

impl CompareSummary {
    /// Wall time after which the original strategy's minimum angle stays
    /// within [`EQUAL_QUALITY_TOL`] degrees of the new strategy's final
    /// value, or its total time if it never settles there.
    pub fn original_time_to_equal_quality(&self) -> f64 {
        self.original
            .trace
            .settled_at(self.new.min_angle - EQUAL_QUALITY_TOL)
            .map_or(self.original.trace.total_time(), |r| r.elapsed_s)
    }

    /// New-strategy total time over [`Self::original_time_to_equal_quality`].
    pub fn time_ratio(&self) -> f64 {
        self.new.trace.total_time() / self.original_time_to_equal_quality()
    }

    pub fn to_text(&self, with_time: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "initial bubbles: {}", self.initial_count);
        let _ = write!(s, "strategy\tsweeps\tconverged\tbubbles\tfinal min angle");
        if with_time {
            s.push_str("\twall time (s)");
        }
        s.push('\n');
        for run in [&self.new, &self.original] {
            let _ = write!(
                s,
                "{}\t{}\t{}\t{}\t{:.4}",
                run.label,
                run.trace.sweeps(),
                run.trace.converged,
                run.bubbles.len(),
                run.min_angle
            );
            if with_time {
                let _ = write!(s, "\t{:.3}", run.trace.total_time());
            }
            s.push('\n');
        }
        s.push('\n');
        s.push_str(&report_table(&[
            (self.new.label, &self.new.report),
            (self.original.label, &self.original.report),
        ]));
        if with_time {
            let _ = writeln!(
                s,
                "\noriginal time to equal quality (s): {:.3}\ntime ratio new/original: {:.4}",
                self.original_time_to_equal_quality(),
                self.time_ratio()
            );
        }
        s
    }
}

/// Quality table with one labeled row per mesh.
pub fn report_table(rows: &[(&str, &MeshQualityReport)]) -> String {
    let mut s = format!("Mesh\t{}\n", MeshQualityReport::table_header());
    for (label, r) in rows {
        let _ = writeln!(s, "{label}\t{}", r.table_row());
    }
    s
}

fn trace_summary(trace: &ConvergenceTrace, with_time: bool) -> String {
    let mut s = format!(
        "relaxation: {} sweeps, converged: {}, bubbles: {}",
        trace.sweeps(),
        trace.converged,
        trace.last().map_or(0, |r| r.bubble_count)
    );
    if with_time {
        let _ = write!(s, ", wall time {:.3} s", trace.total_time());
    }
    s.push('\n');
    s
}

fn out_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn extra_anchors(cfg: &PipelineConfig) -> Result<Vec<Bubble<f64>>> {
    match &cfg.anchors_file {
        Some(p) => Ok(load_anchor_csv::<f64>(p)?
            .into_iter()
            .map(|b| Bubble::anchor(b.center, b.radius))
            .collect()),
        None => Ok(Vec::new()),
    }
}

/// Initial bubbles of the configured plate, including anchors from the
/// anchors file.
pub fn plane_initial_bubbles(cfg: &PipelineConfig) -> Result<Vec<Bubble<f64>>> {
    let extra = extra_anchors(cfg).stage("anchors")?;
    plate_bubbles(&cfg.plate, &extra).stage("pack")
}

/// Packs, relaxes with the configured strategy and triangulates the plate.
/// Writes `mesh.obj`, `mesh.off`, `mesh.svg`, `trace.csv` and `report.txt`.
pub fn run_plane_pipeline(cfg: &PipelineConfig) -> Result<PlaneOutcome> {
    cfg.validate().stage("config")?;
    let dir = out_dir(cfg).stage("output")?;
    let initial = plane_initial_bubbles(cfg)?;
    log::info!("plate: {} initial bubbles", initial.len());
    let (bubbles, trace) =
        relax_until_converged(initial, &cfg.dynamics(), &cfg.force(), cfg.qc.strategy()).stage("relax")?;
    trace.write_csv(dir.join("trace.csv")).stage("output")?;
    let mesh = delaunay_triangulate(&bubbles).stage("triangulate")?;
    let mesh3 = mesh.to_3d();
    let report = quality_report(&mesh3).stage("report")?;
    save_mesh(&mesh3, dir.join("mesh.obj")).stage("output")?;
    save_mesh(&mesh3, dir.join("mesh.off")).stage("output")?;
    write_svg(&mesh, dir.join("mesh.svg")).stage("output")?;
    let text = format!(
        "{}\n{}",
        trace_summary(&trace, cfg.record_time),
        report_table(&[("Plate", &report)])
    );
    write_text(&dir.join("report.txt"), &text).stage("output")?;
    Ok(PlaneOutcome {
        bubbles,
        mesh,
        report,
        trace,
    })
}

/// Parameter rectangle of the surface with the curvature-based sizing.
pub fn surface_domain(surface: &BuiltinSurface<f64>, sizing: SizingParams<f64>) -> Result<PackingDomain<f64>> {
    PackingDomain::new(
        surface.domain().corners(),
        Vec::new(),
        Sizing::Surface {
            surface: Arc::new(surface.clone()),
            params: sizing,
        },
    )
}

/// Maps a triangulation of the parameter domain onto the surface, keeping
/// the parameters as texture coordinates.
pub fn lift<S: ParametricSurface<f64> + ?Sized>(surface: &S, planar: &PlanarMesh<f64>) -> Result<TriangleMesh<f64>> {
    let verts = planar.vertices.iter().map(|p| surface.position(p.x, p.y)).collect();
    TriangleMesh::new(verts, planar.faces.clone())?.with_uv(planar.vertices.clone())
}

/// Initial discrete surface: bubbles packed in the parameter rectangle
/// under the sizing bound, triangulated and lifted. No relaxation.
pub fn initial_surface_mesh(surface: &BuiltinSurface<f64>, sizing: SizingParams<f64>) -> Result<TriangleMesh<f64>> {
    let domain = surface_domain(surface, sizing).stage("pack")?;
    let mut bubbles = pack_boundary(&domain).stage("pack")?;
    let interior = pack_interior_quadtree(&domain, &bubbles).stage("pack")?;
    bubbles.extend(interior);
    log::info!("surface: {} initial bubbles", bubbles.len());
    let planar = delaunay_triangulate(&bubbles).stage("triangulate")?;
    lift(surface, &planar).stage("lift")
}

/// Regular `n x n` grid of the parameter rectangle (two triangles per
/// cell), lifted onto the surface.
pub fn grid_mesh<S: ParametricSurface<f64> + ?Sized>(surface: &S, n: usize) -> Result<TriangleMesh<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid needs at least one cell".into()));
    }
    let d = surface.domain();
    let mut pts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            pts.push(Vec2::new(d.u0 + (d.u1 - d.u0) * s, d.v0 + (d.v1 - d.v0) * t));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    lift(surface, &PlanarMesh::new(pts, faces)?)
}

/// Flattens `initial`, re-meshes the flat domain and maps the result back.
/// Writes the flat SVGs, `final.obj`, `final.off`, `trace.csv` and
/// `report.txt` into `dir`.
fn remesh_surface(cfg: &PipelineConfig, initial: TriangleMesh<f64>, dir: &Path) -> Result<SurfaceOutcome> {
    let initial_report = quality_report(&initial).stage("report")?;
    let flattened = flatten(&initial).stage("flatten")?;
    write_svg(&flattened.flat, dir.join("initial_flat.svg")).stage("output")?;
    let (new_flat, trace) =
        remesh_planar(&flattened.flat, cfg.qc.threshold, &cfg.dynamics(), &cfg.force()).stage("remesh")?;
    trace.write_csv(dir.join("trace.csv")).stage("output")?;
    write_svg(&new_flat, dir.join("final_flat.svg")).stage("output")?;
    let surface = inverse_map(&new_flat, &flattened.flat, &initial).stage("inverse-map")?;
    save_mesh(&surface, dir.join("final.obj")).stage("output")?;
    save_mesh(&surface, dir.join("final.off")).stage("output")?;
    let final_report = quality_report(&surface).stage("report")?;
    let text = format!(
        "{}mean quasi-conformal distortion: {:.6}\n\n{}",
        trace_summary(&trace, cfg.record_time),
        flattened.mean_distortion(),
        report_table(&[("Initial", &initial_report), ("Re-meshed", &final_report)])
    );
    write_text(&dir.join("report.txt"), &text).stage("output")?;
    Ok(SurfaceOutcome {
        initial,
        flattened,
        new_flat,
        surface,
        initial_report,
        final_report,
        trace,
    })
}

/// Meshes the configured parametric surface: initial discrete surface,
/// flattening, re-meshing in the plane and inverse mapping. Writes
/// `initial.obj` in addition to the re-meshing outputs.
pub fn run_surface_pipeline(cfg: &PipelineConfig) -> Result<SurfaceOutcome> {
    cfg.validate().stage("config")?;
    let dir = out_dir(cfg).stage("output")?;
    let sizing = cfg.surface.sizing().stage("config")?;
    let initial = initial_surface_mesh(&cfg.surface.surface, sizing)?;
    save_mesh(&initial, dir.join("initial.obj")).stage("output")?;
    remesh_surface(cfg, initial, &dir)
}

/// Re-meshes the disk-topology surface mesh named by `input_mesh`.
pub fn run_remesh(cfg: &PipelineConfig) -> Result<SurfaceOutcome> {
    cfg.validate().stage("config")?;
    let path = cfg
        .input_mesh
        .as_ref()
        .ok_or_else(|| Error::Config("remesh needs input_mesh".into()))
        .stage("config")?;
    let dir = out_dir(cfg).stage("output")?;
    let initial = load_mesh::<f64>(path).stage("load")?;
    remesh_surface(cfg, initial, &dir)
}

/// Initial bubbles of the comparison case: the plate, or the bubbles
/// reconstructed on the flattened initial discrete surface.
pub fn compare_initial_bubbles(cfg: &PipelineConfig) -> Result<Vec<Bubble<f64>>> {
    match cfg.compare_case {
        CompareCase::Plate => plane_initial_bubbles(cfg),
        CompareCase::Surface => {
            let sizing = cfg.surface.sizing().stage("config")?;
            let initial = initial_surface_mesh(&cfg.surface.surface, sizing)?;
            let flat = flatten(&initial).stage("flatten")?;
            initial_bubbles(&flat.flat).stage("reconstruct")
        }
    }
}

/// Relaxes `bubbles` with one strategy and triangulates the result.
pub fn run_strategy(
    cfg: &PipelineConfig,
    label: &'static str,
    strategy: Strategy<f64>,
    bubbles: Vec<Bubble<f64>>,
) -> Result<QcRun> {
    let (bubbles, trace) = relax_until_converged(bubbles, &cfg.dynamics(), &cfg.force(), strategy).stage("relax")?;
    let mesh = delaunay_triangulate(&bubbles).stage("triangulate")?;
    let report = quality_report(&mesh.to_3d()).stage("report")?;
    Ok(QcRun {
        label,
        strategy,
        trace,
        min_angle: snapshot_min_angle(&bubbles),
        bubbles,
        report,
    })
}

/// Runs both strategies from the same initial bubbles. Writes
/// `trace_new.csv`, `trace_original.csv`, `summary.txt` and
/// `min_angle.svg`.
pub fn run_compare_qc(cfg: &PipelineConfig) -> Result<CompareSummary> {
    cfg.validate().stage("config")?;
    let dir = out_dir(cfg).stage("output")?;
    let initial = compare_initial_bubbles(cfg)?;
    let initial_count = initial.len();
    let new = run_strategy(cfg, "new-qc", cfg.qc.new_strategy(), initial.clone())?;
    new.trace.write_csv(dir.join("trace_new.csv")).stage("output")?;
    let original = run_strategy(cfg, "original-qc", cfg.qc.original_strategy(), initial)?;
    original
        .trace
        .write_csv(dir.join("trace_original.csv"))
        .stage("output")?;
    let summary = CompareSummary {
        initial_count,
        new,
        original,
    };
    write_text(&dir.join("summary.txt"), &summary.to_text(cfg.record_time)).stage("output")?;
    let chart = min_angle_chart(&[
        (summary.new.label, &summary.new.trace),
        (summary.original.label, &summary.original.trace),
    ]);
    write_text(&dir.join("min_angle.svg"), &chart).stage("output")?;
    Ok(summary)
}

/// Quality table of a mesh file.
pub fn report_for_file(path: impl AsRef<Path>) -> Result<String> {
    let mesh = load_mesh::<f64>(path.as_ref()).stage("load")?;
    let report = quality_report(&mesh).stage("report")?;
    let name = path.as_ref().file_name().and_then(|s| s.to_str()).unwrap_or("mesh");
    Ok(report_table(&[(name, &report)]))
}

/// Dispatches on `cfg.mode` and returns a short text summary.
pub fn run(cfg: &PipelineConfig) -> Result<String> {
    match cfg.mode {
        Mode::Plane => {
            let o = run_plane_pipeline(cfg)?;
            Ok(report_table(&[("Plate", &o.report)]))
        }
        Mode::Surface => {
            let o = run_surface_pipeline(cfg)?;
            Ok(report_table(&[
                ("Initial", &o.initial_report),
                ("Re-meshed", &o.final_report),
            ]))
        }
        Mode::Remesh => {
            let o = run_remesh(cfg)?;
            Ok(report_table(&[
                ("Initial", &o.initial_report),
                ("Re-meshed", &o.final_report),
            ]))
        }
        Mode::CompareQc => Ok(run_compare_qc(cfg)?.to_text(cfg.record_time)),
    }
}

/// Round trip through the OBJ writer, for checking that written meshes
/// reproduce the in-memory report.
pub fn reparse_obj(mesh: &TriangleMesh<f64>) -> Result<TriangleMesh<f64>> {
    crate::mesh::io::parse_obj(&obj_string(mesh))
}
