//! Oracle checks shared by the focused test targets and the acceptance run.
//! Each returns a description of the first violation.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::path::Path;

use bubblemesh::bubble::Bubble;
use bubblemesh::conformal::flatten;
use bubblemesh::geom::{corner_angle2, corner_angle3, orient2, Vec2, Vec3};
use bubblemesh::mapping::{locate, triangulate, FaceLocator};
use bubblemesh::mesh::{PlanarMesh, TriangleMesh};
use bubblemesh::pipeline::config::{HoleConfig, Mode, PipelineConfig};
use bubblemesh::pipeline::{grid_mesh, run};
use bubblemesh::relax::{pair_force, rk4_step, ForceParams};
use bubblemesh::remesh::{inverse_length_weights, reconstruct_boundary_bubbles, reconstruct_interior_bubbles};
use bubblemesh::sizing::{BuiltinSurface, ParamDomain};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- Delaunay ----

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Sign of the incircle determinant for a counterclockwise triangle `abc`:
/// `Greater` when `d` lies strictly inside the circumcircle. Evaluated in
/// floating point and redone in rationals when the value is within a
/// generous error bound of zero.
pub fn incircle_exact(a: Vec2<f64>, b: Vec2<f64>, c: Vec2<f64>, d: Vec2<f64>) -> Ordering {
    let r = |p: Vec2<f64>| {
        let (x, y) = (p.x - d.x, p.y - d.y);
        (x, y, x * x + y * y)
    };
    let ((ax, ay, aw), (bx, by, bw), (cx, cy, cw)) = (r(a), r(b), r(c));
    let det = ax * (by * cw - bw * cy) - ay * (bx * cw - bw * cx) + aw * (bx * cy - by * cx);
    let perm = ax.abs() * ((by * cw).abs() + (bw * cy).abs())
        + ay.abs() * ((bx * cw).abs() + (bw * cx).abs())
        + aw * ((bx * cy).abs() + (by * cx).abs());
    if det.abs() > 1e-12 * perm {
        return det.partial_cmp(&0.0).unwrap();
    }
    let row = |p: Vec2<f64>| {
        let x = q(p.x) - q(d.x);
        let y = q(p.y) - q(d.y);
        let w = &x * &x + &y * &y;
        (x, y, w)
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    let det = &ax * (&by * &cw - &bw * &cy) - &ay * (&bx * &cw - &bw * &cx) + &aw * (&bx * &cy - &by * &cx);
    det.cmp(&BigRational::from_integer(BigInt::from(0)))
}

/// No point strictly inside the circumcircle of any face; faces are
/// counterclockwise.
pub fn check_empty_circumcircles(pts: &[Vec2<f64>], faces: &[[usize; 3]]) -> Check {
    for f in faces {
        let (a, b, c) = (pts[f[0]], pts[f[1]], pts[f[2]]);
        ensure(orient2(a, b, c) > 0.0, || format!("face {f:?} is not counterclockwise"))?;
        for (k, &d) in pts.iter().enumerate() {
            if !f.contains(&k) && incircle_exact(a, b, c, d) == Ordering::Greater {
                return Err(format!("point {k} inside the circumcircle of {f:?}"));
            }
        }
    }
    Ok(())
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec2<f64>> {
    (0..n)
        .map(|_| Vec2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect()
}

/// 30 random sets of 50 points in the unit square.
pub fn delaunay_suite() -> Check {
    let mut r = rng(20240611);
    for set in 0..30 {
        let pts = random_points(&mut r, 50);
        let faces = triangulate(&pts, &[]).map_err(|e| format!("set {set}: {e}"))?;
        check_empty_circumcircles(&pts, &faces).map_err(|e| format!("set {set}: {e}"))?;
    }
    Ok(())
}

// ---- force law and integrator ----

pub fn force_suite() -> Check {
    let p = ForceParams::default();
    let mut r = rng(11);
    for _ in 0..1000 {
        let ra = r.random_range(0.01..2.0);
        let rb = r.random_range(0.01..2.0);
        let a = Bubble::mobile(Vec2::new(r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)), ra);
        let dir = r.random_range(0.0..std::f64::consts::TAU);
        let u = Vec2::new(dir.cos(), dir.sin());
        let at = |w: f64| Bubble::mobile(a.center + u * (w * (ra + rb)), rb);

        let t = pair_force(0, &a, 1, &at(1.0), &p);
        ensure(t.norm() < 1e-12, || format!("tangent pair force {}", t.norm()))?;
        let w = r.random_range(1.5..3.0);
        let far = pair_force(0, &a, 1, &at(w), &p);
        ensure(far == Vec2::zero(), || format!("nonzero force at w = {w}"))?;
        let b = at(r.random_range(0.0..1.6));
        let (f, g) = (pair_force(3, &a, 8, &b, &p), pair_force(8, &b, 3, &a, &p));
        ensure(f + g == Vec2::zero(), || format!("action {f:?} vs reaction {g:?}"))?;
    }
    // constant force: v -> f/c exponentially
    let (m, c, dt): (f64, f64, f64) = (1.0, 1.4, 0.01);
    let f = Vec2::new(0.3, -0.2);
    let (x0, v0) = (Vec2::new(1.0, 2.0), Vec2::new(0.1, 0.05));
    let (x, v) = rk4_step(x0, v0, dt, m, c, |_| f);
    let vinf = f / c;
    let e = (-c * dt / m).exp();
    let v_exact = vinf + (v0 - vinf) * e;
    let x_exact = x0 + vinf * dt + (v0 - vinf) * ((1.0 - e) * m / c);
    ensure((x - x_exact).norm() < 1e-8 && (v - v_exact).norm() < 1e-8, || {
        format!(
            "rk4 step off the closed form by {:e}",
            f64::max((x - x_exact).norm(), (v - v_exact).norm())
        )
    })
}

// ---- barycentric location ----

pub fn square_mesh(r: &mut ChaCha8Rng, n: usize) -> PlanarMesh<f64> {
    let mut pts = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ];
    pts.extend((0..n).map(|_| Vec2::new(r.random_range(0.01..0.99), r.random_range(0.01..0.99))));
    let faces = triangulate(&pts, &[]).unwrap();
    PlanarMesh::new(pts, faces).unwrap()
}

/// 1000 random points: coordinates sum to one, are nonnegative, and
/// reproduce the query point.
pub fn barycentric_suite() -> Check {
    let mut r = rng(7);
    let mesh = square_mesh(&mut r, 200);
    let index = FaceLocator::new(&mesh);
    for _ in 0..1000 {
        let p = Vec2::new(r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        let loc = locate(&mesh, p, &index).map_err(|e| format!("{p:?}: {e}"))?;
        let l = loc.coords;
        ensure((l[0] + l[1] + l[2] - 1.0).abs() < 1e-12, || format!("{p:?}: sum {l:?}"))?;
        ensure(l.iter().all(|&x| x >= -1e-12), || format!("{p:?}: negative {l:?}"))?;
        let back = loc.interpolate(&mesh.faces, &mesh.vertices);
        ensure(back.dist(p) < 1e-12, || format!("{p:?} reconstructed as {back:?}"))?;
    }
    Ok(())
}

// ---- conformal flattening ----

pub fn face_angles2(p: [Vec2<f64>; 3]) -> [f64; 3] {
    [
        corner_angle2(p[1], p[0], p[2]),
        corner_angle2(p[2], p[1], p[0]),
        corner_angle2(p[0], p[2], p[1]),
    ]
}

pub fn face_angles3(p: [Vec3<f64>; 3]) -> [f64; 3] {
    [
        corner_angle3(p[1], p[0], p[2]),
        corner_angle3(p[2], p[1], p[0]),
        corner_angle3(p[0], p[2], p[1]),
    ]
}

/// Random planar mesh embedded in a tilted plane.
pub fn tilted_planar_mesh(r: &mut ChaCha8Rng) -> TriangleMesh<f64> {
    let mut pts = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(2.0, 0.0),
        Vec2::new(2.0, 1.0),
        Vec2::new(0.0, 1.0),
    ];
    pts.extend((0..120).map(|_| Vec2::new(r.random_range(0.05..1.95), r.random_range(0.05..0.95))));
    let faces = triangulate(&pts, &[]).unwrap();
    let e1 = Vec3::new(0.6, 0.0, 0.8);
    let e2 = Vec3::new(0.0, 1.0, 0.0);
    let verts = pts
        .iter()
        .map(|p| e1 * p.x + e2 * p.y + Vec3::new(1.0, -2.0, 0.5))
        .collect();
    TriangleMesh::new(verts, faces).unwrap()
}

/// Planar input flattens congruently; a cylinder grid patch flattens to its
/// analytic unrolling; connectivity is kept.
pub fn conformal_suite() -> Check {
    let mesh = tilted_planar_mesh(&mut rng(3));
    let out = flatten(&mesh).map_err(|e| e.to_string())?;
    ensure(out.flat.faces == mesh.faces, || "planar: faces changed".into())?;
    for f in 0..mesh.faces.len() {
        let (a, b) = (face_angles2(out.flat.face_points(f)), face_angles3(mesh.face_points(f)));
        let err = (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max);
        ensure(err < 1e-9, || format!("planar: face {f} angle error {err:e} rad"))?;
    }
    ensure(out.edge_scale.iter().all(|x| (x - 1.0).abs() < 1e-9), || {
        "planar: not congruent".into()
    })?;

    let n = 12;
    let (u1, h) = (2.0, 1.5);
    let surface = BuiltinSurface::cylinder(1.0, ParamDomain::new(0.0, u1, 0.0, h));
    let mesh = grid_mesh(&surface, n).map_err(|e| e.to_string())?;
    let out = flatten(&mesh).map_err(|e| e.to_string())?;
    ensure(out.flat.faces == mesh.faces, || "cylinder: faces changed".into())?;
    ensure(out.max_distortion() < 1.01, || {
        format!("cylinder: distortion {}", out.max_distortion())
    })?;
    // grid cells are planar rectangles, so unrolling along the chords is an
    // exact development of the mesh
    let du = u1 / n as f64;
    let chord = 2.0 * (du / 2.0).sin();
    let uv = mesh.uv.as_ref().unwrap();
    let unrolled: Vec<Vec2<f64>> = uv.iter().map(|p| Vec2::new(p.x / du * chord, p.y)).collect();
    for (f, &[i, j, k]) in mesh.faces.iter().enumerate() {
        let (a, b) = (
            face_angles2(out.flat.face_points(f)),
            face_angles2([unrolled[i], unrolled[j], unrolled[k]]),
        );
        let err = (0..3).map(|t| (a[t] - b[t]).abs()).fold(0.0, f64::max);
        ensure(err < 1e-6, || {
            format!("cylinder: face {f} differs from the unrolling by {err:e} rad")
        })?;
    }
    Ok(())
}

// ---- reconstruction ----

/// Triangular lattice with spacing `l` clipped to a hexagon of `k` rings.
pub fn hexagon(l: f64, k: i32) -> PlanarMesh<f64> {
    let mut pts = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            if (i + j).abs() <= k {
                pts.push(Vec2::new(
                    l * (i as f64 + 0.5 * j as f64),
                    l * 0.75f64.sqrt() * j as f64,
                ));
            }
        }
    }
    let faces = triangulate(&pts, &[]).unwrap();
    PlanarMesh::new(pts, faces).unwrap()
}

pub fn reconstruction_suite() -> Check {
    let l = 0.37;
    let mesh = hexagon(l, 4);
    let boundary = reconstruct_boundary_bubbles(&mesh).map_err(|e| e.to_string())?;
    let interior = reconstruct_interior_bubbles(&mesh).map_err(|e| e.to_string())?;
    ensure(boundary.len() == 24 && interior.len() == 37, || {
        format!("{} boundary and {} interior bubbles", boundary.len(), interior.len())
    })?;
    for b in boundary.iter().chain(&interior) {
        ensure((b.radius - l / 2.0).abs() < 1e-12, || {
            format!("radius {} on a uniform lattice", b.radius)
        })?;
    }
    let mut r = rng(5);
    for _ in 0..200 {
        let n = r.random_range(1..12);
        let lengths: Vec<f64> = (0..n).map(|_| r.random_range(1e-3..1e3)).collect();
        let s: f64 = inverse_length_weights(&lengths).iter().sum();
        ensure((s - 1.0).abs() < 1e-12, || format!("weights sum to {s}"))?;
    }
    Ok(())
}

// ---- determinism ----

/// Small plate that meshes in well under a second.
pub fn small_plate() -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.plate.width = 6.0;
    cfg.plate.height = 4.0;
    cfg.plate.holes = vec![HoleConfig {
        center: [3.0, 2.0],
        radius: 1.0,
    }];
    cfg.plate.radius = 0.25;
    cfg
}

/// Small sphere patch for the surface pipeline.
pub fn small_sphere() -> PipelineConfig {
    let mut cfg = PipelineConfig {
        mode: Mode::Surface,
        ..PipelineConfig::default()
    };
    cfg.surface.surface = BuiltinSurface::sphere(1.0, ParamDomain::new(-0.5, 0.5, -0.5, 0.5));
    cfg.surface.epsilon = 0.001;
    cfg.surface.r_max = 0.2;
    cfg
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

/// Runs the configuration twice into fresh directories and compares every
/// output byte for byte.
pub fn check_reproducible(mut cfg: PipelineConfig) -> Check {
    cfg.record_time = false;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        cfg.output_dir = dir.path().to_path_buf();
        run(&cfg).map_err(|e| e.to_string())?;
        outputs.push(read_dir_sorted(dir.path()));
    }
    ensure(!outputs[0].is_empty(), || "no outputs written".into())?;
    let names = |o: &Vec<(String, Vec<u8>)>| o.iter().map(|f| f.0.clone()).collect::<Vec<_>>();
    ensure(names(&outputs[0]) == names(&outputs[1]), || {
        "different file sets".into()
    })?;
    for (a, b) in outputs[0].iter().zip(&outputs[1]) {
        ensure(a.1 == b.1, || format!("{} differs between runs", a.0))?;
    }
    Ok(())
}

pub fn determinism_suite() -> Check {
    check_reproducible(small_plate()).map_err(|e| format!("plate: {e}"))?;
    check_reproducible(small_sphere()).map_err(|e| format!("sphere: {e}"))
}
