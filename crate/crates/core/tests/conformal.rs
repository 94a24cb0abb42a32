mod common;

use bubblemesh::conformal::{conformal_factors, flatten};
use bubblemesh::pipeline::grid_mesh;
use bubblemesh::sizing::{BuiltinSurface, ParamDomain};

#[test]
fn planar_and_cylinder_oracles() {
    common::conformal_suite().unwrap();
}

#[test]
fn curved_patch_keeps_connectivity_and_orientation() {
    let surface = BuiltinSurface::sphere(1.0, ParamDomain::new(-0.8, 0.8, -0.8, 0.8));
    let mesh = grid_mesh(&surface, 16).unwrap();
    let out = flatten(&mesh).unwrap();
    assert_eq!(out.flat.faces, mesh.faces);
    assert_eq!(out.flat.vertices.len(), mesh.vertices.len());
    assert!((0..mesh.faces.len()).all(|f| out.flat.signed_area(f) > 0.0));
    // curvature shows up as mild, bounded distortion
    assert!(out.max_distortion() < 1.5, "{}", out.max_distortion());
    let factors = conformal_factors(&mesh, &out.flat).unwrap();
    assert!(factors.iter().all(|&s| s.is_finite() && s > 0.0));
}
