//! Triangulations checked against an exact rational circumcircle test.

mod common;

use std::cmp::Ordering;

use bubblemesh::geom::{orient2, Vec2};
use bubblemesh::mapping::triangulate;
use common::{check_empty_circumcircles, incircle_exact, random_points, rng};

fn hull_size(points: &[Vec2<f64>]) -> usize {
    // monotone chain, strict turns only
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    let mut hull: Vec<Vec2<f64>> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let seq: Vec<_> = if pass == 0 {
            p.clone()
        } else {
            p.iter().rev().copied().collect()
        };
        for x in seq {
            while hull.len() >= start + 2 && orient2(hull[hull.len() - 2], hull[hull.len() - 1], x) <= 0.0 {
                hull.pop();
            }
            hull.push(x);
        }
        hull.pop();
    }
    hull.len()
}

#[test]
fn random_sets_satisfy_empty_circumcircle_exactly() {
    common::delaunay_suite().unwrap();
}

#[test]
fn random_sets_have_euler_face_count() {
    let mut r = rng(99);
    for _ in 0..30 {
        let pts = random_points(&mut r, 50);
        let faces = triangulate(&pts, &[]).unwrap();
        // general position: 2n - h - 2 triangles
        assert_eq!(faces.len(), 2 * pts.len() - hull_size(&pts) - 2);
    }
}

#[test]
fn cocircular_grid_is_still_delaunay() {
    // every unit cell of a lattice is cocircular; either diagonal is valid
    let pts: Vec<Vec2<f64>> = (0..36).map(|k| Vec2::new((k % 6) as f64, (k / 6) as f64)).collect();
    let faces = triangulate(&pts, &[]).unwrap();
    assert_eq!(faces.len(), 50);
    check_empty_circumcircles(&pts, &faces).unwrap();
}

#[test]
fn exact_incircle_on_a_known_circle() {
    let (a, b, c) = (Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.0));
    assert_eq!(incircle_exact(a, b, c, Vec2::new(0.0, -1.0)), Ordering::Equal);
    assert_eq!(incircle_exact(a, b, c, Vec2::new(0.0, -1.0 + 1e-16)), Ordering::Greater);
    assert_eq!(incircle_exact(a, b, c, Vec2::new(0.0, -1.0 - 1e-15)), Ordering::Less);
}

#[test]
fn plate_triangulation_is_locally_delaunay_inside() {
    // constrained case: only unconstrained interior edges must be Delaunay
    let bubbles = bubblemesh::pipeline::plane_initial_bubbles(&common::small_plate()).unwrap();
    let mesh = bubblemesh::mapping::delaunay_triangulate(&bubbles).unwrap();
    let on_boundary: std::collections::HashSet<usize> = mesh.boundary.iter().flatten().copied().collect();
    let mut opposite: std::collections::HashMap<[usize; 2], Vec<usize>> = Default::default();
    for f in &mesh.faces {
        for k in 0..3 {
            let (u, v, w) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
            opposite.entry([u.min(v), u.max(v)]).or_default().push(w);
        }
    }
    let p = &mesh.vertices;
    let mut checked = 0;
    for (&[u, v], w) in &opposite {
        if w.len() != 2 || (on_boundary.contains(&u) && on_boundary.contains(&v)) {
            continue;
        }
        let (a, b) = (w[0], w[1]);
        let (x, y) = if orient2(p[u], p[v], p[a]) > 0.0 {
            (u, v)
        } else {
            (v, u)
        };
        assert_ne!(
            incircle_exact(p[x], p[y], p[a], p[b]),
            Ordering::Greater,
            "edge {u}-{v}"
        );
        checked += 1;
    }
    assert!(checked > 100);
}
