//! Re-meshing of a flattened mesh: bubbles are rebuilt at the existing
//! vertices, gaps left by the flattening are filled, and the result is
//! relaxed and triangulated.

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::mapping::delaunay_triangulate;
use crate::mesh::{vertex_neighbors, PlanarMesh};
use crate::pack::{pack_interior_quadtree, AnchorField, PackingDomain, Sizing};
use crate::relax::{overlap_pairwise, relax_until_converged, ConvergenceTrace, DynamicsParams, ForceParams, Strategy};
use crate::scalar::Real;
use crate::spatial::PointGrid;

/// Gap-filling candidates overlapping an anchor by more than this (pairwise
/// measure) are dropped.
const FILL_MAX_OVERLAP: f64 = 0.5;

/// One fixed bubble per boundary vertex with `r_j = (l_ij + l_jk) / 4`,
/// where `i` and `k` are the loop neighbors of `j`. Loops are numbered as
/// rings, outer first.
pub fn reconstruct_boundary_bubbles<T: Real>(flat: &PlanarMesh<T>) -> Result<Vec<Bubble<T>>> {
    let mut out = Vec::new();
    for (ring, lp) in flat.boundary.iter().enumerate() {
        let n = lp.len();
        if n < 3 {
            return Err(Error::Topology(format!("boundary loop {ring} has {n} vertices")));
        }
        for k in 0..n {
            let (i, j, l) = (lp[(k + n - 1) % n], lp[k], lp[(k + 1) % n]);
            let a = flat.vertices[i].dist(flat.vertices[j]);
            let b = flat.vertices[j].dist(flat.vertices[l]);
            if !(a > T::zero()) {
                return Err(Error::ZeroLengthEdge(i, j));
            }
            if !(b > T::zero()) {
                return Err(Error::ZeroLengthEdge(j, l));
            }
            out.push(Bubble::boundary(flat.vertices[j], (a + b) / T::lit(4.0), ring as u32));
        }
    }
    Ok(out)
}

/// Normalized inverse-length weights `w_j = (1 / l_j) / sum_k (1 / l_k)`.
pub fn inverse_length_weights<T: Real>(lengths: &[T]) -> Vec<T> {
    let total = lengths.iter().fold(T::zero(), |s, &l| s + T::one() / l);
    lengths.iter().map(|&l| (T::one() / l) / total).collect()
}

/// `r = 1/2 sum_j w_j l_j` with inverse-length weights.
pub fn interior_radius<T: Real>(lengths: &[T]) -> T {
    let w = inverse_length_weights(lengths);
    w.iter().zip(lengths).fold(T::zero(), |s, (&w, &l)| s + w * l) * T::half()
}

/// One interior anchor per non-boundary vertex, radius from its incident
/// edge lengths (see [`interior_radius`]), in vertex order.
pub fn reconstruct_interior_bubbles<T: Real>(flat: &PlanarMesh<T>) -> Result<Vec<Bubble<T>>> {
    let n = flat.vertices.len();
    let mut on_boundary = vec![false; n];
    for lp in &flat.boundary {
        for &v in lp {
            on_boundary[v] = true;
        }
    }
    let nbrs = vertex_neighbors(n, &flat.faces);
    let mut out = Vec::new();
    for v in 0..n {
        if on_boundary[v] {
            continue;
        }
        if nbrs[v].is_empty() {
            return Err(Error::IsolatedVertex(v));
        }
        let lengths: Vec<T> = nbrs[v]
            .iter()
            .map(|&u| flat.vertices[u].dist(flat.vertices[v]))
            .collect();
        if let Some(k) = lengths.iter().position(|l| !(*l > T::zero())) {
            return Err(Error::ZeroLengthEdge(v, nbrs[v][k]));
        }
        out.push(Bubble::anchor(flat.vertices[v], interior_radius(&lengths)));
    }
    Ok(out)
}

/// Extra mobile bubbles for the gaps between the anchors, from the rhombic
/// quadtree over the flat domain with radii interpolated from the anchors.
/// Candidates overlapping an anchor by more than half the smaller radius
/// are dropped.
pub fn fill_gaps<T: Real>(flat: &PlanarMesh<T>, anchors: &[Bubble<T>]) -> Result<Vec<Bubble<T>>> {
    if anchors.is_empty() {
        return Err(Error::NoAnchors);
    }
    let r_min = anchors.iter().map(|b| b.radius).fold(T::infinity(), T::min);
    let r_max = anchors.iter().map(|b| b.radius).fold(T::zero(), T::max);
    let sizing = Sizing::Anchors {
        field: AnchorField::new(anchors),
        r_min,
        r_max,
    };
    let outer = flat.loop_polygon(0);
    let holes = (1..flat.boundary.len()).map(|l| flat.loop_polygon(l)).collect();
    let domain = PackingDomain::new(outer, holes, sizing)?;
    let candidates = pack_interior_quadtree(&domain, anchors)?;

    let centers: Vec<_> = anchors.iter().map(|b| b.center).collect();
    let grid = PointGrid::new(&centers, T::two() * r_max);
    let limit = T::lit(FILL_MAX_OVERLAP);
    Ok(candidates
        .into_iter()
        .filter(|c| {
            let mut worst = T::neg_infinity();
            grid.for_each_near(c.center, c.radius + r_max, |j| {
                worst = worst.max(overlap_pairwise(&anchors[j], c));
            });
            worst <= limit
        })
        .collect())
}

/// Reconstructed boundary bubbles, interior anchors and gap fillers, in
/// that order.
pub fn initial_bubbles<T: Real>(flat: &PlanarMesh<T>) -> Result<Vec<Bubble<T>>> {
    let mut bubbles = reconstruct_boundary_bubbles(flat)?;
    bubbles.extend(reconstruct_interior_bubbles(flat)?);
    let fill = fill_gaps(flat, &bubbles)?;
    bubbles.extend(fill);
    Ok(bubbles)
}

/// Re-meshes a flat mesh: reconstruction, gap filling, boundary-region
/// quantity control against all reconstructed bubbles, relaxation and
/// triangulation. Boundary bubbles never move.
pub fn remesh_planar<T: Real>(
    flat: &PlanarMesh<T>,
    qc_threshold: T,
    dynamics: &DynamicsParams<T>,
    force: &ForceParams<T>,
) -> Result<(PlanarMesh<T>, ConvergenceTrace)> {
    let bubbles = initial_bubbles(flat)?;
    let (relaxed, trace) = relax_until_converged(
        bubbles,
        dynamics,
        force,
        Strategy::NewQc {
            threshold: qc_threshold,
        },
    )?;
    Ok((delaunay_triangulate(&relaxed)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;

    fn tri345() -> PlanarMesh<f64> {
        PlanarMesh::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(0.0, 3.0)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn boundary_radii_of_345_triangle() {
        let m = tri345();
        let b = reconstruct_boundary_bubbles(&m).unwrap();
        let r: Vec<(Vec2<f64>, f64)> = b.iter().map(|b| (b.center, b.radius)).collect();
        // vertex 0 touches edges 4 and 3, vertex 1 edges 4 and 5, vertex 2 edges 5 and 3
        let expect = [
            (Vec2::new(0.0, 0.0), 1.75),
            (Vec2::new(4.0, 0.0), 2.25),
            (Vec2::new(0.0, 3.0), 2.0),
        ];
        for (c, e) in expect {
            let got = r.iter().find(|(p, _)| *p == c).unwrap().1;
            assert!((got - e).abs() < 1e-12);
        }
        assert!(reconstruct_interior_bubbles(&m).unwrap().is_empty());
        assert!(fill_gaps(&m, &b).unwrap().is_empty());
    }

    #[test]
    fn interior_formula() {
        assert!((interior_radius(&[1.0f64, 2.0]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((interior_radius(&[0.7f64; 5]) - 0.35).abs() < 1e-12);
        assert!((interior_radius(&[1.0f64, 1.0, 100.0]) - 0.75).abs() < 0.01);
        let w = inverse_length_weights(&[0.3, 1.7, 2.2, 0.01]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_boundary_is_tangent() {
        let n = 12;
        let v: Vec<Vec2<f64>> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .chain(std::iter::once(Vec2::zero()))
            .collect();
        let f = (0..n).map(|k| [n, k, (k + 1) % n]).collect();
        let m = PlanarMesh::new(v, f).unwrap();
        let b = reconstruct_boundary_bubbles(&m).unwrap();
        let side = m.vertices[0].dist(m.vertices[1]);
        for k in 0..n {
            assert!((b[k].radius - side / 2.0).abs() < 1e-12);
            let d = b[k].center.dist(b[(k + 1) % n].center);
            assert!((d - b[k].radius - b[(k + 1) % n].radius).abs() < 1e-12);
        }
        let inner = reconstruct_interior_bubbles(&m).unwrap();
        assert_eq!(inner.len(), 1);
        assert!((inner[0].radius - 0.5).abs() < 1e-12);
    }
}
