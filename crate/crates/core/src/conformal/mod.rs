//! Free-boundary conformal flattening of disk-topology meshes.
//!
//! The flat positions minimize the discrete conformal energy, the cotangent
//! Dirichlet energy minus the signed area enclosed by the boundary, with two
//! boundary vertices pinned. The result is rescaled to the surface area and
//! centered at the origin.

mod sparse;

pub use sparse::{conjugate_gradient, CsrMatrix};

use crate::error::{Error, Result};
use crate::geom::{Vec2, Vec3};
use crate::mesh::{degenerate_faces, edges, validate_disk_topology, PlanarMesh, TriangleMesh};
use crate::scalar::Real;

/// Flattening output. Vertex `i` of `flat` corresponds to vertex `i` of the
/// input and faces are identical.
#[derive(Debug, Clone)]
pub struct FlattenResult<T> {
    pub flat: PlanarMesh<T>,
    /// Sorted unique edges, aligned with `edge_scale`.
    pub edges: Vec<[usize; 2]>,
    /// Flat edge length over surface edge length.
    pub edge_scale: Vec<T>,
    /// Ratio of the singular values of each face's affine map (1 when
    /// conformal).
    pub distortion: Vec<T>,
}

impl<T: Real> FlattenResult<T> {
    pub fn mean_distortion(&self) -> T {
        let n = T::from_count(self.distortion.len().max(1));
        self.distortion.iter().copied().fold(T::zero(), |a, b| a + b) / n
    }

    pub fn max_distortion(&self) -> T {
        self.distortion.iter().copied().fold(T::zero(), T::max)
    }
}

fn cot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a.dot(b) / a.cross(b).norm()
}

/// Vertex at roughly half the arc length along the loop from `lp[0]`.
fn opposite_on_loop<T: Real>(mesh: &TriangleMesh<T>, lp: &[usize]) -> usize {
    let n = lp.len();
    let len = |k: usize| mesh.vertices[lp[k]].dist(mesh.vertices[lp[(k + 1) % n]]);
    let total = (0..n).fold(T::zero(), |s, k| s + len(k));
    let mut acc = T::zero();
    let mut best = (T::infinity(), 1);
    for k in 1..n {
        acc = acc + len(k - 1);
        let d = (acc - total * T::half()).abs();
        if d < best.0 {
            best = (d, k);
        }
    }
    lp[best.1]
}

/// Flattens a disk-topology mesh conformally.
pub fn flatten<T: Real>(mesh: &TriangleMesh<T>) -> Result<FlattenResult<T>> {
    let n = mesh.vertices.len();
    validate_disk_topology(n, &mesh.faces)?;
    if let Some(&f) = degenerate_faces(mesh).first() {
        let [a, b, c] = mesh.face_points(f);
        return Err(Error::DegenerateFace {
            face: f,
            area: ((b - a).cross(c - a).norm() * T::half()).as_f64(),
        });
    }
    let lp = mesh.boundary_loop().to_vec();
    let p0 = lp[0];
    let p1 = opposite_on_loop(mesh, &lp);
    let pin_dist = mesh.vertices[p0].dist(mesh.vertices[p1]);

    // unknowns: x of free vertices, then y
    let mut slot = vec![usize::MAX; n];
    let mut m = 0;
    for (v, s) in slot.iter_mut().enumerate() {
        if v != p0 && v != p1 {
            *s = m;
            m += 1;
        }
    }
    let fixed = |v: usize| -> Option<Vec2<T>> {
        if v == p0 {
            Some(Vec2::zero())
        } else if v == p1 {
            Some(Vec2::new(pin_dist, T::zero()))
        } else {
            None
        }
    };

    // quadratic form entries over (vertex, coordinate) pairs
    let mut entries: Vec<(usize, usize, usize, usize, T)> = Vec::new();
    let half = T::half();
    for f in &mesh.faces {
        for k in 0..3 {
            let (i, j, o) = (f[(k + 1) % 3], f[(k + 2) % 3], f[k]);
            let po = mesh.vertices[o];
            let w = half * cot(mesh.vertices[i] - po, mesh.vertices[j] - po);
            for c in 0..2 {
                entries.push((i, c, i, c, w));
                entries.push((j, c, j, c, w));
                entries.push((i, c, j, c, -w));
                entries.push((j, c, i, c, -w));
            }
        }
    }
    // minus the enclosed area: A = 1/2 sum (x_k y_{k+1} - x_{k+1} y_k)
    let nb = lp.len();
    for k in 0..nb {
        let (a, b) = (lp[k], lp[(k + 1) % nb]);
        entries.push((a, 0, b, 1, -half));
        entries.push((b, 1, a, 0, -half));
        entries.push((b, 0, a, 1, half));
        entries.push((a, 1, b, 0, half));
    }

    let mut triplets = Vec::new();
    let mut rhs = vec![T::zero(); 2 * m];
    for (v, cv, u, cu, w) in entries {
        if fixed(v).is_some() {
            continue;
        }
        let row = slot[v] + cv * m;
        match fixed(u) {
            Some(p) => {
                let val = if cu == 0 { p.x } else { p.y };
                rhs[row] = rhs[row] - w * val;
            }
            None => triplets.push((row, slot[u] + cu * m, w)),
        }
    }
    let a = CsrMatrix::from_triplets(2 * m, triplets);
    let tol = (T::epsilon() * T::lit(64.0)).max(T::lit(1e-13));
    let sol = conjugate_gradient(&a, &rhs, tol, 20 * (2 * m) + 1000)?;

    let mut uv: Vec<Vec2<T>> = (0..n)
        .map(|v| fixed(v).unwrap_or_else(|| Vec2::new(sol[slot[v]], sol[slot[v] + m])))
        .collect();

    let flat_area = mesh.faces.iter().fold(T::zero(), |s, f| {
        s + (uv[f[1]] - uv[f[0]]).cross(uv[f[2]] - uv[f[0]]) * half
    });
    let flipped = mesh
        .faces
        .iter()
        .filter(|f| !((uv[f[1]] - uv[f[0]]).cross(uv[f[2]] - uv[f[0]]) > T::zero()))
        .count();
    if flipped > 0 || !(flat_area > T::zero()) {
        return Err(Error::FlattenFailed { flipped });
    }
    let scale = (mesh.total_area() / flat_area).sqrt();
    let mut centroid = Vec2::zero();
    for f in &mesh.faces {
        let area = (uv[f[1]] - uv[f[0]]).cross(uv[f[2]] - uv[f[0]]) * half;
        centroid += (uv[f[0]] + uv[f[1]] + uv[f[2]]) * (area / T::lit(3.0));
    }
    centroid = centroid / flat_area;
    for p in &mut uv {
        *p = (*p - centroid) * scale;
    }

    let flat = PlanarMesh::new(uv, mesh.faces.clone())?;
    let edges = edges(&mesh.faces);
    let edge_scale = conformal_factors(mesh, &flat)?;
    let distortion = (0..mesh.faces.len()).map(|f| face_distortion(mesh, &flat, f)).collect();
    Ok(FlattenResult {
        flat,
        edges,
        edge_scale,
        distortion,
    })
}

/// Singular value ratio of the affine map taking surface face `f` to its
/// flat image.
fn face_distortion<T: Real>(mesh: &TriangleMesh<T>, flat: &PlanarMesh<T>, f: usize) -> T {
    let [a, b, c] = mesh.face_points(f);
    let e1 = (b - a).normalized();
    let normal = (b - a).cross(c - a).normalized();
    let e2 = normal.cross(e1);
    // source triangle in its own plane
    let q1 = Vec2::new((b - a).norm(), T::zero());
    let q2 = Vec2::new((c - a).dot(e1), (c - a).dot(e2));
    let [u0, u1, u2] = flat.face_points(f);
    let (d1, d2) = (u1 - u0, u2 - u0);
    // J = [d1 d2] * inverse([q1 q2])
    let det = q1.x * q2.y - q2.x * q1.y;
    let (i11, i12, i21, i22) = (q2.y / det, -q2.x / det, -q1.y / det, q1.x / det);
    let j11 = d1.x * i11 + d2.x * i21;
    let j12 = d1.x * i12 + d2.x * i22;
    let j21 = d1.y * i11 + d2.y * i21;
    let j22 = d1.y * i12 + d2.y * i22;
    // singular values of a 2x2 matrix
    let e = (j11 + j22) * T::half();
    let ff = (j11 - j22) * T::half();
    let g = (j21 + j12) * T::half();
    let h = (j21 - j12) * T::half();
    let qq = (e * e + h * h).sqrt();
    let rr = (ff * ff + g * g).sqrt();
    let s1 = qq + rr;
    let s2 = (qq - rr).abs();
    s1 / s2
}

/// Flat length over surface length for every edge of `mesh`, in sorted
/// unique edge order.
pub fn conformal_factors<T: Real>(mesh: &TriangleMesh<T>, flat: &PlanarMesh<T>) -> Result<Vec<T>> {
    if mesh.faces != flat.faces {
        return Err(Error::Topology("surface and flat meshes differ in connectivity".into()));
    }
    edges(&mesh.faces)
        .into_iter()
        .map(|[i, j]| {
            let l = mesh.vertices[i].dist(mesh.vertices[j]);
            if !(l > T::zero()) {
                return Err(Error::ZeroLengthEdge(i, j));
            }
            Ok(flat.vertices[i].dist(flat.vertices[j]) / l)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::corner_angle2;

    fn disk(rings: usize, z: impl Fn(f64, f64) -> f64) -> TriangleMesh<f64> {
        let mut v = vec![Vec3::new(0.0, 0.0, z(0.0, 0.0))];
        let mut f = Vec::new();
        let start = |r: usize| if r == 0 { 0 } else { 1 + 6 * r * (r - 1) / 2 };
        for r in 1..=rings {
            for k in 0..6 * r {
                let t = std::f64::consts::TAU * k as f64 / (6 * r) as f64;
                let (x, y) = (r as f64 / rings as f64 * t.cos(), r as f64 / rings as f64 * t.sin());
                v.push(Vec3::new(x, y, z(x, y)));
            }
        }
        for r in 1..=rings {
            let (s, n) = (start(r), 6 * r);
            if r == 1 {
                for k in 0..6 {
                    f.push([0, s + k, s + (k + 1) % 6]);
                }
                continue;
            }
            let (ps, pn) = (start(r - 1), 6 * (r - 1));
            // walk both rings by angle
            let (mut i, mut j) = (0, 0);
            while i < n || j < pn {
                let ai = i as f64 / n as f64;
                let aj = j as f64 / pn as f64;
                if j >= pn || (i < n && ai <= aj) {
                    f.push([s + i % n, s + (i + 1) % n, ps + j % pn]);
                    i += 1;
                } else {
                    f.push([ps + j % pn, s + i % n, ps + (j + 1) % pn]);
                    j += 1;
                }
            }
        }
        TriangleMesh::new(v, f).unwrap()
    }

    #[test]
    fn planar_disk_is_congruent() {
        let m = disk(5, |x, y| 0.0 * x * y);
        let r = flatten(&m).unwrap();
        assert_eq!(r.flat.faces, m.faces);
        for (fi, f) in m.faces.iter().enumerate() {
            let p = m.face_points(fi).map(|p| Vec2::new(p.x, p.y));
            let q = r.flat.face_points(fi);
            for k in 0..3 {
                let a = corner_angle2(p[(k + 2) % 3], p[k], p[(k + 1) % 3]);
                let b = corner_angle2(q[(k + 2) % 3], q[k], q[(k + 1) % 3]);
                assert!((a - b).abs() < 1e-9, "face {:?}", f);
            }
        }
        for s in &r.edge_scale {
            assert!((s - 1.0).abs() < 1e-9);
        }
        assert_eq!(conformal_factors(&m, &r.flat).unwrap(), r.edge_scale);
    }

    #[test]
    fn scaled_copy_factors() {
        let m = disk(2, |_, _| 0.0);
        let flat = PlanarMesh::new(
            m.vertices.iter().map(|p| Vec2::new(2.0 * p.x, 2.0 * p.y)).collect(),
            m.faces.clone(),
        )
        .unwrap();
        for s in conformal_factors(&m, &flat).unwrap() {
            assert!((s - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn curved_cap_flattens_without_flips() {
        let m = disk(6, |x, y| 0.5 * (x * x + y * y));
        let r = flatten(&m).unwrap();
        for f in 0..r.flat.faces.len() {
            assert!(r.flat.signed_area(f) > 0.0);
        }
        assert!(r.mean_distortion() >= 1.0);
        let lo = r.edge_scale.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.edge_scale.iter().copied().fold(0.0f64, f64::max);
        assert!(hi / lo > 1.0);
    }

    #[test]
    fn closed_mesh_rejected() {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let m = TriangleMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]).unwrap();
        assert!(flatten(&m).is_err());
    }
}
