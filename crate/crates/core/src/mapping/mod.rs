//! Triangulation of bubble centers and the barycentric map from a re-meshed
//! plane back to the surface.

mod delaunay;

pub use delaunay::{delaunay_triangulate, triangulate};

use crate::error::{Error, Result};
use crate::geom::{bbox2, closest_on_segment, orient2, Vec2, Vec3};
use crate::mesh::{PlanarMesh, TriangleMesh};
use crate::scalar::Real;

/// Position of a point inside a face of a planar mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarycentricLocation<T> {
    pub face: usize,
    pub coords: [T; 3],
}

impl<T: Real> BarycentricLocation<T> {
    /// Affine combination of per-vertex values of the located face.
    pub fn interpolate<V>(&self, faces: &[[usize; 3]], values: &[V]) -> V
    where
        V: Copy + std::ops::Mul<T, Output = V> + std::ops::Add<Output = V>,
    {
        let f = faces[self.face];
        values[f[0]] * self.coords[0] + values[f[1]] * self.coords[1] + values[f[2]] * self.coords[2]
    }
}

/// Uniform grid over face bounding boxes of a planar mesh.
#[derive(Debug, Clone)]
pub struct FaceLocator<T> {
    lo: Vec2<T>,
    cell: T,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
    snap: T,
}

impl<T: Real> FaceLocator<T> {
    pub fn new(mesh: &PlanarMesh<T>) -> Self {
        let (lo, hi) = bbox2(mesh.vertices.iter().copied()).unwrap_or((Vec2::zero(), Vec2::zero()));
        let diag = (hi - lo).norm();
        let snap = T::lit(1e-9) * diag;
        let w = (hi.x - lo.x).max(T::min_positive_value());
        let h = (hi.y - lo.y).max(T::min_positive_value());
        let target = T::from_count(mesh.faces.len().max(1));
        let cell = ((w * h) / target).sqrt().max(w.max(h) / T::lit(4096.0));
        let nx = (w / cell).ceil().to_usize().unwrap_or(1).max(1);
        let ny = (h / cell).ceil().to_usize().unwrap_or(1).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        let ix = |x: T| {
            ((x - lo.x) / cell)
                .floor()
                .to_i64()
                .unwrap_or(0)
                .clamp(0, nx as i64 - 1) as usize
        };
        let iy = |y: T| {
            ((y - lo.y) / cell)
                .floor()
                .to_i64()
                .unwrap_or(0)
                .clamp(0, ny as i64 - 1) as usize
        };
        for f in 0..mesh.faces.len() {
            let (a, b) = bbox2(mesh.face_points(f)).unwrap();
            for y in iy(a.y - snap)..=iy(b.y + snap) {
                for x in ix(a.x - snap)..=ix(b.x + snap) {
                    cells[y * nx + x].push(f);
                }
            }
        }
        Self {
            lo,
            cell,
            nx,
            ny,
            cells,
            snap,
        }
    }

    fn candidates(&self, p: Vec2<T>) -> &[usize] {
        let x = ((p.x - self.lo.x) / self.cell).floor().to_i64().unwrap_or(-1);
        let y = ((p.y - self.lo.y) / self.cell).floor().to_i64().unwrap_or(-1);
        let inside = |v: i64, n: usize, q: T, lo: T| {
            if (0..n as i64).contains(&v) {
                Some(v as usize)
            } else if (q - lo).abs() <= self.snap || (v == n as i64) {
                // on the far edge of the box, or within snapping distance
                Some(v.clamp(0, n as i64 - 1) as usize)
            } else {
                None
            }
        };
        match (inside(x, self.nx, p.x, self.lo.x), inside(y, self.ny, p.y, self.lo.y)) {
            (Some(x), Some(y)) => &self.cells[y * self.nx + x],
            _ => &[],
        }
    }

    /// Face containing `p` and its barycentric coordinates.
    ///
    /// Points on shared edges resolve to the lowest face index. Points just
    /// outside the mesh (within `1e-9` of the bounding-box diagonal) snap to
    /// the nearest face; coordinates are clamped to the simplex and
    /// renormalized.
    pub fn locate(&self, mesh: &PlanarMesh<T>, p: Vec2<T>) -> Result<BarycentricLocation<T>> {
        let mut best: Option<(T, usize, [T; 3])> = None;
        for &f in self.candidates(p) {
            let [a, b, c] = mesh.face_points(f);
            let area = orient2(a, b, c);
            let l = [
                orient2(p, b, c) / area,
                orient2(a, p, c) / area,
                orient2(a, b, p) / area,
            ];
            let min = l[0].min(l[1]).min(l[2]);
            if min >= -T::lit(1e-12) {
                return Ok(BarycentricLocation {
                    face: f,
                    coords: clamp_simplex(l),
                });
            }
            let dist = [(a, b), (b, c), (c, a)]
                .iter()
                .map(|&(s, t)| closest_on_segment(p, s, t).dist(p))
                .fold(T::infinity(), T::min);
            if best.is_none_or(|(d, _, _)| dist < d) {
                best = Some((dist, f, l));
            }
        }
        match best {
            Some((d, f, l)) if d <= self.snap => Ok(BarycentricLocation {
                face: f,
                coords: clamp_simplex(l),
            }),
            _ => Err(Error::OutsideDomain),
        }
    }
}

fn clamp_simplex<T: Real>(l: [T; 3]) -> [T; 3] {
    let c = l.map(|x| x.max(T::zero()));
    let s = c[0] + c[1] + c[2];
    c.map(|x| x / s)
}

/// Convenience wrapper around [`FaceLocator::locate`].
pub fn locate<T: Real>(flat: &PlanarMesh<T>, point: Vec2<T>, index: &FaceLocator<T>) -> Result<BarycentricLocation<T>> {
    index.locate(flat, point)
}

/// Lifts a re-meshed plane onto the surface: every vertex of `new_flat` is
/// located in `initial_flat` and mapped to the same affine combination of
/// the corresponding `initial_surface` vertices. Parametric coordinates are
/// carried along when the surface has them.
pub fn inverse_map<T: Real>(
    new_flat: &PlanarMesh<T>,
    initial_flat: &PlanarMesh<T>,
    initial_surface: &TriangleMesh<T>,
) -> Result<TriangleMesh<T>> {
    if initial_flat.faces != initial_surface.faces || initial_flat.vertices.len() != initial_surface.vertices.len() {
        return Err(Error::Topology("flat and surface meshes differ in connectivity".into()));
    }
    let index = FaceLocator::new(initial_flat);
    let mut verts: Vec<Vec3<T>> = Vec::with_capacity(new_flat.vertices.len());
    let mut uv = Vec::new();
    let mut failed = Vec::new();
    for (i, &p) in new_flat.vertices.iter().enumerate() {
        match index.locate(initial_flat, p) {
            Ok(loc) => {
                verts.push(loc.interpolate(&initial_flat.faces, &initial_surface.vertices));
                if let Some(src) = &initial_surface.uv {
                    uv.push(loc.interpolate(&initial_flat.faces, src));
                }
            }
            Err(_) => {
                failed.push(i);
                verts.push(Vec3::zero());
            }
        }
    }
    if !failed.is_empty() {
        return Err(Error::Unlocatable(failed));
    }
    let mesh = TriangleMesh::new(verts, new_flat.faces.clone())?;
    if initial_surface.uv.is_some() {
        mesh.with_uv(uv)
    } else {
        Ok(mesh)
    }
}
