//! Indexed triangle meshes, topology queries, I/O and quality metrics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{bbox2, bbox3, corner_angle2, corner_angle3, orient2, Vec2, Vec3};
use crate::scalar::Real;

pub mod io;
pub mod quality;

pub use io::{load_mesh, save_mesh, write_svg};
pub use quality::{hausdorff_estimate, quality_report, MeshQualityReport};

pub type Face = [usize; 3];

/// Triangle mesh embedded in 3D.
///
/// `uv` holds the parametric coordinates of each vertex when the mesh was
/// produced by sampling a parametric surface.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub faces: Vec<Face>,
    /// Boundary loops, each ordered along the boundary half-edges.
    pub boundary: Vec<Vec<usize>>,
    pub uv: Option<Vec<Vec2<T>>>,
}

/// Triangle mesh in the plane. Outer boundary loop first.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMesh<T> {
    pub vertices: Vec<Vec2<T>>,
    pub faces: Vec<Face>,
    pub boundary: Vec<Vec<usize>>,
}

fn check_indices(n: usize, faces: &[Face]) -> Result<()> {
    for (fi, f) in faces.iter().enumerate() {
        for &v in f {
            if v >= n {
                return Err(Error::IndexOutOfRange { face: fi, index: v });
            }
        }
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return Err(Error::Topology(format!("face {fi} repeats a vertex")));
        }
    }
    Ok(())
}

impl<T: Real> TriangleMesh<T> {
    /// Builds a mesh and its boundary loops. Only structural well-formedness
    /// is checked here; see [`validate_disk_topology`].
    pub fn new(vertices: Vec<Vec3<T>>, faces: Vec<Face>) -> Result<Self> {
        check_indices(vertices.len(), &faces)?;
        let boundary = boundary_loops(&faces);
        Ok(Self {
            vertices,
            faces,
            boundary,
            uv: None,
        })
    }

    pub fn with_uv(mut self, uv: Vec<Vec2<T>>) -> Result<Self> {
        if uv.len() != self.vertices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} parametric coordinates for {} vertices",
                uv.len(),
                self.vertices.len()
            )));
        }
        self.uv = Some(uv);
        Ok(self)
    }

    /// The (first) boundary loop; empty for closed meshes.
    pub fn boundary_loop(&self) -> &[usize] {
        self.boundary.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn face_points(&self, f: usize) -> [Vec3<T>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        edges(&self.faces)
    }

    pub fn total_area(&self) -> T {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn max_edge_length(&self) -> T {
        self.edges()
            .iter()
            .map(|&[a, b]| self.vertices[a].dist(self.vertices[b]))
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> PlanarMesh<T> {
    /// Builds a planar mesh; boundary loops are sorted so that the loop with
    /// the largest signed area (the outer one) comes first.
    pub fn new(vertices: Vec<Vec2<T>>, faces: Vec<Face>) -> Result<Self> {
        check_indices(vertices.len(), &faces)?;
        let mut boundary = boundary_loops(&faces);
        let area = |l: &Vec<usize>| {
            let poly: Vec<_> = l.iter().map(|&i| vertices[i]).collect();
            crate::geom::polygon_area(&poly)
        };
        // stable sort keeps traversal order among equal areas
        boundary.sort_by(|a, b| area(b).partial_cmp(&area(a)).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self {
            vertices,
            faces,
            boundary,
        })
    }

    pub fn boundary_loop(&self) -> &[usize] {
        self.boundary.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn face_points(&self, f: usize) -> [Vec2<T>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of face `f`, positive when counterclockwise.
    pub fn signed_area(&self, f: usize) -> T {
        let [a, b, c] = self.face_points(f);
        orient2(a, b, c) * T::half()
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        edges(&self.faces)
    }

    /// Polygon of the given boundary loop.
    pub fn loop_polygon(&self, l: usize) -> Vec<Vec2<T>> {
        self.boundary[l].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Lifts the planar mesh to `z = 0`.
    pub fn to_3d(&self) -> TriangleMesh<T> {
        TriangleMesh {
            vertices: self.vertices.iter().map(|p| Vec3::new(p.x, p.y, T::zero())).collect(),
            faces: self.faces.clone(),
            boundary: self.boundary.clone(),
            uv: None,
        }
    }
}

/// Per-face geometry shared by planar and spatial meshes.
pub trait MeshGeometry<T: Real> {
    fn num_vertices(&self) -> usize;
    fn num_faces(&self) -> usize;
    fn faces(&self) -> &[Face];
    /// Interior angles (radians) at the three corners of face `f`.
    fn face_angles(&self, f: usize) -> [T; 3];
    fn face_area(&self, f: usize) -> T;
    fn bbox_diagonal(&self) -> T;
    fn edge_length(&self, a: usize, b: usize) -> T;
}

impl<T: Real> MeshGeometry<T> for TriangleMesh<T> {
    fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    fn num_faces(&self) -> usize {
        self.faces.len()
    }
    fn faces(&self) -> &[Face] {
        &self.faces
    }
    fn face_angles(&self, f: usize) -> [T; 3] {
        let [a, b, c] = self.face_points(f);
        [corner_angle3(a, b, c), corner_angle3(b, c, a), corner_angle3(c, a, b)]
    }
    fn face_area(&self, f: usize) -> T {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(c - a).norm() * T::half()
    }
    fn bbox_diagonal(&self) -> T {
        bbox3(self.vertices.iter().copied())
            .map(|(lo, hi)| lo.dist(hi))
            .unwrap_or_else(T::zero)
    }
    fn edge_length(&self, a: usize, b: usize) -> T {
        self.vertices[a].dist(self.vertices[b])
    }
}

impl<T: Real> MeshGeometry<T> for PlanarMesh<T> {
    fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    fn num_faces(&self) -> usize {
        self.faces.len()
    }
    fn faces(&self) -> &[Face] {
        &self.faces
    }
    fn face_angles(&self, f: usize) -> [T; 3] {
        let [a, b, c] = self.face_points(f);
        [corner_angle2(a, b, c), corner_angle2(b, c, a), corner_angle2(c, a, b)]
    }
    fn face_area(&self, f: usize) -> T {
        self.signed_area(f).abs()
    }
    fn bbox_diagonal(&self) -> T {
        bbox2(self.vertices.iter().copied())
            .map(|(lo, hi)| lo.dist(hi))
            .unwrap_or_else(T::zero)
    }
    fn edge_length(&self, a: usize, b: usize) -> T {
        self.vertices[a].dist(self.vertices[b])
    }
}

/// Faces whose area is below `1e-14 * diag^2`.
pub fn degenerate_faces<T: Real, M: MeshGeometry<T>>(mesh: &M) -> Vec<usize> {
    let d = mesh.bbox_diagonal();
    let tol = T::lit(1e-14) * d * d;
    (0..mesh.num_faces())
        .filter(|&f| !(mesh.face_area(f) >= tol) || mesh.face_area(f) == T::zero())
        .collect()
}

/// Unique undirected edges, sorted lexicographically by `(min, max)`.
pub fn edges(faces: &[Face]) -> Vec<[usize; 2]> {
    let mut e: Vec<[usize; 2]> = faces
        .iter()
        .flat_map(|f| {
            (0..3).map(move |k| {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                [a.min(b), a.max(b)]
            })
        })
        .collect();
    e.sort_unstable();
    e.dedup();
    e
}

/// Sorted neighbor lists of every vertex.
pub fn vertex_neighbors(n: usize, faces: &[Face]) -> Vec<Vec<usize>> {
    let mut nb = vec![Vec::new(); n];
    for [a, b] in edges(faces) {
        nb[a].push(b);
        nb[b].push(a);
    }
    for l in &mut nb {
        l.sort_unstable();
    }
    nb
}

/// Boundary loops traced along boundary half-edges (those without a twin).
/// Loops are reported in order of the first face that touches them.
pub fn boundary_loops(faces: &[Face]) -> Vec<Vec<usize>> {
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            directed.entry((f[k], f[(k + 1) % 3])).or_insert(fi);
        }
    }
    // boundary half-edges in face order
    let mut outgoing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut order = Vec::new();
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if !directed.contains_key(&(b, a)) {
                outgoing.entry(a).or_default().push(b);
                order.push((a, b));
            }
        }
    }
    let mut used: BTreeMap<(usize, usize), bool> = order.iter().map(|&e| (e, false)).collect();
    let mut loops = Vec::new();
    for &(a0, b0) in &order {
        if used[&(a0, b0)] {
            continue;
        }
        let mut lp = vec![a0];
        used.insert((a0, b0), true);
        let mut cur = b0;
        let mut guard = 0;
        while cur != a0 && guard <= order.len() {
            lp.push(cur);
            let next = outgoing
                .get(&cur)
                .and_then(|outs| outs.iter().copied().find(|&n| !used[&(cur, n)]));
            match next {
                Some(n) => {
                    used.insert((cur, n), true);
                    cur = n;
                }
                None => break,
            }
            guard += 1;
        }
        loops.push(lp);
    }
    loops
}

/// Checks that the mesh is an orientable manifold disk: every edge has one
/// or two incident faces with consistent orientation, `V - E + F = 1`, and
/// there is exactly one boundary loop.
pub fn validate_disk_topology(vertex_count: usize, faces: &[Face]) -> Result<()> {
    check_indices(vertex_count, faces)?;
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in faces {
        for k in 0..3 {
            *directed.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
        }
    }
    if let Some(((a, b), _)) = directed.iter().find(|(_, &c)| c > 1) {
        return Err(Error::Topology(format!(
            "non-manifold or inconsistently oriented edge ({a}, {b})"
        )));
    }
    let mut outgoing_boundary = vec![0usize; vertex_count];
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) {
            outgoing_boundary[a] += 1;
        }
    }
    if let Some(v) = outgoing_boundary.iter().position(|&c| c > 1) {
        return Err(Error::Topology(format!("non-manifold vertex {v}")));
    }
    let e = edges(faces).len();
    let chi = vertex_count as i64 - e as i64 + faces.len() as i64;
    let loops = boundary_loops(faces).len();
    if loops == 0 {
        return Err(Error::Topology(format!(
            "closed surface without boundary (Euler characteristic {chi})"
        )));
    }
    if loops != 1 {
        return Err(Error::Topology(format!("{loops} boundary loops, expected 1")));
    }
    if chi != 1 {
        return Err(Error::Topology(format!("Euler characteristic {chi}, expected 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus() -> (usize, Vec<Face>) {
        // square ring: outer 0..4, inner 4..8
        let faces = vec![
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        (8, faces)
    }

    #[test]
    fn single_triangle_is_a_disk() {
        validate_disk_topology(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(boundary_loops(&[[0, 1, 2]]), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn tetrahedron_is_rejected() {
        let faces = [[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
        let err = validate_disk_topology(4, &faces).unwrap_err();
        assert!(err.to_string().contains("closed"), "{err}");
    }

    /// Counts boundary loops by flood-filling boundary edges as an
    /// undirected graph, independently of the half-edge traversal.
    fn count_boundary_components(faces: &[Face]) -> usize {
        let mut count: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for f in faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let bedges: Vec<[usize; 2]> = count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut comps = 0;
        for e in &bedges {
            if seen.contains(&e[0]) {
                continue;
            }
            comps += 1;
            let mut stack = vec![e[0]];
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                for f in &bedges {
                    if f[0] == v {
                        stack.push(f[1]);
                    } else if f[1] == v {
                        stack.push(f[0]);
                    }
                }
            }
        }
        comps
    }

    #[test]
    fn annulus_is_rejected_for_two_loops() {
        let (n, faces) = annulus();
        assert_eq!(count_boundary_components(&faces), 2);
        assert_eq!(boundary_loops(&faces).len(), 2);
        let err = validate_disk_topology(n, &faces).unwrap_err();
        assert!(err.to_string().contains("2 boundary loops"), "{err}");
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let faces = [[0, 1, 2], [0, 1, 3]];
        assert!(validate_disk_topology(4, &faces).is_err());
    }

    #[test]
    fn outer_loop_sorted_first() {
        let (_, faces) = annulus();
        let v = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(0.0, 3.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(1.0, 2.0),
        ];
        let m = PlanarMesh::new(v, faces).unwrap();
        assert_eq!(m.boundary.len(), 2);
        assert!(m.boundary_loop().iter().all(|&i| i < 4));
        for f in 0..m.faces.len() {
            assert!(m.signed_area(f) > 0.0);
        }
    }
}
