//! Incremental Bowyer-Watson triangulation with exact predicates,
//! constraint recovery by edge flips and polygon culling.

use std::collections::{HashMap, HashSet};

use robust::{incircle, orient2d, Coord};

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::geom::{point_in_polygon, Vec2};
use crate::mesh::PlanarMesh;
use crate::pack::boundary_rings;
use crate::scalar::Real;

const NONE: usize = usize::MAX;

fn c(p: Vec2<f64>) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

struct Triangulation {
    pts: Vec<Vec2<f64>>,
    tris: Vec<[usize; 3]>,
    nbr: Vec<[usize; 3]>,
    alive: Vec<bool>,
    vert_tri: Vec<usize>,
    last: usize,
}

impl Triangulation {
    fn orient(&self, a: usize, b: usize, p: usize) -> f64 {
        orient2d(c(self.pts[a]), c(self.pts[b]), c(self.pts[p]))
    }

    fn push(&mut self, t: [usize; 3], n: [usize; 3]) -> usize {
        let id = self.tris.len();
        self.tris.push(t);
        self.nbr.push(n);
        self.alive.push(true);
        for v in t {
            self.vert_tri[v] = id;
        }
        id
    }

    fn replace_nbr(&mut self, t: usize, old: usize, new: usize) {
        if t == NONE {
            return;
        }
        for k in 0..3 {
            if self.nbr[t][k] == old {
                self.nbr[t][k] = new;
                return;
            }
        }
    }

    /// Visibility walk to the triangle containing point `p` (on its closure).
    fn locate(&mut self, p: usize) -> usize {
        let mut t = self.last;
        if !self.alive[t] {
            t = self.alive.iter().rposition(|&a| a).unwrap();
        }
        let mut steps = 0usize;
        'walk: loop {
            steps += 1;
            if steps > 4 * self.tris.len() + 64 {
                break;
            }
            let tri = self.tris[t];
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if self.orient(a, b, p) < 0.0 {
                    let n = self.nbr[t][k];
                    if n != NONE {
                        t = n;
                        continue 'walk;
                    }
                }
            }
            return t;
        }
        // fallback: exhaustive search
        (0..self.tris.len())
            .find(|&t| {
                self.alive[t] && {
                    let tri = self.tris[t];
                    (0..3).all(|k| self.orient(tri[(k + 1) % 3], tri[(k + 2) % 3], p) >= 0.0)
                }
            })
            .expect("point inside super triangle")
    }

    fn in_circle(&self, t: usize, p: usize) -> f64 {
        let [a, b, d] = self.tris[t];
        incircle(c(self.pts[a]), c(self.pts[b]), c(self.pts[d]), c(self.pts[p]))
    }

    /// Inserts point `p`; returns false for duplicates of an existing vertex.
    fn insert(&mut self, p: usize) -> bool {
        let start = self.locate(p);
        let tri = self.tris[start];
        if tri.iter().any(|&v| self.pts[v] == self.pts[p]) {
            return false;
        }
        let mut cavity = vec![start];
        let mut in_cavity: HashSet<usize> = HashSet::from([start]);
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for k in 0..3 {
                let n = self.nbr[t][k];
                if n != NONE && !in_cavity.contains(&n) && self.in_circle(n, p) > 0.0 {
                    in_cavity.insert(n);
                    cavity.push(n);
                }
            }
        }
        // boundary edges of the cavity, each becoming a triangle with p
        let mut starts: HashMap<usize, usize> = HashMap::new();
        let mut ends: HashMap<usize, usize> = HashMap::new();
        let mut created = Vec::new();
        for &t in &cavity {
            for k in 0..3 {
                let n = self.nbr[t][k];
                if n != NONE && in_cavity.contains(&n) {
                    continue;
                }
                let a = self.tris[t][(k + 1) % 3];
                let b = self.tris[t][(k + 2) % 3];
                let id = self.push([a, b, p], [NONE, NONE, n]);
                self.replace_nbr(n, t, id);
                starts.insert(a, id);
                ends.insert(b, id);
                created.push(id);
            }
        }
        for &id in &created {
            let [a, b, _] = self.tris[id];
            // opposite a: edge (b, p), shared with the triangle starting at b
            self.nbr[id][0] = starts[&b];
            // opposite b: edge (p, a), shared with the triangle ending at a
            self.nbr[id][1] = ends[&a];
        }
        for &t in &cavity {
            self.alive[t] = false;
        }
        self.last = created[0];
        true
    }

    /// Flips the edge of `t` opposite its vertex `k`. Returns the two new
    /// triangles, or `None` if the quadrilateral is not strictly convex.
    fn flip(&mut self, t: usize, k: usize) -> Option<(usize, usize)> {
        let u = self.nbr[t][k];
        if u == NONE {
            return None;
        }
        let a = self.tris[t][k];
        let b = self.tris[t][(k + 1) % 3];
        let cc = self.tris[t][(k + 2) % 3];
        let ku = (0..3).find(|&j| self.nbr[u][j] == t)?;
        let d = self.tris[u][ku];
        if !(self.orient(a, b, d) > 0.0 && self.orient(a, d, cc) > 0.0) {
            return None;
        }
        let n_b = self.nbr[t][(k + 1) % 3]; // edge c-a
        let n_c = self.nbr[t][(k + 2) % 3]; // edge a-b
                                            // u rotated to [d, c, b]
        let m_c = self.nbr[u][(ku + 1) % 3]; // opposite c: edge b-d
        let m_b = self.nbr[u][(ku + 2) % 3]; // opposite b: edge d-c
        debug_assert_eq!(self.tris[u][(ku + 1) % 3], cc);
        self.tris[t] = [a, b, d];
        self.nbr[t] = [m_c, u, n_c];
        self.tris[u] = [a, d, cc];
        self.nbr[u] = [m_b, n_b, t];
        self.replace_nbr(m_c, u, t);
        self.replace_nbr(n_b, t, u);
        for v in [a, b, d] {
            self.vert_tri[v] = t;
        }
        self.vert_tri[cc] = u;
        Some((t, u))
    }

    fn edge_in(&self, t: usize, a: usize, b: usize) -> Option<usize> {
        let tri = self.tris[t];
        (0..3).find(|&k| {
            let (x, y) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            (x == a && y == b) || (x == b && y == a)
        })
    }

    /// Triangles around vertex `v` (the fan is closed for non-super vertices).
    fn fan(&self, v: usize) -> Vec<usize> {
        let first = self.vert_tri[v];
        let mut out = vec![first];
        let mut t = first;
        loop {
            let i = self.tris[t].iter().position(|&x| x == v).unwrap();
            // step across the edge (v, next)
            let n = self.nbr[t][(i + 2) % 3];
            if n == NONE || n == first || out.len() > self.tris.len() {
                break;
            }
            out.push(n);
            t = n;
        }
        out
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.fan(a).iter().any(|&t| self.tris[t].contains(&b))
    }

    /// Edges crossing the open segment `a`-`b`, or a vertex lying on it.
    fn crossings(&self, a: usize, b: usize) -> std::result::Result<Vec<(usize, usize)>, usize> {
        let mut out = Vec::new();
        let between = |v: usize| {
            let (pa, pb, pv) = (self.pts[a], self.pts[b], self.pts[v]);
            (pv - pa).dot(pb - pa) > 0.0 && (pv - pb).dot(pa - pb) > 0.0
        };
        // find the wedge at `a` containing the direction to `b`
        let mut cur = None;
        for t in self.fan(a) {
            let tri = self.tris[t];
            let i = tri.iter().position(|&x| x == a).unwrap();
            let (u, w) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            let ou = self.orient(a, b, u);
            let ow = self.orient(a, b, w);
            if ou == 0.0 && between(u) {
                return Err(u);
            }
            if ou < 0.0 && ow > 0.0 {
                // u right of a->b, w left
                cur = Some((t, w, u));
                break;
            }
        }
        let Some((mut t, mut left, mut right)) = cur else {
            return Ok(out);
        };
        loop {
            out.push((left, right));
            let k = self.edge_in(t, left, right).unwrap();
            let n = self.nbr[t][k];
            if n == NONE {
                return Ok(out);
            }
            let kn = (0..3).find(|&j| self.nbr[n][j] == t).unwrap();
            let x = self.tris[n][kn];
            if x == b {
                return Ok(out);
            }
            let o = self.orient(a, b, x);
            if o == 0.0 {
                return Err(x);
            }
            if o > 0.0 {
                left = x;
            } else {
                right = x;
            }
            t = n;
        }
    }

    fn enforce(&mut self, a: usize, b: usize, locked: &mut HashSet<(usize, usize)>) -> Result<()> {
        let key = |x: usize, y: usize| (x.min(y), x.max(y));
        let mut rounds = 0;
        loop {
            if self.has_edge(a, b) {
                locked.insert(key(a, b));
                return Ok(());
            }
            let crossing = match self.crossings(a, b) {
                Ok(c) => c,
                Err(v) => {
                    self.enforce(a, v, locked)?;
                    return self.enforce(v, b, locked);
                }
            };
            if crossing.iter().any(|&(x, y)| locked.contains(&key(x, y))) {
                return Err(Error::ConstraintIntersection);
            }
            let mut flipped = false;
            for (x, y) in crossing {
                let t = self.vert_tri[x];
                let hit = self
                    .fan(x)
                    .into_iter()
                    .find_map(|t| self.edge_in(t, x, y).map(|k| (t, k)));
                let _ = t;
                if let Some((t, k)) = hit {
                    if self.flip(t, k).is_some() {
                        flipped = true;
                    }
                }
            }
            rounds += 1;
            if !flipped || rounds > 10_000 {
                return Err(Error::ConstraintIntersection);
            }
        }
    }

    /// Lawson flips restoring the Delaunay property away from locked edges.
    fn legalize(&mut self, locked: &HashSet<(usize, usize)>) {
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for t in 0..self.tris.len() {
            if self.alive[t] {
                for k in 0..3 {
                    stack.push((t, k));
                }
            }
        }
        let mut guard = 0usize;
        while let Some((t, k)) = stack.pop() {
            guard += 1;
            if guard > 50 * self.tris.len() + 1000 {
                break;
            }
            if !self.alive[t] {
                continue;
            }
            let u = self.nbr[t][k];
            if u == NONE {
                continue;
            }
            let (x, y) = (self.tris[t][(k + 1) % 3], self.tris[t][(k + 2) % 3]);
            if locked.contains(&(x.min(y), x.max(y))) {
                continue;
            }
            let Some(ku) = (0..3).find(|&j| self.nbr[u][j] == t) else {
                continue;
            };
            if self.in_circle(t, self.tris[u][ku]) > 0.0 {
                if let Some((t1, t2)) = self.flip(t, k) {
                    for tt in [t1, t2] {
                        for j in 0..3 {
                            stack.push((tt, j));
                        }
                    }
                }
            }
        }
    }
}

/// Spatially coherent insertion order: rows of cells, alternating direction.
fn insertion_order(pts: &[Vec2<f64>]) -> Vec<usize> {
    let n = pts.len();
    let (lo, hi) = crate::geom::bbox2(pts.iter().copied()).unwrap();
    let rows = ((n as f64 / 2.0).sqrt().ceil() as usize).max(1);
    let h = ((hi.y - lo.y) / rows as f64).max(f64::MIN_POSITIVE);
    let mut idx: Vec<usize> = (0..n).collect();
    let row = |p: Vec2<f64>| (((p.y - lo.y) / h) as usize).min(rows - 1);
    idx.sort_by(|&i, &j| {
        let (ri, rj) = (row(pts[i]), row(pts[j]));
        ri.cmp(&rj)
            .then_with(|| {
                let o = pts[i].x.partial_cmp(&pts[j].x).unwrap();
                if ri % 2 == 0 {
                    o
                } else {
                    o.reverse()
                }
            })
            .then(i.cmp(&j))
    });
    idx
}

/// Delaunay triangulation of `points` with the closed loops in `loops`
/// (indices into `points`) enforced as edges. When loops are given, the
/// first is the outer boundary and the rest are holes; triangles whose
/// centroid lies outside are dropped. Without loops the convex hull is
/// triangulated. Returned faces are counterclockwise.
pub fn triangulate<T: Real>(points: &[Vec2<T>], loops: &[Vec<usize>]) -> Result<Vec<[usize; 3]>> {
    let n = points.len();
    let pts: Vec<Vec2<f64>> = points.iter().map(|p| p.cast::<f64>()).collect();
    if n < 3 || !pts.iter().all(|p| p.is_finite()) {
        return Err(Error::Collinear);
    }
    let p0 = pts[0];
    let Some(p1) = pts.iter().copied().find(|&p| p != p0) else {
        return Err(Error::Collinear);
    };
    if pts.iter().all(|&p| orient2d(c(p0), c(p1), c(p)) == 0.0) {
        return Err(Error::Collinear);
    }

    let (lo, hi) = crate::geom::bbox2(pts.iter().copied()).unwrap();
    let mid = (lo + hi) * 0.5;
    let ext = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300) * 1e5;
    let mut all = pts.clone();
    all.push(mid + Vec2::new(-3.0 * ext, -3.0 * ext));
    all.push(mid + Vec2::new(3.0 * ext, -3.0 * ext));
    all.push(mid + Vec2::new(0.0, 3.0 * ext));
    let mut tr = Triangulation {
        pts: all,
        tris: Vec::new(),
        nbr: Vec::new(),
        alive: Vec::new(),
        vert_tri: vec![NONE; n + 3],
        last: 0,
    };
    tr.push([n, n + 1, n + 2], [NONE; 3]);

    let mut present = vec![false; n];
    for i in insertion_order(&pts) {
        present[i] = tr.insert(i);
    }

    let mut locked = HashSet::new();
    for lp in loops {
        for k in 0..lp.len() {
            let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
            if a == b || !present[a] || !present[b] {
                continue;
            }
            tr.enforce(a, b, &mut locked)?;
        }
    }
    tr.legalize(&locked);

    let polys: Vec<Vec<Vec2<f64>>> = loops.iter().map(|lp| lp.iter().map(|&i| pts[i]).collect()).collect();
    let mut faces = Vec::new();
    for t in 0..tr.tris.len() {
        let tri = tr.tris[t];
        if !tr.alive[t] || tri.iter().any(|&v| v >= n) {
            continue;
        }
        if let Some((outer, holes)) = polys.split_first() {
            let g = (pts[tri[0]] + pts[tri[1]] + pts[tri[2]]) * (1.0 / 3.0);
            if !point_in_polygon(g, outer) || holes.iter().any(|h| point_in_polygon(g, h)) {
                continue;
            }
        }
        faces.push(tri);
    }
    faces.sort();
    Ok(faces)
}

/// Triangulates bubble centers. Consecutive boundary bubbles of each ring
/// are joined by constrained edges and triangles outside the outer ring or
/// inside hole rings are removed. Vertices not used by any triangle are
/// dropped from the output.
pub fn delaunay_triangulate<T: Real>(bubbles: &[Bubble<T>]) -> Result<PlanarMesh<T>> {
    let points: Vec<Vec2<T>> = bubbles.iter().map(|b| b.center).collect();
    let loops = boundary_rings(bubbles);
    let faces = triangulate(&points, &loops)?;
    compact(&points, faces)
}

/// Builds a planar mesh from the referenced subset of `points`.
pub(crate) fn compact<T: Real>(points: &[Vec2<T>], faces: Vec<[usize; 3]>) -> Result<PlanarMesh<T>> {
    let mut remap = vec![NONE; points.len()];
    let mut verts = Vec::new();
    let mut out = Vec::with_capacity(faces.len());
    for f in faces {
        let mut g = [0; 3];
        for k in 0..3 {
            if remap[f[k]] == NONE {
                remap[f[k]] = verts.len();
                verts.push(points[f[k]]);
            }
            g[k] = remap[f[k]];
        }
        out.push(g);
    }
    PlanarMesh::new(verts, out)
}
