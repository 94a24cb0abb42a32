//! Initial bubble placement: boundary packing by recursive subdivision of
//! each boundary piece, interior packing on a rhombic (triangular-lattice)
//! quadtree, and inverse-distance interpolation of radii from anchors.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::bubble::{Bubble, BubbleKind};
use crate::error::{Error, Result};
use crate::geom::{bbox2, point_in_polygon, polygon_area, polygon_perimeter, Vec2};
use crate::scalar::Real;
use crate::sizing::{radius_bound, ParametricSurface, SizingParams};

mod field;

pub use field::{interpolate_radius, AnchorField};

/// Polyline vertices whose turning angle exceeds this always get a bubble.
const CORNER_TURN_DEG: f64 = 25.0;

/// Maximum bubble radius as a function of position.
#[derive(Clone)]
pub enum Sizing<T: Real> {
    Constant(T),
    /// Curvature-based bound of a parametric surface (domain in parameter units).
    Surface {
        surface: Arc<dyn ParametricSurface<T> + Send + Sync>,
        params: SizingParams<T>,
    },
    /// Interpolated anchor radii, clamped to `[r_min, r_max]`.
    Anchors {
        field: AnchorField<T>,
        r_min: T,
        r_max: T,
    },
}

impl<T: Real> fmt::Debug for Sizing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sizing::Constant(r) => write!(f, "Constant({r})"),
            Sizing::Surface { params, .. } => write!(f, "Surface({params:?})"),
            Sizing::Anchors { field, r_min, r_max } => {
                write!(f, "Anchors({} anchors, [{r_min}, {r_max}])", field.len())
            }
        }
    }
}

impl<T: Real> Sizing<T> {
    pub fn bound(&self, p: Vec2<T>) -> Result<T> {
        match self {
            Sizing::Constant(r) => Ok(*r),
            Sizing::Surface { surface, params } => radius_bound(surface.as_ref(), p.x, p.y, params),
            Sizing::Anchors { field, r_min, r_max } => Ok(field.interpolate(p)?.max(*r_min).min(*r_max)),
        }
    }
}

/// Planar region to pack: a counterclockwise outer polygon minus clockwise holes.
#[derive(Debug, Clone)]
pub struct PackingDomain<T: Real> {
    pub outer: Vec<Vec2<T>>,
    pub holes: Vec<Vec<Vec2<T>>>,
    pub sizing: Sizing<T>,
}

fn segments_cross<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> bool {
    let o = |p: Vec2<T>, q: Vec2<T>, r: Vec2<T>| {
        robust::orient2d(
            robust::Coord {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            },
            robust::Coord {
                x: q.x.as_f64(),
                y: q.y.as_f64(),
            },
            robust::Coord {
                x: r.x.as_f64(),
                y: r.y.as_f64(),
            },
        )
    };
    let (d1, d2) = (o(a, b, c), o(a, b, d));
    let (d3, d4) = (o(c, d, a), o(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn is_simple<T: Real>(poly: &[Vec2<T>]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

impl<T: Real> PackingDomain<T> {
    /// Builds a domain, reorienting the outer loop counterclockwise and the
    /// holes clockwise.
    pub fn new(mut outer: Vec<Vec2<T>>, mut holes: Vec<Vec<Vec2<T>>>, sizing: Sizing<T>) -> Result<Self> {
        if outer.len() < 3 {
            return Err(Error::InvalidParameter("outer boundary needs 3 vertices".into()));
        }
        if polygon_area(&outer) < T::zero() {
            outer.reverse();
        }
        if !is_simple(&outer) {
            return Err(Error::InvalidParameter("outer boundary self-intersects".into()));
        }
        for h in &mut holes {
            if h.len() < 3 {
                return Err(Error::InvalidParameter("hole needs 3 vertices".into()));
            }
            if polygon_area(h) > T::zero() {
                h.reverse();
            }
            if !is_simple(h) {
                return Err(Error::InvalidParameter("hole self-intersects".into()));
            }
            if !h.iter().all(|&p| point_in_polygon(p, &outer)) {
                return Err(Error::InvalidParameter("hole not inside outer boundary".into()));
            }
        }
        Ok(Self { outer, holes, sizing })
    }

    /// All boundary loops, outer first.
    pub fn loops(&self) -> impl Iterator<Item = &Vec<Vec2<T>>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        point_in_polygon(p, &self.outer) && !self.holes.iter().any(|h| point_in_polygon(p, h))
    }

    pub fn bbox(&self) -> (Vec2<T>, Vec2<T>) {
        bbox2(self.outer.iter().copied()).expect("non-empty outer loop")
    }

    /// Domain traced by ordered boundary bubbles (ring 0 outer, others holes).
    pub fn from_boundary_bubbles(bubbles: &[Bubble<T>], sizing: Sizing<T>) -> Result<Self> {
        let rings = boundary_rings(bubbles);
        let mut loops = rings
            .into_iter()
            .map(|ids| ids.into_iter().map(|i| bubbles[i].center).collect::<Vec<_>>());
        let outer = loops
            .next()
            .ok_or_else(|| Error::InvalidParameter("no boundary bubbles".into()))?;
        Self::new(outer, loops.collect(), sizing)
    }

    fn clamp_into_bbox(&self, p: Vec2<T>) -> Vec2<T> {
        let (lo, hi) = self.bbox();
        Vec2::new(p.x.max(lo.x).min(hi.x), p.y.max(lo.y).min(hi.y))
    }
}

/// Indices of boundary bubbles grouped by ring (ascending ring id), each in
/// list order.
pub fn boundary_rings<T: Real>(bubbles: &[Bubble<T>]) -> Vec<Vec<usize>> {
    let mut rings: Vec<(u32, Vec<usize>)> = Vec::new();
    for (i, b) in bubbles.iter().enumerate() {
        if let BubbleKind::Boundary { ring } = b.kind {
            match rings.iter_mut().find(|(r, _)| *r == ring) {
                Some((_, v)) => v.push(i),
                None => rings.push((ring, vec![i])),
            }
        }
    }
    rings.sort_by_key(|(r, _)| *r);
    rings.into_iter().map(|(_, v)| v).collect()
}

fn turn_angle<T: Real>(prev: Vec2<T>, cur: Vec2<T>, next: Vec2<T>) -> T {
    let a = cur - prev;
    let b = next - cur;
    a.cross(b).atan2(a.dot(b)).abs()
}

/// Cumulative table of arc length and normalized length `∫ ds / (2 r(s))`
/// along an open polyline.
struct ArcTable<T> {
    pts: Vec<Vec2<T>>,
    /// (arc length, normalized length) samples, increasing.
    samples: Vec<(T, T)>,
    min_bound: T,
}

impl<T: Real> ArcTable<T> {
    fn build(pts: Vec<Vec2<T>>, domain: &PackingDomain<T>) -> Result<Self> {
        let eval = |p: Vec2<T>| domain.sizing.bound(domain.clamp_into_bbox(p));
        let mut samples = vec![(T::zero(), T::zero())];
        let mut s = T::zero();
        let mut tau = T::zero();
        let mut r_prev = eval(pts[0])?;
        let mut min_bound = r_prev;
        for w in pts.windows(2) {
            let len = w[0].dist(w[1]);
            let steps = (len / (T::lit(0.25) * r_prev))
                .ceil()
                .to_usize()
                .unwrap_or(1)
                .clamp(1, 4096);
            let h = len / T::from_count(steps);
            for k in 1..=steps {
                let p = w[0].lerp(w[1], T::from_count(k) / T::from_count(steps));
                let r = eval(p)?;
                min_bound = min_bound.min(r);
                tau = tau + h * T::half() * (T::half() / r_prev + T::half() / r);
                s = s + h;
                samples.push((s, tau));
                r_prev = r;
            }
        }
        Ok(Self {
            pts,
            samples,
            min_bound,
        })
    }

    fn total(&self) -> T {
        self.samples.last().unwrap().1
    }

    fn length(&self) -> T {
        self.samples.last().unwrap().0
    }

    /// Arc length at which the normalized length reaches `tau`.
    fn arc_at(&self, tau: T) -> T {
        let k = self
            .samples
            .partition_point(|&(_, t)| t < tau)
            .clamp(1, self.samples.len() - 1);
        let (s0, t0) = self.samples[k - 1];
        let (s1, t1) = self.samples[k];
        if t1 > t0 {
            s0 + (s1 - s0) * ((tau - t0) / (t1 - t0))
        } else {
            s0
        }
    }

    fn point_at(&self, s: T) -> Vec2<T> {
        let mut acc = T::zero();
        for w in self.pts.windows(2) {
            let len = w[0].dist(w[1]);
            if acc + len >= s && len > T::zero() {
                return w[0].lerp(w[1], ((s - acc) / len).max(T::zero()).min(T::one()));
            }
            acc = acc + len;
        }
        *self.pts.last().unwrap()
    }
}

/// Fills `out[lo+1..hi]` by recursive bisection of the index range; entry
/// `k` sits where the normalized length is `k / n` of the total.
fn bisect_positions<T: Real>(table: &ArcTable<T>, n: usize, lo: usize, hi: usize, out: &mut [Vec2<T>]) {
    if hi - lo < 2 {
        return;
    }
    let mid = (lo + hi) / 2;
    let tau = table.total() * T::from_count(mid) / T::from_count(n);
    out[mid] = table.point_at(table.arc_at(tau));
    bisect_positions(table, n, lo, mid, out);
    bisect_positions(table, n, mid, hi, out);
}

/// Places bubbles along every boundary loop of the domain.
///
/// Each loop is split at its corners; every piece receives a number of
/// intervals matching its normalized length (arc length over local bubble
/// diameter) and the interior positions are found by recursive bisection.
/// Radii are then set from the spacing, `r_j = (d_ij + d_jk) / 4`, which
/// makes consecutive bubbles tangent up to the second difference of the
/// spacing.
pub fn pack_boundary<T: Real>(domain: &PackingDomain<T>) -> Result<Vec<Bubble<T>>> {
    let corner = T::lit(CORNER_TURN_DEG.to_radians());
    let mut out = Vec::new();
    for (ring, poly) in domain.loops().enumerate() {
        let n = poly.len();
        let corners: Vec<usize> = (0..n)
            .filter(|&i| turn_angle(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]) > corner)
            .collect();
        let pieces: Vec<Vec<Vec2<T>>> = if corners.is_empty() {
            let mut p = poly.clone();
            p.push(poly[0]);
            vec![p]
        } else {
            (0..corners.len())
                .map(|c| {
                    let a = corners[c];
                    let b = corners[(c + 1) % corners.len()];
                    let mut p = vec![poly[a]];
                    let mut i = a;
                    loop {
                        i = (i + 1) % n;
                        p.push(poly[i]);
                        if i == b {
                            break;
                        }
                    }
                    p
                })
                .collect()
        };
        let closed = corners.is_empty();
        let mut centers: Vec<Vec2<T>> = Vec::new();
        let mut min_bound = T::infinity();
        for piece in pieces {
            let table = ArcTable::build(piece, domain)?;
            min_bound = min_bound.min(table.min_bound);
            let min_count = if closed { 3 } else { 1 };
            let count = table.total().round().to_usize().unwrap_or(0).max(min_count);
            let mut pos = vec![Vec2::zero(); count + 1];
            pos[0] = table.pts[0];
            pos[count] = *table.pts.last().unwrap();
            bisect_positions(&table, count, 0, count, &mut pos);
            // the last point is the next piece's first (or the loop start)
            centers.extend_from_slice(&pos[..count]);
            if table.length() < T::two() * table.min_bound && closed {
                return Err(Error::BoundaryTooSmall);
            }
        }
        if polygon_perimeter(poly) < T::two() * min_bound {
            return Err(Error::BoundaryTooSmall);
        }
        let m = centers.len();
        for k in 0..m {
            let prev = centers[(k + m - 1) % m];
            let next = centers[(k + 1) % m];
            let r = (centers[k].dist(prev) + centers[k].dist(next)) / T::lit(4.0);
            out.push(Bubble::boundary(centers[k], r, ring as u32));
        }
    }
    Ok(out)
}

/// Side of the rhombic lattice cells relative to the local bubble diameter
/// above which a cell is split.
const SPLIT_RATIO: f64 = std::f64::consts::SQRT_2;
const MAX_DEPTH: u32 = 16;

/// Interior packing on a quadtree of 60-degree rhombi.
///
/// Rhombus cells are split until their side is at most `sqrt(2)` times the
/// local bubble diameter; the rhombus vertices of the leaves are the bubble
/// candidates, so uniform regions receive a tangent triangular lattice.
/// Candidates outside the domain or whose center falls inside an anchor are
/// dropped. Radii are interpolated from the anchors and capped by the
/// domain's sizing bound.
pub fn pack_interior_quadtree<T: Real>(domain: &PackingDomain<T>, anchors: &[Bubble<T>]) -> Result<Vec<Bubble<T>>> {
    let field = AnchorField::new(anchors);
    if field.is_empty() {
        return Err(Error::NoAnchors);
    }
    let (lo, hi) = domain.bbox();
    let eval = |p: Vec2<T>| domain.sizing.bound(domain.clamp_into_bbox(p));

    // reference radius: largest bound over a coarse sample of the box
    let mut r_ref = T::zero();
    for i in 0..=16 {
        for j in 0..=16 {
            let p = Vec2::new(
                lo.x + (hi.x - lo.x) * T::from_count(i) / T::lit(16.0),
                lo.y + (hi.y - lo.y) * T::from_count(j) / T::lit(16.0),
            );
            r_ref = r_ref.max(eval(p)?);
        }
    }
    let s0 = T::two() * r_ref;
    let sqrt3 = T::lit(3.0).sqrt();
    // lattice basis: e1 = (1, 0), e2 = (1/2, sqrt(3)/2)
    let to_xy = |a: T, b: T| Vec2::new(lo.x + a + b * T::half(), lo.y + b * sqrt3 * T::half());
    let a_min = -(hi.y - lo.y) / sqrt3;
    let a_max = hi.x - lo.x;
    let b_max = T::two() * (hi.y - lo.y) / sqrt3;
    let range = (a_max - a_min).max(b_max);
    let mut levels = 0u32;
    while s0 * T::from_count(1usize << levels) < range && levels < 40 {
        levels += 1;
    }
    // integer lattice coordinates in units of the finest possible cell
    let unit = s0 / T::from_count(1usize << MAX_DEPTH);
    let root_size: i64 = 1i64 << (levels + MAX_DEPTH);
    let a0 = (a_min / unit).floor().to_i64().unwrap_or(0);
    let to_point = |ia: i64, ib: i64| to_xy(T::from_i64(ia).unwrap() * unit, T::from_i64(ib).unwrap() * unit);

    let mut vertices: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut stack = vec![(a0, 0i64, root_size, 0u32)];
    while let Some((ia, ib, size, depth)) = stack.pop() {
        let corners = [
            to_point(ia, ib),
            to_point(ia + size, ib),
            to_point(ia + size, ib + size),
            to_point(ia, ib + size),
        ];
        let (clo, chi) = bbox2(corners.iter().copied()).unwrap();
        if chi.x < lo.x || chi.y < lo.y || clo.x > hi.x || clo.y > hi.y {
            continue;
        }
        let side = T::from_i64(size).unwrap() * unit;
        let center = to_point(ia, ib) + (to_point(ia + size, ib + size) - to_point(ia, ib)) * T::half();
        let mut r_local = eval(center)?;
        for c in corners {
            r_local = r_local.min(eval(c)?);
        }
        let splittable = depth < levels + MAX_DEPTH && size > 1;
        if splittable && side > T::lit(SPLIT_RATIO) * T::two() * r_local {
            let h = size / 2;
            // pushed in reverse so that cells pop in a fixed row-major order
            for (da, db) in [(h, h), (0, h), (h, 0), (0, 0)] {
                stack.push((ia + da, ib + db, h, depth + 1));
            }
        } else {
            vertices.insert((ib, ia));
            vertices.insert((ib, ia + size));
            vertices.insert((ib + size, ia));
            vertices.insert((ib + size, ia + size));
        }
    }

    let mut out = Vec::new();
    for (ib, ia) in vertices {
        let p = to_point(ia, ib);
        if !domain.contains(p) {
            continue;
        }
        if field.covers(p) {
            continue;
        }
        let r = field.interpolate(p)?.min(eval(p)?);
        out.push(Bubble::mobile(p, r));
    }
    if out.is_empty() {
        log::warn!("interior packing produced no bubbles (domain thinner than the bubble size?)");
    }
    Ok(out)
}

/// Reads pre-inserted anchors from CSV rows `x, y, radius`. A header row
/// and `#` comments are skipped.
pub fn load_anchor_csv<T: Real>(path: impl AsRef<Path>) -> Result<Vec<Bubble<T>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_anchor_csv(&text)
}

pub fn parse_anchor_csv<T: Real>(text: &str) -> Result<Vec<Bubble<T>>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => {
                if !(v[2] > 0.0) {
                    return Err(Error::Parse {
                        line: ln + 1,
                        msg: "anchor radius must be positive".into(),
                    });
                }
                out.push(Bubble::anchor(Vec2::new(T::lit(v[0]), T::lit(v[1])), T::lit(v[2])));
            }
            Err(_) if ln == 0 || out.is_empty() && cols.len() == 3 => continue, // header
            _ => {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: "expected x, y, radius".into(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> Vec<Vec2<f64>> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(side, 0.0),
            Vec2::new(side, side),
            Vec2::new(0.0, side),
        ]
    }

    fn circle(c: Vec2<f64>, r: f64, n: usize) -> Vec<Vec2<f64>> {
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                c + Vec2::new(t.cos(), t.sin()) * r
            })
            .collect()
    }

    fn assert_tangent(bubbles: &[Bubble<f64>]) {
        for ring in boundary_rings(bubbles) {
            let m = ring.len();
            for k in 0..m {
                let (a, b) = (&bubbles[ring[k]], &bubbles[ring[(k + 1) % m]]);
                let l = a.center.dist(b.center);
                assert!(
                    (l - (a.radius + b.radius)).abs() <= 0.1 * a.radius.min(b.radius),
                    "gap {l} vs radii {} {}",
                    a.radius,
                    b.radius
                );
            }
        }
    }

    #[test]
    fn square_side_four() {
        let d = PackingDomain::new(square(4.0), vec![], Sizing::Constant(0.5)).unwrap();
        let b = pack_boundary(&d).unwrap();
        assert_eq!(b.len(), 16);
        for k in 0..16 {
            let l = b[k].center.dist(b[(k + 1) % 16].center);
            assert!((l - 1.0).abs() < 1e-12);
            assert!((b[k].radius - 0.5).abs() < 1e-12);
        }
        assert_tangent(&b);
    }

    #[test]
    fn circle_gets_six() {
        let d = PackingDomain::new(
            circle(Vec2::zero(), 1.0, 720),
            vec![],
            Sizing::Constant(std::f64::consts::PI / 6.0),
        )
        .unwrap();
        let b = pack_boundary(&d).unwrap();
        assert_eq!(b.len(), 6);
        assert_tangent(&b);
    }

    #[test]
    fn graded_boundary_is_tangent() {
        let anchors = vec![
            Bubble::anchor(Vec2::new(1.0, 1.0), 0.05),
            Bubble::anchor(Vec2::new(9.0, 5.0), 0.4),
        ];
        let sizing = Sizing::Anchors {
            field: AnchorField::new(&anchors),
            r_min: 0.05,
            r_max: 0.4,
        };
        let outer = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 0.0),
            Vec2::new(10.0, 6.0),
            Vec2::new(0.0, 6.0),
        ];
        let hole = circle(Vec2::new(5.0, 3.0), 1.0, 64);
        let d = PackingDomain::new(outer, vec![hole], sizing).unwrap();
        let b = pack_boundary(&d).unwrap();
        assert_eq!(boundary_rings(&b).len(), 2);
        assert_tangent(&b);
    }

    #[test]
    fn tiny_boundary_is_rejected() {
        let d = PackingDomain::new(square(0.1), vec![], Sizing::Constant(0.5)).unwrap();
        assert!(matches!(pack_boundary(&d), Err(Error::BoundaryTooSmall)));
    }

    #[test]
    fn interior_fully_covered_by_anchor() {
        let d = PackingDomain::new(square(1.0), vec![], Sizing::Constant(0.2)).unwrap();
        let anchors = vec![Bubble::anchor(Vec2::new(0.5, 0.5), 2.0)];
        assert!(pack_interior_quadtree(&d, &anchors).unwrap().is_empty());
    }

    #[test]
    fn interior_uniform_lattice() {
        let d = PackingDomain::new(square(10.0), vec![], Sizing::Constant(0.5)).unwrap();
        let boundary = pack_boundary(&d).unwrap();
        let inner = pack_interior_quadtree(&d, &boundary).unwrap();
        assert!(!inner.is_empty());
        for b in &inner {
            assert!(d.contains(b.center));
            assert!((b.radius - 0.5).abs() < 1e-9);
        }
        // nearest neighbor of every interior bubble is at the lattice spacing
        for (i, b) in inner.iter().enumerate() {
            let nn = inner
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| o.center.dist(b.center))
                .fold(f64::INFINITY, f64::min);
            assert!((nn - 1.0).abs() < 1e-9, "nearest neighbor at {nn}");
        }
        let again = pack_interior_quadtree(&d, &boundary).unwrap();
        assert_eq!(inner, again);
    }

    #[test]
    fn anchor_csv() {
        let a: Vec<Bubble<f64>> = parse_anchor_csv("x,y,radius\n1,2,0.5\n# c\n3, 4, 0.25\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1].center, Vec2::new(3.0, 4.0));
        assert!(parse_anchor_csv::<f64>("1,2\n").is_err());
    }
}
