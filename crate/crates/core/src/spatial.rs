//! Uniform bucket grid over 2D points.

use crate::geom::{bbox2, Vec2};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct PointGrid<T> {
    origin: Vec2<T>,
    cell: T,
    nx: usize,
    ny: usize,
    /// Start offsets into `items`, one per cell plus a sentinel.
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl<T: Real> PointGrid<T> {
    /// Buckets `points` into square cells of side `cell` (clamped to a sane
    /// minimum so that the grid never explodes).
    pub fn new(points: &[Vec2<T>], cell: T) -> Self {
        let (lo, hi) = bbox2(points.iter().copied()).unwrap_or((Vec2::zero(), Vec2::zero()));
        let ext = (hi.x - lo.x).max(hi.y - lo.y);
        // at most ~4M cells
        let min_cell = ext / T::lit(2048.0);
        let cell = if cell > min_cell && cell.is_finite() {
            cell
        } else if min_cell > T::zero() {
            min_cell
        } else {
            T::one()
        };
        let nx = ((hi.x - lo.x) / cell).floor().to_usize().unwrap_or(0) + 1;
        let ny = ((hi.y - lo.y) / cell).floor().to_usize().unwrap_or(0) + 1;
        let mut counts = vec![0usize; nx * ny + 1];
        let key = |p: Vec2<T>| -> usize {
            let ix = ((p.x - lo.x) / cell).floor().to_usize().unwrap_or(0).min(nx - 1);
            let iy = ((p.y - lo.y) / cell).floor().to_usize().unwrap_or(0).min(ny - 1);
            iy * nx + ix
        };
        let keys: Vec<usize> = points.iter().map(|&p| key(p)).collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k]] = i;
            fill[k] += 1;
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            starts,
            items,
        }
    }

    pub fn cell_size(&self) -> T {
        self.cell
    }

    fn cell_coords(&self, p: Vec2<T>) -> (i64, i64) {
        let ix = ((p.x - self.origin.x) / self.cell).floor().to_i64().unwrap_or(0);
        let iy = ((p.y - self.origin.y) / self.cell).floor().to_i64().unwrap_or(0);
        (ix, iy)
    }

    fn cell_items(&self, ix: i64, iy: i64) -> &[usize] {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            return &[];
        }
        let c = iy as usize * self.nx + ix as usize;
        &self.items[self.starts[c]..self.starts[c + 1]]
    }

    /// Calls `f` for every indexed point whose cell intersects the square of
    /// half-width `radius` around `p`. Candidates are visited in cell order.
    pub fn for_each_near(&self, p: Vec2<T>, radius: T, mut f: impl FnMut(usize)) {
        let lo = self.cell_coords(p - Vec2::new(radius, radius));
        let hi = self.cell_coords(p + Vec2::new(radius, radius));
        let x0 = lo.0.max(0);
        let y0 = lo.1.max(0);
        let x1 = hi.0.min(self.nx as i64 - 1);
        let y1 = hi.1.min(self.ny as i64 - 1);
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                for &i in self.cell_items(ix, iy) {
                    f(i);
                }
            }
        }
    }

    /// Indices of the `k` points nearest to `p` (fewer if the grid holds
    /// fewer), sorted by distance then index.
    pub fn k_nearest(&self, points: &[Vec2<T>], p: Vec2<T>, k: usize) -> Vec<(T, usize)> {
        let k = k.min(points.len());
        if k == 0 {
            return Vec::new();
        }
        let (cx, cy) = self.cell_coords(p);
        let mut found: Vec<(T, usize)> = Vec::new();
        let max_ring = self.nx.max(self.ny) as i64
            + 1
            + cx.abs()
                .max(cy.abs())
                .max((cx - self.nx as i64).abs())
                .max((cy - self.ny as i64).abs());
        let mut ring = 0i64;
        loop {
            if ring == 0 {
                for &i in self.cell_items(cx, cy) {
                    found.push((points[i].dist(p), i));
                }
            } else {
                for dx in -ring..=ring {
                    for &dy in &[-ring, ring] {
                        for &i in self.cell_items(cx + dx, cy + dy) {
                            found.push((points[i].dist(p), i));
                        }
                    }
                }
                for dy in (-ring + 1)..ring {
                    for &dx in &[-ring, ring] {
                        for &i in self.cell_items(cx + dx, cy + dy) {
                            found.push((points[i].dist(p), i));
                        }
                    }
                }
            }
            if found.len() >= k {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                // everything within `ring * cell` of p has been seen
                let covered = T::from_i64(ring).unwrap() * self.cell;
                if found[k - 1].0 <= covered || ring > max_ring {
                    found.truncate(k);
                    return found;
                }
            }
            if ring > max_ring {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                found.truncate(k);
                return found;
            }
            ring += 1;
        }
    }
}
