use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::geom::{bbox2, Vec2};
use crate::scalar::Real;
use crate::spatial::PointGrid;

/// Number of nearest anchors that contribute to an interpolated radius.
pub const IDW_NEIGHBORS: usize = 8;

/// Radius field interpolated from anchor bubbles with local Shepard weights
/// `1 / d^2` over the nearest anchors.
#[derive(Debug, Clone)]
pub struct AnchorField<T: Real> {
    centers: Vec<Vec2<T>>,
    radii: Vec<T>,
    max_radius: T,
    grid: PointGrid<T>,
}

impl<T: Real> AnchorField<T> {
    pub fn new(anchors: &[Bubble<T>]) -> Self {
        let centers: Vec<Vec2<T>> = anchors.iter().map(|b| b.center).collect();
        let radii: Vec<T> = anchors.iter().map(|b| b.radius).collect();
        let max_radius = radii.iter().copied().fold(T::zero(), T::max);
        let cell = match bbox2(centers.iter().copied()) {
            Some((lo, hi)) => {
                let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(max_radius * max_radius);
                (area / T::from_count(centers.len())).sqrt() * T::two()
            }
            None => T::one(),
        };
        let grid = PointGrid::new(&centers, cell);
        Self {
            centers,
            radii,
            max_radius,
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn interpolate(&self, p: Vec2<T>) -> Result<T> {
        if self.is_empty() {
            return Err(Error::NoAnchors);
        }
        let near = self.grid.k_nearest(&self.centers, p, IDW_NEIGHBORS);
        let mut num = T::zero();
        let mut den = T::zero();
        for (d, i) in near {
            if d < T::lit(1e-12) {
                return Ok(self.radii[i]);
            }
            let w = T::one() / (d * d);
            num = num + w * self.radii[i];
            den = den + w;
        }
        Ok(num / den)
    }

    /// Whether `p` lies strictly inside some anchor disk.
    pub fn covers(&self, p: Vec2<T>) -> bool {
        let mut hit = false;
        self.grid.for_each_near(p, self.max_radius, |i| {
            if !hit && self.centers[i].dist(p) < self.radii[i] {
                hit = true;
            }
        });
        hit
    }
}

/// Interpolated radius at `p` from the given anchors. Builds a fresh index on
/// every call; use [`AnchorField`] for repeated queries.
pub fn interpolate_radius<T: Real>(p: Vec2<T>, anchors: &[Bubble<T>]) -> Result<T> {
    AnchorField::new(anchors).interpolate(p)
}
