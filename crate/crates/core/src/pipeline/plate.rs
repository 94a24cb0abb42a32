//! Rectangular plates with circular holes, uniform or graded around the holes.

use std::f64::consts::TAU;

use crate::bubble::{Bubble, BubbleKind};
use crate::error::Result;
use crate::geom::Vec2;
use crate::pack::{pack_boundary, pack_interior_quadtree, AnchorField, PackingDomain, Sizing};
use crate::relax::overlap_pairwise;

use super::config::{GradedConfig, HoleConfig, PlateConfig};

/// Regular polygon approximating a circle with edges close to `segment`
/// (at least 8 vertices), clockwise so that it can serve as a hole.
pub fn polygonize_circle(center: Vec2<f64>, radius: f64, segment: f64) -> Vec<Vec2<f64>> {
    let n = ((TAU * radius / segment).round() as usize).max(8);
    (0..n)
        .rev()
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            center + Vec2::new(t.cos(), t.sin()) * radius
        })
        .collect()
}

fn rectangle(p: &PlateConfig) -> Vec<Vec2<f64>> {
    vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(p.width, 0.0),
        Vec2::new(p.width, p.height),
        Vec2::new(0.0, p.height),
    ]
}

fn hole_center(h: &HoleConfig) -> Vec2<f64> {
    Vec2::new(h.center[0], h.center[1])
}

/// Plate domain with holes polygonized at the given segment length.
pub fn plate_domain(p: &PlateConfig, hole_segment: f64, sizing: Sizing<f64>) -> Result<PackingDomain<f64>> {
    let holes = p
        .holes
        .iter()
        .map(|h| polygonize_circle(hole_center(h), h.radius, hole_segment))
        .collect();
    PackingDomain::new(rectangle(p), holes, sizing)
}

/// Rings of anchors around every hole. Ring `k` has radius `rho_k =
/// min(r_near * growth^k, r_far)` and sits at distance `D_0 = R + 2 rho_0`,
/// `D_k = D_{k-1} + rho_{k-1} + rho_k` from the hole center, with
/// `floor(2 pi D_k / (2 rho_k))` evenly spaced bubbles. Rings stop after the
/// first one at `r_far`. Anchors too close to the plate edge or overlapping
/// an earlier anchor are dropped.
pub fn graded_anchors(p: &PlateConfig, g: &GradedConfig) -> Vec<Bubble<f64>> {
    let mut out: Vec<Bubble<f64>> = Vec::new();
    for h in &p.holes {
        let c = hole_center(h);
        let mut rho = g.r_near;
        let mut dist = h.radius + 2.0 * rho;
        loop {
            let n = (TAU * dist / (2.0 * rho)).floor() as usize;
            for k in 0..n {
                let t = TAU * k as f64 / n as f64;
                let q = c + Vec2::new(t.cos(), t.sin()) * dist;
                let margin = 2.0 * rho;
                if q.x < margin || q.y < margin || q.x > p.width - margin || q.y > p.height - margin {
                    continue;
                }
                let b = Bubble::anchor(q, rho);
                if out.iter().any(|a| overlap_pairwise(a, &b) > 0.0) {
                    continue;
                }
                out.push(b);
            }
            if rho >= g.r_far {
                break;
            }
            let next = (rho * g.growth).min(g.r_far);
            dist += rho + next;
            rho = next;
        }
    }
    out
}

/// Initial bubbles for a plate: boundary bubbles, then anchors (graded rings
/// and `extra_anchors` inside the domain), then interior quadtree bubbles.
pub fn plate_bubbles(p: &PlateConfig, extra_anchors: &[Bubble<f64>]) -> Result<Vec<Bubble<f64>>> {
    let (mut bubbles, mut anchors, domain) = match &p.graded {
        None => {
            let domain = plate_domain(p, 2.0 * p.radius, Sizing::Constant(p.radius))?;
            (pack_boundary(&domain)?, Vec::new(), domain)
        }
        Some(g) => {
            // holes at r_near, outer edge at r_far
            let near = plate_domain(p, 2.0 * g.r_near, Sizing::Constant(g.r_near))?;
            let far = plate_domain(p, 2.0 * g.r_near, Sizing::Constant(g.r_far))?;
            let mut boundary: Vec<Bubble<f64>> = pack_boundary(&far)?
                .into_iter()
                .filter(|b| b.kind == BubbleKind::Boundary { ring: 0 })
                .collect();
            boundary.extend(
                pack_boundary(&near)?
                    .into_iter()
                    .filter(|b| b.kind != BubbleKind::Boundary { ring: 0 }),
            );
            (boundary, graded_anchors(p, g), near)
        }
    };
    anchors.extend(extra_anchors.iter().filter(|b| domain.contains(b.center)).copied());
    bubbles.extend(anchors);

    let interior_domain = match &p.graded {
        None => domain,
        Some(g) => {
            let field = AnchorField::new(&bubbles);
            PackingDomain::new(
                domain.outer.clone(),
                domain.holes.clone(),
                Sizing::Anchors {
                    field,
                    r_min: g.r_near,
                    r_max: g.r_far,
                },
            )?
        }
    };
    let interior = pack_interior_quadtree(&interior_domain, &bubbles)?;
    bubbles.extend(interior);
    Ok(bubbles)
}
