//! Quantity control: inserting and removing bubbles to fix local density.

use crate::bubble::{Bubble, BubbleKind};
use crate::geom::Vec2;
use crate::pack::AnchorField;
use crate::scalar::Real;
use crate::spatial::PointGrid;

use super::Region;

/// Term of the summed overlap contributed by a neighbor of radius `rj` at
/// center distance `l`: `(2 r0 + rj - l) / r0` while positive. A tangent
/// neighbor contributes exactly 1.
fn summed_term<T: Real>(r0: T, rj: T, l: T) -> T {
    ((T::two() * r0 + rj - l) / r0).max(T::zero())
}

/// Summed overlap of bubble `i` with its neighbors. Each tangent neighbor
/// contributes 1, closer ones more, and the contribution fades to zero at a
/// gap of one radius `r0`.
pub fn overlap_original<T: Real>(i: usize, bubbles: &[Bubble<T>], index: &PointGrid<T>) -> T {
    let b0 = &bubbles[i];
    let r0 = b0.radius;
    let r_max = bubbles.iter().map(|b| b.radius).fold(T::zero(), T::max);
    let mut sum = T::zero();
    index.for_each_near(b0.center, T::two() * r0 + r_max, |j| {
        if j != i {
            sum = sum + summed_term(r0, bubbles[j].radius, bubbles[j].center.dist(b0.center));
        }
    });
    sum
}

/// Pairwise overlap `(r0 + ri - l) / min(r0, ri)`: zero at tangency,
/// negative when apart.
pub fn overlap_pairwise<T: Real>(b0: &Bubble<T>, bi: &Bubble<T>) -> T {
    (b0.radius + bi.radius - b0.center.dist(bi.center)) / b0.radius.min(bi.radius)
}

fn search_cell<T: Real>(bubbles: &[Bubble<T>]) -> T {
    T::two() * bubbles.iter().map(|b| b.radius).fold(T::zero(), T::max)
}

/// One pass of the original alternating quantity control over the non-fixed
/// bubbles (interior anchors included), in index order. A bubble whose summed overlap is below `low`
/// gets one new neighbor in the widest angular gap around it; one above
/// `high` is deleted. New bubbles take their radius from the anchors and
/// are skipped when they would fall outside `region`. Returns the number of
/// insertions plus deletions.
pub fn qc_original<T: Real>(bubbles: &mut Vec<Bubble<T>>, low: T, high: T, region: Option<&Region<T>>) -> usize {
    let n = bubbles.len();
    let centers: Vec<Vec2<T>> = bubbles.iter().map(|b| b.center).collect();
    let index = PointGrid::new(&centers, search_cell(bubbles));
    let anchors: Vec<Bubble<T>> = bubbles.iter().filter(|b| b.is_anchor()).copied().collect();
    let field = AnchorField::new(&anchors);
    let mut removed = vec![false; n];
    let mut added: Vec<Bubble<T>> = Vec::new();
    let mut changes = 0;

    let r_max = bubbles.iter().map(|b| b.radius).fold(T::zero(), T::max);
    for i in 0..n {
        if bubbles[i].is_fixed() {
            continue;
        }
        let b0 = bubbles[i];
        let r0 = b0.radius;
        let reach = T::two() * r0 + r_max;
        let mut sum = T::zero();
        let mut angles: Vec<T> = Vec::new();
        let mut visit = |b: &Bubble<T>| {
            let d = b.center - b0.center;
            let t = summed_term(r0, b.radius, d.norm());
            if t > T::zero() {
                sum = sum + t;
                angles.push(d.y.atan2(d.x));
            }
        };
        index.for_each_near(b0.center, reach, |j| {
            if j != i && !removed[j] {
                visit(&bubbles[j]);
            }
        });
        for b in &added {
            visit(b);
        }
        if sum > high {
            removed[i] = true;
            changes += 1;
        } else if sum < low {
            let dir = widest_gap(&mut angles);
            let Ok(guess) = field.interpolate(b0.center + dir * (r0 + r0)) else {
                continue;
            };
            let p = b0.center + dir * (r0 + guess);
            let r = field.interpolate(p).unwrap_or(guess);
            let p = b0.center + dir * (r0 + r);
            if region.is_some_and(|reg| !reg.contains(p)) {
                continue;
            }
            added.push(Bubble::mobile(p, r));
            changes += 1;
        }
    }
    let mut k = 0;
    bubbles.retain(|_| {
        k += 1;
        !removed[k - 1]
    });
    bubbles.extend(added);
    changes
}

/// Unit vector bisecting the widest angular gap between neighbor directions
/// (the positive x axis when there are none).
fn widest_gap<T: Real>(angles: &mut [T]) -> Vec2<T> {
    if angles.is_empty() {
        return Vec2::new(T::one(), T::zero());
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tau = T::lit(std::f64::consts::TAU);
    let mut best = (T::zero(), T::zero());
    for k in 0..angles.len() {
        let a = angles[k];
        let b = if k + 1 < angles.len() {
            angles[k + 1]
        } else {
            angles[0] + tau
        };
        if b - a > best.0 {
            best = (b - a, a + (b - a) * T::half());
        }
    }
    Vec2::new(best.1.cos(), best.1.sin())
}

/// Boundary-region quantity control: for each anchor in `anchors` (indices
/// into `bubbles`, in order) every mobile bubble whose pairwise overlap with
/// it exceeds `threshold` is removed, most overlapping first. Anchors are
/// never removed.
pub fn qc_boundary_region<T: Real>(bubbles: &[Bubble<T>], anchors: &[usize], threshold: T) -> Vec<Bubble<T>> {
    let centers: Vec<Vec2<T>> = bubbles.iter().map(|b| b.center).collect();
    let index = PointGrid::new(&centers, search_cell(bubbles));
    let r_max = bubbles.iter().map(|b| b.radius).fold(T::zero(), T::max);
    let mut removed = vec![false; bubbles.len()];
    for &a in anchors {
        let anchor = &bubbles[a];
        let mut hits: Vec<(T, usize)> = Vec::new();
        index.for_each_near(anchor.center, anchor.radius + r_max, |j| {
            if j != a && !removed[j] && bubbles[j].kind == BubbleKind::Mobile {
                let o = overlap_pairwise(anchor, &bubbles[j]);
                if o > threshold {
                    hits.push((o, j));
                }
            }
        });
        hits.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        for (_, j) in hits {
            removed[j] = true;
        }
    }
    bubbles
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(b, _)| *b)
        .collect()
}

/// Indices of all boundary and anchor bubbles.
pub fn anchor_indices<T: Real>(bubbles: &[Bubble<T>]) -> Vec<usize> {
    (0..bubbles.len()).filter(|&i| bubbles[i].is_anchor()).collect()
}
