//! Physically based relaxation of bubbles and the two quantity-control
//! strategies.
//!
//! Every bubble obeys `m x'' + c x' = f(x)` where `f` is the sum of the pair
//! forces of its neighbors. Bubbles are advanced one at a time with a
//! classical RK4 step while the others are held still; boundary bubbles
//! never move.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::geom::{closest_on_segment, point_in_polygon, Vec2};
use crate::mapping::delaunay_triangulate;
use crate::mesh::quality_report;
use crate::pack::boundary_rings;
use crate::scalar::Real;
use crate::spatial::PointGrid;

mod force;
mod qc;

pub use force::{pair_force, ForceParams};
pub use qc::{anchor_indices, overlap_original, overlap_pairwise, qc_boundary_region, qc_original};

/// Integration and convergence settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsParams<T> {
    pub m: T,
    pub c: T,
    pub dt: T,
    /// Threshold on the largest net force divided by the bubble radius.
    pub force_tol: T,
    pub max_sweeps: usize,
    /// Number of sweeps over which a minimum-angle change below 0.1 degrees
    /// counts as convergence.
    pub stall_window: usize,
    /// Record wall time in the trace; when off, elapsed times are written as
    /// zero so that traces are reproducible byte for byte.
    pub record_time: bool,
}

impl<T: Real> Default for DynamicsParams<T> {
    fn default() -> Self {
        Self {
            m: T::one(),
            c: T::lit(1.4),
            dt: T::lit(0.2),
            force_tol: T::lit(1e-3),
            max_sweeps: 400,
            stall_window: 25,
            record_time: true,
        }
    }
}

impl<T: Real> DynamicsParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > T::zero() && self.c > T::zero() && self.dt > T::zero() && self.force_tol > T::zero()) {
            return Err(Error::InvalidParameter(
                "dynamics need m, c, dt and force_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

/// One row of a [`ConvergenceTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub sweep: usize,
    pub bubble_count: usize,
    pub max_force: f64,
    pub min_angle_deg: f64,
    pub elapsed_s: f64,
}

/// Per-sweep history of a relaxation run. Record 0 describes the initial
/// state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
}

impl ConvergenceTrace {
    pub const CSV_HEADER: &'static str = "sweep,bubble_count,max_force,min_angle_deg,elapsed_s";

    /// Number of sweeps performed.
    pub fn sweeps(&self) -> usize {
        self.records.last().map_or(0, |r| r.sweep)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_min_angle(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.min_angle_deg)
    }

    pub fn total_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_s)
    }

    /// First record whose minimum angle reaches `angle`.
    pub fn first_reaching(&self, angle: f64) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.min_angle_deg >= angle)
    }

    /// First record from which the minimum angle stays at or above `angle`
    /// for the rest of the run.
    pub fn settled_at(&self, angle: f64) -> Option<&TraceRecord> {
        let k = self
            .records
            .iter()
            .rposition(|r| r.min_angle_deg < angle)
            .map_or(0, |k| k + 1);
        self.records.get(k)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.sweep, r.bubble_count, r.max_force, r.min_angle_deg, r.elapsed_s
            );
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Closed region traced by the boundary bubbles; used to pull back bubbles
/// that escape during relaxation.
#[derive(Debug, Clone)]
pub struct Region<T> {
    loops: Vec<Vec<Vec2<T>>>,
}

impl<T: Real> Region<T> {
    /// Region bounded by the boundary rings (ring 0 outer). `None` when there
    /// are no boundary bubbles.
    pub fn from_bubbles(bubbles: &[Bubble<T>]) -> Option<Self> {
        let loops: Vec<Vec<Vec2<T>>> = boundary_rings(bubbles)
            .into_iter()
            .filter(|r| r.len() >= 3)
            .map(|r| r.into_iter().map(|i| bubbles[i].center).collect())
            .collect();
        if loops.is_empty() {
            None
        } else {
            Some(Self { loops })
        }
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        point_in_polygon(p, &self.loops[0]) && !self.loops[1..].iter().any(|h| point_in_polygon(p, h))
    }

    /// Nearest boundary point moved inward by `r` along the edge normal.
    fn pull_back(&self, p: Vec2<T>, r: T) -> Vec2<T> {
        let mut best: Option<(T, Vec2<T>, Vec2<T>)> = None;
        for (li, poly) in self.loops.iter().enumerate() {
            let outer_ccw = crate::geom::polygon_area(poly) > T::zero();
            // interior lies to the left of a ccw outer loop and to the right
            // of a ccw hole loop
            let left_is_inside = if li == 0 { outer_ccw } else { !outer_ccw };
            let n = poly.len();
            for k in 0..n {
                let (a, b) = (poly[k], poly[(k + 1) % n]);
                let q = closest_on_segment(p, a, b);
                let d = q.dist(p);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    let mut normal = (b - a).perp().normalized();
                    if !left_is_inside {
                        normal = -normal;
                    }
                    best = Some((d, q, normal));
                }
            }
        }
        let (_, q, normal) = best.unwrap();
        q + normal * r
    }
}

/// Per-bubble velocities paired with the bubble list.
#[derive(Debug, Clone)]
pub struct RelaxState<T> {
    pub bubbles: Vec<Bubble<T>>,
    pub velocities: Vec<Vec2<T>>,
}

impl<T: Real> RelaxState<T> {
    pub fn at_rest(bubbles: Vec<Bubble<T>>) -> Self {
        let n = bubbles.len();
        Self {
            bubbles,
            velocities: vec![Vec2::zero(); n],
        }
    }
}

/// Neighbor index over bubble centers with cells of twice the largest
/// radius.
pub struct NeighborIndex<T> {
    grid: PointGrid<T>,
    r_max: T,
}

impl<T: Real> NeighborIndex<T> {
    pub fn build(bubbles: &[Bubble<T>]) -> Self {
        let centers: Vec<Vec2<T>> = bubbles.iter().map(|b| b.center).collect();
        let r_max = bubbles.iter().map(|b| b.radius).fold(T::zero(), T::max);
        Self {
            grid: PointGrid::new(&centers, T::two() * r_max),
            r_max,
        }
    }

    /// Indices that may interact with bubble `i`, allowing the others to
    /// have drifted up to one cell since the index was built.
    fn neighbors(&self, i: usize, bubbles: &[Bubble<T>], force: &ForceParams<T>, out: &mut Vec<usize>) {
        out.clear();
        let b = &bubbles[i];
        let reach = force.cutoff * (b.radius + self.r_max) + self.grid.cell_size();
        self.grid.for_each_near(b.center, reach, |j| {
            if j != i {
                out.push(j);
            }
        });
        out.sort_unstable();
    }
}

fn net_force<T: Real>(i: usize, at: Vec2<T>, bubbles: &[Bubble<T>], near: &[usize], force: &ForceParams<T>) -> Vec2<T> {
    let me = Bubble {
        center: at,
        ..bubbles[i]
    };
    let mut f = Vec2::zero();
    for &j in near {
        f += pair_force(i, &me, j, &bubbles[j], force);
    }
    f
}

/// One classical RK4 step of `m x'' + c x' = f(x)`.
pub fn rk4_step<T: Real>(
    x: Vec2<T>,
    v: Vec2<T>,
    dt: T,
    m: T,
    c: T,
    mut f: impl FnMut(Vec2<T>) -> Vec2<T>,
) -> (Vec2<T>, Vec2<T>) {
    let h = dt * T::half();
    let mut acc = |x: Vec2<T>, v: Vec2<T>| (f(x) - v * c) / m;
    let k1x = v;
    let k1v = acc(x, v);
    let k2x = v + k1v * h;
    let k2v = acc(x + k1x * h, k2x);
    let k3x = v + k2v * h;
    let k3v = acc(x + k2x * h, k3x);
    let k4x = v + k3v * dt;
    let k4v = acc(x + k3x * dt, k4x);
    let sixth = dt / T::lit(6.0);
    (
        x + (k1x + k2x * T::two() + k3x * T::two() + k4x) * sixth,
        v + (k1v + k2v * T::two() + k3v * T::two() + k4v) * sixth,
    )
}

/// One sweep: every non-boundary bubble, in order, takes one RK4 step with
/// all others frozen at their current positions.
pub fn relax_step<T: Real>(
    state: &mut RelaxState<T>,
    dynamics: &DynamicsParams<T>,
    force: &ForceParams<T>,
    index: &NeighborIndex<T>,
    region: Option<&Region<T>>,
) -> Result<()> {
    let mut near = Vec::new();
    for i in 0..state.bubbles.len() {
        if state.bubbles[i].is_fixed() {
            continue;
        }
        index.neighbors(i, &state.bubbles, force, &mut near);
        let bubbles = &state.bubbles;
        let x0 = bubbles[i].center;
        let (mut x, mut v) = rk4_step(x0, state.velocities[i], dynamics.dt, dynamics.m, dynamics.c, |p| {
            net_force(i, p, bubbles, &near, force)
        });
        if !(x.is_finite() && v.is_finite()) {
            return Err(Error::Diverged);
        }
        if let Some(reg) = region {
            if !reg.contains(x) {
                let q = reg.pull_back(x, state.bubbles[i].radius);
                x = if reg.contains(q) { q } else { x0 };
                v = Vec2::zero();
            }
        }
        state.bubbles[i].center = x;
        state.velocities[i] = v;
    }
    Ok(())
}

/// Largest net force over the movable bubbles, divided by the bubble radius.
pub fn max_net_force<T: Real>(bubbles: &[Bubble<T>], force: &ForceParams<T>) -> T {
    let index = NeighborIndex::build(bubbles);
    let mut near = Vec::new();
    let mut worst = T::zero();
    for i in 0..bubbles.len() {
        if bubbles[i].is_fixed() {
            continue;
        }
        index.neighbors(i, bubbles, force, &mut near);
        let f = net_force(i, bubbles[i].center, bubbles, &near, force);
        worst = worst.max(f.norm() / bubbles[i].radius);
    }
    worst
}

/// Minimum angle in degrees of the triangulated bubble centers (0 when the
/// centers cannot be triangulated).
pub fn snapshot_min_angle<T: Real>(bubbles: &[Bubble<T>]) -> f64 {
    delaunay_triangulate(bubbles)
        .ok()
        .and_then(|m| quality_report(&m).ok())
        .map_or(0.0, |r| r.min_angle)
}

/// Quantity-control strategy used by [`relax_until_converged`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy<T> {
    /// Pure relaxation.
    None,
    /// One boundary-region pass with the given pairwise overlap threshold,
    /// then relaxation.
    NewQc { threshold: T },
    /// Relaxation interleaved with summed-overlap QC every `period` sweeps.
    OriginalQc { low: T, high: T, period: usize },
}

/// Relaxes until the largest normalized net force drops below
/// `force_tol`, the minimum angle stalls, or `max_sweeps` is reached. With
/// the original strategy the last QC pass must also have made no changes.
///
/// On non-convergence the state with the best minimum angle is returned.
pub fn relax_until_converged<T: Real>(
    bubbles: Vec<Bubble<T>>,
    dynamics: &DynamicsParams<T>,
    force: &ForceParams<T>,
    strategy: Strategy<T>,
) -> Result<(Vec<Bubble<T>>, ConvergenceTrace)> {
    dynamics.validate()?;
    force.validate()?;
    let start = Instant::now();
    let elapsed = || {
        if dynamics.record_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    };
    let region = Region::from_bubbles(&bubbles);
    let bubbles = match strategy {
        Strategy::NewQc { threshold } => qc_boundary_region(&bubbles, &anchor_indices(&bubbles), threshold),
        _ => bubbles,
    };
    let mut state = RelaxState::at_rest(bubbles);
    let mut trace = ConvergenceTrace::default();
    let record = |state: &RelaxState<T>, sweep: usize, trace: &mut ConvergenceTrace| {
        let rec = TraceRecord {
            sweep,
            bubble_count: state.bubbles.len(),
            max_force: max_net_force(&state.bubbles, force).as_f64(),
            min_angle_deg: snapshot_min_angle(&state.bubbles),
            elapsed_s: elapsed(),
        };
        trace.records.push(rec);
        rec
    };
    let first = record(&state, 0, &mut trace);
    let mut best = (first.min_angle_deg, state.bubbles.clone());
    let mut qc_clean = !matches!(strategy, Strategy::OriginalQc { .. });

    for sweep in 1..=dynamics.max_sweeps {
        let index = NeighborIndex::build(&state.bubbles);
        relax_step(&mut state, dynamics, force, &index, region.as_ref())?;
        if let Strategy::OriginalQc { low, high, period } = strategy {
            if sweep % period.max(1) == 0 {
                let changes = qc_original(&mut state.bubbles, low, high, region.as_ref());
                state.velocities.resize(state.bubbles.len(), Vec2::zero());
                if changes > 0 {
                    // velocities are tied to indices, which QC reshuffles
                    state.velocities.iter_mut().for_each(|v| *v = Vec2::zero());
                }
                qc_clean = changes == 0;
            }
        }
        let rec = record(&state, sweep, &mut trace);
        if rec.min_angle_deg > best.0 {
            best = (rec.min_angle_deg, state.bubbles.clone());
        }
        let force_ok = rec.max_force < dynamics.force_tol.as_f64();
        let w = dynamics.stall_window;
        let stalled = w > 0 && trace.records.len() > w && {
            let tail = &trace.records[trace.records.len() - w - 1..];
            let lo = tail.iter().map(|r| r.min_angle_deg).fold(f64::INFINITY, f64::min);
            let hi = tail.iter().map(|r| r.min_angle_deg).fold(0.0f64, f64::max);
            hi - lo < 0.1
        };
        if (force_ok || stalled) && qc_clean {
            trace.converged = true;
            return Ok((state.bubbles, trace));
        }
    }
    log::warn!("relaxation did not converge within {} sweeps", dynamics.max_sweeps);
    Ok((best.1, trace))
}
