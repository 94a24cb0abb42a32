use std::fmt;

use super::{MeshGeometry, TriangleMesh};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::scalar::Real;
use crate::sizing::ParametricSurface;

/// Angle statistics of a triangle mesh, all angles in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    pub triangle_count: usize,
    pub min_angle: f64,
    pub max_angle: f64,
    /// Counts of per-face minimum angles in `[0,15)`, `[15,30)`, `[30,45)`, `[45,60]`.
    pub min_angle_histogram: [usize; 4],
}

impl MeshQualityReport {
    /// Fraction of triangles whose minimum angle is at least 30 degrees.
    pub fn fraction_at_least_30(&self) -> f64 {
        let [_, _, a, b] = self.min_angle_histogram;
        (a + b) as f64 / self.triangle_count.max(1) as f64
    }

    pub fn fraction_at_least_45(&self) -> f64 {
        self.min_angle_histogram[3] as f64 / self.triangle_count.max(1) as f64
    }

    /// Table header matching [`MeshQualityReport::table_row`].
    pub fn table_header() -> &'static str {
        "Total Triangles\tMinimum Angle\tMaximum Angle\t0°~15°\t15°~30°\t30°~45°\t45°~60°"
    }

    pub fn table_row(&self) -> String {
        let [a, b, c, d] = self.min_angle_histogram;
        format!(
            "{}\t{:.4}°\t{:.3}°\t{}\t{}\t{}\t{}",
            self.triangle_count, self.min_angle, self.max_angle, a, b, c, d
        )
    }
}

impl fmt::Display for MeshQualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::table_header())?;
        writeln!(f, "{}", self.table_row())
    }
}

fn bucket(min_deg: f64) -> usize {
    if min_deg < 15.0 {
        0
    } else if min_deg < 30.0 {
        1
    } else if min_deg < 45.0 {
        2
    } else {
        3
    }
}

/// Computes the minimum/maximum interior angles and the histogram of
/// per-face minimum angles. Fails on the first degenerate face.
pub fn quality_report<T: Real, M: MeshGeometry<T>>(mesh: &M) -> Result<MeshQualityReport> {
    let diag = mesh.bbox_diagonal();
    let tol = T::lit(1e-14) * diag * diag;
    let mut report = MeshQualityReport {
        triangle_count: mesh.num_faces(),
        min_angle: f64::INFINITY,
        max_angle: 0.0,
        min_angle_histogram: [0; 4],
    };
    for f in 0..mesh.num_faces() {
        let area = mesh.face_area(f);
        if !(area > tol) {
            return Err(Error::DegenerateFace {
                face: f,
                area: area.as_f64(),
            });
        }
        let angles = mesh.face_angles(f).map(|a| a.as_f64().to_degrees());
        let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = angles.iter().copied().fold(0.0, f64::max);
        report.min_angle = report.min_angle.min(lo);
        report.max_angle = report.max_angle.max(hi);
        report.min_angle_histogram[bucket(lo)] += 1;
    }
    if mesh.num_faces() == 0 {
        report.min_angle = 0.0;
    }
    Ok(report)
}

/// Barycentric sample points of density `n`: the union of the regular
/// grids with `1..=n` subdivisions, so higher densities sample supersets.
fn barycentric_samples(n: usize) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::new();
    for k in 1..=n.max(1) {
        for i in 0..=k {
            for j in 0..=(k - i) {
                let a = i as f64 / k as f64;
                let b = j as f64 / k as f64;
                pts.push((a, b, 1.0 - a - b));
            }
        }
    }
    pts
}

/// One-sided Hausdorff estimate between a mesh and the parametric surface it
/// samples: the largest distance between a point of a flat face and the
/// surface point at the same interpolated parameters.
pub fn hausdorff_estimate<T: Real, S: ParametricSurface<T> + ?Sized>(
    mesh: &TriangleMesh<T>,
    surface: &S,
    sample_density: usize,
) -> Result<T> {
    let uv = mesh.uv.as_ref().ok_or(Error::MissingParametrization)?;
    let samples = barycentric_samples(sample_density);
    let mut worst = T::zero();
    for f in &mesh.faces {
        let p = [mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]];
        let q = [uv[f[0]], uv[f[1]], uv[f[2]]];
        for &(a, b, c) in &samples {
            let (a, b, c) = (T::lit(a), T::lit(b), T::lit(c));
            let flat = p[0] * a + p[1] * b + p[2] * c;
            let t: Vec2<T> = q[0] * a + q[1] * b + q[2] * c;
            let exact = surface.position(t.x, t.y);
            worst = worst.max(flat.dist(exact));
        }
    }
    Ok(worst)
}
