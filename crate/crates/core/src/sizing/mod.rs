//! Curvature-driven edge length and bubble radius bounds over parametric
//! surfaces.
//!
//! The maximum allowable 3D edge length at a point follows from a relative
//! chord-error tolerance `eps` as `g(eps) / kappa`, where `kappa` is the
//! largest absolute principal curvature. It is mapped into parameter units by
//! dividing by the largest singular value of the Jacobian, and a bubble may be
//! at most half that long.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scalar::Real;

mod surface;

pub use surface::{BuiltinSurface, ParamDomain, ParametricSurface};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizingParams<T> {
    /// Relative chord-error tolerance.
    pub epsilon: T,
    pub r_min: T,
    pub r_max: T,
}

impl<T: Real> SizingParams<T> {
    pub fn new(epsilon: T, r_min: T, r_max: T) -> Result<Self> {
        let p = Self { epsilon, r_min, r_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if !(self.r_min > T::zero() && self.r_min <= self.r_max) {
            return Err(Error::InvalidParameter(format!(
                "radius bounds must satisfy 0 < r_min <= r_max (got {}, {})",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }
}

fn check_epsilon<T: Real>(eps: T) -> Result<()> {
    if !(eps > T::zero() && eps < T::one() / T::lit(1.2)) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1/1.2)")));
    }
    Ok(())
}

/// `g(eps) = (1 - eps) * sqrt(40 * (1 - sqrt(1 - 1.2 eps)))`.
pub fn g_of_eps<T: Real>(eps: T) -> Result<T> {
    check_epsilon(eps)?;
    let inner = T::one() - (T::one() - T::lit(1.2) * eps).sqrt();
    Ok((T::one() - eps) * (T::lit(40.0) * inner).sqrt())
}

struct Frame<T> {
    fu: Vec3<T>,
    fv: Vec3<T>,
    normal: Vec3<T>,
}

fn frame<T: Real, S: ParametricSurface<T> + ?Sized>(s: &S, u: T, v: T) -> Result<Frame<T>> {
    let fu = s.du(u, v);
    let fv = s.dv(u, v);
    let n = fu.cross(fv);
    let scale = fu.norm_sq().max(fv.norm_sq());
    if !(n.norm() > T::eps_times(16.0) * scale) {
        return Err(Error::IrregularPoint {
            u: u.as_f64(),
            v: v.as_f64(),
        });
    }
    Ok(Frame {
        fu,
        fv,
        normal: n.normalized(),
    })
}

/// Signed principal curvatures `(k1, k2)` with `k1 >= k2`, from the first
/// and second fundamental forms.
pub fn principal_curvatures<T: Real, S: ParametricSurface<T> + ?Sized>(surface: &S, u: T, v: T) -> Result<(T, T)> {
    let Frame { fu, fv, normal } = frame(surface, u, v)?;
    let l = surface.duu(u, v).dot(normal);
    let m = surface.duv(u, v).dot(normal);
    let n = surface.dvv(u, v).dot(normal);
    // second fundamental form in an orthonormal tangent basis (e1, e2),
    // written in (u, v) coordinates as e1 = (p, 0), e2 = (q, h)
    let nu = fu.norm();
    let e1 = fu / nu;
    let c = fv.dot(e1);
    let h = T::one() / (fv - e1 * c).norm();
    let p = T::one() / nu;
    let q = -c * p * h;
    let b11 = l * p * p;
    let b12 = p * (l * q + m * h);
    let b22 = l * q * q + T::two() * m * q * h + n * h * h;
    let mean = (b11 + b22) * T::half();
    let disc = ((b11 - b22) * T::half()).hypot(b12);
    Ok((mean + disc, mean - disc))
}

/// Largest absolute normal curvature at `(u, v)`.
pub fn max_normal_curvature<T: Real, S: ParametricSurface<T> + ?Sized>(surface: &S, u: T, v: T) -> Result<T> {
    let (k1, k2) = principal_curvatures(surface, u, v)?;
    Ok(k1.abs().max(k2.abs()))
}

/// Maximum allowable 3D edge length `g(eps) / kappa_max`; `+inf` where the
/// surface is flat.
pub fn allowable_edge_3d<T: Real, S: ParametricSurface<T> + ?Sized>(
    surface: &S,
    u: T,
    v: T,
    params: &SizingParams<T>,
) -> Result<T> {
    let g = g_of_eps(params.epsilon)?;
    let k = max_normal_curvature(surface, u, v)?;
    if k <= T::eps_times(4.0) {
        Ok(T::infinity())
    } else {
        Ok(g / k)
    }
}

/// Singular values `(s1, s2)`, `s1 >= s2`, of the 3x2 matrix with columns
/// `a` and `b`, by a single one-sided Jacobi rotation that orthogonalizes
/// the columns.
pub fn singular_values_3x2<T: Real>(a: Vec3<T>, b: Vec3<T>) -> (T, T) {
    let alpha = a.dot(a);
    let beta = b.dot(b);
    let gamma = a.dot(b);
    let (a2, b2) = if gamma == T::zero() {
        (a, b)
    } else {
        let zeta = (beta - alpha) / (T::two() * gamma);
        let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
        let c = T::one() / (T::one() + t * t).sqrt();
        let s = c * t;
        (a * c - b * s, a * s + b * c)
    };
    let (x, y) = (a2.norm(), b2.norm());
    if x >= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Largest singular value of the Jacobian `(f_u, f_v)`.
pub fn sigma1<T: Real, S: ParametricSurface<T> + ?Sized>(surface: &S, u: T, v: T) -> Result<T> {
    let fr = frame(surface, u, v)?;
    Ok(singular_values_3x2(fr.fu, fr.fv).0)
}

/// Maximum bubble radius in parameter units:
/// `clamp(l_p / sigma1, 2 r_min, 2 r_max) / 2`.
pub fn radius_bound<T: Real, S: ParametricSurface<T> + ?Sized>(
    surface: &S,
    u: T,
    v: T,
    params: &SizingParams<T>,
) -> Result<T> {
    let lp = allowable_edge_3d(surface, u, v, params)?;
    let s1 = sigma1(surface, u, v)?;
    let lp_param = lp / s1;
    let lo = T::two() * params.r_min;
    let hi = T::two() * params.r_max;
    Ok(lp_param.max(lo).min(hi) * T::half())
}
