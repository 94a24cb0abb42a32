use serde::{Deserialize, Serialize};

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::scalar::Real;

/// Interbubble force law.
///
/// The force between two bubbles acts along the line of centers with
/// magnitude `l0 * P(w)`, `w = l / l0`, `l0 = r_i + r_j`, where `P` is the
/// cubic with `P(0) = f0`, `P(1) = 0`, `P(cutoff) = 0` and `P'(1) = -k`.
/// Positive values repel. Beyond the cutoff the force vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForceParams<T> {
    pub k: T,
    pub f0: T,
    pub cutoff: T,
    /// Seed for the direction of the push between coincident bubbles.
    pub seed: u64,
}

impl<T: Real> Default for ForceParams<T> {
    fn default() -> Self {
        Self {
            k: T::one(),
            f0: T::one(),
            cutoff: T::lit(1.5),
            seed: 0,
        }
    }
}

impl<T: Real> ForceParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > T::zero() && self.f0 > T::zero() && self.cutoff > T::one()) {
            return Err(Error::InvalidParameter(
                "force law needs k > 0, f0 > 0 and cutoff > 1".into(),
            ));
        }
        Ok(())
    }

    /// Coefficients `(a, b)` of `P(w) = (w - 1)(w - cutoff)(a w + b)`.
    fn coeffs(&self) -> (T, T) {
        let b = self.f0 / self.cutoff;
        let a = self.k / (self.cutoff - T::one()) - b;
        (a, b)
    }

    /// Dimensionless profile `P(w)`; zero for `w >= cutoff`.
    pub fn profile(&self, w: T) -> T {
        if w >= self.cutoff {
            return T::zero();
        }
        let (a, b) = self.coeffs();
        (w - T::one()) * (w - self.cutoff) * (a * w + b)
    }
}

fn mix(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Unit direction for the pair `(lo, hi)`, `lo < hi`.
fn pair_direction<T: Real>(lo: usize, hi: usize, seed: u64) -> Vec2<T> {
    let h = mix(seed ^ mix((lo as u64) << 32 ^ hi as u64));
    let t = (h >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    Vec2::new(T::lit(t.cos()), T::lit(t.sin()))
}

/// Force exerted on bubble `i` by bubble `j`.
///
/// The result is exactly antisymmetric: `pair_force(i, a, j, b)` is the
/// negation of `pair_force(j, b, i, a)`. Coincident centers repel with the
/// zero-separation force along a direction derived from the indices and the
/// seed.
pub fn pair_force<T: Real>(i: usize, bi: &Bubble<T>, j: usize, bj: &Bubble<T>, params: &ForceParams<T>) -> Vec2<T> {
    let l0 = bi.radius + bj.radius;
    let d = bi.center - bj.center;
    let l = d.norm();
    if l < T::lit(1e-12) {
        let (lo, hi, s) = if i < j { (i, j, T::one()) } else { (j, i, -T::one()) };
        return pair_direction::<T>(lo, hi, params.seed) * (s * params.f0 * l0);
    }
    let w = l / l0;
    if w >= params.cutoff {
        return Vec2::zero();
    }
    d * (l0 * params.profile(w) / l)
}
