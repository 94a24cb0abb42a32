//! Small fixed-size vectors and polygon helpers.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Counterclockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.x.as_f64(), self.y.as_f64()]
    }

    pub fn cast<U: Real>(self) -> Vec2<U> {
        Vec2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
}

macro_rules! impl_vec_ops {
    ($V:ident { $($f:ident),+ }) => {
        impl<T: Real> Add for $V<T> {
            type Output = Self;
            #[inline]
            fn add(self, o: Self) -> Self { $V { $($f: self.$f + o.$f),+ } }
        }
        impl<T: Real> Sub for $V<T> {
            type Output = Self;
            #[inline]
            fn sub(self, o: Self) -> Self { $V { $($f: self.$f - o.$f),+ } }
        }
        impl<T: Real> Mul<T> for $V<T> {
            type Output = Self;
            #[inline]
            fn mul(self, s: T) -> Self { $V { $($f: self.$f * s),+ } }
        }
        impl<T: Real> Div<T> for $V<T> {
            type Output = Self;
            #[inline]
            fn div(self, s: T) -> Self { $V { $($f: self.$f / s),+ } }
        }
        impl<T: Real> Neg for $V<T> {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self { $V { $($f: -self.$f),+ } }
        }
        impl<T: Real> AddAssign for $V<T> {
            #[inline]
            fn add_assign(&mut self, o: Self) { $(self.$f = self.$f + o.$f;)+ }
        }
        impl<T: Real> SubAssign for $V<T> {
            #[inline]
            fn sub_assign(&mut self, o: Self) { $(self.$f = self.$f - o.$f;)+ }
        }
        impl<T: Real> MulAssign<T> for $V<T> {
            #[inline]
            fn mul_assign(&mut self, s: T) { $(self.$f = self.$f * s;)+ }
        }
    };
}

impl_vec_ops!(Vec2 { x, y });
impl_vec_ops!(Vec3 { x, y, z });

/// Interior angle at `a` of the triangle `a b c`, in radians, for any
/// vector type with a dot product and norm.
pub fn corner_angle2<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    let u = b - a;
    let v = c - a;
    u.cross(v).abs().atan2(u.dot(v))
}

pub fn corner_angle3<T: Real>(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> T {
    let u = b - a;
    let v = c - a;
    u.cross(v).norm().atan2(u.dot(v))
}

/// Twice the signed area of the triangle `a b c` (positive when counterclockwise).
#[inline]
pub fn orient2<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    (b - a).cross(c - a)
}

/// Signed area of a closed polygon (shoelace), positive when counterclockwise.
pub fn polygon_area<T: Real>(poly: &[Vec2<T>]) -> T {
    let n = poly.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + poly[i].cross(poly[(i + 1) % n]);
    }
    acc * T::half()
}

pub fn polygon_perimeter<T: Real>(poly: &[Vec2<T>]) -> T {
    let n = poly.len();
    (0..n).map(|i| poly[i].dist(poly[(i + 1) % n])).sum()
}

/// Even-odd point in polygon test. Points exactly on an edge may go either way.
pub fn point_in_polygon<T: Real>(p: Vec2<T>, poly: &[Vec2<T>]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = poly[i];
        let b = poly[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Closest point to `p` on the segment `a b`.
pub fn closest_on_segment<T: Real>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> Vec2<T> {
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 <= T::zero() {
        return a;
    }
    let t = ((p - a).dot(d) / len2).max(T::zero()).min(T::one());
    a + d * t
}

/// Closest point on a closed polygon boundary together with the index of the
/// edge `(i, i+1)` it lies on.
pub fn closest_on_polygon<T: Real>(p: Vec2<T>, poly: &[Vec2<T>]) -> (Vec2<T>, usize) {
    let n = poly.len();
    let mut best = (poly[0], 0usize);
    let mut best_d = T::infinity();
    for i in 0..n {
        let q = closest_on_segment(p, poly[i], poly[(i + 1) % n]);
        let d = (q - p).norm_sq();
        if d < best_d {
            best_d = d;
            best = (q, i);
        }
    }
    best
}

/// Axis-aligned bounding box of a point set: `(min, max)`.
pub fn bbox2<T: Real>(pts: impl IntoIterator<Item = Vec2<T>>) -> Option<(Vec2<T>, Vec2<T>)> {
    let mut it = pts.into_iter();
    let first = it.next()?;
    let (mut lo, mut hi) = (first, first);
    for p in it {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    Some((lo, hi))
}

pub fn bbox3<T: Real>(pts: impl IntoIterator<Item = Vec3<T>>) -> Option<(Vec3<T>, Vec3<T>)> {
    let mut it = pts.into_iter();
    let first = it.next()?;
    let (mut lo, mut hi) = (first, first);
    for p in it {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        lo.z = lo.z.min(p.z);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
        hi.z = hi.z.max(p.z);
    }
    Some((lo, hi))
}
