use serde::{Deserialize, Serialize};

use crate::geom::{Vec2, Vec3};
use crate::scalar::Real;

/// Rectangular parameter domain `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain<T> {
    pub u0: T,
    pub u1: T,
    pub v0: T,
    pub v1: T,
}

impl<T: Real> ParamDomain<T> {
    pub fn new(u0: T, u1: T, v0: T, v1: T) -> Self {
        Self { u0, u1, v0, v1 }
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        p.x >= self.u0 && p.x <= self.u1 && p.y >= self.v0 && p.y <= self.v1
    }

    /// Counterclockwise corner polygon.
    pub fn corners(&self) -> Vec<Vec2<T>> {
        vec![
            Vec2::new(self.u0, self.v0),
            Vec2::new(self.u1, self.v0),
            Vec2::new(self.u1, self.v1),
            Vec2::new(self.u0, self.v1),
        ]
    }
}

/// A regular parametric surface with analytic first and second partials.
pub trait ParametricSurface<T: Real> {
    fn domain(&self) -> ParamDomain<T>;
    fn position(&self, u: T, v: T) -> Vec3<T>;
    fn du(&self, u: T, v: T) -> Vec3<T>;
    fn dv(&self, u: T, v: T) -> Vec3<T>;
    fn duu(&self, u: T, v: T) -> Vec3<T>;
    fn duv(&self, u: T, v: T) -> Vec3<T>;
    fn dvv(&self, u: T, v: T) -> Vec3<T>;
}

/// The built-in surface catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuiltinSurface<T> {
    /// `origin + u * axis_u + v * axis_v`.
    Plane {
        origin: [T; 3],
        axis_u: [T; 3],
        axis_v: [T; 3],
        domain: ParamDomain<T>,
    },
    /// Latitude `u`, longitude `v`.
    Sphere { radius: T, domain: ParamDomain<T> },
    /// Angle `u`, height `v`.
    Cylinder { radius: T, domain: ParamDomain<T> },
    /// Angle `u` around the axis, angle `v` around the tube.
    Torus { major: T, minor: T, domain: ParamDomain<T> },
    /// Graph `z = amplitude * sin(freq_u * u) * cos(freq_v * v)`.
    Wavy {
        amplitude: T,
        freq_u: T,
        freq_v: T,
        domain: ParamDomain<T>,
    },
}

fn v3<T: Real>(a: [T; 3]) -> Vec3<T> {
    Vec3::new(a[0], a[1], a[2])
}

impl<T: Real> BuiltinSurface<T> {
    pub fn plane(domain: ParamDomain<T>) -> Self {
        let (o, i) = (T::zero(), T::one());
        BuiltinSurface::Plane {
            origin: [o, o, o],
            axis_u: [i, o, o],
            axis_v: [o, i, o],
            domain,
        }
    }

    pub fn sphere(radius: T, domain: ParamDomain<T>) -> Self {
        BuiltinSurface::Sphere { radius, domain }
    }

    pub fn cylinder(radius: T, domain: ParamDomain<T>) -> Self {
        BuiltinSurface::Cylinder { radius, domain }
    }

    pub fn torus(major: T, minor: T, domain: ParamDomain<T>) -> Self {
        BuiltinSurface::Torus { major, minor, domain }
    }

    pub fn wavy(amplitude: T, freq_u: T, freq_v: T, domain: ParamDomain<T>) -> Self {
        BuiltinSurface::Wavy {
            amplitude,
            freq_u,
            freq_v,
            domain,
        }
    }

    /// Same surface with every length multiplied by `t` and the parameter
    /// domain unchanged. `None` for the wavy graph, whose parametrization is
    /// not closed under scaling.
    pub fn scaled(&self, t: T) -> Option<Self> {
        Some(match self.clone() {
            BuiltinSurface::Plane {
                origin,
                axis_u,
                axis_v,
                domain,
            } => BuiltinSurface::Plane {
                origin: origin.map(|x| x * t),
                axis_u: axis_u.map(|x| x * t),
                axis_v: axis_v.map(|x| x * t),
                domain,
            },
            BuiltinSurface::Sphere { radius, domain } => BuiltinSurface::Sphere {
                radius: radius * t,
                domain,
            },
            BuiltinSurface::Cylinder { radius, domain } => BuiltinSurface::Cylinder {
                radius: radius * t,
                domain,
            },
            BuiltinSurface::Torus { major, minor, domain } => BuiltinSurface::Torus {
                major: major * t,
                minor: minor * t,
                domain,
            },
            BuiltinSurface::Wavy { .. } => return None,
        })
    }
}

impl<T: Real> ParametricSurface<T> for BuiltinSurface<T> {
    fn domain(&self) -> ParamDomain<T> {
        match self {
            BuiltinSurface::Plane { domain, .. }
            | BuiltinSurface::Sphere { domain, .. }
            | BuiltinSurface::Cylinder { domain, .. }
            | BuiltinSurface::Torus { domain, .. }
            | BuiltinSurface::Wavy { domain, .. } => *domain,
        }
    }

    fn position(&self, u: T, v: T) -> Vec3<T> {
        match *self {
            BuiltinSurface::Plane {
                origin, axis_u, axis_v, ..
            } => v3(origin) + v3(axis_u) * u + v3(axis_v) * v,
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(u.cos() * v.cos(), u.cos() * v.sin(), u.sin()) * r,
            BuiltinSurface::Cylinder { radius: r, .. } => Vec3::new(r * u.cos(), r * u.sin(), v),
            BuiltinSurface::Torus { major, minor, .. } => {
                let w = major + minor * v.cos();
                Vec3::new(w * u.cos(), w * u.sin(), minor * v.sin())
            }
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(u, v, a * (p * u).sin() * (q * v).cos()),
        }
    }

    fn du(&self, u: T, v: T) -> Vec3<T> {
        let z = T::zero();
        match *self {
            BuiltinSurface::Plane { axis_u, .. } => v3(axis_u),
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(-u.sin() * v.cos(), -u.sin() * v.sin(), u.cos()) * r,
            BuiltinSurface::Cylinder { radius: r, .. } => Vec3::new(-r * u.sin(), r * u.cos(), z),
            BuiltinSurface::Torus { major, minor, .. } => {
                let w = major + minor * v.cos();
                Vec3::new(-w * u.sin(), w * u.cos(), z)
            }
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(T::one(), z, a * p * (p * u).cos() * (q * v).cos()),
        }
    }

    fn dv(&self, u: T, v: T) -> Vec3<T> {
        let z = T::zero();
        match *self {
            BuiltinSurface::Plane { axis_v, .. } => v3(axis_v),
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(-u.cos() * v.sin(), u.cos() * v.cos(), z) * r,
            BuiltinSurface::Cylinder { .. } => Vec3::new(z, z, T::one()),
            BuiltinSurface::Torus { minor, .. } => {
                Vec3::new(-minor * v.sin() * u.cos(), -minor * v.sin() * u.sin(), minor * v.cos())
            }
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(z, T::one(), -a * q * (p * u).sin() * (q * v).sin()),
        }
    }

    fn duu(&self, u: T, v: T) -> Vec3<T> {
        let z = T::zero();
        match *self {
            BuiltinSurface::Plane { .. } => Vec3::zero(),
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(-u.cos() * v.cos(), -u.cos() * v.sin(), -u.sin()) * r,
            BuiltinSurface::Cylinder { radius: r, .. } => Vec3::new(-r * u.cos(), -r * u.sin(), z),
            BuiltinSurface::Torus { major, minor, .. } => {
                let w = major + minor * v.cos();
                Vec3::new(-w * u.cos(), -w * u.sin(), z)
            }
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(z, z, -a * p * p * (p * u).sin() * (q * v).cos()),
        }
    }

    fn duv(&self, u: T, v: T) -> Vec3<T> {
        let z = T::zero();
        match *self {
            BuiltinSurface::Plane { .. } | BuiltinSurface::Cylinder { .. } => Vec3::zero(),
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(u.sin() * v.sin(), -u.sin() * v.cos(), z) * r,
            BuiltinSurface::Torus { minor, .. } => Vec3::new(minor * v.sin() * u.sin(), -minor * v.sin() * u.cos(), z),
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(z, z, -a * p * q * (p * u).cos() * (q * v).sin()),
        }
    }

    fn dvv(&self, u: T, v: T) -> Vec3<T> {
        let z = T::zero();
        match *self {
            BuiltinSurface::Plane { .. } | BuiltinSurface::Cylinder { .. } => Vec3::zero(),
            BuiltinSurface::Sphere { radius: r, .. } => Vec3::new(-u.cos() * v.cos(), -u.cos() * v.sin(), z) * r,
            BuiltinSurface::Torus { minor, .. } => {
                Vec3::new(-minor * v.cos() * u.cos(), -minor * v.cos() * u.sin(), -minor * v.sin())
            }
            BuiltinSurface::Wavy {
                amplitude: a,
                freq_u: p,
                freq_v: q,
                ..
            } => Vec3::new(z, z, -a * q * q * (p * u).sin() * (q * v).cos()),
        }
    }
}
