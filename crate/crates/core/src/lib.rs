//! Conformal-mapping accelerated bubble meshing.
//!
//! The crate packs and relaxes bubbles (circles whose centers become mesh
//! vertices) in planar domains, and meshes disk-topology surfaces by
//! flattening them conformally, re-meshing in the plane and lifting the
//! result back with barycentric coordinates.
//!
//! All geometry is generic over the scalar type through [`Real`]; the
//! aliases at the bottom of this file fix it to `f64` for everyday use.

// `!(x > 0)` style tests are used on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bubble;
pub mod conformal;
pub mod error;
pub mod geom;
pub mod mapping;
pub mod mesh;
pub mod pack;
pub mod pipeline;
pub mod relax;
pub mod remesh;
pub mod scalar;
pub mod sizing;
pub mod spatial;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bubble::{Bubble, BubbleKind};
pub use geom::{Vec2, Vec3};

/// Indexed 3D triangle mesh in double precision.
pub type TriangleMesh = mesh::TriangleMesh<f64>;
/// Planar triangle mesh in double precision.
pub type PlanarMesh = mesh::PlanarMesh<f64>;
/// Bubble in double precision.
pub type Bubble64 = bubble::Bubble<f64>;
/// Planar packing domain in double precision.
pub type PackingDomain = pack::PackingDomain<f64>;
/// Flattening output in double precision.
pub type FlattenResult = conformal::FlattenResult<f64>;
pub use relax::ConvergenceTrace;
/// Built-in parametric surface in double precision.
pub type Surface = sizing::BuiltinSurface<f64>;

/// Single precision variants.
pub mod f32 {
    pub type TriangleMesh = crate::mesh::TriangleMesh<f32>;
    pub type PlanarMesh = crate::mesh::PlanarMesh<f32>;
    pub type Bubble = crate::bubble::Bubble<f32>;
    pub type PackingDomain = crate::pack::PackingDomain<f32>;
}
