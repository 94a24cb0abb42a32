use crate::geom::Vec2;
use crate::scalar::Real;

/// Role of a bubble during relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BubbleKind {
    /// On a boundary loop; never moves. `ring` 0 is the outer loop, holes
    /// are numbered from 1.
    Boundary { ring: u32 },
    /// Interior anchor: moves under net force, radius is authoritative.
    Anchor,
    /// Ordinary interior bubble.
    Mobile,
}

/// A circle whose center is a prospective mesh vertex and whose radius is
/// half the local target edge length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble<T> {
    pub center: Vec2<T>,
    pub radius: T,
    pub kind: BubbleKind,
}

impl<T: Real> Bubble<T> {
    pub fn new(center: Vec2<T>, radius: T, kind: BubbleKind) -> Self {
        Self { center, radius, kind }
    }

    pub fn mobile(center: Vec2<T>, radius: T) -> Self {
        Self::new(center, radius, BubbleKind::Mobile)
    }

    pub fn anchor(center: Vec2<T>, radius: T) -> Self {
        Self::new(center, radius, BubbleKind::Anchor)
    }

    pub fn boundary(center: Vec2<T>, radius: T, ring: u32) -> Self {
        Self::new(center, radius, BubbleKind::Boundary { ring })
    }

    #[inline]
    pub fn is_fixed(&self) -> bool {
        matches!(self.kind, BubbleKind::Boundary { .. })
    }

    #[inline]
    pub fn is_anchor(&self) -> bool {
        !matches!(self.kind, BubbleKind::Mobile)
    }

    pub fn ring(&self) -> Option<u32> {
        match self.kind {
            BubbleKind::Boundary { ring } => Some(ring),
            _ => None,
        }
    }
}
