//! Origin-symmetric convex bodies `δB₂ ⊂ Z ⊂ B₂`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Ball,
    Box,
}

/// JSON form of a body: `{"kind":"ball"|"box","dim":d,"size":…}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub dim: usize,
    pub size: f64,
}

/// A closed ball of radius `r` or an axis-aligned cube of half-width `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexBody {
    kind: BodyKind,
    dim: usize,
    size: f64,
}

/// Radii the condition checkers need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyMetrics {
    pub inscribed: f64,
    pub circumscribed: f64,
    /// Smallest norm on the closure of `Z ∖ ½Z`.
    pub annulus_min_norm: f64,
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(BodyKind::Ball, dim, radius)
    }

    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::new(BodyKind::Box, dim, half_width)
    }

    pub fn new(kind: BodyKind, dim: usize, size: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("body dimension must be positive".into()));
        }
        if !(size.is_finite() && size > 0.0) {
            return Err(Error::InvalidParameter(format!("body size must be positive, got {size}")));
        }
        Ok(ConvexBody { kind, dim, size })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        Self::new(spec.kind, spec.dim, spec.size)
    }

    pub fn spec(&self) -> BodySpec {
        BodySpec { kind: self.kind, dim: self.dim, size: self.size }
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> f64 {
        self.size
    }

    pub fn inscribed_radius(&self) -> f64 {
        self.size
    }

    pub fn circumscribed_radius(&self) -> f64 {
        match self.kind {
            BodyKind::Ball => self.size,
            BodyKind::Box => self.size * (self.dim as f64).sqrt(),
        }
    }

    pub fn metrics(&self) -> BodyMetrics {
        let inscribed = self.inscribed_radius();
        BodyMetrics { inscribed, circumscribed: self.circumscribed_radius(), annulus_min_norm: 0.5 * inscribed }
    }

    /// True when the body sits inside the closed unit ball with `δ < 1`.
    pub fn within_unit_ball(&self) -> bool {
        self.circumscribed_radius() <= 1.0 && self.inscribed_radius() < 1.0
    }

    /// The limiting configuration `Z = B₂`.
    pub fn is_limiting_case(&self) -> bool {
        self.kind == BodyKind::Ball && self.size == 1.0
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(match self.kind {
            BodyKind::Ball => x.iter().map(|v| v * v).sum::<f64>() <= self.size * self.size,
            BodyKind::Box => x.iter().all(|v| v.abs() <= self.size),
        })
    }
}
