use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::DomainId;
use crate::error::{DtnError, Result};
use crate::quadrature::gauss_legendre;

/// Edges of the unit square, each parametrised by the Cartesian coordinate
/// running along it (`x` on bottom and top, `y` on left and right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left];

    pub fn index(self) -> usize {
        match self {
            Edge::Bottom => 0,
            Edge::Right => 1,
            Edge::Top => 2,
            Edge::Left => 3,
        }
    }

    /// Cartesian point at edge coordinate `s`.
    pub fn point(self, s: f64) -> (f64, f64) {
        match self {
            Edge::Bottom => (s, 0.0),
            Edge::Right => (1.0, s),
            Edge::Top => (s, 1.0),
            Edge::Left => (0.0, s),
        }
    }
}

/// A point on the boundary of one of the catalog domains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    /// Unit circle, polar angle in [0, 2π).
    Circle { theta: f64 },
    /// Unit square edge with its edge coordinate in [0, 1].
    Edge { edge: Edge, s: f64 },
    /// Unit sphere: polar angle θ ∈ [0, π], azimuth φ ∈ [0, 2π).
    Sphere { theta: f64, phi: f64 },
}

impl BoundaryPoint {
    pub fn domain(&self) -> DomainId {
        match self {
            BoundaryPoint::Circle { .. } => DomainId::Disc,
            BoundaryPoint::Edge { .. } => DomainId::Square,
            BoundaryPoint::Sphere { .. } => DomainId::Ball,
        }
    }
}

/// Quadrature rule for the boundary surface measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryGrid {
    pub domain: DomainId,
    pub resolution: usize,
    pub nodes: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
    /// Parameter values where the boundary has corners (square only), as
    /// `(edge index, s)` pairs.
    pub segments: Vec<(usize, f64)>,
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Quadrature of `f` evaluated at the nodes.
    pub fn integrate_fn(&self, f: impl Fn(&BoundaryPoint) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// Highest angular (disc), per-edge sine (square) or spherical-harmonic
    /// degree (ball) index the rule integrates products of exactly.
    pub fn max_mode(&self) -> usize {
        match self.domain {
            DomainId::Disc => (self.resolution - 1) / 2,
            DomainId::Square => self.resolution / 4,
            DomainId::Ball => self.resolution - 1,
        }
    }

    /// Total boundary measure.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Build the boundary quadrature for `domain` at `resolution`.
///
/// Circle: `resolution` uniform nodes (trapezoidal rule). Square: a
/// `resolution`-point Gauss-Legendre rule on each edge. Sphere:
/// `resolution` Gauss-Legendre nodes in cos θ times `2·resolution` uniform
/// azimuths.
pub fn boundary_quadrature(domain: DomainId, resolution: usize) -> Result<BoundaryGrid> {
    if resolution < 4 {
        return Err(DtnError::InvalidArgument(format!(
            "boundary resolution must be at least 4, got {resolution}"
        )));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut segments = Vec::new();
    match domain {
        DomainId::Disc => {
            let w = 2.0 * PI / resolution as f64;
            for i in 0..resolution {
                nodes.push(BoundaryPoint::Circle { theta: w * i as f64 });
                weights.push(w);
            }
        }
        DomainId::Square => {
            let (x, w) = gauss_legendre(resolution);
            for edge in Edge::ALL {
                for (xi, wi) in x.iter().zip(&w) {
                    nodes.push(BoundaryPoint::Edge { edge, s: 0.5 * (xi + 1.0) });
                    weights.push(0.5 * wi);
                }
                segments.push((edge.index(), 0.0));
            }
        }
        DomainId::Ball => {
            let (t, w) = gauss_legendre(resolution);
            let naz = 2 * resolution;
            let dphi = 2.0 * PI / naz as f64;
            for (ti, wi) in t.iter().zip(&w) {
                let theta = ti.acos();
                for j in 0..naz {
                    nodes.push(BoundaryPoint::Sphere { theta, phi: dphi * j as f64 });
                    weights.push(wi * dphi);
                }
            }
        }
    }
    Ok(BoundaryGrid {
        domain,
        resolution,
        nodes,
        weights,
        segments,
    })
}
