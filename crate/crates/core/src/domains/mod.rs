//! Dirichlet spectral catalogs and boundary geometry for the unit disc, the
//! unit square and the unit ball.

mod boundary;
mod catalog;
mod grid;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DtnError;

pub use boundary::{Evaluator, real_sph_harm, sph_index, trig_index, trig_mode, BoundaryFunction, EdgeData, SQUARE_MODES};
pub use catalog::{
    catalog_json, coupling, enumerate_modes, ground_energy, normal_derivative, normal_derivative_at,
    DirichletMode, ModeLabel, ModeRecord,
};
pub use grid::{boundary_quadrature, BoundaryGrid, BoundaryPoint, Edge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainId {
    Disc,
    Square,
    Ball,
}

impl DomainId {
    pub const ALL: [DomainId; 3] = [DomainId::Disc, DomainId::Square, DomainId::Ball];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::Disc => "disc",
            DomainId::Square => "square",
            DomainId::Ball => "ball",
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainId {
    type Err = DtnError;

    fn from_str(s: &str) -> Result<Self, DtnError> {
        match s.to_ascii_lowercase().as_str() {
            "disc" | "disk" => Ok(DomainId::Disc),
            "square" => Ok(DomainId::Square),
            "ball" => Ok(DomainId::Ball),
            other => Err(DtnError::InvalidArgument(format!("unknown domain '{other}'"))),
        }
    }
}

pub fn check_domain(expected: DomainId, found: DomainId) -> crate::Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(DtnError::DomainMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}
