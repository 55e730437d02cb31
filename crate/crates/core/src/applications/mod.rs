//! Closed-form formulations for piecewise linear epigraphs and annulus
//! relaxations. Each has a general-pipeline counterpart it must agree with.

pub mod annulus;
pub mod pwl;

use crate::linalg::Rational;

pub use annulus::{
    annulus_cdc, annulus_formulation, annulus_gray_formulation, annulus_vertices, annulus_zigzag_formulation,
    AnnulusSpec,
};
pub use pwl::{pwl_closed_form_applicable, pwl_formulation, pwl_ground_set, PwlFunction, PwlGroundSet};

/// Maps each `λ` index back to a point of the modeled set.
#[derive(Debug, Clone, PartialEq)]
pub enum RecoveryMap {
    /// `x = Σ λ_v x_v` and, when `epigraph` is set, `y >= Σ λ_v y_v`.
    Pwl { points: Vec<(Rational, Rational)>, epigraph: bool },
    /// `x = Σ λ_v v^v`, with floating-point vertices.
    Annulus { points: Vec<(f64, f64)> },
}

impl RecoveryMap {
    pub fn len(&self) -> usize {
        match self {
            RecoveryMap::Pwl { points, .. } => points.len(),
            RecoveryMap::Annulus { points } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
