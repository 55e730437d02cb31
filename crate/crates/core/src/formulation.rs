//! The emitted MIP formulation over `(λ, z)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::encoding::EncodingKind;
use crate::error::Result;
use crate::linalg::{int_vector_to_rational, primitive_canonical, Rational};

/// `coeffs · (λ, z) = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearEquality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// One paired general inequality `lower · λ <= normal · z <= upper · λ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GeneralRow {
    pub normal: Vec<BigInt>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl GeneralRow {
    /// Rescales a row given with an arbitrary nonzero rational normal so the
    /// normal becomes primitive canonical. A negative rescaling swaps the two
    /// sides.
    pub fn canonicalize(normal: &[Rational], lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self> {
        let canonical = primitive_canonical(normal)?;
        let (k, pivot) = normal.iter().enumerate().find(|(_, x)| !x.is_zero()).unwrap();
        let factor = Rational::from_integer(canonical[k].clone()) / pivot;
        let scale = |v: Vec<Rational>| v.into_iter().map(|x| x * &factor).collect::<Vec<_>>();
        let (lower, upper) =
            if factor.is_negative() { (scale(upper), scale(lower)) } else { (scale(lower), scale(upper)) };
        Ok(Self { normal: canonical, lower, upper })
    }

    pub fn rational_normal(&self) -> Vec<Rational> {
        int_vector_to_rational(&self.normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelinePath {
    General,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub path: PipelinePath,
    pub encoding: EncodingKind,
    /// Discontinuous breakpoints, for piecewise linear inputs.
    pub kappa: Option<usize>,
    /// Weak connectivity of the intersection digraph, when it was computed.
    pub connected: Option<bool>,
}

/// The system
///
/// ```text
/// lower_k · λ <= b_k · z <= upper_k · λ     for every general row k
/// Σ λ = 1,  λ >= 0,  z ∈ aff(H)
/// z integer, lo <= z <= hi
/// ```
///
/// Variables are ordered `λ_1..λ_n, z_1..z_r`. The nonnegativity of `λ` and
/// the integrality of `z` are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formulation {
    pub n_lambda: usize,
    pub r_z: usize,
    pub equalities: Vec<LinearEquality>,
    pub general_rows: Vec<GeneralRow>,
    pub z_bounds: Vec<(i64, i64)>,
    pub provenance: Provenance,
}

impl Formulation {
    /// Number of paired general rows (distinct spanned hyperplanes).
    pub fn gamma(&self) -> usize {
        self.general_rows.len()
    }

    pub fn general_inequality_count(&self) -> usize {
        2 * self.general_rows.len()
    }

    pub fn num_variables(&self) -> usize {
        self.n_lambda + self.r_z
    }

    /// Copy with general row `k` dropped.
    pub fn without_general_row(&self, k: usize) -> Self {
        let mut f = self.clone();
        f.general_rows.remove(k);
        f
    }

    /// Sorts the general rows by normal.
    pub fn sort_rows(&mut self) {
        self.general_rows.sort();
    }

    /// Every general inequality as `coeffs · (λ, z) <= 0`, lower side first.
    pub fn inequality_rows(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::with_capacity(2 * self.gamma());
        for row in &self.general_rows {
            let b = row.rational_normal();
            let mut lo: Vec<Rational> = row.lower.clone();
            lo.extend(b.iter().map(|x| -x.clone()));
            let mut up: Vec<Rational> = row.upper.iter().map(|x| -x.clone()).collect();
            up.extend(b);
            out.push(lo);
            out.push(up);
        }
        out
    }
}
