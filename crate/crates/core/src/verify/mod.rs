//! Exact verification of emitted formulations.
//!
//! The vertices of a formulation's LP relaxation are enumerated exactly and
//! compared, as a set, with the extreme points `(e^w, h^j)`, `w ∈ T^j`, of
//! the embedding. Equality proves the relaxation is the hull of the
//! embedding; since every embedding point has integral `z`, it also proves
//! the formulation is ideal.

mod dd;
mod exhaustive;
mod reduce;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::cdc::Cdc;
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::linalg::{dot, rank_of, rat, Rational, RationalVector};

use reduce::{reduce, relaxation_inequalities};

/// Points in `(λ, z)` space, ordered and deduplicated.
pub type VertexSet = BTreeSet<RationalVector>;

/// Default budget: intermediate rays for double description, tight subsets
/// for the exhaustive method.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VertexMethod {
    #[default]
    DoubleDescription,
    TightSubsets,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub method: VertexMethod,
    pub budget: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { method: VertexMethod::default(), budget: DEFAULT_ENUMERATION_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub passed: bool,
    /// Embedding points that are not vertices of the relaxation.
    pub missing: Vec<RationalVector>,
    /// Relaxation vertices that are not embedding points.
    pub extra: Vec<RationalVector>,
    pub expected: usize,
    pub found: usize,
    pub n_lambda: usize,
}

impl VerificationReport {
    /// Extra vertices with a non-integral `z` part.
    pub fn fractional_extra(&self) -> Vec<&RationalVector> {
        self.extra.iter().filter(|p| p[self.n_lambda..].iter().any(|x| !x.is_integer())).collect()
    }
}

/// `{(e^w, h^j) : w ∈ T^j}`.
pub fn embedding_extreme_points(cdc: &Cdc, e: &Encoding) -> VertexSet {
    let mut out = BTreeSet::new();
    for (j, t) in cdc.alternatives().iter().enumerate() {
        for &w in t {
            let mut p = vec![Rational::zero(); cdc.n()];
            p[w] = Rational::one();
            p.extend(e.row(j).iter().map(|&x| rat(x)));
            out.insert(p);
        }
    }
    out
}

/// All vertices of the formulation's LP relaxation: the equalities, `λ >= 0`,
/// every general row and the box on `z`.
pub fn enumerate_vertices(f: &Formulation, opts: &VerifyOptions) -> Result<VertexSet> {
    let sys = reduce(f);
    if !sys.feasible {
        return Ok(BTreeSet::new());
    }
    let ys = match opts.method {
        VertexMethod::DoubleDescription => dd::vertices(&sys, opts.budget)?,
        VertexMethod::TightSubsets => exhaustive::vertices(&sys, opts.budget)?,
    };
    Ok(ys.iter().map(|y| sys.lift(y)).collect())
}

/// Number of linearly independent constraints tight at `x`, counting every
/// equality.
pub fn tight_rank(f: &Formulation, x: &[Rational]) -> usize {
    let mut tight: Vec<RationalVector> = f.equalities.iter().map(|e| e.coeffs.clone()).collect();
    for (a, c) in relaxation_inequalities(f) {
        if dot(&a, x) == c {
            tight.push(a);
        }
    }
    rank_of(&tight, f.num_variables())
}

/// Compares the relaxation's vertices with the embedding's extreme points.
pub fn check_ideal(cdc: &Cdc, e: &Encoding, f: &Formulation, opts: &VerifyOptions) -> Result<VerificationReport> {
    if f.n_lambda != cdc.n() || f.r_z != e.r() {
        return Err(Error::DimensionMismatch { expected: cdc.n() + e.r(), found: f.num_variables() });
    }
    let expected = embedding_extreme_points(cdc, e);
    let found = enumerate_vertices(f, opts)?;
    let missing: Vec<_> = expected.difference(&found).cloned().collect();
    let extra: Vec<_> = found.difference(&expected).cloned().collect();
    Ok(VerificationReport {
        passed: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
        expected: expected.len(),
        found: found.len(),
        n_lambda: f.n_lambda,
    })
}

/// Whether every embedding point satisfies every row of the formulation.
pub fn check_validity_only(cdc: &Cdc, e: &Encoding, f: &Formulation) -> bool {
    if f.n_lambda != cdc.n() || f.r_z != e.r() {
        return false;
    }
    let ineqs = relaxation_inequalities(f);
    embedding_extreme_points(cdc, e).iter().all(|p| {
        f.equalities.iter().all(|eq| dot(&eq.coeffs, p) == eq.rhs)
            && ineqs.iter().all(|(a, c)| !(dot(a, p) - c).is_positive())
    })
}
