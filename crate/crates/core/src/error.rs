use thiserror::Error;

/// Everything that can go wrong while building or checking a formulation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // -- exact linear algebra
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subset does not span a hyperplane of the space (space rank {space_rank}, subset rank {subset_rank})")]
    NotAHyperplane { space_rank: usize, subset_rank: usize },
    #[error("vector is zero")]
    ZeroVector,

    // -- encodings
    #[error("matrix order must be at least 1")]
    InvalidOrder,
    #[error("need at least 2 alternatives, got {0}")]
    TooFewAlternatives(usize),
    #[error("explicit encodings need their rows supplied")]
    NeedsExplicitRows,
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("hole-free check would visit {points} lattice points (cap {cap})")]
    HoleCheckTooLarge { points: u128, cap: u128 },

    // -- disjunctive constraints and formulations
    #[error("invalid disjunctive constraint: {0}")]
    InvalidCdc(String),
    #[error("no difference directions: the intersection digraph has no arcs")]
    NoDirections,
    #[error("{count} distinct directions exceed the enumeration cap of {cap}")]
    TooManyDirections { count: usize, cap: usize },
    #[error(
        "dimension condition fails: span of difference directions has rank {rank} but the encoding spans dimension {hull_dim} (gap {}){}{}",
        hull_dim - rank,
        if *connected { "" } else { "; intersection digraph is disconnected" },
        if detail.is_empty() { String::new() } else { format!("; {detail}") }
    )]
    DimensionDeficit { rank: usize, hull_dim: usize, connected: bool, detail: String },
    #[error("encoding cannot yield an ideal formulation: {0}")]
    EncodingNotIdealizable(String),

    // -- applications
    #[error("d = {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid piecewise linear function: {0}")]
    InvalidPwl(String),
    #[error("invalid annulus: {0}")]
    InvalidAnnulus(String),
    #[error("annulus pieces degenerate for d = {d} (need d >= 8)")]
    DegenerateSecant { d: usize },

    // -- verification
    #[error("vertex enumeration exceeded its budget of {budget}")]
    TooLargeToEnumerate { budget: u128 },
    #[error("LP relaxation is unbounded")]
    Unbounded,

    // -- io
    #[error("{0}")]
    Input(String),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Precondition,
    ResourceCap,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            HoleCheckTooLarge { .. } | TooManyDirections { .. } | TooLargeToEnumerate { .. } => ErrorClass::ResourceCap,
            NotAHyperplane { .. } | NoDirections | DimensionDeficit { .. } | EncodingNotIdealizable(_) | Unbounded => {
                ErrorClass::Precondition
            }
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
