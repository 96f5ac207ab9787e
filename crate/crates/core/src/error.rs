//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong, from user-facing validation failures to
/// internal consistency guards.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a p^{0}-th power")]
    NotAPower(u32),
    #[error("semilinear system has no solution")]
    NoSolution,
    #[error("operation not supported over this base field: {0}")]
    UnsupportedField(String),
    #[error("resource guard tripped: {0}")]
    ResourceGuard(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),

    // Structure-constant validation, each naming the offending index triple.
    #[error("table is not commutative at (i, j, h) = ({i}, {j}, {h})")]
    NotCommutative { i: usize, j: usize, h: usize },
    #[error("table is not associative at (i, j, h) = ({i}, {j}, {h})")]
    NotAssociative { i: usize, j: usize, h: usize },
    #[error("declared unit does not fix basis vector {0}")]
    BadUnit(usize),
    #[error("embedding is not a field homomorphism: {0}")]
    BadEmbedding(String),
    #[error("algebra is not local with residue field equal to the base")]
    NotLocal,
    #[error("p-power filtration dimensions {0:?} match no truncated polynomial type")]
    NotLambdaForm(Vec<u128>),

    // Tower validation and type computation.
    #[error("tower level {level} does not define a field: {reason}")]
    NotAField { level: usize, reason: String },
    #[error("no p-power of the element lies in the given subspace")]
    NoFiniteExponent,
    #[error("candidate set does not generate the tower (reached dimension {reached} of {full})")]
    NotGenerating { reached: u128, full: u128 },
    #[error("greedy exponents are not nonincreasing: {0:?}")]
    MonotonicityViolation(Vec<u32>),
    #[error("no representation in the prescribed monomials for generator {0}")]
    NoRepresentation(usize),
    #[error("[L : K(L^p)] = {0} is not a power of p")]
    IndexNotPPower(u128),

    // Counting cross-check guards.
    #[error("wreath count {direct} differs from n! * aut^n = {predicted}")]
    WreathMismatch { direct: u128, predicted: u128 },
    #[error("map does not permute the minimal idempotents")]
    NotBlockPermuting,
    #[error("formula sandwich failed: tau = {tau}, upper = {upper}, tv lower = {tv}")]
    SandwichMismatch { tau: u128, upper: u128, tv: u128 },

    #[error("arithmetic overflow in closed-form value")]
    Overflow,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Resource guards get a distinct process exit code in the CLI.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::ResourceGuard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
