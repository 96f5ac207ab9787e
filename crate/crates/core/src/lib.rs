//! Exact computer algebra for truncated polynomial algebras over fields of
//! characteristic p, purely inseparable extension towers, and the point
//! counts and dimension formulas attached to their automorphism group
//! schemes.
//!
//! The crate is organised around five public modules:
//!
//! - [`exact`]: arithmetic in F_p, F_{p^k} and F_p(t_1..t_m), including
//!   Frobenius powers, p-th roots and Frobenius-semilinear solving;
//! - [`fdalg`]: finite-dimensional commutative algebras given by structure
//!   constants, with nilradicals, idempotents, subalgebra closures and base
//!   change;
//! - [`lambda`]: the truncated polynomial algebras and exhaustive point
//!   enumeration of their endomorphism and automorphism schemes;
//! - [`insep`]: purely inseparable towers, normal generating sequences,
//!   descent certificates and the [L : K(L^p)] index;
//! - [`edim`]: the closed-form invariants and the three-way consistency
//!   report.
//!
//! [`verify`] bundles the cross-module checks behind the `verify` CLI command
//! and the acceptance test suite.

pub mod edim;
pub mod error;
pub mod exact;
pub mod fdalg;
pub mod insep;
pub mod lambda;
pub(crate) mod linalg;
pub mod verify;

pub use error::{Error, Result};

/// Tunable resource limits shared by the enumeration and tower machinery.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Maximum number of candidate tuples an exhaustive enumeration may
    /// visit.
    pub enum_guard: u64,
    /// Maximum dimension of a tower algebra whose basis may be materialised.
    pub tower_guard: u64,
    /// Total-degree limit for rational-function arithmetic.
    pub degree_guard: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enum_guard: 1 << 24,
            tower_guard: 1 << 16,
            degree_guard: exact::DEFAULT_DEGREE_GUARD,
        }
    }
}

impl Limits {
    /// Environment overrides (`INSEP_GUARD`, `INSEP_TOWER_GUARD`,
    /// `INSEP_DEGREE_GUARD`); explicit flags take precedence over these.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Ok(v) = std::env::var("INSEP_GUARD") {
            if let Ok(v) = v.parse() {
                l.enum_guard = v;
            }
        }
        if let Ok(v) = std::env::var("INSEP_TOWER_GUARD") {
            if let Ok(v) = v.parse() {
                l.tower_guard = v;
            }
        }
        if let Ok(v) = std::env::var("INSEP_DEGREE_GUARD") {
            if let Ok(v) = v.parse() {
                l.degree_guard = v;
            }
        }
        l
    }
}
