//! Exact evaluation of the Monotone-Triangle counting polynomial
//! `alpha(n; k_1, ..., k_n)` at arbitrary integer points.
//!
//! The value is computed by four independent routes:
//!
//! - the recursive summation operator ([`operator`]), in two recursive forms,
//! - signed enumeration of Generalized Monotone Triangles ([`rows`]),
//! - the inclusion-exclusion ("third extension") formula over simple sums,
//! - plain Monotone-Triangle counting when the bottom row is strictly increasing.
//!
//! The combinatorial objects behind these values (Monotone Triangles, Decreasing
//! Monotone Triangles, Generalized Monotone Triangles and decorated triangles with
//! special entries) can be enumerated lazily, and [`identities`] checks the known
//! identities and open conjectures about `alpha` over grids of inputs.
//!
//! Values are arbitrary-precision integers ([`SignedCount`]). The summation
//! operators are generic over the value ring (see [`scalar::Value`]), so the same
//! code runs on [`RationalCount`] or on machine integers when a caller wants it.

pub mod alpha;
pub mod error;
pub mod identities;
pub mod operator;
pub mod report;
pub mod rows;
pub mod sampling;
pub mod scalar;
pub mod tn;
pub mod triangle;

pub use alpha::{alpha, third_extension_eval, EvalCache, Method};
pub use error::{Error, Result};
pub use identities::{run_conjecture_suite, ConjectureSpec, Evaluator, Grid, IdentityId, Sampling};
pub use operator::{extended_sum, operator_apply, operator_apply_alt, ExtendedBounds};
pub use report::{ClaimStatus, PointResult, VerificationReport};
pub use rows::{
    enumerate_dmt, enumerate_gmt, enumerate_mt, gmt_admissible_rows, mt_admissible_rows, signed_gmt_count,
    AdmissibleRow, EnumerationLimits,
};
pub use sampling::Window;
pub use scalar::Value;
pub use tn::{enumerate_tn, involution_step, signed_tn_count, verify_reduction, Involution};
pub use triangle::{
    s_statistic, sc_statistic, validate_dmt, validate_gmt, validate_monotone_triangle, Position, Row, SignStatistics,
    TnObject, Triangle, ValidationReport,
};

/// Integer entry of a row or triangle.
pub type Entry = i64;

/// Exact signed count; values of `alpha` grow super-exponentially.
pub type SignedCount = num_bigint::BigInt;

/// Exact rational value, used by the ratio conjectures.
pub type RationalCount = num_rational::BigRational;
