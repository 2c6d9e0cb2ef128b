//! Exact distribution matrices for weight-two eigenforms.
//!
//! A prime `p`, a Hecke eigenvalue `a_p`, and a sign `ε` determine the
//! quadratic polynomial `X² − a_p·X + ε·p`; its root `α` spans the
//! coefficient field `Q(α)` in which everything here is computed exactly.
//! The central object is the matrix-valued distribution `μ` on `Z_p` whose
//! value on a coset `b + p^n·Z_p` is a product of digit-indexed 2×2
//! matrices, normalized by a power of the companion matrix — see
//! [`distribution::mu`].  The distribution packages both `p`-stabilizations
//! of the eigenform at once: its two matrix columns correspond to the two
//! roots of the Hecke polynomial.
//!
//! The other half of the crate defends that closed form.  A truncated
//! logarithm matrix with polynomial entries ([`logmatrix::log_truncation`])
//! yields the same values by two independent routes — coefficient
//! extraction and a literal average over roots of unity ([`oracle`]) — and
//! the [`verify`] engine sweeps structural identities (refinement
//! additivity, vanishing patterns, valuation floors, two-variable
//! Kronecker products) over configurable parameter grids, sequentially or
//! data-parallel.
//!
//! Everything is exact: arithmetic runs over arbitrary-precision rationals,
//! and every comparison in the verification suite is an equality test.
//!
//! # Example
//!
//! ```
//! use mu_matrix::{mu, mu_oracle, HeckeData};
//! use num_bigint::BigInt;
//!
//! let ctx = HeckeData::new(3, 0, 1)?;           // X² + 3, supersingular at 3
//! let value = mu(&ctx, &BigInt::from(10), 3)?;  // value on 10 + 27·Z₃
//! assert!(!value.matrix.is_zero());
//!
//! // The same value, re-derived from the truncated logarithm matrix.
//! assert_eq!(mu_oracle(&ctx, &BigInt::from(10), 3)?, value.matrix);
//! # Ok::<(), mu_matrix::Error>(())
//! ```

pub mod digits;
pub mod distribution;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod logmatrix;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod tensor;
pub mod verify;

pub use digits::{digits, DigitString, RunStructure};
pub use distribution::{chromatic, mu, mu_matrix, mu_two_variable, DistributionValue, Flag};
pub use error::{Error, Result};
pub use hecke::{Classification, HeckeData, DEFAULT_N_MAX};
pub use laurent::{constant_term_sum, LaurentMat2, LaurentPoly};
pub use logmatrix::{eval_lemma_check, log_factor, log_truncation};
pub use matrix::QuadMat2;
pub use oracle::{
    mu_oracle, roots_of_unity_sum, roots_of_unity_sum_with_gate, AveragingOracle,
    CoefficientOracle, DEFAULT_ROOTS_GATE,
};
pub use poly::{cyclotomic, PolyMat2, PolyQ, Quotient};
pub use quad::{QuadElem, QuadRing};
pub use rational::{parse_rational, rat, ratio, vp, ExtValuation, Rational};
pub use tensor::{kron_mixed, kron_same, QuadMat4, TensorElem, TensorMat4, TwoVarValue};
pub use verify::{
    build_tasks, default_grid, parallel_enabled, run_checks, run_tasks, CheckOutcome, ExecMode,
    Grid, GridCell, GridSpec, Report, Summary, Task, CHECK_NAMES, DEFAULT_GRID_CAP,
};
