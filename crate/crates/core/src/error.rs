//! Error type shared across the library.
//!
//! Everything here is exact arithmetic, so most failure modes are contract
//! violations (mixed coefficient rings, a digit out of range, a non-prime
//! modulus) rather than numerical trouble.  The one genuinely *recoverable*
//! signal is [`Error::NeedsMorePrecision`], raised by the Hensel-based
//! valuation when the requested working precision cannot separate the input
//! from zero.

use thiserror::Error;

/// Library-wide error enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The modulus handed to a context or valuation was not prime.
    #[error("p = {0} is not prime")]
    NonPrime(u32),

    /// The sign unit must be +1 or -1.
    #[error("eps must be +1 or -1, got {0}")]
    InvalidEps(i64),

    /// Two elements from different quadratic rings met in one operation.
    #[error("mixed ring contexts: (p={0}, ap={1}, eps={2}) vs (p={3}, ap={4}, eps={5})")]
    MixedRings(u32, i64, i8, u32, i64, i8),

    /// An operation that only makes sense in a supersingular context
    /// (`p | a_p`) was invoked on an ordinary one.
    #[error("{op} requires a supersingular context (p | ap); p={p}, ap={ap} is ordinary — use hensel_vp instead")]
    OrdinaryContext { op: &'static str, p: u32, ap: i64 },

    /// An operation that only makes sense in an ordinary context
    /// (`p ∤ a_p`) was invoked on a supersingular one.
    #[error("{op} requires an ordinary context (p does not divide ap); p={p}, ap={ap} is supersingular")]
    SupersingularContext { op: &'static str, p: u32, ap: i64 },

    /// Division by an element of norm zero.
    #[error("division by an element of norm zero")]
    ZeroDivisor,

    /// A digit outside `0..p`.
    #[error("digit {digit} out of range for p = {p}")]
    DigitOutOfRange { digit: u32, p: u32 },

    /// A depth parameter outside its documented range.
    #[error("depth n = {n} outside the allowed range {min}..={max}")]
    DepthOutOfRange { n: u32, min: u32, max: u32 },

    /// `p^n` would exceed the polynomial degree guard.
    #[error("p^n = {p}^{n} exceeds the supported polynomial degree bound {bound}")]
    DegreeOverflow { p: u32, n: u32, bound: u64 },

    /// Reduction was requested modulo the zero polynomial.
    #[error("reduction modulo the zero polynomial")]
    ZeroModulus,

    /// Polynomial remainder needs an invertible leading coefficient.
    #[error("polynomial modulus has a non-invertible leading coefficient")]
    NonMonicModulus,

    /// A Laurent polynomial escaped the exponent window required by the
    /// constant-term lemma.
    #[error("Laurent exponent {exponent} outside the open window (-{bound}, {bound})")]
    ExponentOutOfWindow { exponent: i64, bound: u64 },

    /// The Hensel-based valuation could not decide at the given precision.
    /// Retry with a larger `precision`; the payload is a sufficient hint.
    #[error("undecided at p-adic precision {precision}; retry with higher precision")]
    NeedsMorePrecision { precision: u32 },

    /// The root-of-unity oracle is gated to small `p^n` by default.
    #[error("p^n = {pn} exceeds the oracle gate {gate}; raise the gate explicitly to force the O(p^2n) sum")]
    OracleGateExceeded { pn: u64, gate: u64 },

    /// A verification grid would exceed its configured size cap.
    #[error("grid expands to {size} coset evaluations, above the cap {cap}")]
    GridTooLarge { size: u64, cap: u64 },

    /// A grid file was syntactically valid JSON but semantically empty or
    /// inconsistent.
    #[error("invalid grid specification: {0}")]
    InvalidGrid(String),

    /// Failure while parsing a serialized value (rational, element, matrix).
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
