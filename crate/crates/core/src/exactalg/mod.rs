//! Exact arithmetic: rationals, graded Laurent polynomials with fractional exponents and
//! reduced rational functions.

mod dense;
mod graded;
mod rat;
mod ratfunc;

pub use graded::{poly_eval_derivatives, GradedPoly};
pub use rat::{ParseRatError, Rat};
pub use ratfunc::{ratfunc_limit_at_one, ratfunc_over_binomials, ratfunc_reduce, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("rational function with zero denominator")]
    ZeroDenominator,
    #[error("rational function has a pole at q = 1")]
    PoleAtOne,
    #[error("fractional exponent evaluated at a negative point")]
    NonIntegerExponentAtNegativePoint,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("fractional power of a rational point is irrational")]
    IrrationalPower,
}
