//! Arbitrary-precision tools for the asymptotic expansion of
//! `I(n) = ∫₀¹ [xⁿ + (1-x)ⁿ]^(1/n) dx` in powers of `1/n`.

pub mod coefficients;
pub mod expr_series;
pub mod fit_extract;
pub mod louchard_eval;
pub mod mzv;
pub mod numeric;
pub mod relation_finder;
pub mod text;
