//! Direct evaluation of `I(n)` and comparison with the truncated series.
//!
//! With the symmetric form `I(n) = 2∫₀^½ (1-x) [1 + (x/(1-x))ⁿ]^(1/n) dx`
//! the constant part integrates to `3/4` exactly, leaving
//! `2∫₀^½ (1-x)·expm1(log1p(eᵗ)/n) dx` with `t = n log(x/(1-x))`.
//! Substituting `x = 1/(1 + e^(y/n))` turns this into
//! `(2/n)∫₀^∞ s²(1-s)·expm1(log1p(e^(-y))/n) dy`, `s = 1/(1 + e^(-y/n))`,
//! whose transition region sits at `y = O(1)` for every `n`.

use crate::coefficients::{CoeffError, CoefficientTable, MAX_ORDER};
use crate::mzv::MzvError;
use crate::numeric::{
    integrate_finite, integrate_semi_infinite, round_to, Envelope, HpReal, NumericError, Precision,
};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

impl From<MzvError> for EvalError {
    fn from(e: MzvError) -> Self {
        EvalError::Coeff(CoeffError::Mzv(e))
    }
}

/// One evaluated point `I(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSample {
    pub n: u64,
    pub value: HpReal,
    pub prec: Precision,
}

impl IntegralSample {
    pub fn compute(n: u64, prec: Precision) -> Result<Self, EvalError> {
        Ok(IntegralSample {
            n,
            value: i_direct(n, prec)?,
            prec,
        })
    }
}

fn table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(CoefficientTable::embedded)
}

/// `I(n) − 3/4` via the substituted integral, with the quadrature error
/// estimate plus tail bound.
fn excess(n: u64, prec: Precision) -> Result<(HpReal, HpReal), EvalError> {
    let wp = prec.plus(16);
    let nf = n as f64;
    let integrand = |y: &HpReal| {
        let bits = y.prec();
        let v = Float::with_val(bits, y / nf);
        // s = 1/(1+e^-v), 1-s = 1/(1+e^v)
        let s = Float::with_val(bits, -&v).exp() + 1u32;
        let s = s.recip();
        let one_minus_s = (v.exp() + 1u32).recip();
        let bracket = Float::with_val(bits, -y).exp().ln_1p() / nf;
        s.square() * one_minus_s * bracket.exp_m1()
    };
    // |g| ≤ (4/27)·2·e^-y/n
    let env = Envelope::new(0, 0, 1).with_scale(1.0 / nf);
    let r = integrate_semi_infinite(integrand, &env, wp)?;
    let scale = Float::with_val(wp.bits(), 2) / nf;
    let value = Float::with_val(wp.bits(), &r.value * &scale);
    let err = Float::with_val(wp.bits(), &r.error_estimate + &r.tail_bound) * scale;
    Ok((value, err))
}

/// `I(n)` at `prec`. `n = 1` returns exactly 1.
pub fn i_direct(n: u64, prec: Precision) -> Result<HpReal, EvalError> {
    i_direct_with_error(n, prec).map(|(v, _)| v)
}

/// `I(n)` together with its error estimate.
pub fn i_direct_with_error(n: u64, prec: Precision) -> Result<(HpReal, HpReal), EvalError> {
    if n == 0 {
        return Err(EvalError::InvalidArgument("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok((Float::with_val(prec.bits(), 1), prec.zero()));
    }
    let (ex, err) = excess(n, prec)?;
    let v = ex + Float::with_val(prec.bits() + 16, 0.75);
    Ok((round_to(&v, prec), round_to(&err, prec)))
}

/// `∫₀¹ [xⁿ + (1-x)ⁿ]^(1/n) dx` evaluated literally, halves integrated
/// separately but without using the symmetry.
pub fn i_direct_unsymmetrized(n: u64, prec: Precision) -> Result<(HpReal, HpReal), EvalError> {
    if n == 0 {
        return Err(EvalError::InvalidArgument("n must be at least 1".into()));
    }
    let wp = prec.plus(16);
    let f = |x: &HpReal| {
        let bits = x.prec();
        let a = Float::with_val(bits, x.pow(n));
        let b = Float::with_val(bits, 1 - x.clone()).pow(n);
        let inv = Float::with_val(bits, 1) / n as f64;
        (a + b).pow(inv)
    };
    let zero = wp.zero();
    let half = Float::with_val(wp.bits(), 0.5);
    let one = Float::with_val(wp.bits(), 1);
    let left = integrate_finite(f, &zero, &half, wp)?;
    let right = integrate_finite(f, &half, &one, wp)?;
    let v = left.value + right.value;
    let e = left.error_estimate + right.error_estimate;
    Ok((round_to(&v, prec), round_to(&e, prec)))
}

/// `3/4 + Σ_{j=2}^M I_j / n^j` from the closed-form table.
pub fn asymptotic_partial_sum(n: u64, m: u32, prec: Precision) -> Result<HpReal, EvalError> {
    if !(2..=MAX_ORDER).contains(&m) {
        return Err(EvalError::InvalidArgument(format!(
            "truncation order {m} outside 2..={MAX_ORDER}"
        )));
    }
    if n == 0 {
        return Err(EvalError::InvalidArgument("n must be at least 1".into()));
    }
    let wp = prec.plus(16);
    let inv_n = Float::with_val(wp.bits(), 1) / Float::with_val(wp.bits(), n);
    let mut sum = Float::with_val(wp.bits(), 0);
    let mut power = Float::with_val(wp.bits(), 1);
    for j in 0..=m {
        let c = table().closed_form(j)?.eval(wp)?;
        sum += c * &power;
        power *= &inv_n;
    }
    Ok(round_to(&sum, prec))
}

/// One row of [`remainder_diagnostic`].
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderRow {
    pub n: u64,
    /// `I(n)` minus the order-`M` partial sum.
    pub remainder: HpReal,
    /// `remainder · n^(M+1)`.
    pub scaled: HpReal,
}

/// Remainders after truncating at order `m`, one row per `n` in input order.
pub fn remainder_diagnostic(
    ns: &[u64],
    m: u32,
    prec: Precision,
) -> Result<Vec<RemainderRow>, EvalError> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 20) {
        return Err(EvalError::InvalidArgument(format!(
            "remainder diagnostics need n >= 20 (got {bad})"
        )));
    }
    ns.par_iter()
        .map(|&n| {
            let direct = i_direct(n, prec)?;
            let partial = asymptotic_partial_sum(n, m, prec)?;
            let remainder = direct - partial;
            let scaled = Float::with_val(prec.bits(), n).pow(m + 1) * &remainder;
            Ok(RemainderRow {
                n,
                remainder,
                scaled,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{abs_diff, pi_value};
    use proptest::prelude::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    /// `∫₀¹ √(2x² − 2x + 1) dx = 1/2 + (√2/4)·asinh(1)` from the
    /// antiderivative of `√(s² + a²)`.
    fn n2_oracle(bits: u32) -> Float {
        let sqrt2 = Float::with_val(bits, 2).sqrt();
        let asinh1 = Float::with_val(bits, 1).asinh();
        Float::with_val(bits, 0.5) + sqrt2 / 4 * asinh1
    }

    #[test]
    fn n_one_is_exactly_one() {
        assert_eq!(i_direct(1, p(128)).unwrap(), 1);
        let (ex, _) = excess(1, p(128)).unwrap();
        let v = ex + Float::with_val(160, 0.75);
        assert!(abs_diff(&v, &Float::with_val(128, 1)) < p(128).pow2(-110));
        assert!(i_direct(0, p(128)).is_err());
    }

    #[test]
    fn n_two_matches_closed_form() {
        let prec = p(256);
        let v = i_direct(2, prec).unwrap();
        assert!(abs_diff(&v, &n2_oracle(256)) < prec.pow2(-230));
        assert!(v.to_string_radix(10, Some(10)).starts_with("8.116126"));
    }

    #[test]
    fn large_n_matches_leading_terms() {
        let prec = p(256);
        let v = i_direct(10_000, prec).unwrap();
        let z2 = pi_value(prec).square() / 6;
        let approx = Float::with_val(256, 0.75) + z2 / 8 * Float::with_val(256, 1e-8);
        assert!(abs_diff(&v, &approx).to_f64() < 1e-11);
        assert!(i_direct(1_000_000, prec).is_ok());
    }

    #[test]
    fn unsymmetrized_agrees() {
        let prec = p(128);
        for n in [2u64, 3, 7, 20, 50] {
            let (a, ea) = i_direct_with_error(n, prec).unwrap();
            let (b, eb) = i_direct_unsymmetrized(n, prec).unwrap();
            let tol = ea + eb + prec.pow2(-110);
            assert!(abs_diff(&a, &b) <= tol, "n = {n}");
        }
    }

    #[test]
    fn precision_robustness() {
        for n in [3u64, 100, 10_000] {
            let a = i_direct(n, p(256)).unwrap();
            let b = i_direct(n, p(512)).unwrap();
            assert!(abs_diff(&a, &b) < p(256).pow2(-240), "n = {n}");
        }
    }

    #[test]
    fn partial_sum_examples() {
        let prec = p(192);
        let z2 = pi_value(prec).square() / 6;
        let want = Float::with_val(192, 0.75) + Float::with_val(192, &z2 / 800);
        let got = asymptotic_partial_sum(10, 2, prec).unwrap();
        assert!(abs_diff(&got, &want) < prec.pow2(-180));
        let z3 = crate::numeric::zeta_value(3, prec).unwrap();
        let s4 = asymptotic_partial_sum(10, 4, prec).unwrap();
        let s5 = asymptotic_partial_sum(10, 5, prec).unwrap();
        let term = -Float::with_val(192, &z2 * &z3) / 8 / 100_000;
        assert!(abs_diff(&Float::with_val(192, &s5 - &s4), &term) < prec.pow2(-180));
        let far = asymptotic_partial_sum(1 << 40, 9, prec).unwrap();
        assert!(abs_diff(&far, &Float::with_val(192, 0.75)).to_f64() < 1e-24);
        assert!(asymptotic_partial_sum(10, 1, prec).is_err());
        assert!(asymptotic_partial_sum(10, 10, prec).is_err());
    }

    #[test]
    fn low_order_remainder() {
        let prec = p(256);
        let rows = remainder_diagnostic(&[100], 2, prec).unwrap();
        let z3 = crate::numeric::zeta_value(3, prec).unwrap();
        let i3_term = z3.to_f64() / 8.0 * 1e-6;
        let ratio = rows[0].remainder.to_f64() / i3_term;
        assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
        assert!(remainder_diagnostic(&[10], 2, prec).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]
        #[test]
        fn decreasing_toward_three_quarters(mut ns in proptest::collection::vec(2u64..5000, 3)) {
            ns.sort_unstable();
            ns.dedup();
            let prec = p(96);
            let vals: Vec<Float> = ns.iter().map(|&n| i_direct(n, prec).unwrap()).collect();
            for w in vals.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for v in &vals {
                prop_assert!(*v > 0.75 && *v <= 1);
            }
        }
    }
}
