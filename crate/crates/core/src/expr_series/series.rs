//! Truncated series in `1/n` with [`ExprSum`] coefficients, and the
//! expansion pipeline for the integrand.

use super::{ExprError, ExprSum, TermExpr};
use crate::numeric::BigRational;
use rug::Integer;
use std::collections::BTreeMap;

/// `Σ_{m=0}^{cap} c_m n^-m`; orders above `cap` are discarded by every
/// operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvNSeries {
    cap: usize,
    coeffs: Vec<ExprSum>,
}

impl InvNSeries {
    pub fn zero(cap: usize) -> Self {
        InvNSeries {
            cap,
            coeffs: vec![ExprSum::zero(); cap + 1],
        }
    }

    pub fn one(cap: usize) -> Self {
        Self::monomial(cap, 0, ExprSum::constant(BigRational::from(1)))
    }

    /// `c · n^-order` (zero if `order > cap`).
    pub fn monomial(cap: usize, order: usize, c: ExprSum) -> Self {
        let mut s = Self::zero(cap);
        if order <= cap {
            s.coeffs[order] = c;
        }
        s
    }

    pub fn from_coeffs(cap: usize, coeffs: impl IntoIterator<Item = (usize, ExprSum)>) -> Self {
        let mut s = Self::zero(cap);
        for (m, c) in coeffs {
            if m <= cap {
                s.coeffs[m] = s.coeffs[m].add(&c);
            }
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Coefficient of `n^-m`; zero beyond the cap.
    pub fn coeff(&self, m: usize) -> ExprSum {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &ExprSum)> {
        self.coeffs.iter().enumerate()
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap);
        InvNSeries {
            cap,
            coeffs: self.coeffs[..=cap].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        InvNSeries {
            cap,
            coeffs: (0..=cap)
                .map(|m| self.coeffs[m].add(&other.coeffs[m]))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigRational::from(-1)))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        InvNSeries {
            cap: self.cap,
            coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect(),
        }
    }

    /// Multiplies every coefficient by an `n`-independent expression.
    pub fn mul_expr(&self, e: &ExprSum) -> Self {
        InvNSeries {
            cap: self.cap,
            coeffs: self.coeffs.iter().map(|c| c.mul(e)).collect(),
        }
    }

    /// Cauchy product truncated at the smaller cap.
    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        let mut out = Self::zero(cap);
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(cap - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        out
    }

    /// Multiplies by `n^-s`.
    pub fn shift(&self, s: usize) -> Self {
        let mut out = Self::zero(self.cap);
        for m in 0..=self.cap {
            if m + s <= self.cap {
                out.coeffs[m + s] = self.coeffs[m].clone();
            }
        }
        out
    }

    fn check_nilpotent(&self) -> Result<(), ExprError> {
        if self.coeffs[0].is_zero() {
            Ok(())
        } else {
            Err(ExprError::NonNilpotentInput)
        }
    }

    /// `Σ_j s^j / j!`.
    pub fn exp(&self) -> Result<Self, ExprError> {
        self.check_nilpotent()?;
        let mut out = Self::one(self.cap);
        let mut power = Self::one(self.cap);
        for j in 1..=self.cap {
            power = power.mul(self).scale(&BigRational::from((1, j as u32)));
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `Σ_j (-1)^(j-1) s^j / j`.
    pub fn log1p(&self) -> Result<Self, ExprError> {
        self.check_nilpotent()?;
        let mut out = Self::zero(self.cap);
        let mut power = Self::one(self.cap);
        for j in 1..=self.cap {
            power = power.mul(self);
            let sign = if j % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale(&BigRational::from((sign, j as u32))));
        }
        Ok(out)
    }
}

/// `n log((1 - u/2n)/(1 + u/2n)) + u = -Σ_{k≥1} u^(2k+1) / ((2k+1) 4^k) · n^-2k`.
pub fn build_exponent_series(cap: usize) -> Result<InvNSeries, ExprError> {
    if cap < 2 {
        return Err(ExprError::OrderCap { got: cap, min: 2 });
    }
    let mut s = InvNSeries::zero(cap);
    for k in 1..=(cap / 2) as u32 {
        let den = Integer::from(2 * k + 1) * (Integer::from(1) << (2 * k));
        let t = TermExpr::new(-BigRational::from((1, den)), 2 * k + 1, 0, 0, 0);
        s.coeffs[2 * k as usize] = ExprSum::from_term(&t);
    }
    Ok(s)
}

/// Every intermediate series of the expansion, for inspection and tests.
#[derive(Clone, Debug)]
pub struct PipelineStages {
    /// `X`: the exponent with `-u` removed.
    pub exponent: InvNSeries,
    /// `e^X`.
    pub exp_exponent: InvNSeries,
    /// `D = E C^-1 (e^X - 1)`, so that `1 + e^(-u+X) = C (1 + D)`.
    pub ratio: InvNSeries,
    /// `(1/n) (L + log(1 + D))`.
    pub log_bracket: InvNSeries,
    /// `exp` of the bracket.
    pub exp_bracket: InvNSeries,
    /// `(1/(4n) + u/(8n^2)) (exp(bracket) - 1)`: the integrand after the
    /// constant part is separated.
    pub integrand: InvNSeries,
}

/// Runs the expansion with every series truncated at `cap`.
pub fn louchard_pipeline(cap: usize) -> Result<PipelineStages, ExprError> {
    let exponent = build_exponent_series(cap)?;
    let exp_exponent = exponent.exp()?;
    let one = InvNSeries::one(cap);
    let w: ExprSum = ExprSum::from_term(&TermExpr::new(BigRational::from(1), 0, 1, 0, 1));
    let ratio = exp_exponent.sub(&one).mul_expr(&w);
    let log_ratio = ratio.log1p()?;
    let l = ExprSum::from_term(&TermExpr::new(BigRational::from(1), 0, 0, 1, 0));
    let log_bracket = log_ratio.add(&InvNSeries::monomial(cap, 0, l)).shift(1);
    let exp_bracket = log_bracket.exp()?;
    let excess = exp_bracket.sub(&one);
    let quarter = BigRational::from((1, 4));
    let u_eighth = ExprSum::from_term(&TermExpr::new(BigRational::from((1, 8)), 1, 0, 0, 0));
    let integrand = excess
        .shift(1)
        .scale(&quarter)
        .add(&excess.shift(2).mul_expr(&u_eighth));
    Ok(PipelineStages {
        exponent,
        exp_exponent,
        ratio,
        log_bracket,
        exp_bracket,
        integrand,
    })
}

/// Integrand coefficients of `n^-m` for `2 ≤ m ≤ cap`.
pub fn louchard_integrand_series(cap: usize) -> Result<BTreeMap<usize, ExprSum>, ExprError> {
    let stages = louchard_pipeline(cap)?;
    Ok((2..=cap).map(|m| (m, stages.integrand.coeff(m))).collect())
}
