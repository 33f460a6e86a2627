//! Integer relations among high-precision constants, and the drivers that use
//! them to test the conjectured structure of the coefficients.

mod pslq;

use crate::coefficients::{
    conjecture1_combo, CoeffError, CoefficientTable, ConjectureOneSequence, MAX_ORDER,
};
use crate::mzv::{MzvError, ZetaMonomial, ZetaPolynomial};
use crate::numeric::{abs_diff, BigRational, HpReal, NumericError, Precision};
use rug::{Float, Integer};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("need at least {need} significant bits, have {have}")]
    InsufficientPrecision { need: u32, have: u32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no integer relation with norm at most {max_norm} found")]
    NoRelationFound { max_norm: Integer },
    #[error("relation does not involve the target value")]
    Degenerate,
    #[error("recovered {found} but the closed form is {expected}")]
    ClosedFormMismatch {
        found: ZetaPolynomial,
        expected: ZetaPolynomial,
    },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Mzv(#[from] MzvError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Integer vector `c` with `Σ cᵢ xᵢ ≈ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationResult {
    pub coefficients: Vec<Integer>,
    /// No relation of smaller Euclidean norm exists (PSLQ bound).
    pub norm_bound: Integer,
    /// `|Σ cᵢ xᵢ| < 10^-confirmed_digits · max|xᵢ|` at the verification
    /// precision.
    pub confirmed_digits: u32,
}

/// Default coefficient-norm limit for relation searches.
pub fn default_max_norm() -> Integer {
    Integer::from(1_000_000)
}

/// Default precision for the conjecture drivers (512 bits).
pub fn default_relation_precision() -> Precision {
    Precision::new(512).expect("valid precision")
}

fn residual(coeffs: &[Integer], xs: &[HpReal], wp: u32) -> Float {
    let mut acc = Float::with_val(wp, 0);
    for (c, x) in coeffs.iter().zip(xs) {
        acc += Float::with_val(wp, c) * x;
    }
    acc.abs()
}

fn normalize(mut c: Vec<Integer>) -> Vec<Integer> {
    let g = c.iter().fold(Integer::new(), |g, v| g.gcd(v));
    if g > 1 {
        for v in c.iter_mut() {
            *v /= &g;
        }
    }
    if c.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
        for v in c.iter_mut() {
            *v = -v.clone();
        }
    }
    c
}

/// Searches for an integer relation among `xs` with PSLQ at `prec`.
///
/// Every `xs[i]` must carry at least `2·prec` bits: the search sees the
/// values rounded to `prec` and any candidate is then re-checked against the
/// full values, where its residual must shrink by a factor of at least
/// `10^10`. Returns `None` when nothing within `max_norm` is found or the
/// candidate fails the re-check.
pub fn find_integer_relation(
    xs: &[HpReal],
    prec: Precision,
    max_norm: &Integer,
) -> Result<Option<RelationResult>, RelationError> {
    if xs.len() < 2 {
        return Err(RelationError::InvalidInput(
            "need at least two values".into(),
        ));
    }
    if xs.iter().any(|x| !x.is_finite() || x.is_zero()) {
        return Err(RelationError::InvalidInput(
            "values must be finite and nonzero".into(),
        ));
    }
    let digits_needed = 10 * xs.len() as u32 + max_norm.significant_bits().div_ceil(3);
    let need_bits = Precision::from_decimal_digits(digits_needed).bits();
    if prec.bits() < need_bits {
        return Err(RelationError::InsufficientPrecision {
            need: need_bits,
            have: prec.bits(),
        });
    }
    let have = xs.iter().map(|x| x.prec()).min().unwrap_or(0);
    if have < 2 * prec.bits() {
        return Err(RelationError::InsufficientPrecision {
            need: 2 * prec.bits(),
            have,
        });
    }
    let lo: Vec<HpReal> = xs.iter().map(|x| Float::with_val(prec.bits(), x)).collect();
    let outcome = pslq::pslq(&lo, prec.bits(), max_norm, 20_000);
    let Some(rel) = outcome.relation else {
        return Ok(None);
    };
    let rel = normalize(rel);
    let norm_sq = rel
        .iter()
        .fold(Integer::new(), |acc, c| acc + Integer::from(c * c));
    if norm_sq > Integer::from(max_norm * max_norm) {
        return Ok(None);
    }

    let hi_bits = 2 * prec.bits();
    let xmax = xs
        .iter()
        .map(|x| Float::with_val(hi_bits, x.abs_ref()))
        .fold(
            Float::with_val(hi_bits, 0),
            |m, v| if v > m { v } else { m },
        );
    let r_hi = residual(&rel, xs, hi_bits + 32);
    let mut r_lo = residual(&rel, &lo, prec.bits() + 32);
    // rounding floor of the low-precision check
    let floor = {
        let mut f = Float::with_val(prec.bits(), &xmax) * Float::with_val(64, &norm_sq).sqrt();
        f >>= prec.bits();
        f
    };
    if r_lo < floor {
        r_lo = floor;
    }
    if Float::with_val(hi_bits, &r_hi * 1e10) > r_lo {
        return Ok(None);
    }
    let cap = Precision::new(hi_bits)?.decimal_digits();
    let confirmed_digits = if r_hi.is_zero() {
        cap
    } else {
        let ratio = Float::with_val(hi_bits, &r_hi / &xmax);
        let d = -ratio.log10().to_f64();
        (d.floor().max(0.0) as u32).min(cap)
    };
    let norm_bound = outcome
        .norm_bound
        .to_integer_round(rug::float::Round::Down)
        .map(|(i, _)| i)
        .unwrap_or_default();
    Ok(Some(RelationResult {
        coefficients: rel,
        norm_bound,
        confirmed_digits,
    }))
}

/// Computes the values at `2·prec` through `source` and searches with
/// [`find_integer_relation`].
pub fn find_integer_relation_with<F>(
    source: F,
    prec: Precision,
    max_norm: &Integer,
) -> Result<Option<RelationResult>, RelationError>
where
    F: FnOnce(Precision) -> Result<Vec<HpReal>, RelationError>,
{
    let xs = source(prec.doubled())?;
    find_integer_relation(&xs, prec, max_norm)
}

/// Zeta monomials of one weight with every even zeta collapsed into powers
/// of `ζ(2)`: `ζ(2)^a · Π ζ(i)^(e_i)` over odd `i ≥ 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaBasis {
    pub weight: u32,
    pub monomials: Vec<ZetaMonomial>,
}

/// Largest weight accepted by [`zeta_monomial_basis`].
pub const MAX_BASIS_WEIGHT: u32 = 12;

fn odd_partitions(rest: u32, max_part: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    let mut part = max_part.min(rest);
    if part % 2 == 0 {
        part -= 1;
    }
    while part >= 3 {
        cur.push(part);
        odd_partitions(rest - part, part, out, cur);
        cur.pop();
        part -= 2;
    }
}

/// Basis of weight `w`, ordered by decreasing `ζ(2)` power then by the odd
/// parts.
pub fn zeta_monomial_basis(w: u32) -> Result<ZetaBasis, RelationError> {
    if !(2..=MAX_BASIS_WEIGHT).contains(&w) {
        return Err(RelationError::InvalidInput(format!(
            "basis weight {w} outside 2..={MAX_BASIS_WEIGHT}"
        )));
    }
    let mut monomials = Vec::new();
    for a in (0..=w / 2).rev() {
        let mut parts = Vec::new();
        odd_partitions(w - 2 * a, w, &mut parts, &mut Vec::new());
        for p in parts {
            let mut m = ZetaMonomial::power(2, a)?;
            for k in p {
                m = m.mul(&ZetaMonomial::zeta(k)?);
            }
            monomials.push(m);
        }
    }
    Ok(ZetaBasis {
        weight: w,
        monomials,
    })
}

fn table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(CoefficientTable::embedded)
}

fn check_order(j: u32) -> Result<(), RelationError> {
    if (2..=MAX_ORDER).contains(&j) {
        Ok(())
    } else {
        Err(CoeffError::OutOfRange {
            j,
            min: 2,
            max: MAX_ORDER,
        }
        .into())
    }
}

/// `I_j` computed only through its AMZV bracket (lemma quadrature).
pub fn amzv_path_value(j: u32, prec: Precision) -> Result<HpReal, RelationError> {
    check_order(j)?;
    Ok(table().amzv_form(j)?.eval(prec)?)
}

/// Outcome of a blind closed-form search for `I_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conjecture2Outcome {
    pub order: u32,
    pub basis: ZetaBasis,
    pub relation: RelationResult,
    /// Polynomial read off the relation, in the `ζ(2)`-power basis.
    pub recovered: ZetaPolynomial,
}

/// Searches for `I_j` as a rational combination of the weight-`j` basis,
/// using values from the AMZV path, and compares the result with the
/// tabulated closed form after even-zeta canonicalization.
pub fn conjecture2_search(
    j: u32,
    prec: Precision,
    max_norm: &Integer,
) -> Result<Conjecture2Outcome, RelationError> {
    check_order(j)?;
    let basis = zeta_monomial_basis(j)?;
    let source = |p: Precision| -> Result<Vec<HpReal>, RelationError> {
        let mut xs = vec![amzv_path_value(j, p)?];
        for m in &basis.monomials {
            xs.push(m.eval(p)?);
        }
        Ok(xs)
    };
    let relation = find_integer_relation_with(source, prec, max_norm)?.ok_or_else(|| {
        RelationError::NoRelationFound {
            max_norm: max_norm.clone(),
        }
    })?;
    let c0 = relation.coefficients[0].clone();
    if c0 == 0 {
        return Err(RelationError::Degenerate);
    }
    let mut recovered = ZetaPolynomial::zero();
    for (m, c) in basis.monomials.iter().zip(&relation.coefficients[1..]) {
        if *c != 0 {
            recovered.add_term(m.clone(), -BigRational::from((c.clone(), c0.clone())));
        }
    }
    let expected = table().closed_form(j)?;
    if !recovered.equivalent(expected) {
        return Err(RelationError::ClosedFormMismatch {
            found: recovered,
            expected: expected.clone(),
        });
    }
    Ok(Conjecture2Outcome {
        order: j,
        basis,
        relation,
        recovered,
    })
}

/// [`conjecture2_search`] with the default norm limit; returns the recovered
/// polynomial.
pub fn conjecture2_test(j: u32, prec: Precision) -> Result<ZetaPolynomial, RelationError> {
    conjecture2_search(j, prec, &default_max_norm()).map(|o| o.recovered)
}

/// `|numeric(conjecture pattern) − numeric(closed form)|` for order `m`; the
/// pattern goes through the lemma evaluator, the closed form through
/// ordinary zeta values.
pub fn conjecture1_crosscheck(m: u32, prec: Precision) -> Result<HpReal, RelationError> {
    check_order(m)?;
    let combo = conjecture1_combo(m, &ConjectureOneSequence::default())?;
    let a = combo.eval(prec)?;
    let b = table().closed_form(m)?.eval(prec)?;
    Ok(abs_diff(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{pi_value, zeta_value};
    use std::collections::BTreeSet;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn golden_ratio_relation() {
        let prec = p(128);
        let bits = 256;
        let phi = (Float::with_val(bits, 5).sqrt() + 1u32) / 2u32;
        let xs = vec![
            Float::with_val(bits, phi.square_ref()),
            phi,
            Float::with_val(bits, 1),
        ];
        let r = find_integer_relation(&xs, prec, &default_max_norm())
            .unwrap()
            .unwrap();
        assert_eq!(r.coefficients, ints(&[1, -1, -1]));
        assert!(r.confirmed_digits > 60);
    }

    #[test]
    fn zeta_two_relation() {
        let prec = p(128);
        let z2 = zeta_value(2, p(256)).unwrap();
        let pi2 = pi_value(p(256)).square();
        let r = find_integer_relation(&[z2, pi2], prec, &default_max_norm())
            .unwrap()
            .unwrap();
        assert_eq!(r.coefficients, ints(&[6, -1]));
    }

    #[test]
    fn no_relation_among_independent_values() {
        let prec = p(256);
        let xs = vec![
            pi_value(p(512)),
            Float::with_val(512, 2).sqrt(),
            zeta_value(3, p(512)).unwrap(),
        ];
        assert_eq!(
            find_integer_relation(&xs, prec, &default_max_norm()).unwrap(),
            None
        );
    }

    #[test]
    fn precondition_checks() {
        let xs = vec![Float::with_val(512, 1), Float::with_val(512, 2)];
        assert!(matches!(
            find_integer_relation(&xs, p(64), &default_max_norm()),
            Err(RelationError::InsufficientPrecision { .. })
        ));
        let short = vec![Float::with_val(128, 1), Float::with_val(128, 2)];
        assert!(matches!(
            find_integer_relation(&short, p(128), &default_max_norm()),
            Err(RelationError::InsufficientPrecision { .. })
        ));
        assert!(find_integer_relation(&xs[..1], p(128), &default_max_norm()).is_err());
    }

    #[test]
    fn i6_relation_from_amzv_values() {
        let prec = Precision::from_decimal_digits(60);
        let source = |q: Precision| -> Result<Vec<HpReal>, RelationError> {
            Ok(vec![
                amzv_path_value(6, q)?,
                zeta_value(6, q)?,
                zeta_value(3, q)?.square(),
            ])
        };
        let r = find_integer_relation_with(source, prec, &default_max_norm())
            .unwrap()
            .unwrap();
        assert_eq!(r.coefficients, ints(&[256, -83, 16]));
        assert!(r.norm_bound >= 1);
    }

    /// Every multiset of parts ≥ 2 summing to `w`, with even parts collapsed
    /// into powers of `ζ(2)`.
    fn brute_force_basis(w: u32) -> BTreeSet<ZetaMonomial> {
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest == 0 {
                out.push(cur.clone());
            }
            for part in (2..=max.min(rest)).rev() {
                cur.push(part);
                rec(rest - part, part, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        rec(w, w, &mut Vec::new(), &mut all);
        all.into_iter()
            .map(|parts| {
                let mut m = ZetaMonomial::one();
                for k in parts {
                    let f = if k % 2 == 0 {
                        ZetaMonomial::power(2, k / 2).unwrap()
                    } else {
                        ZetaMonomial::zeta(k).unwrap()
                    };
                    m = m.mul(&f);
                }
                m
            })
            .collect()
    }

    #[test]
    fn basis_matches_partition_oracle() {
        for w in 2..=MAX_BASIS_WEIGHT {
            let b = zeta_monomial_basis(w).unwrap();
            let set: BTreeSet<_> = b.monomials.iter().cloned().collect();
            assert_eq!(set.len(), b.monomials.len(), "duplicates at weight {w}");
            assert_eq!(set, brute_force_basis(w), "weight {w}");
        }
        assert!(zeta_monomial_basis(13).is_err());
    }

    #[test]
    fn basis_examples() {
        let show = |w| {
            zeta_monomial_basis(w)
                .unwrap()
                .monomials
                .iter()
                .map(|m| m.to_string())
                .collect::<BTreeSet<_>>()
        };
        let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(show(5), set(&["z5", "z2*z3"]));
        assert_eq!(show(6), set(&["z2^3", "z3^2"]));
        assert_eq!(show(9), set(&["z9", "z3^3", "z2^3*z3", "z2^2*z5", "z2*z7"]));
    }

    #[test]
    fn conjecture2_low_orders() {
        let prec = p(320);
        for j in [2, 4, 5] {
            let got = conjecture2_test(j, prec).unwrap();
            assert!(got.equivalent(table().closed_form(j).unwrap()), "I{j}");
        }
    }

    #[test]
    fn conjecture1_residuals_vanish() {
        for m in [2, 5] {
            let r = conjecture1_crosscheck(m, p(192)).unwrap();
            assert!(r.to_f64() < 1e-30);
        }
        assert!(conjecture1_crosscheck(1, p(192)).is_err());
    }
}
