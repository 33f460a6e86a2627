//! Closed-form integrals `∫₀^∞ u^p E^k L^q C^-r du` as AMZV combinations.
//!
//! Single-key rules are listed in [`LEMMA_RULES`]. Canonical sums only contain
//! `u^p L^q` and `u^p L^q w^j`; `w^3` is handled through
//! `w^3 = (E(1-E)C^-3 - w + 3w^2)/2`, whose first term is one of the
//! combined-numerator integrals.

use super::{ExprError, ExprSum, TermExpr, TermKey};
use crate::mzv::{AmzvCombination, AmzvIndex};
use crate::numeric::{
    integrate_semi_infinite, BigRational, Envelope, HpReal, NumericError, Precision,
};
use rug::Integer;

/// An integration rule for terms with fixed `(k, r)` and `q`, `p` in range.
#[derive(Clone, Copy)]
pub struct LemmaRule {
    pub name: &'static str,
    pub k: u32,
    pub r: u32,
    pub q_min: u32,
    pub q_max: Option<u32>,
    pub p_min: u32,
    /// `∫ u^p E^k L^q C^-r du` for unit coefficient.
    pub template: fn(u32, u32) -> AmzvCombination,
}

impl std::fmt::Debug for LemmaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LemmaRule")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("r", &self.r)
            .field("q_min", &self.q_min)
            .field("q_max", &self.q_max)
            .field("p_min", &self.p_min)
            .finish()
    }
}

impl LemmaRule {
    pub fn matches(&self, key: TermKey) -> bool {
        key.k == self.k
            && key.r == self.r
            && key.q >= self.q_min
            && self.q_max.map_or(true, |m| key.q <= m)
            && key.p >= self.p_min
    }
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

fn pq_factor(p: u32, q: u32) -> BigRational {
    BigRational::from(factorial(p) * factorial(q))
}

fn sign(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Accumulates `coef · ζ(m̄, {1}_k)`.
fn push(c: &mut AmzvCombination, m: u32, k: u32, coef: BigRational) {
    c.add_term(AmzvIndex::bar_ones(m, k as usize), coef)
        .expect("barred leading exponent always converges");
}

fn lemma1_1(p: u32, q: u32) -> AmzvCombination {
    let mut c = AmzvCombination::zero();
    push(&mut c, p + 2, q - 1, pq_factor(p, q) * sign(i64::from(q)));
    c
}

fn lemma1_2(p: u32, q: u32) -> AmzvCombination {
    let mut c = AmzvCombination::zero();
    push(&mut c, p + 1, q, pq_factor(p, q) * sign(i64::from(q) - 1));
    c
}

fn lemma_diff(p: u32, q: u32) -> AmzvCombination {
    let f = pq_factor(p, q) * sign(i64::from(q));
    let mut c = AmzvCombination::zero();
    push(&mut c, p + 2, q - 1, f.clone());
    push(&mut c, p + 1, q, f);
    c
}

fn lemma2_1(p: u32, _q: u32) -> AmzvCombination {
    let mut c = AmzvCombination::zero();
    push(&mut c, p, 0, -BigRational::from(factorial(p)));
    c
}

fn lemma2_2(p: u32, q: u32) -> AmzvCombination {
    let f = pq_factor(p, q);
    let mut c = AmzvCombination::zero();
    for k in 1..=q {
        let s = BigRational::from(&f * sign(i64::from(k) - 1));
        push(&mut c, p, k, s.clone());
        push(&mut c, p + 1, k - 1, s);
    }
    push(&mut c, p, 0, -f);
    c
}

fn lemma3_1(p: u32, _q: u32) -> AmzvCombination {
    let f = BigRational::from(factorial(p));
    let mut c = AmzvCombination::zero();
    push(&mut c, p, 0, f.clone());
    push(&mut c, p + 1, 0, -f);
    c
}

fn lemma3_2(p: u32, q: u32) -> AmzvCombination {
    let f = pq_factor(p, q);
    let mut c = AmzvCombination::zero();
    for k in 0..=q {
        let s = BigRational::from(&f * sign(i64::from(k)));
        push(&mut c, p, k, s.clone());
        push(&mut c, p + 1, k, -s);
    }
    c
}

fn lemma4_1(p: u32, _q: u32) -> AmzvCombination {
    let f = BigRational::from(factorial(p)) / 2u32;
    let mut c = AmzvCombination::zero();
    push(&mut c, p - 1, 0, f.clone());
    push(&mut c, p, 0, -f);
    c
}

/// `∫ u^p E(1-E) C^-3 du = -p! ζ(p-1̄)`, `p ≥ 2`.
pub fn lemma4_2(p: u32) -> AmzvCombination {
    assert!(p >= 2, "requires p >= 2");
    let mut c = AmzvCombination::zero();
    push(&mut c, p - 1, 0, -BigRational::from(factorial(p)));
    c
}

/// `∫ u^p E(1-E) L C^-3 du = p! [ζ(p-1̄,1) - 3/2 ζ(p-1̄) + 3/2 ζ(p̄)]`, `p ≥ 2`.
pub fn lemma4_3(p: u32) -> AmzvCombination {
    assert!(p >= 2, "requires p >= 2");
    let f = BigRational::from(factorial(p));
    let mut c = AmzvCombination::zero();
    push(&mut c, p - 1, 1, f.clone());
    push(
        &mut c,
        p - 1,
        0,
        BigRational::from(&f * BigRational::from((-3, 2))),
    );
    push(&mut c, p, 0, f * BigRational::from((3, 2)));
    c
}

/// `E C^-3 = E(1-E)C^-3 + E^2 C^-3`, so this is Lemma 4.1 plus Lemma 4.2.
fn lemma4_1_plus_4_2(p: u32, q: u32) -> AmzvCombination {
    lemma4_1(p, q).add(&lemma4_2(p))
}

pub static LEMMA_RULES: [LemmaRule; 9] = [
    LemmaRule {
        name: "1.1",
        k: 0,
        r: 0,
        q_min: 1,
        q_max: None,
        p_min: 0,
        template: lemma1_1,
    },
    LemmaRule {
        name: "1.2",
        k: 1,
        r: 1,
        q_min: 0,
        q_max: None,
        p_min: 0,
        template: lemma1_2,
    },
    LemmaRule {
        name: "diff",
        k: 0,
        r: 1,
        q_min: 1,
        q_max: None,
        p_min: 0,
        template: lemma_diff,
    },
    LemmaRule {
        name: "2.1",
        k: 1,
        r: 2,
        q_min: 0,
        q_max: Some(0),
        p_min: 1,
        template: lemma2_1,
    },
    LemmaRule {
        name: "2.2",
        k: 1,
        r: 2,
        q_min: 1,
        q_max: None,
        p_min: 1,
        template: lemma2_2,
    },
    LemmaRule {
        name: "3.1",
        k: 2,
        r: 2,
        q_min: 0,
        q_max: Some(0),
        p_min: 1,
        template: lemma3_1,
    },
    LemmaRule {
        name: "3.2",
        k: 2,
        r: 2,
        q_min: 1,
        q_max: None,
        p_min: 1,
        template: lemma3_2,
    },
    LemmaRule {
        name: "4.1",
        k: 2,
        r: 3,
        q_min: 0,
        q_max: Some(0),
        p_min: 2,
        template: lemma4_1,
    },
    LemmaRule {
        name: "4.1+4.2",
        k: 1,
        r: 3,
        q_min: 0,
        q_max: Some(0),
        p_min: 2,
        template: lemma4_1_plus_4_2,
    },
];

/// Integrates one raw term with the first matching rule.
pub fn integrate_term(t: &TermExpr) -> Result<AmzvCombination, ExprError> {
    let rule = LEMMA_RULES
        .iter()
        .find(|r| r.matches(t.key))
        .ok_or_else(|| ExprError::UnmatchedShape(vec![t.clone()]))?;
    Ok((rule.template)(t.key.p, t.key.q).scale(&t.coef))
}

/// Integrates a canonical sum over `[0, ∞)`.
///
/// Basis terms `u^p L^q`, `u^p L^q w` and `u^p L^q w^2` map to single rules;
/// `u^p L^q w^3` with `q ≤ 1`, `p ≥ 2` goes through the combined-numerator
/// integrals. Anything else is reported as unmatched.
pub fn integrate_exprsum(s: &ExprSum) -> Result<AmzvCombination, ExprError> {
    let mut total = AmzvCombination::zero();
    let mut unmatched = Vec::new();
    for t in s.terms() {
        let TermKey { p, k, q, r } = t.key;
        let piece = match (k, r) {
            (0, 0) | (1, 1) | (2, 2) => integrate_term(&t).ok(),
            (3, 3) if q <= 1 && p >= 2 => {
                let combined = if q == 0 { lemma4_2(p) } else { lemma4_3(p) };
                let half = BigRational::from((1, 2));
                let w1 = integrate_term(&TermExpr::new(-half.clone(), p, 1, q, 1));
                let w2 = integrate_term(&TermExpr::new(BigRational::from((3, 2)), p, 2, q, 2));
                match (w1, w2) {
                    (Ok(a), Ok(b)) => Some(combined.scale(&half).add(&a).add(&b).scale(&t.coef)),
                    _ => None,
                }
            }
            _ => None,
        };
        match piece {
            Some(c) => total = total.add(&c),
            None => unmatched.push(t),
        }
    }
    if unmatched.is_empty() {
        Ok(total)
    } else {
        Err(ExprError::UnmatchedShape(unmatched))
    }
}

/// `∫₀^∞` of one term by quadrature: value and error bound (estimate plus
/// tail). Uses `|u^p E^k L^q C^-r| ≤ u^p e^(-(k+q)u)`, so `k + q ≥ 1` is
/// required.
pub fn quadrature_of_term(t: &TermExpr, prec: Precision) -> Result<(HpReal, HpReal), NumericError> {
    let TermKey { p, k, q, .. } = t.key;
    if k + q == 0 {
        return Err(NumericError::Domain(format!("{t} does not decay")));
    }
    let scale = t.coef.to_f64().abs().max(f64::MIN_POSITIVE);
    let env = Envelope::new(p, 0, k + q).with_scale(scale);
    let term = t.clone();
    let r = integrate_semi_infinite(move |u: &HpReal| term.eval(u), &env, prec)?;
    Ok((r.value, r.error_estimate + r.tail_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr_series::louchard_integrand_series;
    use crate::mzv::ZetaExpr;
    use crate::numeric::abs_diff;
    use rug::Float;

    fn amzv(text: &str) -> AmzvCombination {
        let e: ZetaExpr = text.parse().unwrap();
        assert!(e.zeta.is_zero());
        e.amzv
    }

    fn t(p: u32, k: u32, q: u32, r: u32) -> TermExpr {
        TermExpr::new(BigRational::from(1), p, k, q, r)
    }

    #[test]
    fn single_term_examples() {
        assert_eq!(integrate_term(&t(0, 0, 1, 0)).unwrap(), amzv("-z(b2)"));
        assert_eq!(integrate_term(&t(2, 1, 0, 2)).unwrap(), amzv("-2*z(b2)"));
        assert_eq!(integrate_term(&t(3, 1, 0, 1)).unwrap(), amzv("-6*z(b4)"));
        assert!(matches!(
            integrate_term(&t(2, 3, 0, 0)),
            Err(ExprError::UnmatchedShape(_))
        ));
        // Lemma 3 needs p ≥ 1, Lemma 4 needs p ≥ 2
        assert!(integrate_term(&t(0, 2, 0, 2)).is_err());
        assert!(integrate_term(&t(1, 2, 0, 3)).is_err());
    }

    #[test]
    fn weights_stay_in_range() {
        // Lemma 1 and the difference rule are homogeneous of weight p+q+1;
        // the others also carry lower-weight corrections down to weight p-1.
        for rule in &LEMMA_RULES {
            for p in rule.p_min..=6 {
                for q in rule.q_min..=rule.q_max.unwrap_or(4) {
                    let c = (rule.template)(p, q);
                    let top = p + q + 1;
                    if ["1.1", "1.2", "diff"].contains(&rule.name) {
                        assert_eq!(c.homogeneous_weight(), Some(top), "rule {}", rule.name);
                    }
                    for (idx, _) in c.terms() {
                        assert!(
                            idx.weight() <= top && idx.weight() + 1 >= p,
                            "rule {}",
                            rule.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn displayed_coefficient_combinations() {
        let orders = louchard_integrand_series(9).unwrap();
        let want = [
            (2, "-1/4*z(b2)"),
            (3, "1/8*(-z(b3) + 2*z(b2,1))"),
            (4, "1/8*(z(b4) + z(b3,1) - 2*z(b2,1,1))"),
            (5, "1/8*(2*z(b5) - z(b4,1) - z(b3,1,1) + 2*z(b2,1,1,1))"),
            (7, "1/8*(-17/2*z(b7) + 2*z(b6,1) + 2*z(b5,1,1) - z(b4,1,1,1) - z(b3,{1}_4) + 2*z(b2,{1}_5))"),
        ];
        for (m, text) in want {
            assert_eq!(
                integrate_exprsum(&orders[&m]).unwrap(),
                amzv(text),
                "order {m}"
            );
        }
    }

    #[test]
    fn unmatched_terms_are_listed() {
        let s: ExprSum = "L + E^2 + u*E^4*C^-4".parse().unwrap();
        match integrate_exprsum(&s) {
            Err(ExprError::UnmatchedShape(v)) => assert_eq!(v.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn numeric_integral(tm: &TermExpr, prec: Precision) -> (HpReal, HpReal) {
        quadrature_of_term(tm, prec).unwrap()
    }

    #[test]
    fn combined_numerator_lemmas_match_quadrature() {
        let prec = Precision::new(128).unwrap();
        for p in 2..=8u32 {
            for (q, closed) in [(0u32, lemma4_2(p)), (1, lemma4_3(p))] {
                // E(1-E)L^q C^-3 = E L^q C^-3 - E^2 L^q C^-3
                let a = numeric_integral(&t(p, 1, q, 3), prec);
                let b = numeric_integral(&t(p, 2, q, 3), prec);
                let numeric = Float::with_val(128, &a.0 - &b.0);
                let exact = closed.eval(prec).unwrap();
                assert!(
                    abs_diff(&numeric, &exact) < prec.pow2(-100),
                    "p = {p}, q = {q}"
                );
            }
        }
    }

    #[test]
    fn every_rule_matches_quadrature() {
        let prec = Precision::new(112).unwrap();
        for rule in &LEMMA_RULES {
            for p in rule.p_min..=9 {
                for q in rule.q_min..=rule.q_max.unwrap_or(7) {
                    let tm = t(p, rule.k, q, rule.r);
                    if tm.key.k + q == 0 {
                        continue;
                    }
                    let (v, err) = numeric_integral(&tm, prec);
                    let exact = integrate_term(&tm).unwrap().eval(prec).unwrap();
                    let mag = Float::with_val(112, exact.abs_ref()).max(&Float::with_val(112, 1));
                    let tol = err + prec.pow2(-88) * mag;
                    assert!(
                        abs_diff(&v, &exact) <= tol,
                        "rule {} at p = {p}, q = {q}",
                        rule.name
                    );
                }
            }
        }
    }

    #[test]
    fn lemma_four_three_rejects_p_one() {
        assert!(std::panic::catch_unwind(|| lemma4_3(1)).is_err());
        let s: ExprSum = "u*L*E^3*C^-3".parse().unwrap();
        assert!(integrate_exprsum(&s).is_err());
    }
}
