//! Tables of the expansion coefficients `I_0 … I_9`, reduction of AMZV
//! combinations to zeta polynomials, and the conjectured closed pattern of the
//! AMZV brackets.

use crate::mzv::{
    zeta_bar_closed, AmzvCombination, AmzvIndex, MzvError, ReductionTable, ZetaExpr, ZetaPolynomial,
};
use crate::numeric::BigRational;
use crate::text::{table_lines, ParseError};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

const EMBEDDED: &str = include_str!("../data/coefficients.txt");

/// Highest order with a tabulated coefficient.
pub const MAX_ORDER: u32 = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("order {j} is outside the tabulated range {min}..={max}")]
    OutOfRange { j: u32, min: u32, max: u32 },
    #[error("reduction left alternating terms behind: {}", format_residual(.0))]
    ResidualAmzv(Vec<(AmzvIndex, BigRational)>),
    #[error("line {line}: {detail}")]
    Table { line: usize, detail: String },
    #[error(transparent)]
    Mzv(#[from] MzvError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn format_residual(terms: &[(AmzvIndex, BigRational)]) -> String {
    terms
        .iter()
        .map(|(i, c)| format!("{c}*{i}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `I_j` both as a zeta polynomial and as the raw AMZV combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    closed: BTreeMap<u32, ZetaPolynomial>,
    amzv: BTreeMap<u32, AmzvCombination>,
}

fn parse_key(key: &str, line: usize) -> Result<(bool, u32), CoeffError> {
    let bad = || CoeffError::Table {
        line,
        detail: format!("unrecognized key {key:?}"),
    };
    let (kind, name) = key.split_once(char::is_whitespace).ok_or_else(bad)?;
    let j: u32 = name
        .trim()
        .strip_prefix('I')
        .and_then(|s| s.parse().ok())
        .ok_or_else(bad)?;
    match kind {
        "closed" => Ok((true, j)),
        "amzv" => Ok((false, j)),
        _ => Err(bad()),
    }
}

impl CoefficientTable {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded coefficient table is valid")
    }

    pub fn embedded_source() -> &'static str {
        EMBEDDED
    }

    /// Parses `closed Ij := …` and `amzv Ij := …` lines and checks that every
    /// entry is homogeneous of weight `j` and that the ranges are complete.
    pub fn parse(text: &str) -> Result<Self, CoeffError> {
        let (_, lines) = table_lines(text)?;
        let mut closed = BTreeMap::new();
        let mut amzv = BTreeMap::new();
        for l in lines {
            let (is_closed, j) = parse_key(&l.key, l.line)?;
            let e = ZetaExpr::parse_line(&l.expr, l.line)?;
            let weight_err = |what: String| CoeffError::Table {
                line: l.line,
                detail: format!("I{j}: {what}"),
            };
            let dup = if is_closed {
                if !e.amzv.is_empty() {
                    return Err(weight_err("closed form contains AMZVs".into()));
                }
                if let Some((m, _)) = e.zeta.terms().find(|(m, _)| m.weight() != j) {
                    return Err(weight_err(format!(
                        "monomial {m} has weight {}",
                        m.weight()
                    )));
                }
                closed.insert(j, e.zeta).is_some()
            } else {
                if !e.zeta.is_zero() {
                    return Err(weight_err(
                        "AMZV form contains a zeta polynomial part".into(),
                    ));
                }
                if let Some((i, _)) = e.amzv.terms().find(|(i, _)| i.weight() != j) {
                    return Err(weight_err(format!("index {i} has weight {}", i.weight())));
                }
                amzv.insert(j, e.amzv).is_some()
            };
            if dup {
                return Err(CoeffError::Table {
                    line: l.line,
                    detail: format!("duplicate entry {}", l.key),
                });
            }
        }
        let table = CoefficientTable { closed, amzv };
        for j in 0..=MAX_ORDER {
            if !table.closed.contains_key(&j) {
                return Err(CoeffError::Table {
                    line: 0,
                    detail: format!("missing closed form for I{j}"),
                });
            }
            if j >= 2 && !table.amzv.contains_key(&j) {
                return Err(CoeffError::Table {
                    line: 0,
                    detail: format!("missing AMZV form for I{j}"),
                });
            }
        }
        Ok(table)
    }

    pub fn closed_form(&self, j: u32) -> Result<&ZetaPolynomial, CoeffError> {
        self.closed.get(&j).ok_or(CoeffError::OutOfRange {
            j,
            min: 0,
            max: MAX_ORDER,
        })
    }

    pub fn amzv_form(&self, j: u32) -> Result<&AmzvCombination, CoeffError> {
        self.amzv.get(&j).ok_or(CoeffError::OutOfRange {
            j,
            min: 2,
            max: MAX_ORDER,
        })
    }
}

/// Rewrites `c` with the rules of `rules` until no rule applies, then
/// requires the alternating part to have cancelled completely.
///
/// Depth-one barred values without a rule fall back to
/// `ζ(n̄) = (2^(1-n) - 1) ζ(n)`. Each pass substitutes every reducible index
/// at once, heaviest first; the number of passes is capped by the table size
/// so a cyclic rule set ends in [`CoeffError::ResidualAmzv`].
pub fn reduce_to_zeta(
    c: &AmzvCombination,
    rules: &ReductionTable,
) -> Result<ZetaPolynomial, CoeffError> {
    let mut zeta = ZetaPolynomial::zero();
    let mut rest = c.clone();
    for _ in 0..=rules.len() + 1 {
        let mut pending: Vec<(AmzvIndex, ZetaExpr)> = Vec::new();
        for (idx, _) in rest.terms() {
            if let Some(rule) = rules.get(idx) {
                pending.push((idx.clone(), rule.rhs()));
            } else if let Some(fallback) = depth_one_fallback(idx)? {
                pending.push((idx.clone(), fallback));
            }
        }
        if pending.is_empty() {
            break;
        }
        pending.sort_by(|a, b| (b.0.weight(), b.0.depth()).cmp(&(a.0.weight(), a.0.depth())));
        for (idx, rhs) in pending {
            let Some(coef) = rest.take(&idx) else {
                continue;
            };
            let scaled = rhs.scale(&coef);
            zeta = zeta.add(&scaled.zeta);
            rest = rest.add(&scaled.amzv);
        }
    }
    if rest.is_empty() {
        Ok(zeta)
    } else {
        Err(CoeffError::ResidualAmzv(
            rest.terms().map(|(i, c)| (i.clone(), c.clone())).collect(),
        ))
    }
}

fn depth_one_fallback(idx: &AmzvIndex) -> Result<Option<ZetaExpr>, CoeffError> {
    match idx.parts() {
        [p] if p.barred && p.exponent >= 2 => Ok(Some(ZetaExpr {
            zeta: zeta_bar_closed(p.exponent)?,
            amzv: AmzvCombination::zero(),
        })),
        _ => Ok(None),
    }
}

/// The rational sequence `a_0, a_1, …` of the conjectured bracket pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureOneSequence(Vec<BigRational>);

impl ConjectureOneSequence {
    pub fn new(a: Vec<BigRational>) -> Self {
        ConjectureOneSequence(a)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }
}

impl Default for ConjectureOneSequence {
    /// `(-2, 1, -2, 17/2, -62)`.
    fn default() -> Self {
        ConjectureOneSequence(vec![
            BigRational::from(-2),
            BigRational::from(1),
            BigRational::from(-2),
            BigRational::from((17, 2)),
            BigRational::from(-62),
        ])
    }
}

impl fmt::Display for ConjectureOneSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", items.join(", "))
    }
}

/// Largest `m` accepted by [`conjecture1_combo`].
pub const CONJECTURE1_MAX_ORDER: u32 = 11;

/// `1/8 Σ_{j=2}^m (-1)^m a_⌊(j-1)/2⌋ ζ(j̄, {1}_(m-j))`.
pub fn conjecture1_combo(m: u32, a: &ConjectureOneSequence) -> Result<AmzvCombination, CoeffError> {
    let max_from_a = 2 * a.0.len() as u32;
    if !(2..=CONJECTURE1_MAX_ORDER).contains(&m) || (m - 1) / 2 >= a.0.len() as u32 {
        return Err(CoeffError::OutOfRange {
            j: m,
            min: 2,
            max: CONJECTURE1_MAX_ORDER.min(max_from_a),
        });
    }
    let sign = if m % 2 == 0 { 1 } else { -1 };
    let mut out = AmzvCombination::zero();
    for j in 2..=m {
        let coef = BigRational::from((sign, 8)) * &a.0[((j - 1) / 2) as usize];
        out.add_term(AmzvIndex::bar_ones(j, (m - j) as usize), coef)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr_series::{integrate_exprsum, louchard_integrand_series};
    use crate::numeric::{abs_diff, Precision};

    fn zp(s: &str) -> ZetaPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_lookups() {
        let t = CoefficientTable::embedded();
        assert_eq!(t.closed_form(0).unwrap(), &zp("3/4"));
        assert!(t.closed_form(1).unwrap().is_zero());
        assert_eq!(t.closed_form(6).unwrap(), &zp("83/256*z6 - 1/16*z3^2"));
        assert_eq!(
            t.closed_form(9).unwrap(),
            &zp("-5/6*z9 - 289/128*z3*z6 - 135/64*z4*z5 - 9/8*z2*z7 + 5/96*z3^3")
        );
        assert!(matches!(
            t.closed_form(10),
            Err(CoeffError::OutOfRange { j: 10, .. })
        ));
        assert!(matches!(
            t.amzv_form(1),
            Err(CoeffError::OutOfRange { j: 1, .. })
        ));
    }

    #[test]
    fn amzv_form_lookups() {
        let t = CoefficientTable::embedded();
        assert_eq!(
            t.amzv_form(3).unwrap().to_string(),
            "-1/8*z(b3) + 1/4*z(b2,1)"
        );
        assert_eq!(t.amzv_form(2).unwrap().len(), 1);
        assert_eq!(t.amzv_form(9).unwrap().len(), 8);
    }

    #[test]
    fn weight_grading() {
        let t = CoefficientTable::embedded();
        for j in 0..=MAX_ORDER {
            let c = t.closed_form(j).unwrap();
            assert!(c.terms().all(|(m, _)| m.weight() == j), "closed I{j}");
        }
        for j in 2..=MAX_ORDER {
            assert_eq!(t.amzv_form(j).unwrap().homogeneous_weight(), Some(j));
        }
        let bad = EMBEDDED.replace("closed I3 := 1/8*z3", "closed I3 := 1/8*z4");
        assert!(matches!(
            CoefficientTable::parse(&bad),
            Err(CoeffError::Table { .. })
        ));
    }

    #[test]
    fn reductions_close_exactly() {
        let t = CoefficientTable::embedded();
        let rules = ReductionTable::embedded();
        for j in 2..=MAX_ORDER {
            let got = reduce_to_zeta(t.amzv_form(j).unwrap(), &rules).unwrap();
            assert_eq!(&got, t.closed_form(j).unwrap(), "I{j}");
        }
    }

    #[test]
    fn reduction_examples() {
        let rules = ReductionTable::embedded();
        let i2: AmzvCombination = "-1/4*z(b2)".parse::<ZetaExpr>().unwrap().amzv;
        assert_eq!(reduce_to_zeta(&i2, &rules).unwrap(), zp("1/8*z2"));
        let i4 = CoefficientTable::embedded().amzv_form(4).unwrap().clone();
        assert_eq!(reduce_to_zeta(&i4, &rules).unwrap(), zp("-3/32*z4"));
    }

    #[test]
    fn missing_rule_leaves_residual() {
        let rules = ReductionTable::parse("z(b2) := -1/2*z2").unwrap();
        let c = CoefficientTable::embedded().amzv_form(4).unwrap().clone();
        match reduce_to_zeta(&c, &rules) {
            Err(CoeffError::ResidualAmzv(rest)) => {
                assert!(rest.iter().any(|(i, _)| i.to_string() == "z(b2,1,1)"))
            }
            other => panic!("expected residual, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_rules_terminate() {
        let rules = ReductionTable::parse("z(b3,1) := z(b2,1,1)\nz(b2,1,1) := z(b3,1)\n").unwrap();
        let c: AmzvCombination = "z(b3,1)".parse::<ZetaExpr>().unwrap().amzv;
        assert!(matches!(
            reduce_to_zeta(&c, &rules),
            Err(CoeffError::ResidualAmzv(_))
        ));
    }

    #[test]
    fn closed_and_amzv_forms_agree_numerically() {
        let prec = Precision::new(256).unwrap();
        let t = CoefficientTable::embedded();
        let tol = prec.pow2(-(256 - 32));
        for j in 2..=MAX_ORDER {
            let a = t.closed_form(j).unwrap().eval(prec).unwrap();
            let b = t.amzv_form(j).unwrap().eval(prec).unwrap();
            assert!(abs_diff(&a, &b) < tol, "I{j}: {a} vs {b}");
        }
    }

    #[test]
    fn conjecture_pattern_matches_table() {
        let t = CoefficientTable::embedded();
        let a = ConjectureOneSequence::default();
        for m in 2..=MAX_ORDER {
            assert_eq!(
                &conjecture1_combo(m, &a).unwrap(),
                t.amzv_form(m).unwrap(),
                "m = {m}"
            );
        }
        assert_eq!(conjecture1_combo(2, &a).unwrap().to_string(), "-1/4*z(b2)");
        assert!(conjecture1_combo(10, &a).is_ok());
        assert!(matches!(
            conjecture1_combo(11, &a),
            Err(CoeffError::OutOfRange { .. })
        ));
        assert!(matches!(
            conjecture1_combo(1, &a),
            Err(CoeffError::OutOfRange { .. })
        ));
    }

    #[test]
    fn table_matches_symbolic_integration() {
        let t = CoefficientTable::embedded();
        let series = louchard_integrand_series(9).unwrap();
        for (m, integrand) in series {
            let j = m as u32;
            assert_eq!(
                &integrate_exprsum(&integrand).unwrap(),
                t.amzv_form(j).unwrap(),
                "I{j}"
            );
        }
    }
}
