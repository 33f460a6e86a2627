//! Reduction identities `ζ(idx) = polynomial + Σ c·ζ(other)` loaded from a
//! line-oriented table.

use super::{amzv_eval_lemma, AmzvCombination, AmzvIndex, MzvError, ZetaExpr, ZetaPolynomial};
use crate::numeric::{abs_diff, HpReal, Precision};
use crate::text::{table_lines, ParseError};
use std::collections::BTreeMap;
use std::path::Path;

const EMBEDDED: &str = include_str!("../../data/reductions.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionRule {
    pub lhs: AmzvIndex,
    pub rhs_zeta: ZetaPolynomial,
    pub rhs_amzv: AmzvCombination,
    /// Context label from the table, e.g. `I5`.
    pub tag: Option<String>,
    pub line: usize,
}

impl ReductionRule {
    pub fn rhs(&self) -> ZetaExpr {
        ZetaExpr {
            zeta: self.rhs_zeta.clone(),
            amzv: self.rhs_amzv.clone(),
        }
    }

    fn check_homogeneous(&self) -> Result<(), MzvError> {
        let w = self.lhs.weight();
        let bad_zeta = self.rhs_zeta.terms().find(|(m, _)| m.weight() != w);
        let bad_amzv = self.rhs_amzv.terms().find(|(i, _)| i.weight() != w);
        let detail = match (bad_zeta, bad_amzv) {
            (Some((m, _)), _) => format!("monomial {m} has weight {}, expected {w}", m.weight()),
            (None, Some((i, _))) => format!("index {i} has weight {}, expected {w}", i.weight()),
            (None, None) => return Ok(()),
        };
        Err(MzvError::Inhomogeneous {
            line: self.line,
            lhs: self.lhs.clone(),
            detail,
        })
    }
}

/// Versioned set of reduction rules keyed by left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTable {
    pub version: u32,
    rules: BTreeMap<AmzvIndex, ReductionRule>,
}

impl ReductionTable {
    /// The table shipped with the crate.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded reduction table is valid")
    }

    pub fn embedded_source() -> &'static str {
        EMBEDDED
    }

    pub fn from_path(path: &Path) -> Result<Self, MzvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MzvError::Parse(ParseError::new(0, format!("{}: {e}", path.display()))))?;
        Self::parse(&text)
    }

    /// Parses a table, checking weight homogeneity and uniqueness of each
    /// left-hand side.
    pub fn parse(text: &str) -> Result<Self, MzvError> {
        let (version, lines) = table_lines(text)?;
        let mut rules = BTreeMap::new();
        for l in lines {
            let lhs: AmzvIndex = l
                .key
                .parse()
                .map_err(|e: ParseError| ParseError::new(l.line, e.message))?;
            if !lhs.converges() {
                return Err(MzvError::DivergentIndex(lhs));
            }
            let rhs = ZetaExpr::parse_line(&l.expr, l.line)?;
            let rule = ReductionRule {
                lhs: lhs.clone(),
                rhs_zeta: rhs.zeta,
                rhs_amzv: rhs.amzv,
                tag: l.tag,
                line: l.line,
            };
            rule.check_homogeneous()?;
            if rules.insert(lhs.clone(), rule).is_some() {
                return Err(MzvError::DuplicateRule { line: l.line, lhs });
            }
        }
        Ok(ReductionTable { version, rules })
    }

    pub fn get(&self, lhs: &AmzvIndex) -> Option<&ReductionRule> {
        self.rules.get(lhs)
    }

    pub fn rules(&self) -> impl Iterator<Item = &ReductionRule> {
        self.rules.values()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// `|ζ(lhs) − rhs|` with every AMZV evaluated by quadrature.
pub fn verify_reduction(rule: &ReductionRule, prec: Precision) -> Result<HpReal, MzvError> {
    let wp = prec.plus(16);
    let lhs = amzv_eval_lemma(&rule.lhs, wp)?;
    let rhs = rule.rhs().eval(wp)?;
    Ok(crate::numeric::round_to(&abs_diff(&lhs, &rhs), prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_loads() {
        let t = ReductionTable::embedded();
        assert!(t.len() >= 24);
        let r = t.get(&"z(b2,1,1)".parse().unwrap()).unwrap();
        assert_eq!(r.tag.as_deref(), Some("I4"));
        assert_eq!(r.rhs().to_string(), "-1/16*z4 + 1/2*z(b3,1)");
    }

    #[test]
    fn inhomogeneous_rule_is_rejected() {
        let err = ReductionTable::parse("z(b6,1,1,1) := z4*z6").unwrap_err();
        assert!(matches!(err, MzvError::Inhomogeneous { line: 1, .. }));
        let err = ReductionTable::parse("z(b4,1) := z(b3,1)").unwrap_err();
        assert!(matches!(err, MzvError::Inhomogeneous { .. }));
    }

    #[test]
    fn duplicates_and_divergent_lhs_are_rejected() {
        let dup = "z(b2) := -1/2*z2\nz(b2) := -1/2*z2\n";
        assert!(matches!(
            ReductionTable::parse(dup),
            Err(MzvError::DuplicateRule { line: 2, .. })
        ));
        assert!(ReductionTable::parse("z(1,2) := z3").is_err());
    }

    #[test]
    fn listed_identities_hold() {
        let prec = Precision::new(192).unwrap();
        let t = ReductionTable::embedded();
        for key in ["z(b4,1)", "z(b2,1,1)", "z(b8)"] {
            let r = t.get(&key.parse().unwrap()).unwrap();
            let res = verify_reduction(r, prec).unwrap();
            assert!(res.to_f64() < 1e-30, "{key}: {res}");
        }
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let prec = Precision::new(128).unwrap();
        let t = ReductionTable::parse("z(b4,1) := -29/32*z5 + 1/3*z2*z3").unwrap();
        let r = t.rules().next().unwrap();
        assert!(verify_reduction(r, prec).unwrap().to_f64() > 1e-3);
    }
}
