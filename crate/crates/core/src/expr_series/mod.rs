//! Exact symbolic terms `c · u^p · E^k · L^q · C^-r` with `E = e^-u`,
//! `L = log(1+e^-u)` and `C = 1+e^-u`, their canonical sums, truncated series
//! in `1/n` over them, and term-by-term integration over `[0, ∞)`.
//!
//! Canonical form: the functions `E^k C^-r` satisfy `C^-1 = 1 - E·C^-1`, so
//! the raw `(p,k,q,r)` keys are not linearly independent. Every sum is kept in
//! the basis `{E^a : a ≥ 1} ∪ {w^j : j ≥ 0}` with `w = E·C^-1`, stored as keys
//! `(p,a,q,0)` and `(p,j,q,j)`. Two sums are equal as functions iff their
//! canonical forms are equal.

mod integrate;
mod series;

pub use integrate::{
    integrate_exprsum, integrate_term, lemma4_2, lemma4_3, quadrature_of_term, LemmaRule,
    LEMMA_RULES,
};
pub use series::{
    build_exponent_series, louchard_integrand_series, louchard_pipeline, InvNSeries, PipelineStages,
};

use crate::numeric::{round_to, BigRational, HpReal, Precision};
use crate::text::{self, format_rational, ParseError, Parser, TextAlgebra, Token};
use rug::ops::Pow;
use rug::{Float, Integer};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("series has a nonzero order-0 coefficient; exp/log1p would not terminate")]
    NonNilpotentInput,
    #[error("no integration rule matches {}", .0.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "))]
    UnmatchedShape(Vec<TermExpr>),
    #[error("order cap must be at least {min} (got {got})")]
    OrderCap { got: usize, min: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Mzv(#[from] crate::mzv::MzvError),
}

/// Exponent tuple of `u^p E^k L^q C^-r`; ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    pub r: u32,
}

impl TermKey {
    pub fn new(p: u32, k: u32, q: u32, r: u32) -> Self {
        TermKey { p, k, q, r }
    }

    fn times(self, o: TermKey) -> TermKey {
        TermKey::new(self.p + o.p, self.k + o.k, self.q + o.q, self.r + o.r)
    }

    fn write_monomial(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut parts = Vec::new();
        for (sym, e) in [("u", self.p), ("E", self.k), ("L", self.q)] {
            match e {
                0 => {}
                1 => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^{e}")),
            }
        }
        if self.r > 0 {
            parts.push(format!("C^-{}", self.r));
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// A single term `coef · u^p · E^k · L^q · C^-r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermExpr {
    pub coef: BigRational,
    pub key: TermKey,
}

impl TermExpr {
    pub fn new(coef: BigRational, p: u32, k: u32, q: u32, r: u32) -> Self {
        TermExpr {
            coef,
            key: TermKey::new(p, k, q, r),
        }
    }

    pub fn eval(&self, u: &HpReal) -> HpReal {
        let wp = u.prec();
        let e = Float::with_val(wp, -u).exp();
        let l = Float::with_val(wp, e.ln_1p_ref());
        let c = Float::with_val(wp, 1 + &e);
        let mut v = Float::with_val(wp, &self.coef);
        v *= Float::with_val(wp, u.pow(self.key.p));
        v *= e.pow(self.key.k);
        v *= l.pow(self.key.q);
        v /= c.pow(self.key.r);
        v
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut mono = String::new();
        self.key.write_monomial(&mut mono)?;
        match (mono.is_empty(), self.coef == 1) {
            (true, _) => write!(f, "{}", format_rational(&self.coef)),
            (false, true) => write!(f, "{mono}"),
            (false, false) => write!(f, "{}*{mono}", format_rational(&self.coef)),
        }
    }
}

type Expansion = Vec<((u32, u32), BigRational)>;

fn expansion_cache() -> &'static Mutex<HashMap<(u32, u32), Expansion>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Expansion>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `E^k C^-r` in the canonical basis, as `((k', r'), coef)` pairs.
fn canonical_expansion(k: u32, r: u32) -> Expansion {
    if r == 0 || k == r {
        return vec![((k, r), BigRational::from(1))];
    }
    if let Some(v) = expansion_cache()
        .lock()
        .expect("cache poisoned")
        .get(&(k, r))
    {
        return v.clone();
    }
    let mut acc: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
    if k < r {
        // E^k C^-r = w^k (1 - w)^(r-k)
        let m = r - k;
        for i in 0..=m {
            let mut b = BigRational::from(Integer::from(Integer::binomial_u(m, i)));
            if i % 2 == 1 {
                b = -b;
            }
            *acc.entry((k + i, k + i)).or_default() += b;
        }
    } else {
        // E^k C^-r = E^(k-r) w^r, reduced with E·w = E - w
        reduce_ew(k - r, r, &BigRational::from(1), &mut acc);
    }
    let v: Expansion = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    expansion_cache()
        .lock()
        .expect("cache poisoned")
        .insert((k, r), v.clone());
    v
}

fn reduce_ew(a: u32, j: u32, coef: &BigRational, acc: &mut BTreeMap<(u32, u32), BigRational>) {
    if j == 0 {
        *acc.entry((a, 0)).or_default() += coef;
    } else if a == 0 {
        *acc.entry((j, j)).or_default() += coef;
    } else {
        reduce_ew(a, j - 1, coef, acc);
        reduce_ew(a - 1, j, &BigRational::from(-coef), acc);
    }
}

/// Canonical sum of terms (see the module docs for the basis).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExprSum(BTreeMap<TermKey, BigRational>);

impl ExprSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(q: BigRational) -> Self {
        Self::from_term(&TermExpr::new(q, 0, 0, 0, 0))
    }

    /// Canonicalises a raw term.
    pub fn from_term(t: &TermExpr) -> Self {
        let mut s = Self::zero();
        s.add_raw(t.key, &t.coef);
        s
    }

    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a TermExpr>) -> Self {
        let mut s = Self::zero();
        for t in terms {
            s.add_raw(t.key, &t.coef);
        }
        s
    }

    fn add_raw(&mut self, key: TermKey, coef: &BigRational) {
        if *coef == 0 {
            return;
        }
        for ((k, r), c) in canonical_expansion(key.k, key.r) {
            let ck = TermKey::new(key.p, k, key.q, r);
            let slot = self.0.entry(ck).or_default();
            *slot += BigRational::from(&c * coef);
            if *slot == 0 {
                self.0.remove(&ck);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = TermExpr> + '_ {
        self.0.iter().map(|(k, c)| TermExpr {
            coef: c.clone(),
            key: *k,
        })
    }

    pub fn coefficient(&self, key: TermKey) -> BigRational {
        self.0.get(&key).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.0 {
            out.add_raw(*k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigRational::from(-1)))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if *q == 0 {
            return Self::zero();
        }
        ExprSum(
            self.0
                .iter()
                .map(|(k, c)| (*k, BigRational::from(c * q)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.0 {
            for (k2, c2) in &other.0 {
                out.add_raw(k1.times(*k2), &BigRational::from(c1 * c2));
            }
        }
        out
    }

    /// Value at `u`, computed at `u`'s precision plus guard bits.
    pub fn eval(&self, u: &HpReal, prec: Precision) -> HpReal {
        let wp = prec.plus(16).bits();
        let uw = Float::with_val(wp, u);
        let mut acc = Float::new(wp);
        for t in self.terms() {
            acc += t.eval(&uw);
        }
        round_to(&acc, prec)
    }

    /// Least common denominator of the coefficients.
    pub fn common_denominator(&self) -> Integer {
        self.0
            .values()
            .fold(Integer::from(1), |acc, c| acc.lcm(c.denom()))
    }

    /// Largest powers of `u` and `L` over all terms.
    pub fn degree_bounds(&self) -> (u32, u32) {
        let p = self.0.keys().map(|k| k.p).max().unwrap_or(0);
        let q = self.0.keys().map(|k| k.q).max().unwrap_or(0);
        (p, q)
    }

    /// Printer with the common denominator factored out, e.g.
    /// `1/48*(-u^3*E*C^-1 + 3*u*L^2 + 2*L^3)`.
    pub fn factored(&self) -> String {
        let d = self.common_denominator();
        if d == 1 || self.0.len() <= 1 {
            return self.to_string();
        }
        let inner = self.scale(&BigRational::from(d.clone()));
        format!("1/{d}*({inner})")
    }
}

impl fmt::Display for ExprSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(BigRational, String)> = self
            .0
            .iter()
            .map(|(k, c)| {
                let mut m = String::new();
                k.write_monomial(&mut m).expect("string write");
                (c.clone(), m)
            })
            .collect();
        write!(
            f,
            "{}",
            text::format_linear(items.iter().map(|(c, m)| (c, m.clone())))
        )
    }
}

impl FromStr for ExprSum {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(text::parse_expr(s, 1)?)
    }
}

impl ExprSum {
    pub fn parse_line(src: &str, line: usize) -> Result<Self, ExprError> {
        Ok(text::parse_expr(src, line)?)
    }
}

impl TextAlgebra for ExprSum {
    fn constant(q: BigRational) -> Self {
        ExprSum::constant(q)
    }

    fn atom(p: &mut Parser) -> Result<Self, ParseError> {
        let id = match p.next() {
            Some(Token::Ident(id)) => id,
            other => return Err(p.error(format!("expected identifier, found {other:?}"))),
        };
        let e = p.power_suffix()?;
        let one = BigRational::from(1);
        let nonneg = |e: i64| -> Result<u32, ParseError> {
            u32::try_from(e).map_err(|_| p.error(format!("negative power of {id}")))
        };
        match id.as_str() {
            "u" => Ok(ExprSum::from_term(&TermExpr::new(one, nonneg(e)?, 0, 0, 0))),
            "E" => Ok(ExprSum::from_term(&TermExpr::new(one, 0, nonneg(e)?, 0, 0))),
            "L" => Ok(ExprSum::from_term(&TermExpr::new(one, 0, 0, nonneg(e)?, 0))),
            "C" if e <= 0 => Ok(ExprSum::from_term(&TermExpr::new(
                one,
                0,
                0,
                0,
                (-e) as u32,
            ))),
            "C" => {
                // (1 + E)^e expanded binomially
                let mut s = ExprSum::zero();
                for i in 0..=e as u32 {
                    let b = BigRational::from(Integer::from(Integer::binomial_u(e as u32, i)));
                    s.add_raw(TermKey::new(0, i, 0, 0), &b);
                }
                Ok(s)
            }
            _ => Err(p.error(format!("unknown symbol {id:?} (expected u, E, L or C)"))),
        }
    }

    fn sum_with(self, other: Self) -> Self {
        ExprSum::add(&self, &other)
    }

    fn product_with(self, other: Self, _line: usize) -> Result<Self, ParseError> {
        Ok(ExprSum::mul(&self, &other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from((n, d))
    }

    fn s(text: &str) -> ExprSum {
        text.parse().unwrap()
    }

    #[test]
    fn canonical_basis_identities() {
        // C^-1 = 1 - w
        assert_eq!(s("C^-1"), s("1 - E*C^-1"));
        // E·w = E - w
        assert_eq!(s("E^2*C^-1"), s("E - E*C^-1"));
        // E(1-E)C^-3 = w - 3w^2 + 2w^3
        assert_eq!(s("E*(1-E)*C^-3"), s("E*C^-1 - 3*E^2*C^-2 + 2*E^3*C^-3"));
        assert_eq!(s("C^2*C^-2"), s("1"));
        assert!(s("L*u - u*L").is_zero());
    }

    #[test]
    fn printer_round_trips_and_factors() {
        let e = s("1/48*(-u^3*E*C^-1 + 3*u*L^2 + 2*L^3)");
        assert_eq!(e.factored(), "1/48*(2*L^3 + 3*u*L^2 - u^3*E*C^-1)");
        assert_eq!(s(&e.factored()), e);
        assert_eq!(s(&e.to_string()), e);
        assert_eq!(s("3/4").to_string(), "3/4");
    }

    #[test]
    fn rejects_unknown_symbols() {
        assert!("x*L".parse::<ExprSum>().is_err());
        assert!("u^-1".parse::<ExprSum>().is_err());
        assert!("L +".parse::<ExprSum>().is_err());
    }

    #[test]
    fn term_eval_matches_definition() {
        let prec = Precision::new(128).unwrap();
        let u = Float::with_val(128, 1.5);
        let t = TermExpr::new(q(3, 2), 2, 1, 1, 2);
        let e = (-1.5f64).exp();
        let expected = 1.5 * 2.25 * e * (1.0 + e).ln() / (1.0 + e).powi(2);
        assert!((t.eval(&u).to_f64() - expected).abs() < 1e-14);
        let sum = ExprSum::from_term(&t);
        assert!((sum.eval(&u, prec).to_f64() - expected).abs() < 1e-14);
    }

    fn arb_sum() -> impl Strategy<Value = ExprSum> {
        prop::collection::vec(
            (0u32..4, 0u32..4, 0u32..3, 0u32..4, -9i64..10, 1i64..7),
            0..5,
        )
        .prop_map(|v| {
            let terms: Vec<TermExpr> = v
                .into_iter()
                .map(|(p, k, qq, r, n, d)| TermExpr::new(q(n, d), p, k, qq, r))
                .collect();
            ExprSum::from_terms(&terms)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn canonical_form_is_sound(a in arb_sum(), b in arb_sum()) {
            let prec = Precision::new(128).unwrap();
            let tol = prec.pow2(-96);
            for u in [0.5f64, 1.0, 2.0, 5.0] {
                let uf = Float::with_val(128, u);
                let (va, vb) = (a.eval(&uf, prec), b.eval(&uf, prec));
                let prod = a.mul(&b).eval(&uf, prec);
                let sum = a.add(&b).eval(&uf, prec);
                let dp = Float::with_val(128, &prod - Float::with_val(128, &va * &vb)).abs();
                let ds = Float::with_val(128, &sum - Float::with_val(128, &va + &vb)).abs();
                prop_assert!(dp <= tol, "product mismatch at u = {}", u);
                prop_assert!(ds <= tol, "sum mismatch at u = {}", u);
            }
        }

        #[test]
        fn text_round_trip(a in arb_sum()) {
            prop_assert_eq!(&s(&a.to_string()), &a);
            prop_assert_eq!(&s(&a.factored()), &a);
        }

        #[test]
        fn ring_laws(a in arb_sum(), b in arb_sum(), c in arb_sum()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }
    }
}
