//! Alternating multiple zeta values: index algebra, exact combinations of
//! zeta monomials and AMZVs, numeric evaluators and the reduction table.
//!
//! `ζ(a₁,…,a_k) = Σ_{n₁>…>n_k≥1} Π σ_i^{n_i} / n_i^{a_i}` with `σ_i = -1` on
//! barred exponents.

mod eval;
mod table;

pub use eval::{
    amzv_converges, amzv_eval_lemma, amzv_nested_sum, lemma_path, zagier_check, zeta_bar_closed,
    LemmaPath, NestedSum, ZagierCheck, ZagierMethod,
};
pub use table::{verify_reduction, ReductionRule, ReductionTable};

use crate::numeric::{
    even_zeta_ratio, round_to, zeta_value, BigRational, HpReal, NumericError, Precision,
};
use crate::text::{self, format_linear, ParseError, Parser, TextAlgebra, Token};
use rug::ops::Pow;
use rug::{Float, Integer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MzvError {
    #[error("{0} diverges (leading exponent is an unbarred 1)")]
    DivergentIndex(AmzvIndex),
    #[error("{0} is not of the shape (m̄, 1, …, 1)")]
    Shape(AmzvIndex),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature paths for {index} disagree by {difference:e} (tolerance {tolerance:e})")]
    PathDisagreement {
        index: AmzvIndex,
        difference: f64,
        tolerance: f64,
    },
    #[error("line {line}: rule for {lhs} is not weight-homogeneous ({detail})")]
    Inhomogeneous {
        line: usize,
        lhs: AmzvIndex,
        detail: String,
    },
    #[error("line {line}: duplicate rule for {lhs}")]
    DuplicateRule { line: usize, lhs: AmzvIndex },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// One argument of an AMZV: an exponent, possibly barred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPart {
    pub exponent: u32,
    pub barred: bool,
}

impl IndexPart {
    pub fn plain(exponent: u32) -> Self {
        IndexPart {
            exponent,
            barred: false,
        }
    }

    pub fn bar(exponent: u32) -> Self {
        IndexPart {
            exponent,
            barred: true,
        }
    }
}

/// AMZV argument list `(a₁, …, a_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmzvIndex(Vec<IndexPart>);

impl AmzvIndex {
    pub fn new(parts: Vec<IndexPart>) -> Result<Self, MzvError> {
        if parts.is_empty() {
            return Err(MzvError::Domain("empty AMZV index".into()));
        }
        if parts.iter().any(|p| p.exponent == 0) {
            return Err(MzvError::Domain("AMZV exponents must be >= 1".into()));
        }
        Ok(AmzvIndex(parts))
    }

    /// `(m̄, {1}_k)`.
    pub fn bar_ones(m: u32, k: usize) -> Self {
        assert!(m >= 1, "exponent must be >= 1");
        let mut parts = vec![IndexPart::bar(m)];
        parts.extend(std::iter::repeat(IndexPart::plain(1)).take(k));
        AmzvIndex(parts)
    }

    /// `(s, s, …)` with `n` copies of the given parts.
    pub fn repeated(block: &[IndexPart], n: usize) -> Result<Self, MzvError> {
        Self::new(
            block
                .iter()
                .copied()
                .cycle()
                .take(block.len() * n)
                .collect(),
        )
    }

    pub fn parts(&self) -> &[IndexPart] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|p| p.exponent).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn converges(&self) -> bool {
        self.0[0] != IndexPart::plain(1)
    }

    /// `Some((m, k))` when the index is `(m̄, {1}_k)`.
    pub fn lemma_shape(&self) -> Option<(u32, usize)> {
        let (head, tail) = self.0.split_first()?;
        if !head.barred || tail.iter().any(|p| *p != IndexPart::plain(1)) {
            return None;
        }
        Some((head.exponent, tail.len()))
    }

    /// Unicode rendering, e.g. `ζ(4̄,1,1)`.
    pub fn pretty(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|p| {
                if p.barred {
                    p.exponent
                        .to_string()
                        .chars()
                        .flat_map(|c| [c, '\u{0304}'])
                        .collect()
                } else {
                    p.exponent.to_string()
                }
            })
            .collect();
        format!("ζ({})", parts.join(","))
    }

    fn parse_list(p: &mut Parser) -> Result<Vec<IndexPart>, ParseError> {
        let mut parts = Vec::new();
        loop {
            match p.next() {
                Some(Token::Int(v)) => {
                    let e = v
                        .to_u32()
                        .filter(|e| *e >= 1)
                        .ok_or_else(|| p.error("bad exponent"))?;
                    parts.push(IndexPart::plain(e));
                }
                Some(Token::Ident(id)) if id.starts_with('b') => {
                    let e = id[1..]
                        .parse::<u32>()
                        .ok()
                        .filter(|e| *e >= 1)
                        .ok_or_else(|| p.error(format!("bad barred exponent {id:?}")))?;
                    parts.push(IndexPart::bar(e));
                }
                Some(Token::LBrace) => {
                    let block = Self::parse_list(p)?;
                    p.expect(&Token::RBrace)?;
                    p.expect(&Token::Underscore)?;
                    let n = p.expect_u32()? as usize;
                    parts.extend(block.iter().copied().cycle().take(block.len() * n));
                }
                other => return Err(p.error(format!("expected an index part, found {other:?}"))),
            }
            if !p.eat(&Token::Comma) {
                break;
            }
        }
        Ok(parts)
    }

    /// Parses the body following `z` in `z(b4,1,{1}_3)`.
    pub(crate) fn parse_call(p: &mut Parser) -> Result<Self, ParseError> {
        p.expect(&Token::LParen)?;
        let parts = Self::parse_list(p)?;
        p.expect(&Token::RParen)?;
        if parts.is_empty() {
            return Err(p.error("empty AMZV index"));
        }
        Ok(AmzvIndex(parts))
    }
}

impl fmt::Display for AmzvIndex {
    /// Grammar form: `z(b2,{1}_4)`; runs of three or more unbarred ones are
    /// compressed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let p = self.0[i];
            if p == IndexPart::plain(1) {
                let run = self.0[i..].iter().take_while(|q| **q == p).count();
                if run >= 3 {
                    items.push(format!("{{1}}_{run}"));
                    i += run;
                    continue;
                }
            }
            items.push(if p.barred {
                format!("b{}", p.exponent)
            } else {
                p.exponent.to_string()
            });
            i += 1;
        }
        write!(f, "z({})", items.join(","))
    }
}

impl FromStr for AmzvIndex {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s, 1)?;
        match p.next() {
            Some(Token::Ident(id)) if id == "z" => {}
            other => return Err(p.error(format!("expected `z(`, found {other:?}"))),
        }
        let idx = Self::parse_call(&mut p)?;
        p.finish()?;
        Ok(idx)
    }
}

/// Product `Π ζ(k)^{e_k}` of Riemann zeta values; empty is the monomial 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZetaMonomial(BTreeMap<u32, u32>);

impl ZetaMonomial {
    pub fn one() -> Self {
        ZetaMonomial(BTreeMap::new())
    }

    pub fn zeta(k: u32) -> Result<Self, MzvError> {
        Self::power(k, 1)
    }

    pub fn power(k: u32, e: u32) -> Result<Self, MzvError> {
        if k < 2 {
            return Err(MzvError::Domain(format!(
                "zeta({k}) is not a Riemann zeta value"
            )));
        }
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(k, e);
        }
        Ok(ZetaMonomial(m))
    }

    pub fn factors(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(k, e)| (*k, *e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(k, e)| k * e).sum()
    }

    /// Total number of zeta factors counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, e) in &other.0 {
            *m.entry(*k).or_insert(0) += e;
        }
        ZetaMonomial(m)
    }

    pub fn eval(&self, prec: Precision) -> Result<HpReal, MzvError> {
        let mut acc = Float::with_val(prec.bits(), 1);
        for (k, e) in &self.0 {
            acc *= zeta_value(*k, prec)?.pow(*e);
        }
        Ok(acc)
    }
}

impl fmt::Display for ZetaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let items: Vec<String> = self
            .0
            .iter()
            .map(|(k, e)| {
                if *e == 1 {
                    format!("z{k}")
                } else {
                    format!("z{k}^{e}")
                }
            })
            .collect();
        write!(f, "{}", items.join("*"))
    }
}

/// Exact rational combination of zeta monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaPolynomial(BTreeMap<ZetaMonomial, BigRational>);

impl ZetaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(q: BigRational) -> Self {
        Self::term(ZetaMonomial::one(), q)
    }

    pub fn term(m: ZetaMonomial, q: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, q);
        p
    }

    pub fn add_term(&mut self, m: ZetaMonomial, q: BigRational) {
        if q == 0 {
            return;
        }
        let slot = self.0.entry(m.clone()).or_default();
        *slot += q;
        if *slot == 0 {
            self.0.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ZetaMonomial, &BigRational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, m: &ZetaMonomial) -> BigRational {
        self.0.get(m).cloned().unwrap_or_default()
    }

    /// The pure rational part, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::new()),
            1 => self.0.get(&ZetaMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, q) in &other.0 {
            out.add_term(m.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigRational::from(-1)))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            out.add_term(m.clone(), BigRational::from(c * q));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(m1.mul(m2), BigRational::from(c1 * c2));
            }
        }
        out
    }

    /// The common weight of all monomials, `None` if mixed. Zero is
    /// homogeneous of every weight and reports `Some(0)`.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut weights = self.0.keys().map(ZetaMonomial::weight);
        let first = weights.next().unwrap_or(0);
        weights.all(|w| w == first).then_some(first)
    }

    /// Rewrites every even zeta as a rational multiple of a power of `ζ(2)`,
    /// giving a canonical form in which distinct polynomials are distinct
    /// real numbers (modulo the usual conjectures on odd zetas).
    pub fn even_canonical(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            let mut coef = c.clone();
            let mut exps = BTreeMap::new();
            for (k, e) in m.factors() {
                if k % 2 == 0 {
                    let r = even_zeta_ratio(k / 2);
                    coef *= r.pow(e as i32);
                    *exps.entry(2).or_insert(0) += (k / 2) * e;
                } else {
                    *exps.entry(k).or_insert(0) += e;
                }
            }
            out.add_term(ZetaMonomial(exps), coef);
        }
        out
    }

    /// Canonical form with powers of `ζ(2)` merged into one even zeta,
    /// `ζ(2)^a → ζ(2a)/r_a`, matching how closed forms are usually printed.
    pub fn with_even_zetas(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.even_canonical().0 {
            let mut exps = m.0.clone();
            let mut coef = c.clone();
            if let Some(a) = exps.get(&2).copied() {
                if a >= 2 {
                    exps.remove(&2);
                    exps.insert(2 * a, 1);
                    coef /= even_zeta_ratio(a);
                }
            }
            out.add_term(ZetaMonomial(exps), coef);
        }
        out
    }

    /// Whether two polynomials denote the same number once even zetas are
    /// expressed through `ζ(2)`.
    pub fn equivalent(&self, other: &Self) -> bool {
        self.even_canonical() == other.even_canonical()
    }

    pub fn eval(&self, prec: Precision) -> Result<HpReal, MzvError> {
        let wp = prec.plus(16);
        let mut acc = wp.zero();
        for (m, c) in &self.0 {
            acc += m.eval(wp)? * wp.rational(c);
        }
        Ok(round_to(&acc, prec))
    }

    /// Monomials in display order: by weight (high first), then number of
    /// factors, then largest zeta argument (high first).
    fn display_order(&self) -> Vec<(&ZetaMonomial, &BigRational)> {
        let mut v: Vec<_> = self.0.iter().collect();
        v.sort_by_key(|(m, _)| {
            (
                std::cmp::Reverse(m.weight()),
                m.degree(),
                std::cmp::Reverse(m.0.keys().next_back().copied().unwrap_or(0)),
            )
        });
        v
    }

    /// Unicode rendering, e.g. `83/32 ζ(6) − 1/2 ζ(3)²`.
    pub fn pretty(&self) -> String {
        pretty_linear(self.display_order().into_iter().map(|(m, c)| {
            let item =
                m.0.iter()
                    .map(|(k, e)| {
                        if *e == 1 {
                            format!("ζ({k})")
                        } else {
                            format!("ζ({k}){}", superscript(*e))
                        }
                    })
                    .collect::<String>();
            (c, item)
        }))
    }

    /// Grammar form with the common denominator pulled out, e.g.
    /// `1/256*(83*z6 - 16*z3^2)`.
    pub fn factored(&self) -> String {
        let d = common_denominator(self.0.values());
        factored_form(d, self.len(), |q| self.scale(q), self.to_string())
    }
}

impl fmt::Display for ZetaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = self.display_order().into_iter().map(|(m, c)| {
            (
                c,
                if m.is_one() {
                    String::new()
                } else {
                    m.to_string()
                },
            )
        });
        write!(f, "{}", format_linear(items))
    }
}

impl FromStr for ZetaPolynomial {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let e: ZetaExpr = s.parse()?;
        if !e.amzv.is_empty() {
            return Err(MzvError::Domain(format!("{s:?} contains AMZV terms")));
        }
        Ok(e.zeta)
    }
}

/// Exact rational combination of convergent AMZVs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AmzvCombination(BTreeMap<AmzvIndex, BigRational>);

impl AmzvCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(idx: AmzvIndex) -> Result<Self, MzvError> {
        let mut c = Self::zero();
        c.add_term(idx, BigRational::from(1))?;
        Ok(c)
    }

    pub fn add_term(&mut self, idx: AmzvIndex, q: BigRational) -> Result<(), MzvError> {
        if !idx.converges() {
            return Err(MzvError::DivergentIndex(idx));
        }
        if q == 0 {
            return Ok(());
        }
        let slot = self.0.entry(idx.clone()).or_default();
        *slot += q;
        if *slot == 0 {
            self.0.remove(&idx);
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AmzvIndex, &BigRational)> {
        self.0.iter()
    }

    pub fn coefficient(&self, idx: &AmzvIndex) -> BigRational {
        self.0.get(idx).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, q) in &other.0 {
            out.add_term(i.clone(), q.clone())
                .expect("indices already validated");
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        for (i, c) in &self.0 {
            out.add_term(i.clone(), BigRational::from(c * q))
                .expect("indices already validated");
        }
        out
    }

    /// Removes and returns the coefficient of `idx`.
    pub fn take(&mut self, idx: &AmzvIndex) -> Option<BigRational> {
        self.0.remove(idx)
    }

    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut weights = self.0.keys().map(AmzvIndex::weight);
        let first = weights.next().unwrap_or(0);
        weights.all(|w| w == first).then_some(first)
    }

    /// Numeric value with every AMZV evaluated through the lemma quadrature.
    pub fn eval(&self, prec: Precision) -> Result<HpReal, MzvError> {
        let wp = prec.plus(16);
        let mut acc = wp.zero();
        for (i, c) in &self.0 {
            acc += amzv_eval_lemma(i, wp)? * wp.rational(c);
        }
        Ok(round_to(&acc, prec))
    }

    /// Terms with the largest leading exponent first.
    fn display_order(&self) -> impl Iterator<Item = (&AmzvIndex, &BigRational)> {
        self.0.iter().rev()
    }

    pub fn pretty(&self) -> String {
        pretty_linear(self.display_order().map(|(i, c)| (c, i.pretty())))
    }

    /// Grammar form with the common denominator pulled out, e.g.
    /// `1/8*(z(b4) + z(b3,1) - 2*z(b2,1,1))`.
    pub fn factored(&self) -> String {
        let d = common_denominator(self.0.values());
        factored_form(d, self.len(), |q| self.scale(q), self.to_string())
    }
}

impl fmt::Display for AmzvCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            format_linear(self.display_order().map(|(i, c)| (c, i.to_string())))
        )
    }
}

/// A parsed right-hand side: zeta polynomial plus AMZV combination.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaExpr {
    pub zeta: ZetaPolynomial,
    pub amzv: AmzvCombination,
}

impl ZetaExpr {
    pub fn is_zero(&self) -> bool {
        self.zeta.is_zero() && self.amzv.is_empty()
    }

    pub fn eval(&self, prec: Precision) -> Result<HpReal, MzvError> {
        let wp = prec.plus(8);
        let v = self.zeta.eval(wp)? + self.amzv.eval(wp)?;
        Ok(round_to(&v, prec))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ZetaExpr {
            zeta: self.zeta.scale(q),
            amzv: self.amzv.scale(q),
        }
    }

    pub fn parse_line(src: &str, line: usize) -> Result<Self, MzvError> {
        let e: ZetaExpr = text::parse_expr(src, line)?;
        for (idx, _) in e.amzv.terms() {
            if !idx.converges() {
                return Err(MzvError::DivergentIndex(idx.clone()));
            }
        }
        Ok(e)
    }
}

impl fmt::Display for ZetaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.zeta.is_zero(), self.amzv.is_empty()) {
            (_, true) => write!(f, "{}", self.zeta),
            (true, false) => write!(f, "{}", self.amzv),
            (false, false) => {
                let a = self.amzv.to_string();
                match a.strip_prefix('-') {
                    Some(rest) => write!(f, "{} - {}", self.zeta, rest),
                    None => write!(f, "{} + {}", self.zeta, a),
                }
            }
        }
    }
}

impl FromStr for ZetaExpr {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_line(s, 1)
    }
}

impl TextAlgebra for ZetaExpr {
    fn constant(q: BigRational) -> Self {
        ZetaExpr {
            zeta: ZetaPolynomial::constant(q),
            amzv: AmzvCombination::zero(),
        }
    }

    fn atom(p: &mut Parser) -> Result<Self, ParseError> {
        let id = match p.next() {
            Some(Token::Ident(id)) => id,
            other => return Err(p.error(format!("expected identifier, found {other:?}"))),
        };
        if id == "z" {
            let idx = AmzvIndex::parse_call(p)?;
            if !idx.converges() {
                return Err(p.error(format!("{idx} diverges")));
            }
            let mut amzv = AmzvCombination::zero();
            amzv.add_term(idx, BigRational::from(1))
                .map_err(|e| p.error(e.to_string()))?;
            return Ok(ZetaExpr {
                zeta: ZetaPolynomial::zero(),
                amzv,
            });
        }
        let k = id
            .strip_prefix('z')
            .and_then(|d| d.parse::<u32>().ok())
            .filter(|k| *k >= 2)
            .ok_or_else(|| p.error(format!("unknown symbol {id:?}")))?;
        let e = p.power_suffix()?;
        if e < 0 {
            return Err(p.error("negative powers of zeta values are not allowed"));
        }
        let m = ZetaMonomial::power(k, e as u32).map_err(|err| p.error(err.to_string()))?;
        Ok(ZetaExpr {
            zeta: ZetaPolynomial::term(m, BigRational::from(1)),
            amzv: AmzvCombination::zero(),
        })
    }

    fn sum_with(self, other: Self) -> Self {
        ZetaExpr {
            zeta: self.zeta.add(&other.zeta),
            amzv: self.amzv.add(&other.amzv),
        }
    }

    fn product_with(self, other: Self, line: usize) -> Result<Self, ParseError> {
        let constant = |e: &ZetaExpr| {
            if e.amzv.is_empty() {
                e.zeta.as_constant()
            } else {
                None
            }
        };
        if let Some(q) = constant(&self) {
            return Ok(other.scale(&q));
        }
        if let Some(q) = constant(&other) {
            return Ok(self.scale(&q));
        }
        if self.amzv.is_empty() && other.amzv.is_empty() {
            return Ok(ZetaExpr {
                zeta: self.zeta.mul(&other.zeta),
                amzv: AmzvCombination::zero(),
            });
        }
        Err(ParseError::new(
            line,
            "products involving AMZVs must have a rational cofactor",
        ))
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

fn common_denominator<'a>(coeffs: impl Iterator<Item = &'a BigRational>) -> Integer {
    coeffs.fold(Integer::from(1), |d, c| d.lcm(c.denom()))
}

/// `1/d*(…)` with `d` the common denominator, when that is shorter to read.
fn factored_form<T: fmt::Display>(
    d: Integer,
    len: usize,
    scaled: impl FnOnce(&BigRational) -> T,
    plain: String,
) -> String {
    if d == 1 || len <= 1 {
        return plain;
    }
    format!("1/{d}*({})", scaled(&BigRational::from(d.clone())))
}

fn pretty_linear<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (&'a BigRational, String)>,
{
    let mut out = String::new();
    for (c, item) in terms {
        let negative = *c < 0;
        let mag = BigRational::from(c.abs_ref());
        if out.is_empty() {
            if negative {
                out.push('−');
            }
        } else {
            out.push_str(if negative { " − " } else { " + " });
        }
        if item.is_empty() {
            out.push_str(&text::format_rational(&mag));
        } else if mag == 1 {
            out.push_str(&item);
        } else {
            out.push_str(&text::format_rational(&mag));
            out.push(' ');
            out.push_str(&item);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
