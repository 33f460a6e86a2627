//! Line-oriented text grammar shared by the rule, coefficient and integrand
//! tables.
//!
//! A table is a sequence of lines `[@tag] KEY := EXPR`; `#` starts a comment
//! and a leading `version N` line is optional. Expressions are sums of
//! products with rational literals `p/q`, powers `^k` (negative allowed) and
//! parentheses. Which identifiers are legal depends on the algebra being
//! parsed: zeta expressions use `z4`, `z3^2` and `z(b4,1,{1}_3)`, integrand
//! expressions use `u`, `E`, `L` and `C`.

use crate::numeric::BigRational;
use rug::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Token {
    Int(Integer),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Underscore,
}

fn tokenize(src: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits
                    .parse::<Integer>()
                    .map_err(|e| ParseError::new(line, format!("bad integer {digits}: {e}")))?;
                out.push(Token::Int(value));
                continue;
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
                continue;
            }
            '+' => out.push(Token::Plus),
            '-' => out.push(Token::Minus),
            '*' => out.push(Token::Star),
            '/' => out.push(Token::Slash),
            '^' => out.push(Token::Caret),
            '(' => out.push(Token::LParen),
            ')' => out.push(Token::RParen),
            '{' => out.push(Token::LBrace),
            '}' => out.push(Token::RBrace),
            ',' => out.push(Token::Comma),
            '_' => out.push(Token::Underscore),
            other => {
                return Err(ParseError::new(
                    line,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Target of the generic expression parser.
pub(crate) trait TextAlgebra: Sized {
    fn constant(q: BigRational) -> Self;
    /// Parses an identifier-led atom (the identifier is the next token),
    /// including any power suffix the algebra supports.
    fn atom(p: &mut Parser) -> Result<Self, ParseError>;
    fn sum_with(self, other: Self) -> Self;
    fn product_with(self, other: Self, line: usize) -> Result<Self, ParseError>;
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    pub(crate) line: usize,
}

impl Parser {
    pub(crate) fn new(src: &str, line: usize) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(src, line)?,
            pos: 0,
            line,
        })
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub(crate) fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Token) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, message)
    }

    pub(crate) fn expect_u32(&mut self) -> Result<u32, ParseError> {
        match self.next() {
            Some(Token::Int(v)) => v
                .to_u32()
                .ok_or_else(|| self.error(format!("integer {v} out of range"))),
            other => Err(self.error(format!("expected integer, found {other:?}"))),
        }
    }

    /// Optional `^k` / `^-k` suffix; returns 1 when absent.
    pub(crate) fn power_suffix(&mut self) -> Result<i64, ParseError> {
        if !self.eat(&Token::Caret) {
            return Ok(1);
        }
        let negative = self.eat(&Token::Minus);
        let e = i64::from(self.expect_u32()?);
        Ok(if negative { -e } else { e })
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("trailing input starting at {t:?}"))),
        }
    }

    pub(crate) fn parse_sum<A: TextAlgebra>(&mut self) -> Result<A, ParseError> {
        let mut negate = false;
        if self.eat(&Token::Minus) {
            negate = true;
        } else {
            self.eat(&Token::Plus);
        }
        let mut acc = self.parse_product::<A>()?;
        if negate {
            acc = acc.product_with(A::constant(BigRational::from(-1)), self.line)?;
        }
        loop {
            let sign = if self.eat(&Token::Plus) {
                1
            } else if self.eat(&Token::Minus) {
                -1
            } else {
                break;
            };
            let mut term = self.parse_product::<A>()?;
            if sign < 0 {
                term = term.product_with(A::constant(BigRational::from(-1)), self.line)?;
            }
            acc = acc.sum_with(term);
        }
        Ok(acc)
    }

    fn parse_product<A: TextAlgebra>(&mut self) -> Result<A, ParseError> {
        let mut acc = self.parse_factor::<A>()?;
        while self.eat(&Token::Star) {
            let f = self.parse_factor::<A>()?;
            acc = acc.product_with(f, self.line)?;
        }
        Ok(acc)
    }

    fn parse_factor<A: TextAlgebra>(&mut self) -> Result<A, ParseError> {
        match self.peek().cloned() {
            Some(Token::Int(num)) => {
                self.pos += 1;
                let q = if self.eat(&Token::Slash) {
                    match self.next() {
                        Some(Token::Int(den)) if den != 0 => BigRational::from((num, den)),
                        other => {
                            return Err(self.error(format!("expected denominator, found {other:?}")))
                        }
                    }
                } else {
                    BigRational::from(num)
                };
                Ok(A::constant(q))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_sum::<A>()?;
                self.expect(&Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(_)) => A::atom(self),
            other => Err(self.error(format!("expected a factor, found {other:?}"))),
        }
    }
}

/// Parses a complete expression in algebra `A`.
pub(crate) fn parse_expr<A: TextAlgebra>(src: &str, line: usize) -> Result<A, ParseError> {
    let mut p = Parser::new(src, line)?;
    if p.peek().is_none() {
        return Err(ParseError::new(line, "empty expression"));
    }
    let v = p.parse_sum::<A>()?;
    p.finish()?;
    Ok(v)
}

/// One `[@tag] KEY := EXPR` line of a table file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableLine {
    pub line: usize,
    pub tag: Option<String>,
    pub key: String,
    pub expr: String,
}

/// Splits a table file into its entries, skipping comments, blank lines and
/// the optional `version` header. Returns the version (default 1) too.
pub fn table_lines(text: &str) -> Result<(u32, Vec<TableLine>), ParseError> {
    let mut version = 1;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(v) = content.strip_prefix("version") {
            if out.is_empty() {
                version = v
                    .trim()
                    .parse()
                    .map_err(|_| ParseError::new(line, format!("bad version {:?}", v.trim())))?;
                continue;
            }
        }
        let (head, expr) = content
            .split_once(":=")
            .ok_or_else(|| ParseError::new(line, "expected `KEY := EXPR`"))?;
        let mut head = head.trim();
        let mut tag = None;
        if let Some(rest) = head.strip_prefix('@') {
            let (t, k) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| ParseError::new(line, "tag must be followed by a key"))?;
            tag = Some(t.to_string());
            head = k.trim();
        }
        if head.is_empty() {
            return Err(ParseError::new(line, "missing key"));
        }
        out.push(TableLine {
            line,
            tag,
            key: head.to_string(),
            expr: expr.trim().to_string(),
        });
    }
    Ok((version, out))
}

/// Formats a rational for the grammar: `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Writes `Σ coef·item` in the grammar, e.g. `-1/16*z4 + 1/2*z(b3,1)`.
pub fn format_linear<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (&'a BigRational, String)>,
{
    let mut out = String::new();
    for (coef, item) in terms {
        let negative = *coef < 0;
        let magnitude = BigRational::from(coef.abs_ref());
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if item.is_empty() {
            out.push_str(&format_rational(&magnitude));
        } else if magnitude == 1 {
            out.push_str(&item);
        } else {
            out.push_str(&format_rational(&magnitude));
            out.push('*');
            out.push_str(&item);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
