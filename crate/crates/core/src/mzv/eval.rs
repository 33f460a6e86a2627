//! Numeric AMZV evaluation: the one-dimensional integral representation for
//! the `(m̄, {1}_k)` family and a nested-sum oracle for arbitrary indices.

use super::{AmzvIndex, IndexPart, MzvError, ZetaMonomial, ZetaPolynomial};
use crate::numeric::{
    abs_diff, integrate_semi_infinite, log2_value, round_to, BigRational, Envelope, HpReal,
    Precision,
};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

pub fn amzv_converges(idx: &AmzvIndex) -> bool {
    idx.converges()
}

/// `ζ(n̄) = (2^(1-n) - 1) ζ(n)` as an exact polynomial, `n ≥ 2`.
pub fn zeta_bar_closed(n: u32) -> Result<ZetaPolynomial, MzvError> {
    if n < 2 {
        return Err(MzvError::Domain(format!(
            "zeta_bar_closed({n}): n must be >= 2 (ζ(1̄) = -log 2 is not polynomial)"
        )));
    }
    let coef = BigRational::from((1, Integer::from(1) << (n - 1))) - 1u32;
    Ok(ZetaPolynomial::term(ZetaMonomial::zeta(n)?, coef))
}

/// Value and heuristic error of a truncated nested sum.
#[derive(Clone, Debug)]
pub struct NestedSum {
    pub value: HpReal,
    pub error_estimate: HpReal,
}

/// Truncated defining series of `ζ(idx)` with outer index up to `n_terms`.
///
/// Level-wise dynamic programming: `P_j[n] = Σ_{m≤n} σ^m m^-a · P_{j+1}[m-1]`,
/// innermost first, so the cost is `O(N · depth)`. An alternating outer sum
/// is finished by averaging the partial sums at `N-1` and `N`; a plain outer
/// sum gets the integral tail `P_inner(N) · N^(1-a)/(a-1)`.
pub fn amzv_nested_sum(
    idx: &AmzvIndex,
    n_terms: u64,
    prec: Precision,
) -> Result<NestedSum, MzvError> {
    if !idx.converges() {
        return Err(MzvError::DivergentIndex(idx.clone()));
    }
    if n_terms < 10 {
        return Err(MzvError::Domain(format!(
            "nested sum needs N >= 10 (got {n_terms})"
        )));
    }
    let n = n_terms as usize;
    let wp = prec.bits() + 32;
    // prefix[m] for m = 0..=n; the level below the innermost is identically 1.
    let mut prefix: Vec<Float> = vec![Float::with_val(wp, 1); n + 1];
    prefix[0] = Float::new(wp);
    let mut inner_at_n = Float::with_val(wp, 1);
    for (level, part) in idx.parts().iter().enumerate().rev() {
        let below = if level + 1 == idx.depth() {
            None
        } else {
            Some(&prefix)
        };
        let terms: Vec<Float> = (1..=n)
            .into_par_iter()
            .map(|m| {
                let mut t = Float::with_val(wp, m).pow(part.exponent).recip();
                if part.barred && m % 2 == 1 {
                    t = -t;
                }
                match below {
                    Some(p) => t * &p[m - 1],
                    None => t,
                }
            })
            .collect();
        if level == 0 {
            inner_at_n = prefix[n].clone();
        }
        let mut next = Vec::with_capacity(n + 1);
        next.push(Float::new(wp));
        let mut acc = Float::new(wp);
        for t in terms {
            acc += t;
            next.push(acc.clone());
        }
        prefix = next;
    }
    if idx.depth() == 1 {
        inner_at_n = Float::with_val(wp, 1);
    }
    let head = idx.parts()[0];
    let (value, err) = if head.barred {
        let avg = Float::with_val(wp, &prefix[n - 1] + &prefix[n]) / 2;
        let err = Float::with_val(wp, &prefix[n] - &prefix[n - 1]).abs() / 2;
        (avg, err)
    } else {
        let a = head.exponent;
        let tail = inner_at_n * Float::with_val(wp, n).pow(1 - i64::from(a)) / (a - 1);
        let err = tail.clone().abs();
        (Float::with_val(wp, &prefix[n] + &tail), err)
    };
    Ok(NestedSum {
        value: round_to(&value, prec),
        error_estimate: round_to(&err, prec),
    })
}

/// The two integral representations of `ζ(m̄, {1}_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaPath {
    /// `(-1)^q/(p! q!) ∫ u^p L^q du` with `p = m-2`, `q = k+1` (needs `m ≥ 2`).
    LogPower,
    /// `(-1)^(q-1)/(p! q!) ∫ u^p L^q (1+e^u)^-1 du` with `p = m-1`, `q = k`.
    Weighted,
}

/// Evaluates `ζ(m̄,{1}_k)` along one path; returns `(value, error)` where the
/// error combines the quadrature estimate and the tail bound.
pub fn lemma_path(
    idx: &AmzvIndex,
    path: LemmaPath,
    prec: Precision,
) -> Result<(HpReal, HpReal), MzvError> {
    let (m, k) = idx
        .lemma_shape()
        .ok_or_else(|| MzvError::Shape(idx.clone()))?;
    let k = k as u32;
    let (p, q, weighted) = match path {
        LemmaPath::LogPower => {
            if m < 2 {
                return Err(MzvError::Shape(idx.clone()));
            }
            (m - 2, k + 1, false)
        }
        LemmaPath::Weighted => (m - 1, k, true),
    };
    // L ≤ e^-u and (1+e^u)^-1 ≤ e^-u bound the integrand by u^p e^-(q+w)u.
    let envelope = Envelope::new(p, 0, q + u32::from(weighted));
    let r = integrate_semi_infinite(
        move |u: &HpReal| {
            let wp = u.prec();
            let e = Float::with_val(wp, -u).exp();
            let l = Float::with_val(wp, e.ln_1p_ref());
            let mut v = Float::with_val(wp, u.pow(p)) * l.pow(q);
            if weighted {
                v *= Float::with_val(wp, &e / Float::with_val(wp, 1 + &e));
            }
            v
        },
        &envelope,
        prec,
    )?;
    let mut denom = Integer::from(1);
    for i in 2..=p {
        denom *= i;
    }
    for i in 2..=q {
        denom *= i;
    }
    let negative = if weighted { q % 2 == 0 } else { q % 2 == 1 };
    let mut scale = BigRational::from((1, denom));
    if negative {
        scale = -scale;
    }
    let s = prec.rational(&scale);
    let value = round_to(&(r.value * &s), prec);
    let err = Float::with_val(prec.bits(), r.error_estimate + r.tail_bound) * s.abs();
    Ok((value, err))
}

type LemmaCache = Mutex<HashMap<(AmzvIndex, u32), HpReal>>;

fn lemma_cache() -> &'static LemmaCache {
    static CACHE: OnceLock<LemmaCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ζ(m̄, {1}_k)` by quadrature. When both integral representations apply
/// (`m ≥ 2`) they are evaluated and must agree; the log-power value is
/// returned. `ζ(1̄)` is the constant `-log 2`. Results are memoised per
/// `(index, bits)`.
pub fn amzv_eval_lemma(idx: &AmzvIndex, prec: Precision) -> Result<HpReal, MzvError> {
    let (m, k) = idx
        .lemma_shape()
        .ok_or_else(|| MzvError::Shape(idx.clone()))?;
    let key = (idx.clone(), prec.bits());
    if let Some(v) = lemma_cache()
        .lock()
        .expect("lemma cache poisoned")
        .get(&key)
    {
        return Ok(v.clone());
    }
    let value = if m == 1 && k == 0 {
        -log2_value(prec)
    } else if m == 1 {
        lemma_path(idx, LemmaPath::Weighted, prec)?.0
    } else {
        let (v1, e1) = lemma_path(idx, LemmaPath::LogPower, prec)?;
        let (v2, e2) = lemma_path(idx, LemmaPath::Weighted, prec)?;
        let diff = abs_diff(&v1, &v2);
        let mag = Float::with_val(prec.bits(), v1.abs_ref()).max(&Float::with_val(prec.bits(), 1));
        let tol =
            Float::with_val(prec.bits(), e1 + e2) + prec.pow2(-(prec.bits() as i32 - 24)) * mag;
        if diff > tol {
            return Err(MzvError::PathDisagreement {
                index: idx.clone(),
                difference: diff.to_f64(),
                tolerance: tol.to_f64(),
            });
        }
        v1
    };
    lemma_cache()
        .lock()
        .expect("lemma cache poisoned")
        .insert(key, value.clone());
    Ok(value)
}

/// How the two sides of `ζ({2̄,1}_n) = 8^-n ζ({3}_n)` were evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZagierMethod {
    /// Left side by quadrature, right side `ζ(3)/8` (only `n = 1`).
    Lemma,
    /// Both sides by nested sums truncated at the same `N`.
    NestedSums { n_terms: u64 },
}

#[derive(Clone, Debug)]
pub struct ZagierCheck {
    pub n: usize,
    pub lhs: HpReal,
    pub rhs: HpReal,
    pub residual: HpReal,
    pub method: ZagierMethod,
}

/// Checks `ζ({2̄,1}_n) = 8^-n ζ({3}_n)`.
pub fn zagier_check(
    n: usize,
    method: ZagierMethod,
    prec: Precision,
) -> Result<ZagierCheck, MzvError> {
    if n == 0 {
        return Err(MzvError::Domain("zagier_check needs n >= 1".into()));
    }
    let lhs_idx = AmzvIndex::repeated(&[IndexPart::bar(2), IndexPart::plain(1)], n)?;
    let rhs_idx = AmzvIndex::repeated(&[IndexPart::plain(3)], n)?;
    let eighth = Float::with_val(prec.bits(), 1) >> (3 * n as u32);
    let (lhs, rhs) = match method {
        ZagierMethod::Lemma => {
            if n != 1 {
                return Err(MzvError::Domain(
                    "the quadrature route only covers n = 1; use nested sums".into(),
                ));
            }
            let z3 = ZetaMonomial::zeta(3)?.eval(prec)?;
            (amzv_eval_lemma(&lhs_idx, prec)?, z3 * eighth)
        }
        ZagierMethod::NestedSums { n_terms } => {
            let l = amzv_nested_sum(&lhs_idx, n_terms, prec)?;
            let r = amzv_nested_sum(&rhs_idx, n_terms, prec)?;
            (l.value, r.value * eighth)
        }
    };
    let residual = abs_diff(&lhs, &rhs);
    Ok(ZagierCheck {
        n,
        lhs,
        rhs,
        residual,
        method,
    })
}
