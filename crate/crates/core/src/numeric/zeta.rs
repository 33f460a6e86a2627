//! Riemann zeta at integer arguments and even-zeta rational ratios.

use super::{round_to, BigRational, HpReal, NumericError, Precision};
use rug::ops::Pow;
use rug::{Float, Integer};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type ZetaCache = Mutex<HashMap<(u32, u32), Float>>;

fn zeta_cache() -> &'static ZetaCache {
    static CACHE: OnceLock<ZetaCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ζ(k)` for integer `k ≥ 2`.
///
/// Evaluates the Dirichlet eta function with Borwein's alternating-series
/// acceleration (error below `3·(3+√8)^-n` for `n` terms) and divides by
/// `1 - 2^(1-k)`. Results are memoised per `(k, bits)`.
pub fn zeta_value(k: u32, prec: Precision) -> Result<HpReal, NumericError> {
    if k < 2 {
        return Err(NumericError::Domain(format!(
            "zeta({k}) requested; only k >= 2 is defined here"
        )));
    }
    let key = (k, prec.bits());
    if let Some(v) = zeta_cache().lock().expect("zeta cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let v = round_to(&borwein_zeta(k, prec.bits() + 32), prec);
    zeta_cache()
        .lock()
        .expect("zeta cache poisoned")
        .insert(key, v.clone());
    Ok(v)
}

fn borwein_zeta(s: u32, wp: u32) -> Float {
    // log2(3 + sqrt 8) ≈ 2.5431
    let n = ((f64::from(wp) + 8.0) / 2.5431).ceil() as u32;
    let mut fact = Vec::with_capacity(2 * n as usize + 1);
    fact.push(Integer::from(1));
    for i in 1..=2 * n {
        let next = Integer::from(&fact[i as usize - 1] * i);
        fact.push(next);
    }
    // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut partial = Vec::with_capacity(n as usize + 1);
    let mut acc = Integer::new();
    for i in 0..=n {
        let num = Integer::from(n) * &fact[(n + i - 1) as usize] * (Integer::from(1) << (2 * i));
        let den = Integer::from(&fact[(n - i) as usize] * &fact[(2 * i) as usize]);
        acc += num.div_exact(&den);
        partial.push(acc.clone());
    }
    let d_n = &partial[n as usize];
    let mut sum = Float::new(wp);
    for k in 0..n {
        let diff = Integer::from(&partial[k as usize] - d_n);
        let mut term = Float::with_val(wp, &diff) / Float::with_val(wp, k + 1).pow(s);
        if k % 2 == 1 {
            term = -term;
        }
        sum += term;
    }
    let eta = -sum / Float::with_val(wp, d_n);
    let mut two_pow = Float::with_val(wp, 1);
    two_pow >>= s - 1;
    eta / (1 - two_pow)
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: u32) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n as usize + 1);
    b.push(BigRational::from(1));
    for m in 1..=n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from(bj * &binom);
            binom = binom * (m + 1 - j as u32) / (j as u32 + 1);
        }
        b.push(-acc / (m + 1));
    }
    b.pop().expect("at least B_0")
}

/// The rational `r` with `ζ(2k) = r · ζ(2)^k`.
pub fn even_zeta_ratio(k: u32) -> BigRational {
    assert!(k >= 1, "even_zeta_ratio needs k >= 1");
    // ζ(2k) = (-1)^(k+1) B_2k (2π)^2k / (2 (2k)!),  π² = 6 ζ(2)
    let mut fact = Integer::from(1);
    for i in 2..=2 * k {
        fact *= i;
    }
    let scale = Integer::from(Integer::u_pow_u(2, 2 * k)) * Integer::from(Integer::u_pow_u(6, k));
    let mut r = bernoulli(2 * k) * scale / (fact * 2u32);
    if k % 2 == 0 {
        r = -r;
    }
    r
}
