//! Recovers expansion coefficients from samples of `I(n)` by an exact
//! polynomial fit in `1/n`.
//!
//! With `K` samples the fit has degree `K-1` (a square Vandermonde system in
//! `1/n`) and the orders `0..=M` are reported; the extra orders soak up the
//! truncation error. The inverse matrix is computed exactly in rationals and
//! only the final dot products touch the sample values. Stability of order
//! `j` is the change in its estimate when the smallest `n` is dropped and the
//! degree lowered by one.

use crate::louchard_eval::{i_direct, EvalError};
use crate::numeric::{round_to, BigRational, HpReal, Precision};
use rayon::prelude::*;
use rug::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("precision {have} bits is below the {need} bits required for this fit")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("order {order} is unstable: stability {stability:e} against estimate {estimate:e}")]
    IllConditioned {
        order: u32,
        estimate: f64,
        stability: f64,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitConfig {
    sample_ns: Vec<u64>,
    max_order: u32,
    prec: Precision,
}

impl FitConfig {
    pub const MIN_N: u64 = 32;

    pub fn new(sample_ns: Vec<u64>, max_order: u32, prec: Precision) -> Result<Self, FitError> {
        if sample_ns.len() < max_order as usize + 2 {
            return Err(FitError::InvalidConfig(format!(
                "{} samples cannot support order {max_order} (need at least {})",
                sample_ns.len(),
                max_order + 2
            )));
        }
        if sample_ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FitError::InvalidConfig(
                "sample n values must be strictly increasing".into(),
            ));
        }
        if sample_ns[0] < Self::MIN_N {
            return Err(FitError::InvalidConfig(format!(
                "smallest n is {}, minimum is {}",
                sample_ns[0],
                Self::MIN_N
            )));
        }
        Ok(FitConfig {
            sample_ns,
            max_order,
            prec,
        })
    }

    /// `n = 64·2^i` for `i = 0..12`, orders up to 9, 768 bits.
    pub fn default_config() -> Self {
        let ns = (0..12).map(|i| 64u64 << i).collect();
        Self::new(ns, 9, Precision::new(768).expect("valid precision")).expect("valid config")
    }

    pub fn sample_ns(&self) -> &[u64] {
        &self.sample_ns
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// The same configuration with every `n` multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        FitConfig {
            sample_ns: self.sample_ns.iter().map(|n| n * factor).collect(),
            ..self.clone()
        }
    }
}

/// Estimated coefficient of `n^-order`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitRow {
    pub order: u32,
    pub estimate: HpReal,
    pub stability: HpReal,
}

/// Inverse of `V[i][j] = n_i^-j` in exact rationals.
fn vandermonde_inverse(ns: &[u64]) -> Vec<Vec<BigRational>> {
    let k = ns.len();
    let mut a: Vec<Vec<BigRational>> = ns
        .iter()
        .map(|&n| {
            let x = BigRational::from((1u64, n));
            let mut row = Vec::with_capacity(2 * k);
            let mut p = BigRational::from(1);
            for _ in 0..k {
                row.push(p.clone());
                p *= &x;
            }
            row.extend((0..k).map(|_| BigRational::new()));
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[k + i] = BigRational::from(1);
    }
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| a[r][col] != 0)
            .expect("Vandermonde matrix with distinct nodes is invertible");
        a.swap(col, pivot);
        let inv = BigRational::from(1) / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= BigRational::from(&f * p);
            }
        }
    }
    a.into_iter().map(|row| row[k..].to_vec()).collect()
}

/// `‖V‖∞ · ‖V⁻¹‖∞`, in bits.
fn condition_bits(ns: &[u64], inv: &[Vec<BigRational>]) -> f64 {
    let v_norm = ns.len() as f64;
    let inv_norm = inv
        .iter()
        .map(|row| row.iter().map(|q| q.to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (v_norm * inv_norm).log2()
}

fn solve(inv: &[Vec<BigRational>], samples: &[HpReal], orders: u32, wp: u32) -> Vec<HpReal> {
    inv.iter()
        .take(orders as usize + 1)
        .map(|row| {
            let mut acc = Float::with_val(wp, 0);
            for (w, s) in row.iter().zip(samples) {
                acc += Float::with_val(wp, w) * s;
            }
            acc
        })
        .collect()
}

/// Bits required by the precision heuristic for `cfg`.
pub fn required_bits(cfg: &FitConfig) -> u32 {
    let inv = vandermonde_inverse(&cfg.sample_ns);
    64 + 10 * cfg.max_order + condition_bits(&cfg.sample_ns, &inv).ceil() as u32
}

/// Fits given sample values (one per `cfg.sample_ns()` entry).
pub fn extract_from_samples(cfg: &FitConfig, samples: &[HpReal]) -> Result<Vec<FitRow>, FitError> {
    if samples.len() != cfg.sample_ns.len() {
        return Err(FitError::InvalidConfig(format!(
            "{} samples supplied for {} sample points",
            samples.len(),
            cfg.sample_ns.len()
        )));
    }
    let full_inv = vandermonde_inverse(&cfg.sample_ns);
    let need = 64 + 10 * cfg.max_order + condition_bits(&cfg.sample_ns, &full_inv).ceil() as u32;
    if cfg.prec.bits() < need {
        return Err(FitError::InsufficientPrecision {
            have: cfg.prec.bits(),
            need,
        });
    }
    let wp = cfg.prec.bits() + 32;
    let reduced_inv = vandermonde_inverse(&cfg.sample_ns[1..]);
    let full = solve(&full_inv, samples, cfg.max_order, wp);
    let reduced = solve(&reduced_inv, &samples[1..], cfg.max_order, wp);
    let rows: Vec<FitRow> = full
        .into_iter()
        .zip(reduced)
        .enumerate()
        .map(|(j, (est, red))| {
            let stability = Float::with_val(wp, &est - &red).abs();
            FitRow {
                order: j as u32,
                estimate: round_to(&est, cfg.prec),
                stability: round_to(&stability, cfg.prec),
            }
        })
        .collect();
    for row in rows.iter().filter(|r| r.order + 2 <= cfg.max_order) {
        let scale = row.estimate.to_f64().abs().max(1.0);
        if row.stability.to_f64() > 1e-3 * scale {
            return Err(FitError::IllConditioned {
                order: row.order,
                estimate: row.estimate.to_f64(),
                stability: row.stability.to_f64(),
            });
        }
    }
    Ok(rows)
}

/// Samples `I(n)` at every configured `n` (in parallel) and fits.
pub fn extract_coeffs(cfg: &FitConfig) -> Result<Vec<FitRow>, FitError> {
    let need = required_bits(cfg);
    if cfg.prec.bits() < need {
        return Err(FitError::InsufficientPrecision {
            have: cfg.prec.bits(),
            need,
        });
    }
    let samples = cfg
        .sample_ns
        .par_iter()
        .map(|&n| i_direct(n, cfg.prec))
        .collect::<Result<Vec<_>, _>>()?;
    extract_from_samples(cfg, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::abs_diff;
    use proptest::prelude::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn poly_samples(ns: &[u64], coeffs: &[BigRational], bits: u32) -> Vec<HpReal> {
        ns.iter()
            .map(|&n| {
                let mut v = BigRational::new();
                let x = BigRational::from((1u64, n));
                let mut pw = BigRational::from(1);
                for c in coeffs {
                    v += BigRational::from(c * &pw);
                    pw *= &x;
                }
                Float::with_val(bits, &v)
            })
            .collect()
    }

    #[test]
    fn inverse_is_exact() {
        let ns = [32u64, 64, 128, 256];
        let inv = vandermonde_inverse(&ns);
        for (j, row) in inv.iter().enumerate() {
            for col in 0..ns.len() {
                let mut dot = BigRational::new();
                for (w, &n) in row.iter().zip(&ns) {
                    let x = BigRational::from((1u64, n));
                    let mut pw = BigRational::from(1);
                    for _ in 0..col {
                        pw *= &x;
                    }
                    dot += BigRational::from(w * &pw);
                }
                assert_eq!(dot, if j == col { 1 } else { 0 });
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::new(vec![32, 64, 128], 2, p(256)).is_err());
        assert!(FitConfig::new(vec![16, 64, 128, 256], 2, p(256)).is_err());
        assert!(FitConfig::new(vec![32, 128, 64, 256], 2, p(256)).is_err());
        assert!(FitConfig::new(vec![32, 64, 128, 256], 2, p(256)).is_ok());
        let d = FitConfig::default_config();
        assert_eq!(d.sample_ns().len(), 12);
        assert_eq!(d.sample_ns()[11], 131072);
    }

    #[test]
    fn low_precision_is_refused() {
        let cfg = FitConfig::new((0..12).map(|i| 64u64 << i).collect(), 9, p(128)).unwrap();
        assert!(matches!(
            extract_coeffs(&cfg),
            Err(FitError::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn rough_samples_are_ill_conditioned() {
        let ns: Vec<u64> = (0..6).map(|i| 32u64 << i).collect();
        let cfg = FitConfig::new(ns.clone(), 4, p(512)).unwrap();
        let samples: Vec<HpReal> = ns
            .iter()
            .map(|&n| Float::with_val(512, 1) / Float::with_val(512, n).sqrt())
            .collect();
        assert!(matches!(
            extract_from_samples(&cfg, &samples),
            Err(FitError::IllConditioned { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn polynomial_samples_are_recovered_exactly(
            nums in proptest::collection::vec(-1000i64..1000, 6),
            dens in proptest::collection::vec(1u64..50, 6),
        ) {
            let coeffs: Vec<BigRational> = nums.iter().zip(&dens)
                .map(|(&a, &b)| BigRational::from((a, b)))
                .collect();
            let ns: Vec<u64> = (0..7).map(|i| 32u64 << i).collect();
            let cfg = FitConfig::new(ns.clone(), 5, p(512)).unwrap();
            let samples = poly_samples(&ns, &coeffs, 512);
            let rows = extract_from_samples(&cfg, &samples).unwrap();
            for (row, c) in rows.iter().zip(&coeffs) {
                let want = Float::with_val(512, c);
                let tol = p(512).pow2(-400) * Float::with_val(64, 1.0 + c.to_f64().abs());
                prop_assert!(abs_diff(&row.estimate, &want) < tol);
                prop_assert!(row.stability < p(512).pow2(-400));
            }
        }
    }
}
