//! Tanh-sinh (double-exponential) quadrature at arbitrary precision.
//!
//! On `[-1, 1]` the nodes are `x = tanh(π/2 · sinh t)` on the grid `t = j·2^-level`.
//! Nodes are stored as the distance `d = 1 - |x|` from the nearer endpoint so
//! that points crowding an endpoint keep full relative accuracy after mapping.
//! Node tables are cached per (working precision, level).

use super::{round_to, HpReal, NumericError, Precision};
use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: HpReal,
    /// Last inter-level difference.
    pub error_estimate: HpReal,
    pub levels_used: u32,
    /// Analytic bound on the discarded tail; zero for finite intervals.
    pub tail_bound: HpReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOptions {
    /// Number of step halvings allowed before giving up.
    pub max_level: u32,
    /// Levels below this never count as converged.
    pub min_level: u32,
    /// Extra bits carried internally above the requested precision.
    pub guard_bits: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            max_level: 14,
            min_level: 3,
            guard_bits: 32,
        }
    }
}

struct Node {
    /// Distance of the abscissa from the nearer endpoint of `[-1, 1]`.
    dist: Float,
    weight: Float,
    center: bool,
}

type NodeCache = Mutex<HashMap<(u32, u32), Arc<Vec<Node>>>>;

fn node_cache() -> &'static NodeCache {
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Largest `t` whose weight still matters at `wp` bits. Weights decay like
/// `2π cosh t · exp(-π sinh t)`; the cut-off sits at `2^(-3wp/2)` so that
/// mildly singular endpoint behaviour is still integrated.
fn t_max(wp: u32) -> f64 {
    let threshold = 1.5 * f64::from(wp);
    let log2_weight = |t: f64| {
        (2.0 * std::f64::consts::PI * t.cosh()).log2()
            - std::f64::consts::PI * t.sinh() / std::f64::consts::LN_2
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while log2_weight(hi) > -threshold {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if log2_weight(mid) > -threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn make_node(t: &Float, wp: u32, half_pi: &Float) -> Node {
    let s = Float::with_val(wp, t.sinh_ref()) * half_pi;
    let e = Float::with_val(wp, -2 * s).exp();
    let one_plus = Float::with_val(wp, 1 + &e);
    let dist = Float::with_val(wp, 2 * &e) / &one_plus;
    let cosh_t = Float::with_val(wp, t.cosh_ref());
    let weight = Float::with_val(wp, half_pi * cosh_t) * 4 * &e / one_plus.square();
    Node {
        dist,
        weight,
        center: t.is_zero(),
    }
}

fn level_nodes(wp: u32, level: u32) -> Arc<Vec<Node>> {
    if let Some(nodes) = node_cache()
        .lock()
        .expect("node cache poisoned")
        .get(&(wp, level))
    {
        return Arc::clone(nodes);
    }
    let tmax = t_max(wp);
    let steps_per_unit = 1u64 << level;
    let last = (tmax * steps_per_unit as f64).ceil() as u64;
    let indices: Vec<u64> = if level == 0 {
        (0..=last).collect()
    } else {
        (0..=last).filter(|j| j % 2 == 1).collect()
    };
    let half_pi = Float::with_val(wp, Constant::Pi) / 2;
    let nodes: Vec<Node> = indices
        .par_iter()
        .map(|&j| {
            let mut t = Float::with_val(wp, j);
            t >>= level;
            make_node(&t, wp, &half_pi)
        })
        .collect();
    let nodes = Arc::new(nodes);
    node_cache()
        .lock()
        .expect("node cache poisoned")
        .entry((wp, level))
        .or_insert_with(|| Arc::clone(&nodes));
    nodes
}

fn check_finite(v: Float, x: &Float) -> Result<Float, NumericError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericError::Domain(format!(
            "integrand is not finite at x = {}",
            x.to_f64()
        )))
    }
}

/// Integrates `f` over `[a, b]` with the default options.
///
/// `f` receives abscissae at the internal working precision and should
/// compute at the precision of its argument.
pub fn integrate_finite<F>(
    f: F,
    a: &HpReal,
    b: &HpReal,
    prec: Precision,
) -> Result<QuadratureResult, NumericError>
where
    F: Fn(&HpReal) -> HpReal + Sync,
{
    integrate_finite_with(f, a, b, prec, QuadratureOptions::default())
}

pub fn integrate_finite_with<F>(
    f: F,
    a: &HpReal,
    b: &HpReal,
    prec: Precision,
    opts: QuadratureOptions,
) -> Result<QuadratureResult, NumericError>
where
    F: Fn(&HpReal) -> HpReal + Sync,
{
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(NumericError::Domain(format!(
            "integration bounds must satisfy a < b (a = {}, b = {})",
            a.to_f64(),
            b.to_f64()
        )));
    }
    let wp = prec.bits() + opts.guard_bits;
    let a = Float::with_val(wp, a);
    let b = Float::with_val(wp, b);
    let half = Float::with_val(wp, &b - &a) / 2;
    let mid = Float::with_val(wp, &a + &b) / 2;
    let tol_scale = Precision::new(wp)?.pow2(-(prec.bits() as i32 - 16));

    let mut raw = Float::new(wp);
    let mut raw_abs = Float::new(wp);
    let mut previous: Option<Float> = None;
    let mut last_diff = f64::INFINITY;

    for level in 0..=opts.max_level {
        let nodes = level_nodes(wp, level);
        let contributions = nodes
            .par_iter()
            .map(|node| {
                if node.center {
                    let v = check_finite(f(&mid), &mid)? * &node.weight;
                    let abs = Float::with_val(wp, v.abs_ref());
                    return Ok((v, abs));
                }
                let offset = Float::with_val(wp, &half * &node.dist);
                let right = Float::with_val(wp, &b - &offset);
                let left = Float::with_val(wp, &a + &offset);
                let fr = check_finite(f(&right), &right)?;
                let fl = check_finite(f(&left), &left)?;
                let abs = (Float::with_val(wp, fr.abs_ref()) + Float::with_val(wp, fl.abs_ref()))
                    * &node.weight;
                Ok(((fr + fl) * &node.weight, abs))
            })
            .collect::<Result<Vec<_>, NumericError>>()?;
        // fixed summation order keeps results independent of the worker count
        for (v, abs) in contributions {
            raw += v;
            raw_abs += abs;
        }
        let mut estimate = Float::with_val(wp, &raw * &half);
        estimate >>= level;
        if let Some(prev) = previous.take() {
            let diff = Float::with_val(wp, &estimate - &prev).abs();
            last_diff = diff.to_f64();
            let mut scale = Float::with_val(wp, &raw_abs * &half);
            scale >>= level;
            let scale = scale.max(&Float::with_val(wp, estimate.abs_ref()));
            if level >= opts.min_level && diff <= Float::with_val(wp, &scale * &tol_scale) {
                return Ok(QuadratureResult {
                    value: round_to(&estimate, prec),
                    error_estimate: round_to(&diff, prec),
                    levels_used: level,
                    tail_bound: prec.zero(),
                });
            }
        }
        previous = Some(estimate);
    }
    Err(NumericError::NonConvergence {
        levels: opts.max_level,
        last_difference: last_diff,
    })
}

/// Decay envelope `|f(u)| ≤ scale · u^p_max · (1+u)^q_max · e^(-k_min·u)`,
/// assumed valid for `u ≥ 10`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub p_max: u32,
    pub q_max: u32,
    pub k_min: u32,
    pub scale: f64,
}

impl Envelope {
    pub fn new(p_max: u32, q_max: u32, k_min: u32) -> Self {
        Envelope {
            p_max,
            q_max,
            k_min,
            scale: 1.0,
        }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Envelope { scale, ..self }
    }

    /// Upper bound for `∫_A^∞` of the envelope, `A ≥ 10`.
    ///
    /// Uses `1 + u ≤ 1.1·u` and the closed form
    /// `∫_A^∞ u^m e^(-ku) du = e^(-kA) Σ_j m!/j! · A^j / k^(m-j+1)`.
    pub fn tail_bound(&self, split: &HpReal, prec: Precision) -> HpReal {
        let wp = prec.bits() + 16;
        let m = self.p_max + self.q_max;
        let k = Float::with_val(wp, self.k_min);
        let a = Float::with_val(wp, split);
        let mut sum = Float::new(wp);
        // term_j = m!/j! · A^j / k^(m-j+1), built from j = m downwards
        let mut term = a.clone().pow(m) / &k;
        for j in (0..=m).rev() {
            sum += &term;
            if j > 0 {
                term = term * j / &a / &k;
            }
        }
        let decay = Float::with_val(wp, -(k * &a)).exp();
        let widen = Float::with_val(wp, 1.1).pow(self.q_max);
        round_to(&(sum * decay * widen * self.scale), prec)
    }
}

/// Integrates `f` over `[0, ∞)`: the tail beyond a split `A` is bounded
/// analytically from `envelope` and `[0, A]` goes through [`integrate_finite`].
/// `A` doubles from 64 until the tail bound drops below `2^-(bits+8)`.
pub fn integrate_semi_infinite<F>(
    f: F,
    envelope: &Envelope,
    prec: Precision,
) -> Result<QuadratureResult, NumericError>
where
    F: Fn(&HpReal) -> HpReal + Sync,
{
    if envelope.k_min < 1 {
        return Err(NumericError::Domain(
            "envelope must decay at least like e^-u (k_min >= 1)".into(),
        ));
    }
    let target = prec.pow2(-(prec.bits() as i32 + 8));
    let mut split = 64u32;
    let bound = loop {
        let bound = envelope.tail_bound(&Float::with_val(32, split), prec);
        if bound < target {
            break bound;
        }
        if split >= 1 << 20 {
            return Err(NumericError::Envelope {
                last_bound: bound.to_f64(),
            });
        }
        split *= 2;
    };
    let mut result = integrate_finite(f, &prec.zero(), &Float::with_val(32, split), prec)?;
    result.tail_bound = bound;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::abs_diff;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn linear_on_unit_interval() {
        let prec = p(128);
        let r =
            integrate_finite(|x| x.clone(), &prec.zero(), &Float::with_val(128, 1), prec).unwrap();
        let exact = Float::with_val(128, 0.5);
        assert!(abs_diff(&r.value, &exact) < prec.pow2(-126));
    }

    #[test]
    fn limit_profile_gives_three_quarters() {
        let prec = p(192);
        let half = Float::with_val(192, 0.5);
        let r = integrate_finite(|x| 2 * (1 - x.clone()), &prec.zero(), &half, prec).unwrap();
        assert!(abs_diff(&r.value, &Float::with_val(192, 0.75)) < prec.pow2(-188));
    }

    #[test]
    fn exponential_on_unit_interval() {
        let prec = p(256);
        let r = integrate_finite(
            |x| x.clone().exp(),
            &prec.zero(),
            &Float::with_val(256, 1),
            prec,
        )
        .unwrap();
        let exact = Float::with_val(256, 1).exp() - 1u32;
        assert!(abs_diff(&r.value, &exact) < prec.pow2(-250));
        assert!(r.error_estimate >= 0);
        assert_eq!(r.tail_bound, 0);
    }

    #[test]
    fn degree_eight_polynomial_is_exact() {
        let prec = p(256);
        // ∫_{-1}^{2} (x^8 - 3x^5 + x) dx = (2^9 + 1)/9 - (2^6 - 1)/2 + (4 - 1)/2
        let r = integrate_finite(
            |x| {
                let x8 = x.clone().pow(8u32);
                let x5 = x.clone().pow(5u32);
                x8 - 3 * x5 + x
            },
            &Float::with_val(256, -1),
            &Float::with_val(256, 2),
            prec,
        )
        .unwrap();
        let exact = rug::Rational::from((513, 9)) - rug::Rational::from((63, 2))
            + rug::Rational::from((3, 2));
        let exact = Float::with_val(256, &exact);
        // 2 ulp
        assert!(abs_diff(&r.value, &exact) <= prec.pow2(-256 + 6));
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        let prec = p(128);
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate_finite(
            |x| Float::with_val(x.prec(), x.recip_sqrt_ref()),
            &prec.zero(),
            &Float::with_val(128, 1),
            prec,
        )
        .unwrap();
        assert!(abs_diff(&r.value, &Float::with_val(128, 2)) < prec.pow2(-100));
    }

    #[test]
    fn rejects_empty_interval() {
        let prec = p(64);
        let one = Float::with_val(64, 1);
        let err = integrate_finite(|x| x.clone(), &one, &one, prec).unwrap_err();
        assert!(matches!(err, NumericError::Domain(_)));
    }

    #[test]
    fn level_cap_reports_non_convergence() {
        let prec = p(128);
        let opts = QuadratureOptions {
            max_level: 2,
            ..QuadratureOptions::default()
        };
        let err = integrate_finite_with(
            |x| Float::with_val(x.prec(), 50 * x.clone()).sin(),
            &prec.zero(),
            &Float::with_val(64, 10),
            prec,
            opts,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            NumericError::NonConvergence { levels: 2, .. }
        ));
    }

    #[test]
    fn non_finite_integrand_is_a_domain_error() {
        let prec = p(64);
        let err = integrate_finite(
            |x| Float::with_val(x.prec(), 1) / (x.clone() - 0.5),
            &prec.zero(),
            &Float::with_val(64, 1),
            prec,
        )
        .unwrap_err();
        assert!(matches!(err, NumericError::Domain(_)));
    }

    #[test]
    fn semi_infinite_exponentials() {
        let prec = p(256);
        let r = integrate_semi_infinite(
            |u| Float::with_val(u.prec(), -u).exp(),
            &Envelope::new(0, 0, 1),
            prec,
        )
        .unwrap();
        assert!(abs_diff(&r.value, &Float::with_val(256, 1)) < prec.pow2(-248));
        assert!(r.tail_bound < prec.pow2(-264));
        let r = integrate_semi_infinite(
            |u| Float::with_val(u.prec(), -u).exp() * u,
            &Envelope::new(1, 0, 1),
            prec,
        )
        .unwrap();
        assert!(abs_diff(&r.value, &Float::with_val(256, 1)) < prec.pow2(-248));
    }

    #[test]
    fn log_one_plus_exp_gives_pi_squared_over_twelve() {
        let prec = p(256);
        let r = integrate_semi_infinite(
            |u| Float::with_val(u.prec(), -u).exp().ln_1p(),
            &Envelope::new(0, 0, 1),
            prec,
        )
        .unwrap();
        let exact = Float::with_val(256, Constant::Pi).square() / 12;
        assert!(abs_diff(&r.value, &exact) < prec.pow2(-248));
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let prec = p(128);
        // ∫_A^∞ u^3 e^-u du = e^-A (A^3 + 3A^2 + 6A + 6)
        let a = Float::with_val(128, 20);
        let exact = Float::with_val(128, -a.clone()).exp()
            * (a.clone().pow(3) + 3 * a.clone().square() + 6 * a.clone() + 6);
        let bound = Envelope::new(3, 0, 1).tail_bound(&a, prec);
        assert!(bound >= exact);
        assert!(bound < exact * 1.0001);
        let looser = Envelope::new(1, 2, 1).tail_bound(&a, prec);
        assert!(looser >= bound);
    }

    #[test]
    fn envelope_must_decay() {
        let err =
            integrate_semi_infinite(|u| u.clone(), &Envelope::new(0, 0, 0), p(64)).unwrap_err();
        assert!(matches!(err, NumericError::Domain(_)));
    }

    #[test]
    fn unreachable_tail_target_is_envelope_error() {
        let huge = Envelope::new(100_000, 0, 1);
        let err = integrate_semi_infinite(|u| Float::with_val(u.prec(), -u).exp(), &huge, p(64))
            .unwrap_err();
        assert!(matches!(err, NumericError::Envelope { .. }));
    }
}
