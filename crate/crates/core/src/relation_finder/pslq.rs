//! PSLQ integer relation search (Ferguson-Bailey, one-level, real input).

use crate::numeric::HpReal;
use rug::float::Round;
use rug::{Float, Integer};

pub(crate) struct PslqOutcome {
    /// Relation found, if any.
    pub relation: Option<Vec<Integer>>,
    /// Every relation of smaller Euclidean norm has been excluded.
    pub norm_bound: Float,
}

fn round_int(x: &Float) -> Integer {
    x.to_integer_round(Round::Nearest)
        .map(|(i, _)| i)
        .unwrap_or_default()
}

/// Runs PSLQ on `xs` at `wp` bits. Stops when a relation is detected, when
/// the norm bound exceeds `max_norm`, or after `max_iter` iterations.
pub(crate) fn pslq(xs: &[HpReal], wp: u32, max_norm: &Integer, max_iter: usize) -> PslqOutcome {
    let n = xs.len();
    let f = |v: f64| Float::with_val(wp, v);
    let gamma = (Float::with_val(wp, 4) / 3u32).sqrt();
    let x: Vec<Float> = xs.iter().map(|v| Float::with_val(wp, v)).collect();

    // s_j = sqrt(Σ_{k≥j} x_k²), y = x / s_0
    let mut s = vec![f(0.0); n];
    let mut acc = f(0.0);
    for j in (0..n).rev() {
        acc += Float::with_val(wp, x[j].square_ref());
        s[j] = Float::with_val(wp, acc.sqrt_ref());
    }
    let t = s[0].clone();
    let mut y: Vec<Float> = x.iter().map(|v| Float::with_val(wp, v / &t)).collect();
    for v in s.iter_mut() {
        *v /= &t;
    }

    let mut h = vec![vec![f(0.0); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            if i == j {
                h[i][j] = Float::with_val(wp, &s[j + 1] / &s[j]);
            } else {
                let den = Float::with_val(wp, &s[j] * &s[j + 1]);
                h[i][j] = -Float::with_val(wp, &y[i] * &y[j]) / den;
            }
        }
    }
    let mut a: Vec<Vec<Integer>> = (0..n)
        .map(|i| (0..n).map(|j| Integer::from(u32::from(i == j))).collect())
        .collect();
    let mut b = a.clone();

    let reduce = |i: usize,
                  j: usize,
                  y: &mut [Float],
                  h: &mut [Vec<Float>],
                  a: &mut [Vec<Integer>],
                  b: &mut [Vec<Integer>]| {
        let q = Float::with_val(wp, &h[i][j] / &h[j][j]);
        let t = round_int(&q);
        if t == 0 {
            return;
        }
        let tf = Float::with_val(wp, &t);
        let yi = Float::with_val(wp, &y[i] * &tf);
        y[j] += yi;
        for k in 0..=j {
            let d = Float::with_val(wp, &h[j][k] * &tf);
            h[i][k] -= d;
        }
        for k in 0..n {
            let d = Integer::from(&a[j][k] * &t);
            a[i][k] -= d;
            let d = Integer::from(&b[k][i] * &t);
            b[k][j] += d;
        }
    };

    for i in 1..n {
        for j in (0..i).rev() {
            reduce(i, j, &mut y, &mut h, &mut a, &mut b);
        }
    }

    let max_norm_f = Float::with_val(wp, max_norm);
    let mut norm_bound = f(0.0);
    let eps = {
        let mut e = Float::with_val(wp, 1);
        e >>= wp * 4 / 5;
        e
    };

    for _ in 0..max_iter {
        // bound from the current diagonal
        let hmax = (0..n - 1)
            .map(|j| Float::with_val(wp, h[j][j].abs_ref()))
            .fold(f(0.0), |m, v| if v > m { v } else { m });
        if hmax.is_zero() {
            break;
        }
        let bound = Float::with_val(wp, hmax.recip_ref());
        if bound > norm_bound {
            norm_bound = bound;
        }
        if norm_bound > max_norm_f {
            break;
        }

        let mut m = 0;
        let mut best = f(-1.0);
        let mut g = f(1.0);
        for i in 0..n - 1 {
            g *= &gamma;
            let v = Float::with_val(wp, h[i][i].abs_ref()) * &g;
            if v > best {
                best = v;
                m = i;
            }
        }
        y.swap(m, m + 1);
        a.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 1 < n - 1 {
            let t0 = Float::with_val(wp, h[m][m].square_ref())
                + Float::with_val(wp, h[m][m + 1].square_ref());
            let t0 = t0.sqrt();
            let t1 = Float::with_val(wp, &h[m][m] / &t0);
            let t2 = Float::with_val(wp, &h[m][m + 1] / &t0);
            for row in h.iter_mut().skip(m) {
                let t3 = row[m].clone();
                let t4 = row[m + 1].clone();
                row[m] = Float::with_val(wp, &t1 * &t3) + Float::with_val(wp, &t2 * &t4);
                row[m + 1] = Float::with_val(wp, &t1 * &t4) - Float::with_val(wp, &t2 * &t3);
            }
        }
        for i in m + 1..n {
            for j in (0..i.min(m + 2)).rev() {
                reduce(i, j, &mut y, &mut h, &mut a, &mut b);
            }
        }

        let ymax = y
            .iter()
            .map(|v| Float::with_val(wp, v.abs_ref()))
            .fold(f(0.0), |m, v| if v > m { v } else { m });
        for (j, yj) in y.iter().enumerate() {
            if Float::with_val(wp, yj.abs_ref()) < Float::with_val(wp, &ymax * &eps) {
                let rel: Vec<Integer> = b.iter().map(|row| row[j].clone()).collect();
                if rel.iter().any(|c| *c != 0) {
                    return PslqOutcome {
                        relation: Some(rel),
                        norm_bound,
                    };
                }
            }
        }
    }
    PslqOutcome {
        relation: None,
        norm_bound,
    }
}
