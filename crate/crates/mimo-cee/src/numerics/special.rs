//! Exponential integrals `E_n` and the upper incomplete gamma function at
//! negative integer order.
//!
//! Everything is built on one primitive, `exp_scaled_en(n, x) = e^x·E_n(x)`,
//! because the rate formulas only ever consume the exponentially scaled
//! product: evaluating `Γ(-n, t)` through its alternating finite sum loses
//! all precision once the terms `i!/t^{i+1}` dominate the result, and
//! evaluating `e^t` and `E_n(t)` separately overflows/underflows for large
//! `t`. The scaled form avoids both.
//!
//! Branching:
//! - `x <= 1`: power series for `E_n(x)` (the log term carries the leading
//!   behaviour; terms decay factorially, no cancellation worse than a few
//!   ulps), multiplied by `e^x <= e`.
//! - `x > 1`: modified-Lentz evaluation of the continued fraction
//!   `E_n(x) = e^{-x}·[1/(x+n-) 1·n/(x+n+2-) 2(n+1)/(x+n+4-) ...]`, whose
//!   value is exactly the scaled quantity, so no exponentials appear at all.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const MAX_ITER: usize = 400;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// `e^x · E_n(x)` for `x > 0`, `n >= 0`, where
/// `E_n(x) = ∫_1^∞ e^{-x u} u^{-n} du`.
pub fn exp_scaled_en(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "exponential integral requires finite x > 0, got {x}"
        )));
    }
    if n == 0 {
        return Ok(1.0 / x);
    }
    if x > 1.0 {
        // Continued fraction, modified Lentz.
        let nf = f64::from(n);
        let mut b = x + nf;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let a = -(i as f64) * (nf - 1.0 + i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() <= EPS {
                return Ok(h);
            }
        }
        Err(Error::Domain(format!(
            "continued fraction for E_{n}({x}) did not converge"
        )))
    } else {
        // Power series. psi(n) = -gamma + sum_{k<n} 1/k.
        let nm1 = (n - 1) as i64;
        let mut e = if nm1 != 0 {
            1.0 / nm1 as f64
        } else {
            -x.ln() - EULER_GAMMA
        };
        let mut fact = 1.0;
        for i in 1..=MAX_ITER {
            fact *= -x / i as f64;
            let del = if i as i64 != nm1 {
                -fact / (i as f64 - nm1 as f64)
            } else {
                let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-x.ln() + psi)
            };
            e += del;
            if del.abs() < e.abs() * EPS {
                return Ok(e * x.exp());
            }
        }
        Err(Error::Domain(format!(
            "series for E_{n}({x}) did not converge"
        )))
    }
}

/// Exponential integral `Γ(0, t) = E_1(t) = ∫_t^∞ e^{-u}/u du` for `t > 0`.
pub fn exp_integral(t: f64) -> Result<f64> {
    Ok((-t).exp() * exp_scaled_en(1, t)?)
}

/// Upper incomplete gamma function at negative integer order,
/// `Γ(-n, t) = ∫_t^∞ u^{-n-1} e^{-u} du`, via `Γ(-n, t) = t^{-n} E_{n+1}(t)`.
pub fn gamma_neg_int(n: u32, t: f64) -> Result<f64> {
    Ok(t.powi(-(n as i32)) * (-t).exp() * exp_scaled_en(n + 1, t)?)
}
