//! Per-letter decoding metrics over `(x, y, Ĥ)`.
//!
//! Two cost functions drive every receiver in this crate. The mismatched
//! maximum-likelihood metric plugs the estimate into the true-channel
//! likelihood and reduces to a Euclidean distance. The improved metric is
//! the negative log-density of the channel averaged over the estimation
//! error given the estimate; it shrinks the estimate and charges an
//! input-dependent noise inflation, so it may be negative through its log
//! term. Costs use the natural logarithm; rate computations elsewhere are
//! the only place base-2 logs appear.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelEstimate, SystemConfig};
use crate::error::{Error, Result};

/// Selector between the two per-letter decoding metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodingMetricKind {
    /// Euclidean distance to `Ĥx`; the classical mismatched ML rule.
    MismatchedMl,
    /// Estimation-error-aware rule matched to the composite channel.
    Improved,
}

impl std::fmt::Display for DecodingMetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MismatchedMl => write!(f, "mismatched_ml"),
            Self::Improved => write!(f, "improved"),
        }
    }
}

fn check_dims(x: &[Complex64], y: &[Complex64], est: &ChannelEstimate) -> Result<()> {
    if x.len() != est.h_hat.cols() || y.len() != est.h_hat.rows() {
        return Err(Error::DimensionMismatch(format!(
            "estimate {}x{}, x length {}, y length {}",
            est.h_hat.rows(),
            est.h_hat.cols(),
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// `‖y − Ĥx‖²` (additive constants dropped).
pub fn metric_mismatched(x: &[Complex64], y: &[Complex64], est: &ChannelEstimate) -> Result<f64> {
    check_dims(x, y, est)?;
    let hx = est.h_hat.matvec(x);
    Ok(y.iter().zip(&hx).map(|(a, b)| (a - b).norm_sqr()).sum())
}

/// `M_R·ln(σ_Z² + δ·σ_ε²·‖x‖²) + ‖y − δĤx‖² / (σ_Z² + δ·σ_ε²·‖x‖²)`
/// with `δ` the posterior shrinkage and `σ_ε²` the estimation-error
/// variance of the estimate.
pub fn metric_improved(
    x: &[Complex64],
    y: &[Complex64],
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<f64> {
    check_dims(x, y, est)?;
    let x_norm_sq: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let denom = cfg.sigma_z_sq + est.shrinkage * est.err_var * x_norm_sq;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "effective noise variance must be positive, got {denom}"
        )));
    }
    let hx = est.h_hat.matvec(x);
    let d = est.shrinkage;
    let quad: f64 = y
        .iter()
        .zip(&hx)
        .map(|(a, b)| (a - b * d).norm_sqr())
        .sum();
    Ok(est.h_hat.rows() as f64 * denom.ln() + quad / denom)
}

/// Cost of one per-letter metric on a single `(x, y)` pair.
pub fn metric_cost(
    kind: DecodingMetricKind,
    x: &[Complex64],
    y: &[Complex64],
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<f64> {
    match kind {
        DecodingMetricKind::MismatchedMl => metric_mismatched(x, y, est),
        DecodingMetricKind::Improved => metric_improved(x, y, est, cfg),
    }
}

/// Arithmetic mean of per-letter costs over a sequence of symbol pairs.
pub fn sequence_cost(
    kind: DecodingMetricKind,
    xs: &[Vec<Complex64>],
    ys: &[Vec<Complex64>],
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequence lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::DimensionMismatch("empty sequence".into()));
    }
    let mut acc = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        acc += metric_cost(kind, x, y, est, cfg)?;
    }
    Ok(acc / xs.len() as f64)
}
