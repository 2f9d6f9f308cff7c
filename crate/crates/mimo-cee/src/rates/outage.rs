//! Outage quantiles of the per-realization rates, the estimation-induced
//! outage reference, and the perfect-knowledge ergodic capacity.
//!
//! Given an estimate, the channel is only known through its posterior; an
//! outage rate at level γ is the largest rate whose failure probability
//! under that posterior stays within γ. All quantities here are empirical
//! quantiles or means over seeded Monte Carlo draws.

use rand::Rng;

use super::worst_case::{perfect_csi_rate, rate_triple};
use crate::channel::{estimate_channel, sample_channel, sample_posterior, ChannelEstimate, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::DecodingMetricKind;
use crate::numerics::{svd, RngStream};
use crate::parallel::indexed_map;

/// Lower empirical quantile: the largest sample value `r` such that the
/// fraction of samples strictly below `r` does not exceed `gamma`.
pub fn lower_quantile(sorted: &[f64], gamma: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = ((gamma * sorted.len() as f64).floor() as usize).min(sorted.len() - 1);
    sorted[idx]
}

fn check_mc_params(gamma: f64, n_mc: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "outage probability must lie in (0,1), got {gamma}"
        )));
    }
    if n_mc < 1000 {
        return Err(Error::InvalidConfig(format!(
            "n_mc must be at least 1000, got {n_mc}"
        )));
    }
    Ok(())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// γ-outage rate of the metric-based receiver for one estimate, from
/// `n_mc` posterior draws.
pub fn outage_rate(
    est: &ChannelEstimate,
    gamma: f64,
    kind: DecodingMetricKind,
    cfg: &SystemConfig,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    check_mc_params(gamma, n_mc)?;
    let mut rates = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let h = sample_posterior(est, cfg, rng);
        let t = rate_triple(&h, est, cfg)?;
        rates.push(match kind {
            DecodingMetricKind::Improved => t.improved,
            DecodingMetricKind::MismatchedMl => t.mismatched,
        });
    }
    Ok(lower_quantile(&sorted(rates), gamma))
}

/// γ-quantile of the perfect-knowledge mutual information under the
/// posterior of the channel given the estimate: the ceiling no metric-based
/// receiver can exceed at this outage level.
pub fn eio_capacity(
    est: &ChannelEstimate,
    gamma: f64,
    cfg: &SystemConfig,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    check_mc_params(gamma, n_mc)?;
    let mut rates = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let h = sample_posterior(est, cfg, rng);
        let f = svd(&h.h)?;
        rates.push(perfect_csi_rate(&f.singular_values, cfg));
    }
    Ok(lower_quantile(&sorted(rates), gamma))
}

/// Outage rates of both metrics plus the outage ceiling, from a shared set
/// of posterior draws (common random numbers keep their ordering clean).
pub fn outage_triple(
    est: &ChannelEstimate,
    gamma: f64,
    cfg: &SystemConfig,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64, f64)> {
    check_mc_params(gamma, n_mc)?;
    let mut improved = Vec::with_capacity(n_mc);
    let mut mismatched = Vec::with_capacity(n_mc);
    let mut perfect = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let h = sample_posterior(est, cfg, rng);
        let t = rate_triple(&h, est, cfg)?;
        improved.push(t.improved);
        mismatched.push(t.mismatched);
        perfect.push(t.perfect);
    }
    Ok((
        lower_quantile(&sorted(improved), gamma),
        lower_quantile(&sorted(mismatched), gamma),
        lower_quantile(&sorted(perfect), gamma),
    ))
}

/// Mean perfect-knowledge capacity over the channel prior.
pub fn ergodic_capacity_perfect(
    cfg: &SystemConfig,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    Ok(ergodic_capacity_with_se(cfg, n_mc, rng)?.0)
}

/// Ergodic capacity together with its Monte Carlo standard error.
pub fn ergodic_capacity_with_se(
    cfg: &SystemConfig,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    if n_mc < 1000 {
        return Err(Error::InvalidConfig(format!(
            "n_mc must be at least 1000, got {n_mc}"
        )));
    }
    let mut acc = 0.0;
    let mut acc_sq = 0.0;
    for _ in 0..n_mc {
        let h = sample_channel(cfg, rng);
        let f = svd(&h.h)?;
        let r = perfect_csi_rate(&f.singular_values, cfg);
        acc += r;
        acc_sq += r * r;
    }
    let mean = acc / n_mc as f64;
    let var = (acc_sq / n_mc as f64 - mean * mean).max(0.0);
    Ok((mean, (var / n_mc as f64).sqrt()))
}

/// One point of an expected-outage-rate curve: per-estimate outage rates
/// averaged over estimates drawn from the joint channel/estimate law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateCurvePoint {
    pub snr_db: f64,
    pub gamma: f64,
    pub n_pilots: usize,
    pub outage_improved: f64,
    pub se_improved: f64,
    pub outage_mismatched: f64,
    pub se_mismatched: f64,
    pub eio: f64,
    pub se_eio: f64,
    pub ergodic: f64,
    pub se_ergodic: f64,
    pub n_mc: usize,
    pub n_est: usize,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Expected outage-rate curves versus total SNR (dB). Estimates run in
/// parallel on disjoint streams; each estimate reuses one set of posterior
/// draws for all three outage quantities.
pub fn rate_curves(
    cfg_template: &SystemConfig,
    snr_db_grid: &[f64],
    gamma: f64,
    n_mc: usize,
    n_est: usize,
    seed: u64,
) -> Result<Vec<RateCurvePoint>> {
    check_mc_params(gamma, n_mc)?;
    if n_est < 1 {
        return Err(Error::InvalidConfig("n_est must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(snr_db_grid.len());
    for (pi, &snr_db) in snr_db_grid.iter().enumerate() {
        let cfg = cfg_template.with_snr_total(10f64.powf(snr_db / 10.0));
        let triples: Vec<Result<(f64, f64, f64)>> = indexed_map(n_est, |e| {
            let stream = RngStream::new(seed, ((pi as u64) << 32) | e as u64);
            let mut rng = stream.rng();
            let h = sample_channel(&cfg, &mut rng);
            let est = estimate_channel(&h, &cfg, &mut rng)?;
            outage_triple(&est, gamma, &cfg, n_mc, &mut rng)
        });
        let mut improved = Vec::with_capacity(n_est);
        let mut mismatched = Vec::with_capacity(n_est);
        let mut eio = Vec::with_capacity(n_est);
        for t in triples {
            let (i, m, e) = t?;
            improved.push(i);
            mismatched.push(m);
            eio.push(e);
        }
        let erg_stream = RngStream::new(seed, (1u64 << 63) | ((pi as u64) << 32));
        let (ergodic, se_ergodic) =
            ergodic_capacity_with_se(&cfg, n_mc.max(1000), &mut erg_stream.rng())?;
        let (mi, si) = mean_se(&improved);
        let (mm, sm) = mean_se(&mismatched);
        let (me, se) = mean_se(&eio);
        out.push(RateCurvePoint {
            snr_db,
            gamma,
            n_pilots: cfg.n_pilots,
            outage_improved: mi,
            se_improved: si,
            outage_mismatched: mm,
            se_mismatched: sm,
            eio: me,
            se_eio: se,
            ergodic,
            se_ergodic,
            n_mc,
            n_est,
        });
    }
    Ok(out)
}
