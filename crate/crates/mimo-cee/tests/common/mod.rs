//! Independent oracles shared by the integration suites. Everything here
//! recomputes its answer from first principles (direct summation,
//! exhaustive enumeration), never through the implementation path under
//! test.

use mimo_cee::bicm::{conv_encode, BitBeliefs, TAIL_BITS};
use mimo_cee::channel::{ChannelEstimate, SystemConfig};
use mimo_cee::metrics::DecodingMetricKind;
use num_complex::Complex64;

/// Per-candidate decoding cost as the demapper defines it: the improved
/// metric verbatim, the full substituted log-likelihood for the mismatched
/// kind.
pub fn demap_cost(
    kind: DecodingMetricKind,
    x: &[Complex64],
    y: &[Complex64],
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> f64 {
    match kind {
        DecodingMetricKind::MismatchedMl => {
            let hx = est.h_hat.matvec(x);
            let quad: f64 = y.iter().zip(&hx).map(|(a, b)| (a - b).norm_sqr()).sum();
            cfg.m_r as f64 * cfg.sigma_z_sq.ln() + quad / cfg.sigma_z_sq
        }
        DecodingMetricKind::Improved => {
            let x_norm_sq: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let denom = cfg.sigma_z_sq + est.shrinkage * est.err_var * x_norm_sq;
            let hx = est.h_hat.matvec(x);
            let quad: f64 = y
                .iter()
                .zip(&hx)
                .map(|(a, b)| (a - b * est.shrinkage).norm_sqr())
                .sum();
            cfg.m_r as f64 * denom.ln() + quad / denom
        }
    }
}

/// Literal extrinsic-probability summation for bit `j` of one compound
/// symbol: weights every candidate by exp(-cost) times the priors of all
/// bits except `j`, then normalizes the bit marginal.
#[allow(clippy::too_many_arguments)]
pub fn demap_literal(
    kind: DecodingMetricKind,
    y: &[Complex64],
    priors: &[f64],
    est: &ChannelEstimate,
    cfg: &SystemConfig,
    constellation: &mimo_cee::bicm::Constellation,
    j: usize,
) -> f64 {
    let b = constellation.bits_per_symbol();
    let n_bits = b * cfg.m_t;
    let mask = constellation.len() - 1;
    let mut w1 = 0.0f64;
    let mut w0 = 0.0f64;
    for cand in 0..(1usize << n_bits) {
        let mut x = vec![Complex64::ZERO; cfg.m_t];
        for a in 0..cfg.m_t {
            let label = (cand >> (b * (cfg.m_t - 1 - a))) & mask;
            x[a] = constellation.point(label);
        }
        let mut w = (-demap_cost(kind, &x, y, est, cfg)).exp();
        for i in 0..n_bits {
            if i == j {
                continue;
            }
            let bit = (cand >> (n_bits - 1 - i)) & 1;
            w *= if bit == 1 { priors[i] } else { 1.0 - priors[i] };
        }
        if (cand >> (n_bits - 1 - j)) & 1 == 1 {
            w1 += w;
        } else {
            w0 += w;
        }
    }
    w1 / (w1 + w0)
}

/// Exhaustive maximum-a-posteriori bit marginals over every codeword of the
/// terminated code: returns (coded-bit posteriors, info-bit posteriors).
pub fn map_oracle(priors: &BitBeliefs, n_info: usize) -> (Vec<f64>, Vec<f64>) {
    let n_coded = 2 * (n_info + TAIL_BITS);
    assert_eq!(priors.len(), n_coded);
    let mut num_info = vec![0.0f64; n_info];
    let mut num_coded = vec![0.0f64; n_coded];
    let mut total = 0.0f64;
    for word in 0..(1u32 << n_info) {
        let info: Vec<u8> = (0..n_info).map(|i| ((word >> i) & 1) as u8).collect();
        let cw = conv_encode(&info);
        let mut w = 1.0f64;
        for (i, &c) in cw.iter().enumerate() {
            let p = priors.prob_one(i);
            w *= if c == 1 { p } else { 1.0 - p };
        }
        total += w;
        for i in 0..n_info {
            if info[i] == 1 {
                num_info[i] += w;
            }
        }
        for (i, &c) in cw.iter().enumerate() {
            if c == 1 {
                num_coded[i] += w;
            }
        }
    }
    (
        num_coded.iter().map(|v| v / total).collect(),
        num_info.iter().map(|v| v / total).collect(),
    )
}

/// Linear interpolation of the SNR (dB) at which an ascending rate curve
/// crosses `target` bits; `None` when the curve never reaches it.
pub fn snr_at_rate(snr_db: &[f64], rate: &[f64], target: f64) -> Option<f64> {
    for k in 1..snr_db.len() {
        if rate[k - 1] <= target && target <= rate[k] {
            let t = (target - rate[k - 1]) / (rate[k] - rate[k - 1]);
            return Some(snr_db[k - 1] + t * (snr_db[k] - snr_db[k - 1]));
        }
    }
    None
}

/// Log-linear interpolation of the Eb/N0 (dB) at which a descending BER
/// curve crosses `target`.
pub fn ebn0_at_ber(ebn0_db: &[f64], ber: &[f64], target: f64) -> Option<f64> {
    for k in 1..ebn0_db.len() {
        if ber[k - 1] >= target && target >= ber[k] && ber[k] > 0.0 {
            let la = ber[k - 1].log10();
            let lb = ber[k].log10();
            let t = (la - target.log10()) / (la - lb);
            return Some(ebn0_db[k - 1] + t * (ebn0_db[k] - ebn0_db[k - 1]));
        }
    }
    None
}
