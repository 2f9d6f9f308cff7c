//! Soft symbol-to-bit MIMO demapper.
//!
//! For every compound-symbol observation the demapper scores the full
//! candidate set (all `|constellation|^{M_T}` compound symbols) with the
//! selected decoding metric, weighs each candidate by the prior
//! probabilities of the other bits it carries (the bit's own prior is
//! excluded, keeping the output extrinsic), and normalizes per bit. All
//! accumulation happens in the log domain, so the output is invariant to
//! adding any constant to every candidate cost.

use num_complex::Complex64;

use super::mapping::Constellation;
use super::{BitBeliefs, BELIEF_FLOOR};
use crate::channel::{ChannelEstimate, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::DecodingMetricKind;

/// Per-frame candidate table: the estimate enters only through per-candidate
/// means and noise scalings, precomputed once and reused for every symbol.
///
/// The mismatched kind exponentiates the full substituted log-likelihood
/// `M_R·ln σ_Z² + ‖y − Ĥx‖²/σ_Z²`, not the bare squared distance: the
/// noise scaling is candidate-independent for hard decisions but changes
/// soft bit probabilities, and with an error-free estimate it makes the two
/// kinds produce identical beliefs exactly, at any noise level.
#[derive(Clone, Debug)]
pub struct Demapper {
    m_r: usize,
    n_bits: usize,
    n_candidates: usize,
    /// Candidate mean vectors, flattened `n_candidates × m_r`.
    means: Vec<Complex64>,
    /// Additive candidate cost (input-dependent noise log term).
    cost_base: Vec<f64>,
    /// Reciprocal of the per-candidate noise variance scaling.
    inv_denom: Vec<f64>,
}

impl Demapper {
    pub fn new(
        est: &ChannelEstimate,
        cfg: &SystemConfig,
        kind: DecodingMetricKind,
        constellation: &Constellation,
    ) -> Result<Self> {
        if est.h_hat.rows() != cfg.m_r || est.h_hat.cols() != cfg.m_t {
            return Err(Error::DimensionMismatch(format!(
                "estimate {}x{} does not match config {}x{}",
                est.h_hat.rows(),
                est.h_hat.cols(),
                cfg.m_r,
                cfg.m_t
            )));
        }
        let b = constellation.bits_per_symbol();
        let n_bits = b * cfg.m_t;
        if n_bits > 24 {
            return Err(Error::Unsupported(format!(
                "candidate enumeration over 2^{n_bits} compound symbols"
            )));
        }
        let n_candidates = 1usize << n_bits;
        let mut means = Vec::with_capacity(n_candidates * cfg.m_r);
        let mut cost_base = Vec::with_capacity(n_candidates);
        let mut inv_denom = Vec::with_capacity(n_candidates);
        let mask = constellation.len() - 1;
        let mut x = vec![Complex64::ZERO; cfg.m_t];
        for cand in 0..n_candidates {
            for a in 0..cfg.m_t {
                let label = (cand >> (b * (cfg.m_t - 1 - a))) & mask;
                x[a] = constellation.point(label);
            }
            let hx = est.h_hat.matvec(&x);
            match kind {
                DecodingMetricKind::MismatchedMl => {
                    means.extend_from_slice(&hx);
                    cost_base.push(cfg.m_r as f64 * cfg.sigma_z_sq.ln());
                    inv_denom.push(1.0 / cfg.sigma_z_sq);
                }
                DecodingMetricKind::Improved => {
                    let x_norm_sq: f64 = x.iter().map(|v| v.norm_sqr()).sum();
                    let denom = cfg.sigma_z_sq + est.shrinkage * est.err_var * x_norm_sq;
                    means.extend(hx.iter().map(|v| v * est.shrinkage));
                    cost_base.push(cfg.m_r as f64 * denom.ln());
                    inv_denom.push(1.0 / denom);
                }
            }
        }
        Ok(Demapper {
            m_r: cfg.m_r,
            n_bits,
            n_candidates,
            means,
            cost_base,
            inv_denom,
        })
    }

    /// Bits carried by one compound symbol.
    pub fn bits_per_symbol(&self) -> usize {
        self.n_bits
    }

    /// Metric cost of candidate `cand` against observation `y`.
    #[inline]
    fn cost(&self, cand: usize, y: &[Complex64]) -> f64 {
        let off = cand * self.m_r;
        let mut quad = 0.0;
        for r in 0..self.m_r {
            quad += (y[r] - self.means[off + r]).norm_sqr();
        }
        self.cost_base[cand] + quad * self.inv_denom[cand]
    }

    /// Extrinsic beliefs for the bits of one compound symbol.
    pub fn demap(&self, y: &[Complex64], priors: &[f64]) -> Result<BitBeliefs> {
        if y.len() != self.m_r {
            return Err(Error::DimensionMismatch(format!(
                "observation length {} vs {} receive antennas",
                y.len(),
                self.m_r
            )));
        }
        if priors.len() != self.n_bits {
            return Err(Error::DimensionMismatch(format!(
                "prior count {} vs {} bits per compound symbol",
                priors.len(),
                self.n_bits
            )));
        }
        let mut lp1 = vec![0.0f64; self.n_bits];
        let mut lp0 = vec![0.0f64; self.n_bits];
        for i in 0..self.n_bits {
            let p = priors[i].clamp(BELIEF_FLOOR, 1.0 - BELIEF_FLOOR);
            lp1[i] = p.ln();
            lp0[i] = (1.0 - p).ln();
        }

        // base[c] = -cost(c) + sum_i ln p(d_i = bit_i(c)); the bit's own
        // prior is divided back out per bit below.
        let mut base = vec![0.0f64; self.n_candidates];
        for cand in 0..self.n_candidates {
            let mut acc = -self.cost(cand, y);
            for (i, (l1, l0)) in lp1.iter().zip(&lp0).enumerate() {
                let bit = (cand >> (self.n_bits - 1 - i)) & 1;
                acc += if bit == 1 { *l1 } else { *l0 };
            }
            base[cand] = acc;
        }

        let mut out = Vec::with_capacity(self.n_bits);
        for j in 0..self.n_bits {
            let shift = self.n_bits - 1 - j;
            let mut m1 = f64::NEG_INFINITY;
            let mut m0 = f64::NEG_INFINITY;
            for (cand, &v) in base.iter().enumerate() {
                if (cand >> shift) & 1 == 1 {
                    m1 = m1.max(v);
                } else {
                    m0 = m0.max(v);
                }
            }
            let mut s1 = 0.0;
            let mut s0 = 0.0;
            for (cand, &v) in base.iter().enumerate() {
                if (cand >> shift) & 1 == 1 {
                    s1 += (v - m1).exp();
                } else {
                    s0 += (v - m0).exp();
                }
            }
            let l1 = m1 + s1.ln() - lp1[j];
            let l0 = m0 + s0.ln() - lp0[j];
            out.push(1.0 / (1.0 + (l0 - l1).exp()));
        }
        Ok(BitBeliefs::from_probs(out))
    }
}

/// One-shot demap of a single compound symbol with the 16-QAM mapping
/// implied by the configuration.
pub fn demap_soft(
    y: &[Complex64],
    priors: &BitBeliefs,
    kind: DecodingMetricKind,
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<BitBeliefs> {
    let constellation = Constellation::gray_16qam(cfg.per_antenna_power());
    let demapper = Demapper::new(est, cfg, kind, &constellation)?;
    demapper.demap(y, priors.probs())
}
