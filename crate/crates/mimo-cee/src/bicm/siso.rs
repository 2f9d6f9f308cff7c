//! Soft-input soft-output decoding of the terminated convolutional code via
//! the forward-backward algorithm, in the log domain with the exact
//! Jacobian logarithm.

use super::conv::{ConvCode, N_STATES, TAIL_BITS};
use super::{BitBeliefs, BELIEF_FLOOR};
use crate::error::{Error, Result};

const NEG_INF: f64 = f64::NEG_INFINITY;

/// `ln(e^a + e^b)` stable for any mix of finite and -inf inputs.
#[inline]
fn max_star(a: f64, b: f64) -> f64 {
    if a == NEG_INF {
        return b;
    }
    if b == NEG_INF {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Exact a-posteriori probabilities on a terminated trellis given
/// independent per-coded-bit priors.
///
/// Returns extrinsic beliefs on the coded bits (posterior with the bit's
/// own prior divided out) and posterior beliefs on the information bits.
pub fn siso_decode(
    code: &ConvCode,
    coded_priors: &BitBeliefs,
    n_info: usize,
) -> Result<(BitBeliefs, BitBeliefs)> {
    let n_steps = n_info + TAIL_BITS;
    if coded_priors.len() != 2 * n_steps {
        return Err(Error::DimensionMismatch(format!(
            "{} coded priors for {} info bits (want {})",
            coded_priors.len(),
            n_info,
            2 * n_steps
        )));
    }

    let mut lp1 = vec![0.0f64; 2 * n_steps];
    let mut lp0 = vec![0.0f64; 2 * n_steps];
    for i in 0..2 * n_steps {
        let p = coded_priors
            .prob_one(i)
            .clamp(BELIEF_FLOOR, 1.0 - BELIEF_FLOOR);
        lp1[i] = p.ln();
        lp0[i] = (1.0 - p).ln();
    }
    let lp = |i: usize, bit: u8| if bit == 1 { lp1[i] } else { lp0[i] };

    // Branch metrics: gamma[k][s][u]; tail steps only admit u = 0.
    let inputs_at = |k: usize| if k < n_info { 2 } else { 1 };
    let mut gamma = vec![[[NEG_INF; 2]; N_STATES]; n_steps];
    for k in 0..n_steps {
        for s in 0..N_STATES {
            for u in 0..inputs_at(k) {
                let (_, out) = code.step(s, u as u8);
                gamma[k][s][u] = lp(2 * k, out[0]) + lp(2 * k + 1, out[1]);
            }
        }
    }

    // Forward and backward recursions; trellis starts and ends in state 0.
    let mut alpha = vec![[NEG_INF; N_STATES]; n_steps + 1];
    alpha[0][0] = 0.0;
    for k in 0..n_steps {
        for s in 0..N_STATES {
            if alpha[k][s] == NEG_INF {
                continue;
            }
            for u in 0..inputs_at(k) {
                let (next, _) = code.step(s, u as u8);
                let v = alpha[k][s] + gamma[k][s][u];
                alpha[k + 1][next] = max_star(alpha[k + 1][next], v);
            }
        }
    }
    let mut beta = vec![[NEG_INF; N_STATES]; n_steps + 1];
    beta[n_steps][0] = 0.0;
    for k in (0..n_steps).rev() {
        for s in 0..N_STATES {
            for u in 0..inputs_at(k) {
                let (next, _) = code.step(s, u as u8);
                if beta[k + 1][next] == NEG_INF {
                    continue;
                }
                let v = gamma[k][s][u] + beta[k + 1][next];
                beta[k][s] = max_star(beta[k][s], v);
            }
        }
    }

    // Per-bit log-likelihoods from transition posteriors.
    let mut coded_ext = Vec::with_capacity(2 * n_steps);
    let mut info_post = Vec::with_capacity(n_info);
    for k in 0..n_steps {
        let mut l_code = [[NEG_INF; 2]; 2]; // [output position][bit value]
        let mut l_info = [NEG_INF; 2];
        for s in 0..N_STATES {
            if alpha[k][s] == NEG_INF {
                continue;
            }
            for u in 0..inputs_at(k) {
                let (next, out) = code.step(s, u as u8);
                let w = alpha[k][s] + gamma[k][s][u] + beta[k + 1][next];
                for j in 0..2 {
                    l_code[j][out[j] as usize] = max_star(l_code[j][out[j] as usize], w);
                }
                l_info[u] = max_star(l_info[u], w);
            }
        }
        for j in 0..2 {
            let i = 2 * k + j;
            let post_llr = l_code[j][1] - l_code[j][0];
            let ext_llr = post_llr - (lp1[i] - lp0[i]);
            coded_ext.push(sigmoid(ext_llr));
        }
        if k < n_info {
            info_post.push(sigmoid(l_info[1] - l_info[0]));
        }
    }
    Ok((
        BitBeliefs::from_probs(coded_ext),
        BitBeliefs::from_probs(info_post),
    ))
}

#[inline]
fn sigmoid(llr: f64) -> f64 {
    if llr >= 0.0 {
        1.0 / (1.0 + (-llr).exp())
    } else {
        let e = llr.exp();
        e / (1.0 + e)
    }
}
