//! Bit-interleaved coded modulation chain and its iterative receiver:
//! convolutional encoding, random interleaving, Gray-QAM MIMO mapping,
//! soft demapping, SISO trellis decoding and BER measurement.

mod conv;
mod demap;
mod interleave;
mod mapping;
mod receiver;
mod siso;

pub use conv::{conv_encode, ConvCode, N_STATES, TAIL_BITS};
pub use demap::{demap_soft, Demapper};
pub use interleave::Interleaver;
pub use mapping::{map_frame, map_frame_with, Constellation};
pub use receiver::{
    build_frame, config_at_ebn0, count_decision_mismatches, frame_error_count, iterate_receiver,
    random_frame, simulate_ber, wilson_interval, BerPoint, Frame, FrameParams,
};
pub use siso::siso_decode;

/// Probability floor keeping log-ratios finite.
pub const BELIEF_FLOOR: f64 = 1e-12;

/// Per-bit beliefs `p(d = 1)`, clamped away from 0 and 1 so log-domain
/// processing stays finite.
#[derive(Clone, Debug, PartialEq)]
pub struct BitBeliefs {
    p1: Vec<f64>,
}

impl BitBeliefs {
    pub fn uniform(n: usize) -> Self {
        BitBeliefs { p1: vec![0.5; n] }
    }

    pub fn from_probs(p1: Vec<f64>) -> Self {
        let p1 = p1
            .into_iter()
            .map(|p| p.clamp(BELIEF_FLOOR, 1.0 - BELIEF_FLOOR))
            .collect();
        BitBeliefs { p1 }
    }

    pub fn len(&self) -> usize {
        self.p1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p1.is_empty()
    }

    pub fn prob_one(&self, i: usize) -> f64 {
        self.p1[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p1
    }

    /// Log-ratio `ln(p1/p0)`; finite thanks to the clamp.
    pub fn llr(&self, i: usize) -> f64 {
        (self.p1[i] / (1.0 - self.p1[i])).ln()
    }

    /// Hard decisions, ties resolved to 0.
    pub fn hard(&self) -> Vec<u8> {
        self.p1.iter().map(|&p| u8::from(p > 0.5)).collect()
    }
}
