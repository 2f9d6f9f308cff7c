//! Rate-1/2 nonrecursive convolutional code with constraint length 3,
//! generators (5, 7) octal, and its 4-state trellis.
//!
//! Output order per input bit: the 1+D+D² stream (octal 7) first, then the
//! 1+D² stream (octal 5). Frames are terminated with two zero tail bits so
//! the trellis starts and ends in state 0.

/// Trellis description: 4 states, each `(state, input)` pair maps to a
/// unique `(next_state, two output bits)`.
#[derive(Clone, Debug)]
pub struct ConvCode {
    /// Tap masks over the register (input bit, then the two memory bits),
    /// in output emission order.
    generators: [u8; 2],
}

/// Memory cells per frame appended as zero tail bits.
pub const TAIL_BITS: usize = 2;
/// Number of trellis states.
pub const N_STATES: usize = 4;

impl Default for ConvCode {
    fn default() -> Self {
        Self::rate_half_5_7()
    }
}

impl ConvCode {
    /// The (5, 7) code used throughout the experiments.
    pub fn rate_half_5_7() -> Self {
        ConvCode {
            generators: [0b111, 0b101],
        }
    }

    /// Transition from `state` on input bit `u`: next state and the two
    /// output bits. State bits are the last two inputs, newest in the MSB.
    #[inline]
    pub fn step(&self, state: usize, u: u8) -> (usize, [u8; 2]) {
        debug_assert!(state < N_STATES && u <= 1);
        let reg = ((u as usize) << 2) | state;
        let out = [
            ((reg & self.generators[0] as usize).count_ones() & 1) as u8,
            ((reg & self.generators[1] as usize).count_ones() & 1) as u8,
        ];
        let next = reg >> 1;
        (next, out)
    }

    /// Encodes `info` and terminates the trellis with two zero tail bits;
    /// output length is `2 * (info.len() + 2)`.
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        assert!(!info.is_empty(), "empty information sequence");
        let mut out = Vec::with_capacity(2 * (info.len() + TAIL_BITS));
        let mut state = 0usize;
        for &u in info.iter().chain(std::iter::repeat(&0u8).take(TAIL_BITS)) {
            let (next, bits) = self.step(state, u & 1);
            out.extend_from_slice(&bits);
            state = next;
        }
        debug_assert_eq!(state, 0, "tail must terminate in state 0");
        out
    }

    /// Coded-bit count for a given number of information bits.
    pub fn coded_len(&self, n_info: usize) -> usize {
        2 * (n_info + TAIL_BITS)
    }

    /// Information bits carried by a frame of `n_coded` coded bits.
    pub fn info_len(&self, n_coded: usize) -> usize {
        n_coded / 2 - TAIL_BITS
    }
}

/// Convenience free function matching the operation vocabulary.
pub fn conv_encode(info: &[u8]) -> Vec<u8> {
    ConvCode::rate_half_5_7().encode(info)
}
