//! Bit-to-constellation mapping for compound MIMO symbols.
//!
//! A compound symbol carries one constellation point per transmit antenna.
//! Within one point's bit group the first bit is the label MSB. 16-QAM uses
//! Gray labeling per axis: the first two bits select the in-phase level,
//! the last two the quadrature level, each through the Gray sequence
//! 00, 01, 11, 10 over the amplitudes -3, -1, +1, +3.

use num_complex::Complex64;

use crate::channel::SystemConfig;
use crate::error::{Error, Result};

/// A labeled constellation with `2^bits_per_symbol` points, indexed by the
/// integer whose binary digits (MSB first) are the label bits.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    bits_per_symbol: usize,
}

/// Gray sequence of levels: label pair (MSB, LSB) -> amplitude index.
const GRAY_LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

fn gray_index(b0: u8, b1: u8) -> usize {
    match (b0, b1) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        (1, 0) => 3,
        _ => unreachable!(),
    }
}

impl Constellation {
    /// Gray-labeled 16-QAM with the given average symbol energy.
    pub fn gray_16qam(symbol_energy: f64) -> Self {
        // mean power of {±1, ±3} per axis is 5, so 10 over both axes
        let scale = (symbol_energy / 10.0).sqrt();
        let mut points = Vec::with_capacity(16);
        for idx in 0..16usize {
            let b = [
                (idx >> 3 & 1) as u8,
                (idx >> 2 & 1) as u8,
                (idx >> 1 & 1) as u8,
                (idx & 1) as u8,
            ];
            let i_level = GRAY_LEVELS[gray_index(b[0], b[1])];
            let q_level = GRAY_LEVELS[gray_index(b[2], b[3])];
            points.push(Complex64::new(i_level * scale, q_level * scale));
        }
        Constellation {
            points,
            bits_per_symbol: 4,
        }
    }

    /// Binary antipodal test constellation: bit 0 -> -a, bit 1 -> +a.
    pub fn bpsk(symbol_energy: f64) -> Self {
        let a = symbol_energy.sqrt();
        Constellation {
            points: vec![Complex64::new(-a, 0.0), Complex64::new(a, 0.0)],
            bits_per_symbol: 1,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Maps one bit group (length `bits_per_symbol`, MSB first) to a point.
    pub fn map_bits(&self, bits: &[u8]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol);
        let mut label = 0usize;
        for &b in bits {
            label = (label << 1) | (b as usize & 1);
        }
        self.points[label]
    }
}

/// Maps interleaved bits to a flat sequence of compound symbols
/// (`m_t` points per compound symbol, row after row).
pub fn map_frame_with(
    bits: &[u8],
    m_t: usize,
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    let b = constellation.bits_per_symbol();
    if bits.is_empty() || bits.len() % (m_t * b) != 0 {
        return Err(Error::DimensionMismatch(format!(
            "bit count {} is not a positive multiple of m_t*b = {}",
            bits.len(),
            m_t * b
        )));
    }
    Ok(bits
        .chunks_exact(b)
        .map(|group| constellation.map_bits(group))
        .collect())
}

/// 16-QAM mapping at the per-antenna energy implied by the configuration,
/// so the compound symbol satisfies the total power constraint on average.
pub fn map_frame(bits: &[u8], cfg: &SystemConfig) -> Result<Vec<Complex64>> {
    let c = Constellation::gray_16qam(cfg.per_antenna_power());
    map_frame_with(bits, cfg.m_t, &c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constellation_mean_is_zero() {
        let c = Constellation::gray_16qam(1.0);
        let mean: Complex64 = c.points().iter().sum::<Complex64>() / 16.0;
        assert!(mean.norm() < 1e-15);
    }

    #[test]
    fn average_energy_matches_contract() {
        let cfg = SystemConfig::new(2, 2, 1.0, 1.0, 5.0, 2, None).unwrap();
        let c = Constellation::gray_16qam(cfg.per_antenna_power());
        let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
        assert!(
            (e - cfg.p_bar / 2.0).abs() < 1e-12,
            "per-antenna energy {e}"
        );
    }

    #[test]
    fn gray_labels_differ_in_one_bit_along_each_axis() {
        let c = Constellation::gray_16qam(10.0); // unit level spacing x2
        // exhaustive: for each point, neighbors one level away on one axis
        // must differ in exactly one label bit.
        let label_of = |p: Complex64| -> usize {
            c.points()
                .iter()
                .position(|q| (q - p).norm() < 1e-9)
                .unwrap()
        };
        for idx in 0..16usize {
            let p = c.point(idx);
            for (dre, dim) in [(2.0, 0.0), (-2.0, 0.0), (0.0, 2.0), (0.0, -2.0)] {
                let q = p + Complex64::new(dre, dim);
                if c.points().iter().any(|r| (r - q).norm() < 1e-9) {
                    let jdx = label_of(q);
                    assert_eq!(
                        (idx ^ jdx).count_ones(),
                        1,
                        "labels {idx:04b} and {jdx:04b} are axis neighbors"
                    );
                }
            }
        }
    }

    #[test]
    fn map_frame_length_and_errors() {
        let cfg = SystemConfig::new(2, 2, 1.0, 1.0, 4.0, 2, None).unwrap();
        let bits = vec![0u8; 16]; // 2 compound symbols of 2 antennas x 4 bits
        let syms = map_frame(&bits, &cfg).unwrap();
        assert_eq!(syms.len(), 4);
        assert!(map_frame(&vec![0u8; 15], &cfg).is_err());
        assert!(map_frame(&[], &cfg).is_err());
    }

    #[test]
    fn bpsk_points() {
        let c = Constellation::bpsk(1.0);
        assert_eq!(c.map_bits(&[0]), Complex64::new(-1.0, 0.0));
        assert_eq!(c.map_bits(&[1]), Complex64::new(1.0, 0.0));
    }
}
