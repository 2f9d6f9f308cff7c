//! Frame assembly, the iterative demap/decode receiver, and Monte Carlo
//! BER measurement.
//!
//! One frame = one block-fading channel draw: fresh `H` and fresh estimate
//! per frame, constant across the frame's compound symbols. The demapper
//! and the SISO decoder exchange extrinsic information through the
//! interleaver; the first iteration starts from uniform priors.

use num_complex::Complex64;
use rand::Rng;

use super::conv::ConvCode;
use super::demap::Demapper;
use super::interleave::Interleaver;
use super::mapping::{map_frame_with, Constellation};
use super::siso::siso_decode;
use super::BitBeliefs;
use crate::channel::{
    apply_channel, estimate_channel, sample_channel, ChannelEstimate, SystemConfig,
};
use crate::error::{Error, Result};
use crate::metrics::DecodingMetricKind;
use crate::numerics::RngStream;
use crate::parallel::indexed_map;

/// All bit-level stages of one transmitted frame, with the seed that fixes
/// its interleaver.
#[derive(Clone, Debug)]
pub struct Frame {
    pub info_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    pub interleaved_bits: Vec<u8>,
    /// Flat compound symbols, `m_t` points each.
    pub symbols: Vec<Complex64>,
    pub permutation_seed: u64,
}

/// Frame geometry and receiver depth shared by a simulation run.
#[derive(Clone, Copy, Debug)]
pub struct FrameParams {
    /// Compound MIMO symbols per frame.
    pub n_symbols: usize,
    /// Demap/decode exchange rounds.
    pub n_iters: usize,
}

impl Default for FrameParams {
    fn default() -> Self {
        FrameParams {
            n_symbols: 100,
            n_iters: 4,
        }
    }
}

fn frame_geometry(
    n_symbols: usize,
    m_t: usize,
    constellation: &Constellation,
    code: &ConvCode,
) -> Result<(usize, usize)> {
    let n_coded = n_symbols * m_t * constellation.bits_per_symbol();
    if n_coded < code.coded_len(1) {
        return Err(Error::InvalidConfig(format!(
            "frame of {n_symbols} symbols carries too few coded bits"
        )));
    }
    if n_coded % 2 != 0 {
        return Err(Error::InvalidConfig(
            "coded bit count per frame must be even for a rate-1/2 code".into(),
        ));
    }
    Ok((n_coded, code.info_len(n_coded)))
}

/// Encodes, interleaves and maps one frame from given information bits.
pub fn build_frame(
    info_bits: Vec<u8>,
    permutation_seed: u64,
    cfg: &SystemConfig,
    constellation: &Constellation,
    n_symbols: usize,
) -> Result<Frame> {
    let code = ConvCode::rate_half_5_7();
    let (n_coded, n_info) = frame_geometry(n_symbols, cfg.m_t, constellation, &code)?;
    if info_bits.len() != n_info {
        return Err(Error::DimensionMismatch(format!(
            "{} info bits, frame carries {n_info}",
            info_bits.len()
        )));
    }
    let coded_bits = code.encode(&info_bits);
    debug_assert_eq!(coded_bits.len(), n_coded);
    let interleaver = Interleaver::new(n_coded, permutation_seed);
    let interleaved_bits = interleaver.interleave(&coded_bits)?;
    let symbols = map_frame_with(&interleaved_bits, cfg.m_t, constellation)?;
    Ok(Frame {
        info_bits,
        coded_bits,
        interleaved_bits,
        symbols,
        permutation_seed,
    })
}

/// Random information bits and interleaver, then [`build_frame`].
pub fn random_frame(
    n_symbols: usize,
    cfg: &SystemConfig,
    constellation: &Constellation,
    rng: &mut impl Rng,
) -> Result<Frame> {
    let code = ConvCode::rate_half_5_7();
    let (_, n_info) = frame_geometry(n_symbols, cfg.m_t, constellation, &code)?;
    let info_bits: Vec<u8> = (0..n_info).map(|_| rng.random_range(0..2u8)).collect();
    let permutation_seed: u64 = rng.random();
    build_frame(info_bits, permutation_seed, cfg, constellation, n_symbols)
}

/// Iterative receiver: alternates the soft demapper and the SISO decoder
/// `n_iters` times and returns hard decisions on the information bits.
pub fn iterate_receiver(
    ys: &[Complex64],
    est: &ChannelEstimate,
    kind: DecodingMetricKind,
    cfg: &SystemConfig,
    n_iters: usize,
    interleaver: &Interleaver,
    constellation: &Constellation,
) -> Result<Vec<u8>> {
    if n_iters < 1 {
        return Err(Error::InvalidConfig("n_iters must be at least 1".into()));
    }
    if ys.len() % cfg.m_r != 0 {
        return Err(Error::DimensionMismatch(format!(
            "observation buffer {} not a multiple of m_r={}",
            ys.len(),
            cfg.m_r
        )));
    }
    let n_symbols = ys.len() / cfg.m_r;
    let code = ConvCode::rate_half_5_7();
    let (n_coded, n_info) = frame_geometry(n_symbols, cfg.m_t, constellation, &code)?;
    if interleaver.len() != n_coded {
        return Err(Error::DimensionMismatch(format!(
            "interleaver length {} vs {n_coded} coded bits",
            interleaver.len()
        )));
    }

    let demapper = Demapper::new(est, cfg, kind, constellation)?;
    let bits_per_symbol = demapper.bits_per_symbol();
    let mut priors_int = vec![0.5f64; n_coded];
    let mut info_post = BitBeliefs::uniform(n_info);
    for _ in 0..n_iters {
        let mut extr_int = vec![0.0f64; n_coded];
        for k in 0..n_symbols {
            let y = &ys[k * cfg.m_r..(k + 1) * cfg.m_r];
            let pr = &priors_int[k * bits_per_symbol..(k + 1) * bits_per_symbol];
            let out = demapper.demap(y, pr)?;
            extr_int[k * bits_per_symbol..(k + 1) * bits_per_symbol]
                .copy_from_slice(out.probs());
        }
        let dec_priors = BitBeliefs::from_probs(interleaver.deinterleave(&extr_int)?);
        let (coded_ext, post) = siso_decode(&code, &dec_priors, n_info)?;
        priors_int = interleaver.interleave(coded_ext.probs())?;
        info_post = post;
    }
    Ok(info_post.hard())
}

/// Rescales a configuration so its total SNR corresponds to the requested
/// information-bit SNR under this chain's convention:
/// `Eb/N0 = SNR_total / (R_c · b · M_T)` with `R_c = 1/2` and `b = 4`.
pub fn config_at_ebn0(cfg: &SystemConfig, ebn0_db: f64) -> SystemConfig {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let spectral_efficiency = 0.5 * 4.0 * cfg.m_t as f64;
    cfg.with_snr_total(ebn0 * spectral_efficiency)
}

/// One BER measurement with its Wilson 95% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub n_bits: u64,
    pub n_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson 95% score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Stream id layout: one stream per (grid point, frame).
fn frame_stream(seed: u64, point: usize, frame: usize) -> RngStream {
    RngStream::new(seed, ((point as u64) << 40) | frame as u64)
}

fn run_single_frame(
    cfg: &SystemConfig,
    params: &FrameParams,
    kinds: &[DecodingMetricKind],
    perfect_csi: bool,
    stream: RngStream,
) -> Result<Vec<Vec<u8>>> {
    let constellation = Constellation::gray_16qam(cfg.per_antenna_power());
    let mut rng = stream.rng();
    let h = sample_channel(cfg, &mut rng);
    let est = if perfect_csi {
        ChannelEstimate::perfect(h.h.clone())
    } else {
        estimate_channel(&h, cfg, &mut rng)?
    };
    let frame = random_frame(params.n_symbols, cfg, &constellation, &mut rng)?;
    let mut ys = Vec::with_capacity(params.n_symbols * cfg.m_r);
    for k in 0..params.n_symbols {
        let x = &frame.symbols[k * cfg.m_t..(k + 1) * cfg.m_t];
        ys.extend(apply_channel(&h, x, cfg, &mut rng)?);
    }
    let interleaver = Interleaver::new(frame.interleaved_bits.len(), frame.permutation_seed);
    let mut out = Vec::with_capacity(kinds.len() + 1);
    for &kind in kinds {
        out.push(iterate_receiver(
            &ys,
            &est,
            kind,
            cfg,
            params.n_iters,
            &interleaver,
            &constellation,
        )?);
    }
    out.push(frame.info_bits);
    Ok(out)
}

/// Runs one frame end to end (fresh channel, estimate, noise) and returns
/// its information-bit error count and bit count. The unit of work the
/// Monte Carlo drivers fan out.
pub fn frame_error_count(
    cfg: &SystemConfig,
    kind: DecodingMetricKind,
    params: &FrameParams,
    stream: RngStream,
) -> Result<(u64, u64)> {
    let decoded = run_single_frame(cfg, params, &[kind], false, stream)?;
    let tx = &decoded[1];
    let rx = &decoded[0];
    let errs = tx.iter().zip(rx).filter(|(a, b)| a != b).count() as u64;
    Ok((errs, tx.len() as u64))
}

/// Monte Carlo BER sweep for one decoding metric over an `Eb/N0` grid.
/// Each frame draws a fresh channel and estimate; frames run in parallel
/// on disjoint RNG streams and reduce in index order.
pub fn simulate_ber(
    cfg: &SystemConfig,
    kind: DecodingMetricKind,
    ebn0_db_grid: &[f64],
    n_frames: usize,
    params: &FrameParams,
    seed: u64,
) -> Result<Vec<BerPoint>> {
    if n_frames < 1 {
        return Err(Error::InvalidConfig("n_frames must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(ebn0_db_grid.len());
    for (pi, &ebn0_db) in ebn0_db_grid.iter().enumerate() {
        let cfg_pt = config_at_ebn0(cfg, ebn0_db);
        let per_frame: Vec<Result<(u64, u64)>> = indexed_map(n_frames, |fi| {
            frame_error_count(&cfg_pt, kind, params, frame_stream(seed, pi, fi))
        });
        let mut n_errors = 0u64;
        let mut n_bits = 0u64;
        for r in per_frame {
            let (e, b) = r?;
            n_errors += e;
            n_bits += b;
        }
        let (ci_low, ci_high) = wilson_interval(n_errors, n_bits);
        points.push(BerPoint {
            ebn0_db,
            n_bits,
            n_errors,
            ber: n_errors as f64 / n_bits as f64,
            ci_low,
            ci_high,
        });
    }
    Ok(points)
}

/// Decodes the same received frames with both metrics and counts frames
/// whose information-bit decisions differ. With a perfect estimate the two
/// metrics are the same cost up to a candidate-independent shift, so the
/// count must be zero.
pub fn count_decision_mismatches(
    cfg: &SystemConfig,
    ebn0_db: f64,
    n_frames: usize,
    params: &FrameParams,
    seed: u64,
    perfect_csi: bool,
) -> Result<u64> {
    let cfg_pt = config_at_ebn0(cfg, ebn0_db);
    let kinds = [
        DecodingMetricKind::Improved,
        DecodingMetricKind::MismatchedMl,
    ];
    let per_frame: Vec<Result<u64>> = indexed_map(n_frames, |fi| {
        let decoded = run_single_frame(&cfg_pt, params, &kinds, perfect_csi, frame_stream(seed, 0, fi))?;
        Ok(u64::from(decoded[0] != decoded[1]))
    });
    let mut mismatches = 0;
    for r in per_frame {
        mismatches += r?;
    }
    Ok(mismatches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_2x2() -> SystemConfig {
        SystemConfig::new(2, 2, 1.0, 1.0, 4.0, 2, None).unwrap()
    }

    #[test]
    fn frame_sizes_and_round_trip() {
        let cfg = cfg_2x2();
        let constellation = Constellation::gray_16qam(cfg.per_antenna_power());
        let mut rng = RngStream::new(70, 0).rng();
        let frame = random_frame(100, &cfg, &constellation, &mut rng).unwrap();
        assert_eq!(frame.coded_bits.len(), 800);
        assert_eq!(frame.info_bits.len(), 398);
        assert_eq!(frame.interleaved_bits.len(), 800);
        assert_eq!(frame.symbols.len(), 200);
        let il = Interleaver::new(800, frame.permutation_seed);
        assert_eq!(
            il.deinterleave(&frame.interleaved_bits).unwrap(),
            frame.coded_bits
        );
    }

    #[test]
    fn noiseless_frame_decodes_exactly() {
        let cfg = SystemConfig::new_unchecked(2, 2, 1.0, 1e-9, 4.0, 2, 2.0);
        let constellation = Constellation::gray_16qam(cfg.per_antenna_power());
        let mut rng = RngStream::new(71, 0).rng();
        let h = sample_channel(&cfg, &mut rng);
        let est = ChannelEstimate::perfect(h.h.clone());
        let frame = random_frame(20, &cfg, &constellation, &mut rng).unwrap();
        let mut ys = Vec::new();
        for k in 0..20 {
            let x = &frame.symbols[k * 2..(k + 1) * 2];
            ys.extend(apply_channel(&h, x, &cfg, &mut rng).unwrap());
        }
        let il = Interleaver::new(frame.interleaved_bits.len(), frame.permutation_seed);
        for kind in [DecodingMetricKind::Improved, DecodingMetricKind::MismatchedMl] {
            let decoded =
                iterate_receiver(&ys, &est, kind, &cfg, 2, &il, &constellation).unwrap();
            assert_eq!(decoded, frame.info_bits, "{kind} failed noiseless decode");
        }
    }

    #[test]
    fn high_snr_perfect_csi_ber_is_small() {
        // 20 dB, 2x2, 1 iteration: BER below 1e-3 over ~1e5 bits.
        let cfg = cfg_2x2();
        let params = FrameParams {
            n_symbols: 100,
            n_iters: 1,
        };
        let n_frames = 260; // ~1.03e5 info bits
        let cfg_pt = config_at_ebn0(&cfg, 20.0);
        let per_frame: Vec<(u64, u64)> = indexed_map(n_frames, |fi| {
            let decoded = run_single_frame(
                &cfg_pt,
                &params,
                &[DecodingMetricKind::Improved],
                true,
                frame_stream(72, 0, fi),
            )
            .unwrap();
            let errs = decoded[0]
                .iter()
                .zip(&decoded[1])
                .filter(|(a, b)| a != b)
                .count() as u64;
            (errs, decoded[1].len() as u64)
        });
        let errs: u64 = per_frame.iter().map(|p| p.0).sum();
        let bits: u64 = per_frame.iter().map(|p| p.1).sum();
        let ber = errs as f64 / bits as f64;
        assert!(bits > 100_000);
        assert!(ber < 1e-3, "BER {ber} at 20 dB perfect CSI");
    }

    #[test]
    fn perfect_estimate_makes_metrics_bit_identical() {
        let cfg = cfg_2x2();
        let params = FrameParams {
            n_symbols: 40,
            n_iters: 3,
        };
        let mismatches =
            count_decision_mismatches(&cfg, 8.0, 50, &params, 73, true).unwrap();
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn extrinsic_exchange_preserves_bit_counts() {
        // Shape contract: every stage of the loop keeps frame bit counts.
        let cfg = cfg_2x2();
        let constellation = Constellation::gray_16qam(cfg.per_antenna_power());
        let mut rng = RngStream::new(74, 0).rng();
        let h = sample_channel(&cfg, &mut rng);
        let est = estimate_channel(&h, &cfg, &mut rng).unwrap();
        let frame = random_frame(10, &cfg, &constellation, &mut rng).unwrap();
        let n_coded = frame.coded_bits.len();
        let il = Interleaver::new(n_coded, frame.permutation_seed);
        let demapper =
            Demapper::new(&est, &cfg, DecodingMetricKind::Improved, &constellation).unwrap();
        let mut ys = Vec::new();
        for k in 0..10 {
            let x = &frame.symbols[k * 2..(k + 1) * 2];
            ys.extend(apply_channel(&h, x, &cfg, &mut rng).unwrap());
        }
        let priors = vec![0.5f64; n_coded];
        let mut extr = Vec::new();
        for k in 0..10 {
            let out = demapper
                .demap(&ys[k * 2..(k + 1) * 2], &priors[k * 8..(k + 1) * 8])
                .unwrap();
            extr.extend_from_slice(out.probs());
        }
        assert_eq!(extr.len(), n_coded);
        let dec_in = BitBeliefs::from_probs(il.deinterleave(&extr).unwrap());
        assert_eq!(dec_in.len(), n_coded);
        let (coded_ext, info_post) =
            siso_decode(&ConvCode::rate_half_5_7(), &dec_in, frame.info_bits.len()).unwrap();
        assert_eq!(coded_ext.len(), n_coded);
        assert_eq!(info_post.len(), frame.info_bits.len());
        assert_eq!(il.interleave(coded_ext.probs()).unwrap().len(), n_coded);
    }

    #[test]
    fn ber_sweep_is_deterministic_and_zero_in_the_noiseless_limit() {
        let params = FrameParams {
            n_symbols: 10,
            n_iters: 2,
        };
        let cfg = cfg_2x2();
        // 100 dB: the effective noise is negligible, decisions are exact.
        let pts = simulate_ber(
            &cfg,
            DecodingMetricKind::Improved,
            &[100.0],
            5,
            &params,
            75,
        )
        .unwrap();
        assert_eq!(pts[0].n_errors, 0);

        let a = simulate_ber(&cfg, DecodingMetricKind::Improved, &[4.0], 8, &params, 76).unwrap();
        let b = simulate_ber(&cfg, DecodingMetricKind::Improved, &[4.0], 8, &params, 76).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wilson_interval_brackets_point_estimate() {
        let (lo, hi) = wilson_interval(10, 1000);
        assert!(lo > 0.0 && lo < 0.01 && hi > 0.01 && hi < 0.03);
        let (lo0, hi0) = wilson_interval(0, 100);
        assert!(lo0 < 1e-12 && hi0 > 0.0);
    }
}
