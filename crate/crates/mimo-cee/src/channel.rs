//! Uncorrelated Rayleigh block-fading MIMO channel, pilot-based estimation,
//! and the posterior law of the channel given its estimate.
//!
//! The pilot phase is not simulated symbol by symbol: with orthogonal
//! training of length `N` and average pilot energy `P_T`, maximum-likelihood
//! estimation yields `Ĥ = H + E` with white error of per-entry variance
//! `σ_Z²/(N·P_T)`, so the estimate is drawn directly with those statistics.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sample_cg_scalar, sample_cgn, ComplexMatrix};

/// Physical constants of one experiment: antenna counts, powers, noise and
/// fading variances, and the training setup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemConfigRaw", into = "SystemConfigRaw")]
pub struct SystemConfig {
    /// Transmit antennas.
    pub m_t: usize,
    /// Receive antennas.
    pub m_r: usize,
    /// Fading variance per channel entry.
    pub sigma_h_sq: f64,
    /// Noise variance per receive antenna.
    pub sigma_z_sq: f64,
    /// Total input power constraint, summed over transmit antennas.
    pub p_bar: f64,
    /// Training length in pilot vectors.
    pub n_pilots: usize,
    /// Average pilot symbol energy; defaults to the per-antenna data symbol
    /// energy `p_bar / m_t`.
    pub p_t: f64,
}

/// Serde-facing mirror of `SystemConfig` so deserialized values go through
/// validation and `p_t` can be omitted.
#[derive(Serialize, Deserialize)]
struct SystemConfigRaw {
    m_t: usize,
    m_r: usize,
    sigma_h_sq: f64,
    sigma_z_sq: f64,
    #[serde(default = "default_p_bar")]
    p_bar: f64,
    n_pilots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_t: Option<f64>,
}

fn default_p_bar() -> f64 {
    1.0
}

impl TryFrom<SystemConfigRaw> for SystemConfig {
    type Error = Error;
    fn try_from(r: SystemConfigRaw) -> Result<Self> {
        SystemConfig::new(
            r.m_t,
            r.m_r,
            r.sigma_h_sq,
            r.sigma_z_sq,
            r.p_bar,
            r.n_pilots,
            r.p_t,
        )
    }
}

impl From<SystemConfig> for SystemConfigRaw {
    fn from(c: SystemConfig) -> Self {
        SystemConfigRaw {
            m_t: c.m_t,
            m_r: c.m_r,
            sigma_h_sq: c.sigma_h_sq,
            sigma_z_sq: c.sigma_z_sq,
            p_bar: c.p_bar,
            n_pilots: c.n_pilots,
            p_t: Some(c.p_t),
        }
    }
}

impl SystemConfig {
    pub fn new(
        m_t: usize,
        m_r: usize,
        sigma_h_sq: f64,
        sigma_z_sq: f64,
        p_bar: f64,
        n_pilots: usize,
        p_t: Option<f64>,
    ) -> Result<Self> {
        if m_t < 1 || m_r < 1 || n_pilots < 1 {
            return Err(Error::InvalidConfig(
                "antenna counts and training length must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("sigma_h_sq", sigma_h_sq),
            ("sigma_z_sq", sigma_z_sq),
            ("p_bar", p_bar),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let p_t = p_t.unwrap_or(p_bar / m_t as f64);
        if !(p_t > 0.0) || !p_t.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "p_t must be positive and finite, got {p_t}"
            )));
        }
        Ok(Self {
            m_t,
            m_r,
            sigma_h_sq,
            sigma_z_sq,
            p_bar,
            n_pilots,
            p_t,
        })
    }

    /// Bypasses validation; for degenerate setups in tests (zero noise,
    /// zero fading and similar limits).
    pub fn new_unchecked(
        m_t: usize,
        m_r: usize,
        sigma_h_sq: f64,
        sigma_z_sq: f64,
        p_bar: f64,
        n_pilots: usize,
        p_t: f64,
    ) -> Self {
        Self {
            m_t,
            m_r,
            sigma_h_sq,
            sigma_z_sq,
            p_bar,
            n_pilots,
            p_t,
        }
    }

    /// Training SNR `N·P_T/σ_Z²`.
    pub fn snr_training(&self) -> f64 {
        self.n_pilots as f64 * self.p_t / self.sigma_z_sq
    }

    /// Estimation-error variance per entry of `Ĥ`.
    pub fn est_err_var(&self) -> f64 {
        1.0 / self.snr_training()
    }

    /// Posterior shrinkage of the estimate toward zero, in (0, 1).
    pub fn shrinkage(&self) -> f64 {
        let s = self.snr_training() * self.sigma_h_sq;
        s / (s + 1.0)
    }

    /// Power per transmit antenna.
    pub fn per_antenna_power(&self) -> f64 {
        self.p_bar / self.m_t as f64
    }

    /// Total receive SNR `P̄·σ_h²/σ_Z²`.
    pub fn snr_total(&self) -> f64 {
        self.p_bar * self.sigma_h_sq / self.sigma_z_sq
    }

    /// Copy with the total power rescaled to hit a target total SNR
    /// (linear). Pilot energy keeps its ratio to the data energy.
    pub fn with_snr_total(&self, snr: f64) -> Self {
        let mut c = *self;
        let scale = snr * self.sigma_z_sq / self.sigma_h_sq / self.p_bar;
        c.p_bar *= scale;
        c.p_t *= scale;
        c
    }
}

/// One block-fading realization: the true matrix `H`, constant over a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h: ComplexMatrix,
}

/// What the receiver owns: the estimate `Ĥ` together with the two scalars
/// that characterize its quality.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelEstimate {
    pub h_hat: ComplexMatrix,
    /// Per-entry variance of the estimation error.
    pub err_var: f64,
    /// Posterior shrinkage, in (0, 1]; the posterior mean of `H` is
    /// `shrinkage · Ĥ`.
    pub shrinkage: f64,
}

impl ChannelEstimate {
    /// Error-free estimate (zero error variance, unit shrinkage); the
    /// perfect-CSI limit used by reference curves and tests.
    pub fn perfect(h_hat: ComplexMatrix) -> Self {
        Self {
            h_hat,
            err_var: 0.0,
            shrinkage: 1.0,
        }
    }
}

/// Draws `H` with i.i.d. complex Gaussian entries of variance `σ_h²`.
pub fn sample_channel(cfg: &SystemConfig, rng: &mut impl Rng) -> ChannelRealization {
    let mean = ComplexMatrix::zeros(cfg.m_r, cfg.m_t);
    let h = sample_cgn(&mean, cfg.sigma_h_sq, rng).expect("nonnegative variance");
    ChannelRealization { h }
}

/// One channel use: `y = Hx + z` with white complex Gaussian noise.
pub fn apply_channel(
    h: &ChannelRealization,
    x: &[Complex64],
    cfg: &SystemConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>> {
    if x.len() != h.h.cols() || h.h.rows() != cfg.m_r || h.h.cols() != cfg.m_t {
        return Err(Error::DimensionMismatch(format!(
            "channel {}x{}, input length {}, config {}x{}",
            h.h.rows(),
            h.h.cols(),
            x.len(),
            cfg.m_r,
            cfg.m_t
        )));
    }
    let mut y = h.h.matvec(x);
    for v in y.iter_mut() {
        *v += sample_cg_scalar(cfg.sigma_z_sq, rng);
    }
    Ok(y)
}

/// Pilot-based estimate `Ĥ = H + E` with white error statistics; requires
/// `N >= M_T` so orthogonal training sequences exist.
pub fn estimate_channel(
    h: &ChannelRealization,
    cfg: &SystemConfig,
    rng: &mut impl Rng,
) -> Result<ChannelEstimate> {
    if cfg.n_pilots < cfg.m_t {
        return Err(Error::InvalidConfig(format!(
            "orthogonal training needs n_pilots >= m_t, got N={} M_T={}",
            cfg.n_pilots, cfg.m_t
        )));
    }
    let err_var = cfg.est_err_var();
    let h_hat = sample_cgn(&h.h, err_var, rng)?;
    Ok(ChannelEstimate {
        h_hat,
        err_var,
        shrinkage: cfg.shrinkage(),
    })
}

/// Draws from the posterior of `H` given the estimate: independent entries
/// `CN(shrinkage·Ĥ_ij, shrinkage·err_var)`.
pub fn sample_posterior(
    est: &ChannelEstimate,
    _cfg: &SystemConfig,
    rng: &mut impl Rng,
) -> ChannelRealization {
    let mean = est.h_hat.scaled(Complex64::new(est.shrinkage, 0.0));
    let var = est.shrinkage * est.err_var;
    let h = sample_cgn(&mean, var, rng).expect("nonnegative variance");
    ChannelRealization { h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn cfg_2x2() -> SystemConfig {
        SystemConfig::new(2, 2, 1.0, 1.0, 4.0, 2, None).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(0, 2, 1.0, 1.0, 1.0, 2, None).is_err());
        assert!(SystemConfig::new(2, 2, -1.0, 1.0, 1.0, 2, None).is_err());
        assert!(SystemConfig::new(2, 2, 1.0, 0.0, 1.0, 2, None).is_err());
        let c = cfg_2x2();
        assert!((c.p_t - 2.0).abs() < 1e-15); // defaults to p_bar / m_t
        assert!(c.snr_training() > 0.0);
    }

    #[test]
    fn zero_fading_gives_zero_matrix() {
        let cfg = SystemConfig::new_unchecked(2, 2, 0.0, 1.0, 1.0, 2, 0.5);
        let h = sample_channel(&cfg, &mut RngStream::new(3, 0).rng());
        assert!(h.h.frob_norm() == 0.0);
    }

    #[test]
    fn channel_sampling_is_reproducible_and_has_right_variance() {
        let cfg = cfg_2x2();
        let s = RngStream::new(17, 2);
        let a = sample_channel(&cfg, &mut s.rng());
        let b = sample_channel(&cfg, &mut s.rng());
        assert_eq!(a.h, b.h);

        let mut rng = RngStream::new(17, 3).rng();
        let n = 100_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let h = sample_channel(&cfg, &mut rng);
            sum_sq += h.h.frob_norm_sq();
        }
        let per_entry = sum_sq / (n * 4) as f64;
        assert!(
            (per_entry - 1.0).abs() < 0.02,
            "per-entry variance {per_entry}"
        );
    }

    #[test]
    fn noiseless_channel_is_exact_product() {
        let cfg = SystemConfig::new_unchecked(2, 2, 1.0, 0.0, 4.0, 2, 2.0);
        let h = sample_channel(&cfg, &mut RngStream::new(8, 0).rng());
        let x = vec![Complex64::new(1.0, -0.5), Complex64::new(0.0, 2.0)];
        let y = apply_channel(&h, &x, &cfg, &mut RngStream::new(8, 1).rng()).unwrap();
        let hx = h.h.matvec(&x);
        assert_eq!(y, hx);
    }

    #[test]
    fn zero_input_gives_pure_noise_of_right_variance() {
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(9, 0).rng());
        let x = vec![Complex64::ZERO; 2];
        let mut rng = RngStream::new(9, 1).rng();
        let n = 100_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let y = apply_channel(&h, &x, &cfg, &mut rng).unwrap();
            sum_sq += y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let per_entry = sum_sq / (n * 2) as f64;
        assert!(
            (per_entry - cfg.sigma_z_sq).abs() < 0.02 * cfg.sigma_z_sq,
            "noise variance {per_entry}"
        );
    }

    #[test]
    fn channel_is_linear_for_a_fixed_noise_draw() {
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(10, 0).rng());
        let x1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let x2 = vec![Complex64::new(-2.0, 0.5), Complex64::new(1.0, 1.0)];
        let x12: Vec<Complex64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        let noise_stream = RngStream::new(10, 1);
        let y12 = apply_channel(&h, &x12, &cfg, &mut noise_stream.rng()).unwrap();
        let y1 = apply_channel(&h, &x1, &cfg, &mut noise_stream.rng()).unwrap();
        let hx2 = h.h.matvec(&x2);
        for i in 0..2 {
            assert!((y12[i] - (y1[i] + hx2[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_channel_rejects_dimension_mismatch() {
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(11, 0).rng());
        let x = vec![Complex64::ZERO; 3];
        assert!(apply_channel(&h, &x, &cfg, &mut RngStream::new(11, 1).rng()).is_err());
    }

    #[test]
    fn estimation_error_law_and_direct_formula_values() {
        // N=2, P_T = sigma_Z^2 = sigma_h^2 = 1, M_T = 2:
        // err_var = 1/2, shrinkage = 2/3.
        let cfg = SystemConfig::new(2, 2, 1.0, 1.0, 2.0, 2, Some(1.0)).unwrap();
        assert!((cfg.est_err_var() - 0.5).abs() < 1e-15);
        assert!((cfg.shrinkage() - 2.0 / 3.0).abs() < 1e-15);

        let h = sample_channel(&cfg, &mut RngStream::new(12, 0).rng());
        let mut rng = RngStream::new(12, 1).rng();
        let n = 100_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let est = estimate_channel(&h, &cfg, &mut rng).unwrap();
            sum_sq += est.h_hat.sub(&h.h).frob_norm_sq();
        }
        let per_entry = sum_sq / (n * 4) as f64;
        assert!(
            (per_entry - 0.5).abs() < 0.02 * 0.5,
            "empirical err_var {per_entry}"
        );
    }

    #[test]
    fn estimation_needs_enough_pilots() {
        let cfg = SystemConfig::new(4, 4, 1.0, 1.0, 4.0, 2, None).unwrap();
        let h = sample_channel(&cfg, &mut RngStream::new(13, 0).rng());
        assert!(estimate_channel(&h, &cfg, &mut RngStream::new(13, 1).rng()).is_err());
    }

    #[test]
    fn perfect_training_limit() {
        // Huge training SNR: estimate equals the channel, shrinkage -> 1.
        let cfg = SystemConfig::new(2, 2, 1.0, 1.0, 4.0, 2, Some(1e14)).unwrap();
        let h = sample_channel(&cfg, &mut RngStream::new(14, 0).rng());
        let est = estimate_channel(&h, &cfg, &mut RngStream::new(14, 1).rng()).unwrap();
        assert!(est.h_hat.sub(&h.h).frob_norm() < 1e-6);
        assert!((est.shrinkage - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_with_zero_error_returns_estimate() {
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(15, 0).rng());
        let est = ChannelEstimate::perfect(h.h.clone());
        let draw = sample_posterior(&est, &cfg, &mut RngStream::new(15, 1).rng());
        assert_eq!(draw.h, h.h);
    }

    #[test]
    fn posterior_mean_matches_shrunken_estimate() {
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(16, 0).rng());
        let est = estimate_channel(&h, &cfg, &mut RngStream::new(16, 1).rng()).unwrap();
        let mut rng = RngStream::new(16, 2).rng();
        let n = 100_000usize;
        let mut acc = ComplexMatrix::zeros(2, 2);
        for _ in 0..n {
            acc = acc.add(&sample_posterior(&est, &cfg, &mut rng).h);
        }
        let mean = acc.scaled(Complex64::new(1.0 / n as f64, 0.0));
        let want = est.h_hat.scaled(Complex64::new(est.shrinkage, 0.0));
        let se = (est.shrinkage * est.err_var / n as f64).sqrt();
        let worst = mean
            .sub(&want)
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(worst < 4.0 * se, "worst entry deviation {worst}, se {se}");
    }

    #[test]
    fn posterior_marginalizes_back_to_prior_variance() {
        // Sample H, estimate, then draw from the posterior: the compound
        // draw must have the prior per-entry variance sigma_h_sq.
        let cfg = cfg_2x2();
        let mut rng = RngStream::new(18, 0).rng();
        let n = 100_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let h = sample_channel(&cfg, &mut rng);
            let est = estimate_channel(&h, &cfg, &mut rng).unwrap();
            let redraw = sample_posterior(&est, &cfg, &mut rng);
            sum_sq += redraw.h.frob_norm_sq();
        }
        let per_entry = sum_sq / (n * 4) as f64;
        assert!(
            (per_entry - cfg.sigma_h_sq).abs() < 0.02 * cfg.sigma_h_sq,
            "marginal variance {per_entry}"
        );
    }

    #[test]
    fn composite_channel_moments_for_fixed_input() {
        // y = Hx + z with H from the posterior: mean shrinkage*Ĥx and
        // per-entry variance sigma_z_sq + shrinkage*err_var*|x|^2.
        let cfg = cfg_2x2();
        let h = sample_channel(&cfg, &mut RngStream::new(19, 0).rng());
        let est = estimate_channel(&h, &cfg, &mut RngStream::new(19, 1).rng()).unwrap();
        let x = vec![Complex64::new(1.2, -0.3), Complex64::new(-0.7, 0.9)];
        let x_norm_sq: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let want_var = cfg.sigma_z_sq + est.shrinkage * est.err_var * x_norm_sq;
        let want_mean = est
            .h_hat
            .scaled(Complex64::new(est.shrinkage, 0.0))
            .matvec(&x);

        let mut rng = RngStream::new(19, 2).rng();
        let n = 100_000usize;
        let mut mean_acc = vec![Complex64::ZERO; 2];
        let mut var_acc = 0.0;
        for _ in 0..n {
            let hp = sample_posterior(&est, &cfg, &mut rng);
            let y = apply_channel(&hp, &x, &cfg, &mut rng).unwrap();
            for i in 0..2 {
                mean_acc[i] += y[i];
                var_acc += (y[i] - want_mean[i]).norm_sqr();
            }
        }
        let se_mean = (want_var / n as f64).sqrt();
        for i in 0..2 {
            let m = mean_acc[i] / n as f64;
            assert!(
                (m - want_mean[i]).norm() < 4.0 * se_mean,
                "composite mean off at {i}"
            );
        }
        let var = var_acc / (n * 2) as f64;
        assert!(
            (var - want_var).abs() < 4.0 * want_var * (2.0 / (n as f64)).sqrt().max(0.005),
            "composite variance {var}, want {want_var}"
        );
    }

    #[test]
    fn shrinkage_and_err_var_identities() {
        for &(m_t, n, p_t, sz, sh) in &[
            (2usize, 2usize, 1.0, 1.0, 1.0),
            (2, 8, 0.5, 2.0, 1.5),
            (4, 4, 3.0, 0.7, 0.9),
        ] {
            let cfg = SystemConfig::new(m_t, m_t, sh, sz, 1.0, n, Some(p_t)).unwrap();
            let snr_t = n as f64 * p_t / sz;
            assert!((cfg.est_err_var() - 1.0 / snr_t).abs() < 1e-15);
            let want = snr_t * sh / (snr_t * sh + 1.0);
            assert!((cfg.shrinkage() - want).abs() < 1e-15);
            assert!(cfg.shrinkage() > 0.0 && cfg.shrinkage() < 1.0);
        }
    }
}
