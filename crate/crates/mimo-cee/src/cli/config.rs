//! Experiment configuration: a flat TOML file with one section per
//! experiment kind. Every stochastic quantity derives from the mandatory
//! `seed`; nothing reads the wall clock.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::metrics::DecodingMetricKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BerSweep,
    RateCurves,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BerSweep => write!(f, "ber_sweep"),
            Self::RateCurves => write!(f, "rate_curves"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerParams {
    pub metrics: Vec<DecodingMetricKind>,
    /// Information-bit SNR grid in dB, ascending.
    pub ebn0_db: Vec<f64>,
    /// Training lengths to sweep; defaults to the system's n_pilots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilots: Option<Vec<usize>>,
    pub n_frames: usize,
    #[serde(default = "default_n_iters")]
    pub n_iters: usize,
    #[serde(default = "default_n_symbols")]
    pub n_symbols: usize,
}

fn default_n_iters() -> usize {
    4
}

fn default_n_symbols() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub metrics: Vec<DecodingMetricKind>,
    /// Total-SNR grid in dB, ascending.
    pub snr_db: Vec<f64>,
    /// Outage probability.
    pub gamma: f64,
    /// Posterior draws per estimate.
    pub n_mc: usize,
    /// Estimates averaged per grid point.
    pub n_est: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// CSV output path (joined onto the output directory override).
    pub output: PathBuf,
    pub system: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ber_sweep: Option<BerParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_curves: Option<RateParams>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} grid is empty")));
    }
    if !grid.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "{name} grid has non-finite entries"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "{name} grid must be strictly ascending"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.output.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("output path is empty".into()));
        }
        match self.experiment {
            ExperimentKind::BerSweep => {
                let p = self.ber_sweep.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("experiment ber_sweep needs a [ber_sweep] section".into())
                })?;
                if p.metrics.is_empty() {
                    return Err(Error::InvalidConfig("ber_sweep.metrics is empty".into()));
                }
                check_grid("ber_sweep.ebn0_db", &p.ebn0_db)?;
                if p.n_frames < 1 || p.n_iters < 1 || p.n_symbols < 1 {
                    return Err(Error::InvalidConfig(
                        "ber_sweep counts must be at least 1".into(),
                    ));
                }
                if let Some(pilots) = &p.pilots {
                    if pilots.is_empty() || pilots.iter().any(|&n| n < 1) {
                        return Err(Error::InvalidConfig(
                            "ber_sweep.pilots must be nonempty positive lengths".into(),
                        ));
                    }
                }
            }
            ExperimentKind::RateCurves => {
                let p = self.rate_curves.as_ref().ok_or_else(|| {
                    Error::InvalidConfig(
                        "experiment rate_curves needs a [rate_curves] section".into(),
                    )
                })?;
                if p.metrics.is_empty() {
                    return Err(Error::InvalidConfig("rate_curves.metrics is empty".into()));
                }
                check_grid("rate_curves.snr_db", &p.snr_db)?;
                if !(p.gamma > 0.0 && p.gamma < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "rate_curves.gamma must lie in (0,1), got {}",
                        p.gamma
                    )));
                }
                if p.n_mc < 1 || p.n_est < 1 {
                    return Err(Error::InvalidConfig(
                        "rate_curves counts must be at least 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s)
            .map_err(|e| Error::InvalidConfig(format!("config parse failed: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
