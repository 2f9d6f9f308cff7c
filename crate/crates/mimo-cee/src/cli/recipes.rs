//! Built-in experiment recipes reproducing the three reference figures.

use std::path::PathBuf;

use super::config::{BerParams, ExperimentConfig, ExperimentKind, RateParams};
use crate::channel::SystemConfig;
use crate::metrics::DecodingMetricKind;

pub struct RecipeInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const RECIPE_NAMES: [&str; 3] = ["fig1_ber_2x2", "fig2_rates_2x2", "fig3_rates_4x4"];

/// Names and one-line parameter summaries of the built-in recipes.
pub fn list_recipes() -> Vec<RecipeInfo> {
    vec![
        RecipeInfo {
            name: "fig1_ber_2x2",
            summary: "BER vs Eb/N0, 2x2 16-QAM, (5,7) code, 100 symbols/frame, \
                      N in {2,4,8} pilots, both metrics",
        },
        RecipeInfo {
            name: "fig2_rates_2x2",
            summary: "expected outage rates vs SNR 0-25 dB, 2x2, N=2 pilots, \
                      gamma=0.01, both metrics + outage ceiling + ergodic",
        },
        RecipeInfo {
            name: "fig3_rates_4x4",
            summary: "expected outage rates vs SNR 0-25 dB, 4x4, N=4 pilots, \
                      gamma=0.01, both metrics + outage ceiling + ergodic",
        },
    ]
}

fn both_metrics() -> Vec<DecodingMetricKind> {
    vec![
        DecodingMetricKind::MismatchedMl,
        DecodingMetricKind::Improved,
    ]
}

fn grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

fn system(m: usize, n_pilots: usize) -> SystemConfig {
    SystemConfig::new(m, m, 1.0, 1.0, 1.0, n_pilots, None).expect("valid recipe system")
}

/// Builds a built-in recipe by name.
pub fn recipe(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "fig1_ber_2x2" => ExperimentConfig {
            experiment: ExperimentKind::BerSweep,
            seed: 0x0001_2345,
            output: PathBuf::from("fig1_ber_2x2.csv"),
            system: system(2, 2),
            ber_sweep: Some(BerParams {
                metrics: both_metrics(),
                ebn0_db: grid(3, 12),
                pilots: Some(vec![2, 4, 8]),
                n_frames: 4000,
                n_iters: 4,
                n_symbols: 100,
            }),
            rate_curves: None,
        },
        "fig2_rates_2x2" => ExperimentConfig {
            experiment: ExperimentKind::RateCurves,
            seed: 0x0002_2345,
            output: PathBuf::from("fig2_rates_2x2.csv"),
            system: system(2, 2),
            ber_sweep: None,
            rate_curves: Some(RateParams {
                metrics: both_metrics(),
                snr_db: grid(0, 25),
                gamma: 0.01,
                n_mc: 10_000,
                n_est: 200,
            }),
        },
        "fig3_rates_4x4" => ExperimentConfig {
            experiment: ExperimentKind::RateCurves,
            seed: 0x0003_2345,
            output: PathBuf::from("fig3_rates_4x4.csv"),
            system: system(4, 4),
            ber_sweep: None,
            rate_curves: Some(RateParams {
                metrics: both_metrics(),
                snr_db: grid(0, 25),
                gamma: 0.01,
                n_mc: 10_000,
                n_est: 200,
            }),
        },
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_three_recipes_listed() {
        let infos = list_recipes();
        assert_eq!(infos.len(), 3);
        let names: Vec<&str> = infos.iter().map(|r| r.name).collect();
        assert_eq!(names, RECIPE_NAMES);
    }

    #[test]
    fn recipes_validate_and_round_trip() {
        for name in RECIPE_NAMES {
            let cfg = recipe(name).unwrap();
            cfg.validate().unwrap();
            let s = cfg.to_toml_string();
            let back = ExperimentConfig::from_toml_str(&s).unwrap();
            assert_eq!(cfg, back, "{name} round trip");
        }
        assert!(recipe("nope").is_none());
    }

    #[test]
    fn fig3_declares_4x4_with_four_pilots() {
        let cfg = recipe("fig3_rates_4x4").unwrap();
        assert_eq!(cfg.system.m_t, 4);
        assert_eq!(cfg.system.m_r, 4);
        assert_eq!(cfg.system.n_pilots, 4);
    }

    #[test]
    fn fig1_sweeps_the_three_training_lengths() {
        let cfg = recipe("fig1_ber_2x2").unwrap();
        let p = cfg.ber_sweep.unwrap();
        assert_eq!(p.pilots, Some(vec![2, 4, 8]));
        assert_eq!(p.n_symbols, 100);
    }
}
