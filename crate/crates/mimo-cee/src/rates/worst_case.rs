//! Worst-case test-channel optimization and the closed-form achievable
//! rates for both decoding metrics.
//!
//! Write `H = U·diag(λ)·V†`. Restricting test channels to the same singular
//! directions, `Υ = U·diag(μ)·V†`, the power-matching constraint fixes the
//! test noise `σ²(μ) = (p/M_R)(‖λ‖² − ‖μ‖²) + σ_Z²` (p = per-antenna
//! power), and the metric constraint becomes a ball `‖μ + a·h̃‖² ≤ b` where
//! `h̃ = diag(U†ĤV)` couples the estimate into the singular basis. The rate
//! is `Σ log₂(1 + p|μᵢ|²/σ²(μ))`, increasing in ‖μ‖ along any direction, so
//! the worst case sits on the constraint sphere at minimal norm:
//!
//! - improved metric: `μ = (√b/‖h̃‖ − |a|)·h̃` for `b ≥ 0`, else `μ = 0`;
//! - mismatched metric: `μ` is the real projection of `λ` onto `h̃`.
//!
//! The improved closed form is applied literally. Its coefficient can turn
//! negative (when `|a|·‖h̃‖ > √b`), a branch the formula's stated condition
//! does not distinguish; the numeric probe in [`worst_case_numeric`]
//! re-solves the norm minimization on the constraint sphere independently,
//! so branch mistakes surface in tests instead of being silently accepted.
//! The probe also reports when `μ = 0` lies strictly inside the ball: the
//! power-trace relaxation admits a zero-rate point there, which the sphere
//! restriction (where the worst case is attained) deliberately excludes.
//!
//! Two caveats of the closed form are handled explicitly. The rate is not a
//! function of ‖μ‖ alone — at fixed norm it falls as the gains concentrate —
//! so the norm-minimizing point is the worst case along the coupling
//! direction, not over every sphere direction. And for unlucky estimates
//! the coupling can spread past the singular values, pushing the sum form
//! above the perfect-knowledge capacity; since the true channel is itself
//! an admissible test channel, no metric receiver can exceed that capacity,
//! and [`achievable_rate`] caps there. [`TestChannelSolution`] keeps the
//! uncapped sum form so the closed form stays inspectable.

use num_complex::Complex64;

use crate::channel::{ChannelEstimate, ChannelRealization, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::DecodingMetricKind;
use crate::numerics::{exp_scaled_en, svd, ComplexMatrix};

/// Constants of the worst-case problem for one `(H, Ĥ)` pair.
#[derive(Clone, Debug)]
pub struct TestChannelConstants {
    /// Scaled tail weight `t^{M_T-1} e^t Γ(1-M_T, t)` at
    /// `t = σ_Z²/(δ·p·σ_ε²)`; governs how the metric expectation splits
    /// between signal and noise terms.
    pub tail_weight: f64,
    /// Coefficient `a` placing the constraint-ball center at `-a·h̃`.
    pub center_coeff: f64,
    /// Coefficient of the constraint-slack term; the term itself vanishes
    /// once the power-matching constraint is enforced, so only the
    /// coefficient is kept for diagnostics.
    pub slack_coeff: f64,
    /// Squared constraint radius `b`.
    pub radius_sq: f64,
    /// Estimate diagonal in the singular basis of `H`.
    pub coupling: Vec<Complex64>,
    /// Singular values of `H`, descending.
    pub sing_vals: Vec<f64>,
    /// Left/right singular bases of `H` (phase-fixed).
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

/// Worst-case solution: the test-channel gains, its noise variance and the
/// resulting rate.
#[derive(Clone, Debug)]
pub struct TestChannelSolution {
    /// Diagonal gains `μ` of the worst-case test channel.
    pub gains: Vec<Complex64>,
    /// `σ²(μ)`.
    pub noise_var: f64,
    /// `Σ log₂(1 + p|μᵢ|²/σ²(μ))`, nonnegative.
    pub rate_bits: f64,
    /// Scalar multiplying the coupling direction (sign ambiguity surfaces
    /// here when negative).
    pub coefficient: f64,
    /// Whether the returned gains satisfy the ball constraint within 1e-9.
    pub in_constraint: bool,
}

fn require_square(cfg: &SystemConfig) -> Result<()> {
    if cfg.m_t != cfg.m_r {
        return Err(Error::Unsupported(format!(
            "worst-case rates are defined for square layouts only, got {}x{}",
            cfg.m_r, cfg.m_t
        )));
    }
    Ok(())
}

/// Builds the constants of the worst-case problem. Requires a square layout
/// and a strictly noisy estimate (`err_var > 0`); the error-free limit is
/// covered by [`perfect_csi_rate`].
pub fn test_channel_constants(
    h: &ChannelRealization,
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<TestChannelConstants> {
    require_square(cfg)?;
    let m = cfg.m_t;
    if h.h.rows() != m || h.h.cols() != m || est.h_hat.rows() != m || est.h_hat.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "channel {}x{}, estimate {}x{}, config {m}x{m}",
            h.h.rows(),
            h.h.cols(),
            est.h_hat.rows(),
            est.h_hat.cols()
        )));
    }
    if !(est.err_var > 0.0) {
        return Err(Error::Domain(
            "worst-case constants need a strictly noisy estimate (err_var > 0)".into(),
        ));
    }
    let p = cfg.per_antenna_power();
    let delta = est.shrinkage;
    let eps = est.err_var;
    let t = cfg.sigma_z_sq / (delta * p * eps);
    let tail_weight = exp_scaled_en(m as u32, t)?;

    let num = delta * (delta * eps * p - tail_weight * cfg.sigma_z_sq);
    let den = (m as f64) * delta * eps * tail_weight * p + tail_weight * cfg.sigma_z_sq
        - delta * eps * p;
    let center_coeff = num / den;
    let slack_coeff =
        m as f64 * tail_weight / (1.0 - t * tail_weight - m as f64 * tail_weight);

    let f = svd(&h.h)?;
    let h_tilde = f.u.adjoint().mul(&est.h_hat).mul(&f.v);
    let coupling = h_tilde.diag();
    let coupling_norm_sq: f64 = coupling.iter().map(|z| z.norm_sqr()).sum();

    let shifted = h
        .h
        .add(&est.h_hat.scaled(Complex64::new(center_coeff, 0.0)));
    let radius_sq = shifted.frob_norm_sq()
        - center_coeff * center_coeff * (h_tilde.frob_norm_sq() - coupling_norm_sq);

    if !(tail_weight.is_finite()
        && center_coeff.is_finite()
        && slack_coeff.is_finite()
        && radius_sq.is_finite())
    {
        return Err(Error::Domain(format!(
            "non-finite worst-case constants (t = {t})"
        )));
    }
    Ok(TestChannelConstants {
        tail_weight,
        center_coeff,
        slack_coeff,
        radius_sq,
        coupling,
        sing_vals: f.singular_values,
        u: f.u,
        v: f.v,
    })
}

fn noise_var(gains: &[Complex64], sing_vals: &[f64], cfg: &SystemConfig) -> f64 {
    let p = cfg.per_antenna_power();
    let lam_sq: f64 = sing_vals.iter().map(|l| l * l).sum();
    let mu_sq: f64 = gains.iter().map(|g| g.norm_sqr()).sum();
    p / cfg.m_r as f64 * (lam_sq - mu_sq) + cfg.sigma_z_sq
}

fn rate_bits(gains: &[Complex64], nv: f64, cfg: &SystemConfig) -> f64 {
    let p = cfg.per_antenna_power();
    gains
        .iter()
        .map(|g| (1.0 + p * g.norm_sqr() / nv).log2())
        .sum()
}

fn solution_from_gains(
    gains: Vec<Complex64>,
    coefficient: f64,
    consts: &TestChannelConstants,
    cfg: &SystemConfig,
) -> TestChannelSolution {
    let nv = noise_var(&gains, &consts.sing_vals, cfg);
    let rb = rate_bits(&gains, nv, cfg);
    let a = consts.center_coeff;
    let shifted_sq: f64 = gains
        .iter()
        .zip(&consts.coupling)
        .map(|(g, h)| (g + h * a).norm_sqr())
        .sum();
    TestChannelSolution {
        rate_bits: rb,
        noise_var: nv,
        in_constraint: consts.radius_sq >= 0.0 && shifted_sq <= consts.radius_sq + 1e-9,
        gains,
        coefficient,
    }
}

/// Closed-form worst case for the improved metric, applied literally:
/// `μ = (√b/‖h̃‖ − |a|)·h̃` when `b ≥ 0`, zero gains otherwise.
pub fn mu_opt_improved(
    consts: &TestChannelConstants,
    cfg: &SystemConfig,
) -> Result<TestChannelSolution> {
    require_square(cfg)?;
    let m = consts.coupling.len();
    if consts.radius_sq < 0.0 {
        return Ok(solution_from_gains(
            vec![Complex64::ZERO; m],
            0.0,
            consts,
            cfg,
        ));
    }
    let h_norm = consts
        .coupling
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if h_norm == 0.0 {
        if consts.radius_sq > 1e-12 {
            return Err(Error::DegenerateDirection(
                "zero coupling vector with positive constraint radius".into(),
            ));
        }
        return Ok(solution_from_gains(
            vec![Complex64::ZERO; m],
            0.0,
            consts,
            cfg,
        ));
    }
    let coefficient = consts.radius_sq.sqrt() / h_norm - consts.center_coeff.abs();
    let gains: Vec<Complex64> = consts.coupling.iter().map(|z| z * coefficient).collect();
    Ok(solution_from_gains(gains, coefficient, consts, cfg))
}

/// Closed-form worst case for the mismatched ML metric: the real projection
/// of the singular values onto the coupling direction.
pub fn mu_opt_mismatched(
    consts: &TestChannelConstants,
    cfg: &SystemConfig,
) -> Result<TestChannelSolution> {
    require_square(cfg)?;
    let h_norm_sq: f64 = consts.coupling.iter().map(|z| z.norm_sqr()).sum();
    if h_norm_sq == 0.0 {
        return Err(Error::DegenerateDirection(
            "zero coupling vector, projection undefined".into(),
        ));
    }
    let inner: f64 = consts
        .sing_vals
        .iter()
        .zip(&consts.coupling)
        .map(|(&l, h)| l * h.re)
        .sum();
    let coefficient = inner / h_norm_sq;
    let gains: Vec<Complex64> = consts.coupling.iter().map(|z| z * coefficient).collect();
    Ok(solution_from_gains(gains, coefficient, consts, cfg))
}

/// Worst-case achievable rate (bits per channel use) of a receiver using
/// the given metric on the pair `(H, Ĥ)`, capped at the perfect-knowledge
/// instantaneous capacity (the true channel is an admissible test channel).
pub fn achievable_rate(
    h: &ChannelRealization,
    est: &ChannelEstimate,
    kind: DecodingMetricKind,
    cfg: &SystemConfig,
) -> Result<f64> {
    let consts = test_channel_constants(h, est, cfg)?;
    let sol = match kind {
        DecodingMetricKind::Improved => mu_opt_improved(&consts, cfg)?,
        DecodingMetricKind::MismatchedMl => mu_opt_mismatched(&consts, cfg)?,
    };
    Ok(sol.rate_bits.min(perfect_csi_rate(&consts.sing_vals, cfg)))
}

/// Instantaneous capacity with perfect channel knowledge,
/// `Σ log₂(1 + p·λᵢ²/σ_Z²)`.
pub fn perfect_csi_rate(sing_vals: &[f64], cfg: &SystemConfig) -> f64 {
    let p = cfg.per_antenna_power();
    sing_vals
        .iter()
        .map(|l| (1.0 + p * l * l / cfg.sigma_z_sq).log2())
        .sum()
}

/// Rates of both metrics plus the perfect-CSI capacity for one pair,
/// sharing a single decomposition.
#[derive(Clone, Copy, Debug)]
pub struct RateTriple {
    pub improved: f64,
    pub mismatched: f64,
    pub perfect: f64,
}

pub fn rate_triple(
    h: &ChannelRealization,
    est: &ChannelEstimate,
    cfg: &SystemConfig,
) -> Result<RateTriple> {
    let consts = test_channel_constants(h, est, cfg)?;
    let perfect = perfect_csi_rate(&consts.sing_vals, cfg);
    Ok(RateTriple {
        improved: mu_opt_improved(&consts, cfg)?.rate_bits.min(perfect),
        mismatched: mu_opt_mismatched(&consts, cfg)?.rate_bits.min(perfect),
        perfect,
    })
}

/// Outcome of the independent numeric check of the closed form.
#[derive(Clone, Debug)]
pub struct WorstCaseProbe {
    /// Rate at the numerically found norm minimizer on the constraint
    /// sphere (intersected with the `‖μ‖ ≤ ‖λ‖` cap).
    pub numeric_rate: f64,
    pub numeric_gains: Vec<Complex64>,
    /// Rate of the literal closed form.
    pub closed_rate: f64,
    /// True when `μ = 0` lies strictly inside the ball, i.e. the relaxed
    /// constraint set would admit a zero-rate test channel.
    pub zero_inside_ball: bool,
    /// True when the literal closed-form point violates the ball
    /// constraint (negative-coefficient branch with a negative center
    /// coefficient).
    pub literal_infeasible: bool,
}

impl WorstCaseProbe {
    /// Amount by which the numeric solution undercuts the closed form in
    /// rate (positive = the closed form is not the constrained minimum).
    pub fn shortfall(&self) -> f64 {
        self.closed_rate - self.numeric_rate
    }
}

/// Independent numeric verification of the closed form: multi-start
/// projected gradient descent minimizing `‖μ‖²` — the quantity whose
/// Lagrange solution the closed form claims to be — over the constraint
/// sphere `‖μ + a·h̃‖² = b`, with a quadratic penalty keeping
/// `‖μ‖ ≤ ‖λ‖`. The rate is then evaluated at the found minimizer and
/// compared against the closed form's; disagreement beyond tolerance marks
/// a branch-logic error in the closed form.
pub fn worst_case_numeric(
    consts: &TestChannelConstants,
    cfg: &SystemConfig,
    n_random_starts: usize,
    rng: &mut impl rand::Rng,
) -> Result<WorstCaseProbe> {
    require_square(cfg)?;
    let m = consts.coupling.len();
    let a = consts.center_coeff;
    let b = consts.radius_sq;
    let closed = mu_opt_improved(consts, cfg)?;
    let h_norm = consts
        .coupling
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let zero_inside_ball = b > 0.0 && (a * a) * h_norm * h_norm < b - 1e-12;
    let literal_infeasible = b >= 0.0 && !closed.in_constraint;
    if b <= 0.0 || h_norm == 0.0 {
        return Ok(WorstCaseProbe {
            numeric_rate: closed.rate_bits,
            numeric_gains: closed.gains.clone(),
            closed_rate: closed.rate_bits,
            zero_inside_ball,
            literal_infeasible,
        });
    }
    let r = b.sqrt();
    let lam_sq: f64 = consts.sing_vals.iter().map(|l| l * l).sum();

    // Objective over the sphere parameter (unit vector omega, 2m real
    // coordinates): mu = -a*h_tilde + r*omega.
    let gains_at = |w: &[f64]| -> Vec<Complex64> {
        (0..m)
            .map(|i| -consts.coupling[i] * a + Complex64::new(w[2 * i], w[2 * i + 1]) * r)
            .collect()
    };
    let objective = |w: &[f64]| -> f64 {
        let mu_sq: f64 = gains_at(w).iter().map(|g| g.norm_sqr()).sum();
        let cap_violation = (mu_sq - lam_sq).max(0.0);
        mu_sq + 1e3 * cap_violation * cap_violation
    };
    let normalize = |w: &mut [f64]| {
        let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in w.iter_mut() {
            *v /= n;
        }
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for sign in [1.0f64, -1.0] {
        let mut w = vec![0.0; 2 * m];
        for i in 0..m {
            w[2 * i] = sign * consts.coupling[i].re / h_norm;
            w[2 * i + 1] = sign * consts.coupling[i].im / h_norm;
        }
        starts.push(w);
    }
    for _ in 0..n_random_starts {
        let mut w: Vec<f64> = (0..2 * m)
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        normalize(&mut w);
        starts.push(w);
    }

    let mut best_val = f64::INFINITY;
    let mut best_w = starts[0].clone();
    for mut w in starts {
        let mut f0 = objective(&w);
        let mut step = 0.25;
        for _ in 0..500 {
            // central-difference gradient projected onto the sphere tangent
            let mut grad = vec![0.0; 2 * m];
            let h = 1e-7;
            for i in 0..2 * m {
                let mut wp = w.clone();
                wp[i] += h;
                normalize(&mut wp);
                let mut wm = w.clone();
                wm[i] -= h;
                normalize(&mut wm);
                grad[i] = (objective(&wp) - objective(&wm)) / (2.0 * h);
            }
            let dot: f64 = grad.iter().zip(&w).map(|(g, x)| g * x).sum();
            for (g, x) in grad.iter_mut().zip(&w) {
                *g -= dot * x;
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-13 {
                break;
            }
            let mut improved = false;
            while step > 1e-15 {
                let mut w_new: Vec<f64> = w
                    .iter()
                    .zip(&grad)
                    .map(|(x, g)| x - step * g / gnorm)
                    .collect();
                normalize(&mut w_new);
                let f_new = objective(&w_new);
                if f_new < f0 - 1e-16 {
                    w = w_new;
                    f0 = f_new;
                    improved = true;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if f0 < best_val {
            best_val = f0;
            best_w = w;
        }
    }
    let numeric_gains = gains_at(&best_w);
    let nv = noise_var(&numeric_gains, &consts.sing_vals, cfg);
    Ok(WorstCaseProbe {
        numeric_rate: rate_bits(&numeric_gains, nv, cfg),
        numeric_gains,
        closed_rate: closed.rate_bits,
        zero_inside_ball,
        literal_infeasible,
    })
}
