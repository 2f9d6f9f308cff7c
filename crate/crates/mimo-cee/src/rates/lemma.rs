//! Closed form for the Gaussian ratio expectation
//! `E[(‖AX‖² + K₁)/(‖X‖² + K₂)]` with `X ~ CN(0, P·I)`.

use crate::error::{Error, Result};
use crate::numerics::{exp_scaled_en, ComplexMatrix};

/// Evaluates the expectation above for an `M_R × m_t` matrix `A` and
/// positive constants `k1`, `k2`, where every entry of `X` has complex
/// variance `p_entry`:
///
/// `‖A‖²_F/m_t · (1 − g) + (K₁/K₂) · g`,  `g = t^{m_t} e^t Γ(1−m_t, t)`,
/// `t = K₂/P`.
///
/// The weight `g` is computed in exponentially scaled form, so the result
/// stays finite for any ratio `t`.
pub fn lemma1_expectation(
    a: &ComplexMatrix,
    k1: f64,
    k2: f64,
    p_entry: f64,
    m_t: usize,
) -> Result<f64> {
    if !(k1 > 0.0) || !(k2 > 0.0) {
        return Err(Error::Domain(format!(
            "constants must be positive: k1={k1}, k2={k2}"
        )));
    }
    if !(p_entry > 0.0) {
        return Err(Error::Domain(format!(
            "input power must be positive, got {p_entry}"
        )));
    }
    if m_t < 1 || a.cols() != m_t {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, expected m_t = {m_t}",
            a.cols()
        )));
    }
    let t = k2 / p_entry;
    let g = t * exp_scaled_en(m_t as u32, t)?;
    Ok(a.frob_norm_sq() / m_t as f64 * (1.0 - g) + (k1 / k2) * g)
}
