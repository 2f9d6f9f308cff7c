//! Singular value decomposition for small dense complex matrices.
//!
//! The factorization itself is delegated to `nalgebra`; this wrapper turns
//! its thin SVD into the full form `A = U · diag(σ) · V†` with square
//! unitary `U`, `V`, singular values sorted descending (ties kept in column
//! order), and a fixed phase convention: the first entry of each `V` column
//! with modulus above 1e-8 is made real positive, with the matching phase
//! absorbed into the `U` column so the product is unchanged. The convention
//! makes quantities built from `U` and `V` reproducible across runs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Full decomposition `U · diag(singular_values) · V† = input`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Unitary, rows × rows of the input.
    pub u: ComplexMatrix,
    /// Nonincreasing, length min(rows, cols).
    pub singular_values: Vec<f64>,
    /// Unitary, cols × cols of the input.
    pub v: ComplexMatrix,
}

impl SvdResult {
    /// Rebuilds `U · diag(σ) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let rows = self.u.rows();
        let cols = self.v.rows();
        let vdag = self.v.adjoint();
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            let mut acc = Complex64::ZERO;
            for (k, &s) in self.singular_values.iter().enumerate() {
                acc += self.u[(i, k)] * s * vdag[(k, j)];
            }
            acc
        })
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Domain("svd of an empty matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::Domain("svd input has non-finite entries".into()));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let k = rows.min(cols);

    let dm = DMatrix::from_fn(rows, cols, |i, j| m[(i, j)]);
    let f = dm.svd(true, true);
    let u_thin = f.u.expect("svd requested u");
    let v_t = f.v_t.expect("svd requested v_t");
    let sv = f.singular_values;

    // Sort descending; stable so equal values keep their column order.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());

    let mut u_cols: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&c| (0..rows).map(|r| u_thin[(r, c)]).collect())
        .collect();
    let mut v_cols: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&c| (0..cols).map(|r| v_t[(c, r)].conj()).collect())
        .collect();
    let singular_values: Vec<f64> = order.iter().map(|&c| sv[c]).collect();

    // Phase convention on paired columns.
    for (uc, vc) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        let phase = leading_phase(vc);
        for z in vc.iter_mut() {
            *z *= phase;
        }
        for z in uc.iter_mut() {
            *z *= phase;
        }
    }

    // Complete the thin factors to square unitaries.
    complete_basis(&mut u_cols, rows);
    complete_basis(&mut v_cols, cols);

    let u = ComplexMatrix::from_fn(rows, rows, |i, j| u_cols[j][i]);
    let v = ComplexMatrix::from_fn(cols, cols, |i, j| v_cols[j][i]);
    Ok(SvdResult {
        u,
        singular_values,
        v,
    })
}

/// Unit phase that makes the first entry with modulus > 1e-8 real positive.
fn leading_phase(col: &[Complex64]) -> Complex64 {
    for z in col {
        if z.norm() > 1e-8 {
            return z.conj() / z.norm();
        }
    }
    Complex64::ONE
}

/// Extends a set of orthonormal columns to a full orthonormal basis by
/// Gram-Schmidt against the standard basis.
fn complete_basis(cols: &mut Vec<Vec<Complex64>>, dim: usize) {
    let mut e = 0usize;
    while cols.len() < dim {
        assert!(e < dim, "basis completion exhausted candidate vectors");
        let mut cand = vec![Complex64::ZERO; dim];
        cand[e] = Complex64::ONE;
        e += 1;
        for b in cols.iter() {
            let proj: Complex64 = b
                .iter()
                .zip(cand.iter())
                .map(|(bi, ci)| bi.conj() * ci)
                .sum();
            for (ci, bi) in cand.iter_mut().zip(b.iter()) {
                *ci -= proj * bi;
            }
        }
        let norm: f64 = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // candidate lay in the span; try the next axis
        }
        let phase = leading_phase(&cand);
        for z in cand.iter_mut() {
            *z = *z * phase / norm;
        }
        cols.push(cand);
    }
}
