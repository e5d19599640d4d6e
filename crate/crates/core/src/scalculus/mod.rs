//! S-resolvent operators and the Cauchy kernel series.

pub mod contour;
pub mod poly;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::spectral::pseudo_q;

pub use contour::{
    func_calc, riesz_projector, riesz_projector_right, ContourSpec, Projection, QuadParams,
    DEFAULT_NODES, DEFAULT_N_MAX, DEFAULT_PROJ_TOL,
};
pub use poly::{spectral_mapping_check, IntrinsicPoly};

/// `−Q_q(T)⁻¹ (T − q̄𝕀)`.
pub fn s_resolvent_left(q: Quaternion, t: &QMatrix) -> Result<QMatrix> {
    let rhs = t.add_scalar(-q.conj());
    Ok(pseudo_q(q, t).solve(&rhs)?.scale_real(-1.0))
}

/// `−(T − q̄𝕀) Q_q(T)⁻¹`.
pub fn s_resolvent_right(q: Quaternion, t: &QMatrix) -> Result<QMatrix> {
    let qinv = pseudo_q(q, t).invert()?;
    Ok(t.add_scalar(-q.conj()).matmul(&qinv)?.scale_real(-1.0))
}

/// Smallest `K` with `(‖T‖/|q|)^{K+1} / (|q| − ‖T‖) ≤ tol`.
pub fn cauchy_terms(t_norm: f64, q_abs: f64, tol: f64) -> Result<usize> {
    if !(q_abs > t_norm) {
        return Err(Error::Domain(format!(
            "Cauchy series needs |q| > ‖T‖ ({q_abs} ≤ {t_norm})"
        )));
    }
    let ratio = t_norm / q_abs;
    let mut bound = ratio / (q_abs - t_norm);
    let mut k = 0;
    while bound > tol {
        bound *= ratio;
        k += 1;
        if k > 100_000 {
            return Err(Error::Domain("Cauchy series converges too slowly".into()));
        }
    }
    Ok(k)
}

/// `Σ_{k≤K} Tᵏ q^{−k−1}`.
pub fn cauchy_series_left(q: Quaternion, t: &QMatrix, terms: usize) -> Result<QMatrix> {
    cauchy_series(q, t, terms, true)
}

/// `Σ_{k≤K} q^{−k−1} Tᵏ`.
pub fn cauchy_series_right(q: Quaternion, t: &QMatrix, terms: usize) -> Result<QMatrix> {
    cauchy_series(q, t, terms, false)
}

fn cauchy_series(q: Quaternion, t: &QMatrix, terms: usize, left: bool) -> Result<QMatrix> {
    let qi = q.inv()?;
    let mut power = QMatrix::identity(t.n());
    let mut qpow = qi;
    let mut sum = QMatrix::zeros(t.n());
    for k in 0..=terms {
        let term = if left {
            power.scale_right(qpow)
        } else {
            power.scale_left(qpow)
        };
        sum = sum.add(&term)?;
        if k < terms {
            power = power.matmul(t)?;
            qpow = qpow * qi;
        }
    }
    Ok(sum)
}

/// `‖S_L⁻¹(q,T) q − T S_L⁻¹(q,T) − 𝕀‖`.
pub fn left_resolvent_equation(q: Quaternion, t: &QMatrix) -> Result<f64> {
    let s = s_resolvent_left(q, t)?;
    let r = s
        .scale_right(q)
        .sub(&t.matmul(&s)?)?
        .add_scalar(-Quaternion::ONE);
    Ok(r.op_norm())
}

/// `‖q S_R⁻¹(q,T) − S_R⁻¹(q,T) T − 𝕀‖`.
pub fn right_resolvent_equation(q: Quaternion, t: &QMatrix) -> Result<f64> {
    let s = s_resolvent_right(q, t)?;
    let r = s
        .scale_left(q)
        .sub(&s.matmul(t)?)?
        .add_scalar(-Quaternion::ONE);
    Ok(r.op_norm())
}

/// Residual of the classical S-resolvent equation for `s, p ∈ ρ_S(T)`,
/// `p ∉ [s]`:
/// `S_R⁻¹(s) S_L⁻¹(p) = [(S_R⁻¹(s) − S_L⁻¹(p)) p − s̄ (S_R⁻¹(s) − S_L⁻¹(p))] Q_s(p)⁻¹`.
pub fn s_resolvent_equation(s: Quaternion, p: Quaternion, t: &QMatrix) -> Result<f64> {
    let qsp = crate::spectral::pseudo_q_scalar(s, p);
    let qsp_inv = qsp
        .inv()
        .map_err(|_| Error::Precondition("p lies on the sphere of s".into()))?;
    let sr = s_resolvent_right(s, t)?;
    let sl = s_resolvent_left(p, t)?;
    let diff = sr.sub(&sl)?;
    let rhs = diff
        .scale_right(p)
        .sub(&diff.scale_left(s.conj()))?
        .scale_right(qsp_inv);
    Ok(sr.matmul(&sl)?.sub(&rhs)?.op_norm())
}
