//! Numerical checks around a finite-type sphere: decay of `Q_q(T)ᵏ x` on the
//! range of the projector, quasi-nilpotency of `Q_q(T)P`, and the inverse and
//! projector-rank bounds behind the perturbation argument.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{vector_norm, QMatrix};
use crate::quat::Quaternion;
use crate::spectral::{pseudo_q, s_spectral_radius};

/// Relative size below which `‖Q_q(T)ᵏ x‖` is treated as zero.
pub const DEFAULT_DECAY_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct RangeRadius {
    /// `‖Q_q(T)ᵏ x‖`, `k = 1 … n_max`.
    pub norms: Vec<f64>,
    /// Per-k level at or below which the norm is indistinguishable from zero.
    pub floors: Vec<f64>,
    /// `r_k = ‖Q_q(T)ᵏ x‖^{1/k}`, or 0 when the norm is at or below its floor.
    pub radii: Vec<f64>,
}

impl RangeRadius {
    /// `x ∈ R(P)` is predicted when the last radius is below `threshold`.
    pub fn predicts_range(&self, threshold: f64) -> bool {
        self.radii.last().is_some_and(|&r| r < threshold)
    }
}

/// The sequence `r_k = ‖Q_q(T)ᵏ x‖^{1/k}`.
///
/// Floating point cannot drive `‖Q_q(T)ᵏ x‖` to zero: rounding leaks a
/// component of relative size `u` outside `R(P)` that `Q_q(T)ᵏ` then
/// amplifies. Norms at or below
/// `decay_floor·‖Q^k‖·‖x‖ + 8m·u·Σ_j ‖Q‖·‖Q^{k−j}‖·‖Q^{j−1}x‖` count as zero,
/// where `m = 2n` and `u` is the unit roundoff.
pub fn range_radius(
    x: &[Quaternion],
    q: Quaternion,
    t: &QMatrix,
    n_max: usize,
    decay_floor: f64,
) -> Result<RangeRadius> {
    if x.len() != t.n() {
        return Err(Error::Dim(format!(
            "vector of {} for {}x{}",
            x.len(),
            t.n(),
            t.n()
        )));
    }
    let xn = vector_norm(x);
    if !(xn > 0.0) {
        return Err(Error::Domain("range_radius needs a nonzero vector".into()));
    }
    let qm = pseudo_q(q, t);
    let q_norm = qm.op_norm();
    let unit = 8.0 * (2 * t.n()) as f64 * f64::EPSILON / 2.0;
    // power_norms[j] = ‖Q^j‖, iterate_norms[j] = ‖Q^j x‖
    let mut power = QMatrix::identity(t.n());
    let mut power_norms = vec![1.0];
    let mut iterate_norms = vec![xn];
    let mut y = x.to_vec();
    let (mut norms, mut floors, mut radii) = (Vec::new(), Vec::new(), Vec::new());
    for k in 1..=n_max {
        power = power.matmul(&qm)?;
        power_norms.push(power.op_norm());
        y = qm.apply(&y)?;
        let yn = vector_norm(&y);
        iterate_norms.push(yn);
        let rounding: f64 = (1..=k)
            .map(|j| q_norm * power_norms[k - j] * iterate_norms[j - 1])
            .sum();
        let floor = decay_floor * power_norms[k] * xn + unit * rounding;
        norms.push(yn);
        floors.push(floor);
        radii.push(if yn <= floor {
            0.0
        } else {
            yn.powf(1.0 / k as f64)
        });
    }
    Ok(RangeRadius {
        norms,
        floors,
        radii,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiNilpotent {
    /// Spectral radius of `Q_q(T) P`.
    pub radius_qp: f64,
    /// Spectral radius of `Q_q(T)[2T + (1 − 2Re q)𝕀] P`.
    pub radius_q2p: f64,
    /// `‖Q_q(T) P‖`, nonzero for defective spheres.
    pub norm_qp: f64,
    /// Condition numbers of `Q_q(T) + P` and `Q_q(T) + [2T + (1 − 2Re q)𝕀]P`.
    pub cond_plus_p: f64,
    pub cond_plus_2p: f64,
    /// `‖[B, N]‖` for `B = Q(𝕀−P) + P` and the nilpotent `N = QP`.
    pub commutator: f64,
    /// `‖(B + N) X − 𝕀‖` where `X = Σ_{k<2n} (−B⁻¹N)ᵏ B⁻¹`.
    pub neumann_residual: f64,
}

pub fn quasinilpotent_check(q: Quaternion, t: &QMatrix, p: &QMatrix) -> Result<QuasiNilpotent> {
    let n = t.n();
    let qm = pseudo_q(q, t);
    let qp = qm.matmul(p)?;
    let lin = t
        .scale_real(2.0)
        .add_scalar(Quaternion::real(1.0 - 2.0 * q.re()));
    let q2p = qm.matmul(&lin)?.matmul(p)?;
    let complement = p.scale_real(-1.0).add_scalar(Quaternion::ONE);
    let b = qm.matmul(&complement)?.add(p)?;
    let b_inv = b.invert()?;
    let step = b_inv.matmul(&qp)?.scale_real(-1.0);
    let mut term = QMatrix::identity(n);
    let mut series = QMatrix::identity(n);
    for _ in 1..(2 * n) {
        term = term.matmul(&step)?;
        series = series.add(&term)?;
    }
    let x = series.matmul(&b_inv)?;
    let neumann_residual = b
        .add(&qp)?
        .matmul(&x)?
        .add_scalar(-Quaternion::ONE)
        .op_norm();
    Ok(QuasiNilpotent {
        radius_qp: s_spectral_radius(&qp)?,
        radius_q2p: s_spectral_radius(&q2p)?,
        norm_qp: qp.op_norm(),
        cond_plus_p: qm.add(p)?.condition_number(),
        cond_plus_2p: qm.add(&lin.matmul(p)?)?.condition_number(),
        commutator: b.matmul(&qp)?.sub(&qp.matmul(&b)?)?.op_norm(),
        neumann_residual,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InverseBound {
    /// `‖T⁻¹ − S⁻¹‖`.
    pub lhs: f64,
    /// `2‖S⁻¹‖²‖T − S‖`.
    pub rhs: f64,
}

impl InverseBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// Inverse perturbation bound for `‖T − S‖ ≤ ½‖S⁻¹‖⁻¹`.
pub fn inverse_perturbation_bound(s: &QMatrix, t: &QMatrix) -> Result<InverseBound> {
    let s_inv = s.invert()?;
    let si_norm = s_inv.op_norm();
    let dist = t.sub(s)?.op_norm();
    if dist > 0.5 / si_norm * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "‖T − S‖ = {dist:.3e} exceeds ½‖S⁻¹‖⁻¹ = {:.3e}",
            0.5 / si_norm
        )));
    }
    let lhs = t.invert()?.sub(&s_inv)?.op_norm();
    Ok(InverseBound {
        lhs,
        rhs: 2.0 * si_norm * si_norm * dist,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RankEquivalence {
    pub distance: f64,
    pub rank_p: usize,
    pub rank_q: usize,
    /// Smallest singular value of `QP + (𝕀 − Q)(𝕀 − P)`.
    pub min_singular: f64,
}

impl RankEquivalence {
    /// When `‖P − Q‖ < 1` the ranks agree and the intertwiner is invertible.
    pub fn holds(&self) -> bool {
        self.distance >= 1.0 || (self.rank_p == self.rank_q && self.min_singular > 1e-12)
    }
}

pub fn projector_rank_equivalence(
    p: &QMatrix,
    q: &QMatrix,
    rank_tol: f64,
) -> Result<RankEquivalence> {
    let n = p.n();
    let id = QMatrix::identity(n);
    let w = q.matmul(p)?.add(&id.sub(q)?.matmul(&id.sub(p)?)?)?;
    Ok(RankEquivalence {
        distance: p.sub(q)?.op_norm(),
        rank_p: p.hrank(rank_tol)?,
        rank_q: q.hrank(rank_tol)?,
        min_singular: w.min_singular_value(),
    })
}
