//! Finite-type spheres and the Browder S-resolvent operators.
//!
//! Operators that live on `N(P)` are realized on all of ℍⁿ: the restriction
//! of `Q_q(T)` to `N(P)` is represented by `PQ_q(T) = Q_q(T)(𝕀 − P) + P`,
//! whose inverse agrees with the restricted inverse on `N(P)` and is the
//! identity on `R(P)`.

pub mod checks;
pub mod perturb;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{psi, sphere_distance, Quaternion};
use crate::scalculus::{riesz_projector, ContourSpec, Projection, QuadParams};
use crate::spectral::{pseudo_q, pseudo_q_scalar, SpectrumReport, Sphere};

pub use checks::{
    inverse_perturbation_bound, projector_rank_equivalence, quasinilpotent_check, range_radius,
    InverseBound, QuasiNilpotent, RangeRadius, RankEquivalence, DEFAULT_DECAY_FLOOR,
};
pub use perturb::{perturbation_localization, PerturbParams, PerturbRow, PerturbTable};

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTypeRecord {
    pub sphere: Sphere,
    pub proj_rank: usize,
    pub finite_type: bool,
    pub gap: f64,
    #[serde(skip)]
    pub projection: Projection,
}

/// Riesz projector and rank for every sphere of `rep`; fails unless each
/// rank equals the sphere's multiplicity.
pub fn classify(
    t: &QMatrix,
    rep: &SpectrumReport,
    nodes: usize,
    params: &QuadParams,
    rank_tol: f64,
) -> Result<Vec<FiniteTypeRecord>> {
    if rep.spheres.len() > 1 && !(rep.min_gap() > 2.0 * rep.cluster_tol) {
        return Err(Error::Precondition(format!(
            "spheres not isolated: gap {:.3e} ≤ 2·cluster_tol",
            rep.min_gap()
        )));
    }
    rep.spheres
        .iter()
        .zip(&rep.gaps)
        .map(|(s, &gap)| {
            let c = ContourSpec::default_for(s.point, gap, nodes);
            let projection = riesz_projector(t, &c, gap, params)?;
            let rank = projection.p.hrank(rank_tol)?;
            if rank != s.mult {
                return Err(Error::RankMismatch { rank, mult: s.mult });
            }
            Ok(FiniteTypeRecord {
                sphere: *s,
                proj_rank: rank,
                finite_type: rank <= t.n(),
                gap,
                projection,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Resolvent,
    FiniteType,
}

/// A point of `ρ_S(T) ∪ σ_d^S(T)` together with its Riesz projector
/// (zero on the resolvent set).
#[derive(Clone, Debug)]
pub struct BrowderPoint {
    pub q: Quaternion,
    pub status: PointStatus,
    pub p: QMatrix,
    /// Index of the sphere in the report, for finite-type points.
    pub sphere: Option<usize>,
}

impl BrowderPoint {
    pub fn resolvent(q: Quaternion, n: usize) -> Self {
        BrowderPoint {
            q,
            status: PointStatus::Resolvent,
            p: QMatrix::zeros(n),
            sphere: None,
        }
    }

    pub fn finite_type(q: Quaternion, p: QMatrix, sphere: usize) -> Self {
        BrowderPoint {
            q,
            status: PointStatus::FiniteType,
            p,
            sphere: Some(sphere),
        }
    }

    /// Finite type when `psi(q)` is within `rep.cluster_tol` of a sphere.
    pub fn locate(q: Quaternion, rep: &SpectrumReport, records: &[FiniteTypeRecord]) -> Self {
        match rep.locate(psi(q), rep.cluster_tol) {
            Some(i) => BrowderPoint::finite_type(q, records[i].projection.p.clone(), i),
            None => BrowderPoint::resolvent(q, records.first().map_or(0, |r| r.projection.p.n())),
        }
    }

    fn complement(&self) -> QMatrix {
        self.p.scale_real(-1.0).add_scalar(Quaternion::ONE)
    }
}

/// `Q_q(T)(𝕀 − P) + P`.
pub fn pq_op(b: &BrowderPoint, t: &QMatrix) -> Result<QMatrix> {
    pseudo_q(b.q, t).matmul(&b.complement())?.add(&b.p)
}

/// `PR_{B,S}(q,T) = PQ_q(T)⁻¹`.
pub fn pr_bs(b: &BrowderPoint, t: &QMatrix) -> Result<QMatrix> {
    pq_op(b, t)?.invert()
}

/// `−PR_{B,S}(q,T)(T − q̄𝕀)(𝕀 − P) − P`.
pub fn browder_resolvent_left(b: &BrowderPoint, t: &QMatrix) -> Result<QMatrix> {
    let r = pr_bs(b, t)?;
    let core = r
        .matmul(&t.add_scalar(-b.q.conj()))?
        .matmul(&b.complement())?;
    Ok(core.add(&b.p)?.scale_real(-1.0))
}

/// `−(T − q̄𝕀) PR_{B,S}(q,T)(𝕀 − P) − P`.
pub fn browder_resolvent_right(b: &BrowderPoint, t: &QMatrix) -> Result<QMatrix> {
    let r = pr_bs(b, t)?;
    let core = t
        .add_scalar(-b.q.conj())
        .matmul(&r)?
        .matmul(&b.complement())?;
    Ok(core.add(&b.p)?.scale_real(-1.0))
}

/// Operator-norm residuals of the left and right Browder S-resolvent
/// equations
/// `(L) S_{L,B}⁻¹(𝕀−P)q − T(𝕀−P)S_{L,B}⁻¹ + P − 𝕀` and
/// `(R) q(𝕀−P)S_{R,B}⁻¹ − S_{R,B}⁻¹(𝕀−P)T + P − 𝕀`.
pub fn browder_equation_residuals(b: &BrowderPoint, t: &QMatrix) -> Result<(f64, f64)> {
    let comp = b.complement();
    let sl = browder_resolvent_left(b, t)?;
    let sr = browder_resolvent_right(b, t)?;
    let left = sl
        .matmul(&comp)?
        .scale_right(b.q)
        .sub(&t.matmul(&comp)?.matmul(&sl)?)?
        .add(&b.p)?
        .add_scalar(-Quaternion::ONE);
    let right = comp
        .matmul(&sr)?
        .scale_left(b.q)
        .sub(&sr.matmul(&comp)?.matmul(t)?)?
        .add(&b.p)?
        .add_scalar(-Quaternion::ONE);
    Ok((left.op_norm(), right.op_norm()))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProductResiduals {
    /// Residual of the displayed form, with `Q_s(p)` applied on the right of
    /// the product.
    pub displayed: f64,
    /// Residual after moving `Q_s(p)⁻¹` onto the right-hand side.
    pub normalized: f64,
}

/// Residuals of the Browder S-resolvent equation for `p ∉ [s]`.
pub fn browder_product_residuals(
    s: &BrowderPoint,
    p: &BrowderPoint,
    t: &QMatrix,
    sphere_tol: f64,
) -> Result<ProductResiduals> {
    if sphere_distance(psi(s.q), psi(p.q)) <= sphere_tol {
        return Err(Error::Precondition(format!(
            "p = {} lies on the sphere of s = {}",
            p.q, s.q
        )));
    }
    let qsp = pseudo_q_scalar(s.q, p.q);
    let a = browder_resolvent_right(s, t)?;
    let b = browder_resolvent_left(p, t)?;
    let sbar = s.q.conj();
    let tp = t.add_scalar(-(p.q + Quaternion::ONE)).matmul(&p.p)?;
    let ts = t.add_scalar(-(s.q + Quaternion::ONE)).matmul(&s.p)?;
    let x = a.matmul(&tp)?;
    let y = ts.matmul(&b)?;
    let a_minus_b = a.sub(&b)?;
    let x_minus_y = x.sub(&y)?;
    let rhs = a_minus_b
        .scale_right(p.q)
        .sub(&a_minus_b.scale_left(sbar))?
        .add(&x_minus_y.scale_right(p.q))?
        .sub(&x_minus_y.scale_left(sbar))?;
    let ab = a.matmul(&b)?;
    let displayed = ab.scale_right(qsp).sub(&rhs)?.op_norm();
    let normalized = ab.sub(&rhs.scale_right(qsp.inv()?))?.op_norm();
    Ok(ProductResiduals {
        displayed,
        normalized,
    })
}

/// Residual of the commutative factored form
/// `S_{R,B}⁻¹(s)S_{L,B}⁻¹(p)Q_s(p) = (S_{R,B}⁻¹(s) − S_{L,B}⁻¹(p))(p − s̄) + M(s,p)`,
/// `M(s,p) = (p − s̄)[S_{R,B}⁻¹(s)(T−(p+1)𝕀)P_[p] − S_{L,B}⁻¹(p)(T−(s+1)𝕀)P_[s]]`,
/// meaningful when `T`, `s` and `p` all commute.
pub fn factored_form_residual(s: &BrowderPoint, p: &BrowderPoint, t: &QMatrix) -> Result<f64> {
    let qsp = pseudo_q_scalar(s.q, p.q);
    let a = browder_resolvent_right(s, t)?;
    let b = browder_resolvent_left(p, t)?;
    let factor = p.q - s.q.conj();
    let tp = t.add_scalar(-(p.q + Quaternion::ONE)).matmul(&p.p)?;
    let ts = t.add_scalar(-(s.q + Quaternion::ONE)).matmul(&s.p)?;
    let m = a.matmul(&tp)?.sub(&b.matmul(&ts)?)?.scale_left(factor);
    let rhs = a.sub(&b)?.scale_right(factor).add(&m)?;
    Ok(a.matmul(&b)?.scale_right(qsp).sub(&rhs)?.op_norm())
}
