//! Slice contours and trapezoid quadrature of S-resolvent integrals.
//!
//! A contour around the sphere `(u, v)` lives in the slice ℂ_I and consists
//! of the circles `|z − (u ± I v)| = ε` (one circle when `v = 0`). Nodes are
//! `q_k = c + ε e^{I θ_k}`, `θ_k = 2πk/N`, and the left integral
//! `(1/2π) ∮ S_L⁻¹(q,T) dq_I f(q)` becomes
//! `(1/N) Σ_k S_L⁻¹(q_k,T) · ε e^{I θ_k} f(q_k)` with the scalar applied on the
//! right.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::poly::IntrinsicPoly;
use super::{s_resolvent_left, s_resolvent_right};
use crate::error::{Error, Result};
use crate::qmat::{pairwise_sum, QMatrix};
use crate::quat::{SliceUnit, SpherePoint};
use crate::spectral::SpectrumReport;

pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_N_MAX: usize = 8192;
pub const DEFAULT_PROJ_TOL: f64 = 1e-8;

/// Radius used around a lone real sphere, where no gap bounds ε.
const LONE_REAL_RADIUS: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadParams {
    pub proj_tol: f64,
    pub n_max: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams {
            proj_tol: DEFAULT_PROJ_TOL,
            n_max: DEFAULT_N_MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub sphere: SpherePoint,
    pub radius: f64,
    /// Nodes per circle at the first quadrature level.
    pub nodes: usize,
    pub slice: SliceUnit,
}

impl ContourSpec {
    /// `ε = 0.45·min(gap, v)` for nonreal spheres, `0.45·gap` for real ones.
    pub fn default_for(sphere: SpherePoint, gap: f64, nodes: usize) -> ContourSpec {
        let bound = if sphere.v > 0.0 {
            gap.min(sphere.v)
        } else {
            gap
        };
        let radius = if bound.is_finite() {
            0.45 * bound
        } else {
            LONE_REAL_RADIUS
        };
        ContourSpec {
            sphere,
            radius,
            nodes,
            slice: SliceUnit::I,
        }
    }

    pub fn circles(&self) -> usize {
        if self.sphere.v > 0.0 {
            2
        } else {
            1
        }
    }

    fn centers(&self) -> Vec<Complex64> {
        let c = self.sphere.as_complex();
        if self.circles() == 2 {
            vec![c, c.conj()]
        } else {
            vec![c]
        }
    }

    /// Checks `N`, and `ε` against the isolation gap and, for two circles, `v`.
    pub fn validate(&self, gap: f64) -> Result<()> {
        if self.nodes < 16 || !self.nodes.is_power_of_two() {
            return Err(Error::Contour(format!(
                "node count {} is not a power of two ≥ 16",
                self.nodes
            )));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Contour(format!(
                "radius {} must be positive and finite",
                self.radius
            )));
        }
        if !(self.radius < gap) {
            return Err(Error::Contour(format!(
                "radius {} not below the isolation gap {gap}",
                self.radius
            )));
        }
        if self.circles() == 2 && !(self.radius < self.sphere.v) {
            return Err(Error::Contour(format!(
                "radius {} would merge the circles around u ± I{}",
                self.radius, self.sphere.v
            )));
        }
        Ok(())
    }

    /// True when the Ψ-point `p` lies strictly inside the contour.
    pub fn encloses(&self, p: SpherePoint) -> bool {
        self.sphere.planar_distance(&p) < self.radius
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Left,
    Right,
}

/// Unnormalized node sum over every circle at level `n`, restricted to odd
/// indices when refining from level `n/2`.
fn node_sum(
    t: &QMatrix,
    c: &ContourSpec,
    n: usize,
    odd_only: bool,
    kernel: Kernel,
    f: Option<&IntrinsicPoly>,
) -> Result<QMatrix> {
    let centers = c.centers();
    let step = if odd_only { 2 } else { 1 };
    let start = usize::from(odd_only);
    let jobs: Vec<(Complex64, usize)> = centers
        .iter()
        .flat_map(|&ctr| (start..n).step_by(step).map(move |k| (ctr, k)))
        .collect();
    let terms: Vec<QMatrix> = jobs
        .par_iter()
        .map(|&(ctr, k)| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let e = Complex64::from_polar(c.radius, theta);
            let z = ctr + e;
            let w = match f {
                Some(f) => e * f.eval_complex(z),
                None => e,
            };
            let q = c.slice.embed(z);
            let wq = c.slice.embed(w);
            match kernel {
                Kernel::Left => Ok(s_resolvent_left(q, t)?.scale_right(wq)),
                Kernel::Right => Ok(s_resolvent_right(q, t)?.scale_left(wq)),
            }
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms).unwrap_or_else(|| QMatrix::zeros(t.n())))
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub p: QMatrix,
    /// Nodes per circle at which the projector was accepted.
    pub nodes: usize,
    /// `‖P² − P‖`.
    pub idempotency: f64,
}

fn projector_with(
    t: &QMatrix,
    c: &ContourSpec,
    gap: f64,
    params: &QuadParams,
    kernel: Kernel,
) -> Result<Projection> {
    c.validate(gap)?;
    let mut n = c.nodes;
    let mut sum = node_sum(t, c, n, false, kernel, None)?;
    loop {
        let p = sum.scale_real(1.0 / n as f64);
        let idempotency = p.matmul(&p)?.sub(&p)?.op_norm();
        if idempotency <= params.proj_tol {
            return Ok(Projection {
                p,
                nodes: n,
                idempotency,
            });
        }
        if 2 * n > params.n_max {
            return Err(Error::NonIdempotent {
                nodes: n,
                residual: idempotency,
            });
        }
        n *= 2;
        sum = sum.add(&node_sum(t, c, n, true, kernel, None)?)?;
    }
}

/// Riesz projector of the sphere enclosed by `c`, from the left S-resolvent.
/// Nodes double until `‖P² − P‖ ≤ proj_tol`.
pub fn riesz_projector(
    t: &QMatrix,
    c: &ContourSpec,
    gap: f64,
    params: &QuadParams,
) -> Result<Projection> {
    projector_with(t, c, gap, params, Kernel::Left)
}

/// Same projector from the right kernel `(1/2π) ∮ dq_I S_R⁻¹(q,T)`.
pub fn riesz_projector_right(
    t: &QMatrix,
    c: &ContourSpec,
    gap: f64,
    params: &QuadParams,
) -> Result<Projection> {
    projector_with(t, c, gap, params, Kernel::Right)
}

/// `f(T)` by contour integration, one default contour per sphere of `rep`.
/// Nodes double until successive levels agree to `proj_tol·max(1, ‖f(T)‖)`.
/// Returns the value and the final node count per circle.
pub fn func_calc(
    f: &IntrinsicPoly,
    t: &QMatrix,
    rep: &SpectrumReport,
    nodes: usize,
    params: &QuadParams,
) -> Result<(QMatrix, usize)> {
    let contours: Vec<ContourSpec> = rep
        .spheres
        .iter()
        .zip(&rep.gaps)
        .map(|(s, &g)| ContourSpec::default_for(s.point, g, nodes))
        .collect();
    for (c, &g) in contours.iter().zip(&rep.gaps) {
        c.validate(g)?;
    }
    if let Some(s) = rep
        .spheres
        .iter()
        .find(|s| !contours.iter().any(|c| c.encloses(s.point)))
    {
        return Err(Error::Contour(format!(
            "sphere {} is not enclosed",
            s.point
        )));
    }
    let level = |n: usize, odd: bool| -> Result<QMatrix> {
        let parts = contours
            .iter()
            .map(|c| node_sum(t, c, n, odd, Kernel::Left, Some(f)))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&parts).unwrap_or_else(|| QMatrix::zeros(t.n())))
    };
    let mut n = nodes;
    let mut sum = level(n, false)?;
    let mut prev = sum.scale_real(1.0 / n as f64);
    loop {
        if 2 * n > params.n_max {
            let r = f.eval_matrix(t).sub(&prev)?.op_norm();
            return Err(Error::NonIdempotent {
                nodes: n,
                residual: r,
            });
        }
        n *= 2;
        sum = sum.add(&level(n, true)?)?;
        let cur = sum.scale_real(1.0 / n as f64);
        let diff = cur.sub(&prev)?.op_norm();
        if diff <= params.proj_tol * cur.op_norm().max(1.0) {
            return Ok((cur, n));
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use crate::spectral::s_spectrum;

    fn diag_i_2j() -> QMatrix {
        QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0])
    }

    #[test]
    fn default_radii() {
        let c = ContourSpec::default_for(SpherePoint::new(0.0, 1.0), 1.0, 256);
        assert!((c.radius - 0.45).abs() < 1e-15);
        assert_eq!(c.circles(), 2);
        let c = ContourSpec::default_for(SpherePoint::new(1.0, 0.0), 2.0, 256);
        assert!((c.radius - 0.9).abs() < 1e-15);
        assert_eq!(c.circles(), 1);
        assert_eq!(
            ContourSpec::default_for(SpherePoint::new(1.0, 0.0), f64::INFINITY, 256).radius,
            1.0
        );
    }

    #[test]
    fn invalid_contours_rejected() {
        let base = ContourSpec::default_for(SpherePoint::new(0.0, 1.0), 1.0, 256);
        assert!(matches!(
            ContourSpec { nodes: 100, ..base }.validate(1.0),
            Err(Error::Contour(_))
        ));
        assert!(matches!(
            ContourSpec { nodes: 8, ..base }.validate(1.0),
            Err(Error::Contour(_))
        ));
        assert!(matches!(
            ContourSpec {
                radius: 1.0,
                ..base
            }
            .validate(1.0),
            Err(Error::Contour(_))
        ));
        assert!(matches!(
            ContourSpec {
                radius: 0.9,
                ..base
            }
            .validate(5.0),
            Ok(())
        ));
        let wide = ContourSpec {
            sphere: SpherePoint::new(0.0, 0.5),
            radius: 0.6,
            ..base
        };
        assert!(matches!(wide.validate(5.0), Err(Error::Contour(_))));
    }

    #[test]
    fn projector_of_diag_example() {
        let t = diag_i_2j();
        let rep = s_spectrum(&t, 1e-7).unwrap();
        let c = ContourSpec::default_for(rep.spheres[0].point, rep.gaps[0], DEFAULT_NODES);
        let pr = riesz_projector(&t, &c, rep.gaps[0], &QuadParams::default()).unwrap();
        let expect = QMatrix::diag(&[Quaternion::ONE, Quaternion::ZERO]);
        assert!(pr.p.sub(&expect).unwrap().op_norm() < 1e-12);
        let right = riesz_projector_right(&t, &c, rep.gaps[0], &QuadParams::default()).unwrap();
        assert!(right.p.sub(&expect).unwrap().op_norm() < 1e-12);
    }

    #[test]
    fn real_sphere_single_circle() {
        let t = QMatrix::diag(&[Quaternion::ONE, Quaternion::J * 2.0]);
        let rep = s_spectrum(&t, 1e-7).unwrap();
        let idx = rep.locate(SpherePoint::new(1.0, 0.0), 1e-9).unwrap();
        let c = ContourSpec::default_for(rep.spheres[idx].point, rep.gaps[idx], DEFAULT_NODES);
        assert_eq!(c.circles(), 1);
        let pr = riesz_projector(&t, &c, rep.gaps[idx], &QuadParams::default()).unwrap();
        assert!(
            pr.p.sub(&QMatrix::diag(&[Quaternion::ONE, Quaternion::ZERO]))
                .unwrap()
                .op_norm()
                < 1e-12
        );
    }

    #[test]
    fn func_calc_identity_and_linear() {
        let t = diag_i_2j();
        let rep = s_spectrum(&t, 1e-7).unwrap();
        let one = IntrinsicPoly::new(vec![1.0]).unwrap();
        let (v, _) = func_calc(&one, &t, &rep, DEFAULT_NODES, &QuadParams::default()).unwrap();
        assert!(v.sub(&QMatrix::identity(2)).unwrap().op_norm() < 1e-12);
        let lin = IntrinsicPoly::new(vec![0.0, 1.0]).unwrap();
        let (v, _) = func_calc(&lin, &t, &rep, DEFAULT_NODES, &QuadParams::default()).unwrap();
        assert!(v.sub(&t).unwrap().op_norm() < 1e-12);
    }

    #[test]
    fn refinement_halves_error_geometrically() {
        let t = diag_i_2j();
        let rep = s_spectrum(&t, 1e-7).unwrap();
        let c = ContourSpec {
            nodes: 16,
            ..ContourSpec::default_for(rep.spheres[1].point, rep.gaps[1], 16)
        };
        let exact = QMatrix::diag(&[Quaternion::ZERO, Quaternion::ONE]);
        let mut errs = Vec::new();
        let mut sum = node_sum(&t, &c, 16, false, Kernel::Left, None).unwrap();
        let mut n = 16;
        for _ in 0..3 {
            errs.push(
                sum.scale_real(1.0 / n as f64)
                    .sub(&exact)
                    .unwrap()
                    .op_norm(),
            );
            n *= 2;
            sum = sum
                .add(&node_sum(&t, &c, n, true, Kernel::Left, None).unwrap())
                .unwrap();
        }
        assert!(errs[1] <= 0.5 * errs[0] || errs[1] < 1e-14);
        assert!(errs[2] <= 0.5 * errs[1] || errs[2] < 1e-14);
    }
}
