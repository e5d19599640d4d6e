//! Intrinsic polynomials: real coefficients, so each slice ℂ_I maps to itself
//! and every sphere `[q]` maps onto the sphere `[f(q)]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{Quaternion, SpherePoint};
use crate::spectral::s_spectrum;

pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicPoly {
    /// Ascending: `coeffs[k]` multiplies `tᵏ`.
    coeffs: Vec<f64>,
}

impl IntrinsicPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::Domain(format!(
                "degree must be 0..={MAX_DEGREE}, got {} coefficients",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(IntrinsicPoly { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_quaternion(&self, q: Quaternion) -> Quaternion {
        self.coeffs
            .iter()
            .rev()
            .fold(Quaternion::ZERO, |acc, &c| acc * q + Quaternion::real(c))
    }

    /// Horner evaluation `Σ c_k Tᵏ`.
    pub fn eval_matrix(&self, t: &QMatrix) -> QMatrix {
        self.coeffs
            .iter()
            .rev()
            .fold(QMatrix::zeros(t.n()), |acc, &c| {
                acc.matmul(t)
                    .expect("square")
                    .add_scalar(Quaternion::real(c))
            })
    }

    /// Ψ-image of `f([u + I v])`.
    pub fn map_sphere(&self, p: SpherePoint) -> SpherePoint {
        let w = self.eval_complex(p.as_complex());
        SpherePoint::new(w.re, w.im)
    }
}

/// Hausdorff distance between two finite sets in the Ψ half-plane.
pub fn hausdorff(a: &[SpherePoint], b: &[SpherePoint]) -> f64 {
    let one_sided = |x: &[SpherePoint], y: &[SpherePoint]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| p.planar_distance(q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Ψ-plane Hausdorff distance between `σ_S(f(T))` and `f(σ_S(T))`.
/// `cluster_tol` applies to `T`; for `f(T)` it is rescaled by the ratio of
/// the norms, since eigenvalue errors scale with the matrix.
pub fn spectral_mapping_check(f: &IntrinsicPoly, t: &QMatrix, cluster_tol: f64) -> Result<f64> {
    let before = s_spectrum(t, cluster_tol)?;
    let ft = f.eval_matrix(t);
    let ratio = ft.op_norm().max(1.0) / t.op_norm().max(1.0);
    let after = s_spectrum(&ft, cluster_tol * ratio.max(1.0))?;
    let mapped: Vec<SpherePoint> = before
        .spheres
        .iter()
        .map(|s| f.map_sphere(s.point))
        .collect();
    let direct: Vec<SpherePoint> = after.spheres.iter().map(|s| s.point).collect();
    Ok(hausdorff(&direct, &mapped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_limits() {
        assert!(IntrinsicPoly::new(vec![]).is_err());
        assert!(IntrinsicPoly::new(vec![1.0; 10]).is_err());
        assert!(IntrinsicPoly::new(vec![1.0; 9]).is_ok());
    }

    #[test]
    fn horner_matches_quaternion_powers() {
        let f = IntrinsicPoly::new(vec![-1.0, 0.5, 2.0]).unwrap();
        let q = Quaternion::new(0.3, -1.0, 0.5, 2.0);
        let direct = Quaternion::real(-1.0) + q * 0.5 + q * q * 2.0;
        assert!((f.eval_quaternion(q) - direct).norm() < 1e-14);
        let t = QMatrix::diag(&[q]);
        assert!((f.eval_matrix(&t).get(0, 0) - direct).norm() < 1e-14);
    }

    #[test]
    fn mapping_examples() {
        let c = IntrinsicPoly::new(vec![2.5]).unwrap();
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0]);
        assert_eq!(spectral_mapping_check(&c, &t, 1e-7).unwrap(), 0.0);
        let sq = IntrinsicPoly::new(vec![0.0, 0.0, 1.0]).unwrap();
        let tj = QMatrix::diag(&[Quaternion::J]);
        assert_eq!(
            sq.map_sphere(SpherePoint::new(0.0, 1.0)),
            SpherePoint::new(-1.0, 0.0)
        );
        assert!(spectral_mapping_check(&sq, &tj, 1e-7).unwrap() < 1e-12);
    }

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = [SpherePoint::new(0.0, 0.0), SpherePoint::new(1.0, 0.0)];
        let b = [SpherePoint::new(0.0, 0.5)];
        assert!((hausdorff(&a, &b) - 1.25f64.sqrt()).abs() < 1e-15);
    }
}
