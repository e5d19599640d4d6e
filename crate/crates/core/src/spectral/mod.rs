//! The S-spectrum as a set of eigenspheres.
//!
//! Eigenvalues of `chi(T)` come in conjugate pairs; mapping each to
//! `(Re λ, |Im λ|)` collapses a pair onto one point of the half-plane, and
//! every sphere `[q] ⊂ σ_S(T)` shows up as a cluster of such points.

pub mod eig;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{sphere_distance, Quaternion, SpherePoint};

pub use eig::{complex_eigs, Eigen};

/// An eigensphere with quaternionic algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sphere {
    pub point: SpherePoint,
    pub mult: usize,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Sorted by `(u, v)`.
    pub spheres: Vec<Sphere>,
    /// Distance from each sphere to the rest; infinite when alone.
    pub gaps: Vec<f64>,
    pub eig_residual: f64,
    pub cluster_tol: f64,
}

impl Serialize for SpectrumReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            u: f64,
            v: f64,
            mult: usize,
            gap: f64,
        }
        let entries: Vec<Entry> = self
            .spheres
            .iter()
            .zip(&self.gaps)
            .map(|(sp, &gap)| Entry {
                u: sp.point.u,
                v: sp.point.v,
                mult: sp.mult,
                gap,
            })
            .collect();
        let mut st = s.serialize_struct("SpectrumReport", 3)?;
        st.serialize_field("spheres", &entries)?;
        st.serialize_field("eig_residual", &self.eig_residual)?;
        st.serialize_field("cluster_tol", &self.cluster_tol)?;
        st.end()
    }
}

impl SpectrumReport {
    pub fn total_mult(&self) -> usize {
        self.spheres.iter().map(|s| s.mult).sum()
    }

    /// Index of the sphere within `tol` of `p` in the Ψ-plane, if any.
    pub fn locate(&self, p: SpherePoint, tol: f64) -> Option<usize> {
        self.spheres
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.point.planar_distance(&p)))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    /// Smallest pairwise gap, infinite for a single sphere.
    pub fn min_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn default_cluster_tol(t: &QMatrix) -> f64 {
    1e-7 * t.op_norm().max(1.0)
}

/// Eigenspheres of `T`, clustered with tolerance `cluster_tol`.
pub fn s_spectrum(t: &QMatrix, cluster_tol: f64) -> Result<SpectrumReport> {
    if !(cluster_tol > 0.0) {
        return Err(Error::Domain("cluster_tol must be positive".into()));
    }
    let eigen = complex_eigs(&t.chi())?;
    let points: Vec<SpherePoint> = eigen
        .values
        .iter()
        .map(|l| SpherePoint::new(l.re, l.im))
        .collect();
    let groups = cluster(&points, cluster_tol);
    let mut spheres = Vec::with_capacity(groups.len());
    for g in groups {
        let k = g.len() as f64;
        let u = g.iter().map(|&i| points[i].u).sum::<f64>() / k;
        let mut v = g.iter().map(|&i| points[i].v).sum::<f64>() / k;
        if v < cluster_tol {
            v = 0.0;
        }
        if g.len() % 2 != 0 {
            return Err(Error::Parity {
                u,
                v,
                count: g.len(),
            });
        }
        spheres.push(Sphere {
            point: SpherePoint::new(u, v),
            mult: g.len() / 2,
        });
    }
    spheres.sort_by(|a, b| {
        a.point
            .u
            .total_cmp(&b.point.u)
            .then(a.point.v.total_cmp(&b.point.v))
    });
    let gaps = sphere_gaps(&spheres);
    Ok(SpectrumReport {
        spheres,
        gaps,
        eig_residual: eigen.residual,
        cluster_tol,
    })
}

fn sphere_gaps(spheres: &[Sphere]) -> Vec<f64> {
    (0..spheres.len())
        .map(|i| {
            spheres
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, t)| sphere_distance(spheres[i].point, t.point))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Single-linkage clusters under planar distance `<= tol`, each listed in
/// increasing index order, clusters ordered by their first index.
fn cluster(points: &[SpherePoint], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].planar_distance(&points[j]) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// `Q_q(T) = T² − 2Re(q) T + |q|² 𝕀`.
pub fn pseudo_q(q: Quaternion, t: &QMatrix) -> QMatrix {
    let t2 = t.matmul(t).expect("square");
    t2.sub(&t.scale_real(2.0 * q.re()))
        .expect("same size")
        .add_scalar(Quaternion::real(q.norm_sqr()))
}

/// `Q_s(p) = p² − 2Re(s) p + |s|²` for quaternion scalars.
pub fn pseudo_q_scalar(s: Quaternion, p: Quaternion) -> Quaternion {
    p * p - p * (2.0 * s.re()) + Quaternion::real(s.norm_sqr())
}

/// Minimum sphere distance from sphere `idx` to the rest of the report.
pub fn isolation_gap(idx: usize, rep: &SpectrumReport) -> f64 {
    rep.gaps[idx]
}

/// `max |λ|` over eigenvalues of `chi(T)`.
pub fn s_spectral_radius(t: &QMatrix) -> Result<f64> {
    let e = complex_eigs(&t.chi())?;
    Ok(e.values.iter().map(|l| l.norm()).fold(0.0, f64::max))
}
