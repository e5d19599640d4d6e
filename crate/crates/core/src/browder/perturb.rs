//! Localization of the spectrum of `T_k = T + E/k` near an isolated sphere.

use serde::Serialize;

use super::checks::projector_rank_equivalence;
use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{sphere_distance, SpherePoint};
use crate::scalculus::{riesz_projector, ContourSpec, QuadParams};
use crate::spectral::{s_spectrum, Sphere};

#[derive(Clone, Debug, Serialize)]
pub struct PerturbRow {
    pub k: usize,
    pub spheres: Vec<Sphere>,
    /// `max` over spheres of `T_k` of the distance to the nearest sphere of `T`.
    pub delta: f64,
    /// Rank of the projector of `T_k` on the fixed contour, when it exists.
    pub proj_rank: Option<usize>,
    /// `‖P − P_k‖`.
    pub proj_distance: Option<f64>,
    /// Every sphere of `T_k` within half the gap of the target lies inside
    /// the contour, with total multiplicity equal to the target's.
    pub localized: bool,
    /// `‖P − P_k‖ < 1 ⟹ rank P = rank P_k` (and the intertwiner is
    /// invertible); vacuous when the distance is at least one.
    pub rank_stable: bool,
    pub settled: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbTable {
    pub target: Sphere,
    pub radius: f64,
    pub rank: usize,
    pub rows: Vec<PerturbRow>,
    /// Smallest `k` from which every row is settled.
    pub settled_from: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct PerturbParams {
    pub cluster_tol: f64,
    pub nodes: usize,
    pub quad: QuadParams,
    pub rank_tol: f64,
}

/// Sphere nearest the Ψ-origin, or the one nearest `target` if given.
fn pick_target(spheres: &[Sphere], target: Option<SpherePoint>) -> usize {
    let anchor = target.unwrap_or(SpherePoint::new(0.0, 0.0));
    (0..spheres.len())
        .min_by(|&a, &b| {
            spheres[a]
                .point
                .planar_distance(&anchor)
                .total_cmp(&spheres[b].point.planar_distance(&anchor))
        })
        .expect("nonempty spectrum")
}

pub fn perturbation_localization(
    t: &QMatrix,
    e: &QMatrix,
    k_max: usize,
    target: Option<SpherePoint>,
    params: &PerturbParams,
) -> Result<PerturbTable> {
    let e_norm = e.op_norm();
    if e_norm > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("‖E‖ = {e_norm:.6} exceeds 1")));
    }
    let rep = s_spectrum(t, params.cluster_tol)?;
    let idx = pick_target(&rep.spheres, target);
    if let Some(p) = target {
        if rep.spheres[idx].point.planar_distance(&p) > params.cluster_tol {
            return Err(Error::Precondition(format!("no sphere of T at {p}")));
        }
    }
    let sphere = rep.spheres[idx];
    let gap = rep.gaps[idx];
    let contour = ContourSpec::default_for(sphere.point, gap, params.nodes);
    let p = riesz_projector(t, &contour, gap, &params.quad)?.p;
    let rank = p.hrank(params.rank_tol)?;
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let tk = t.add(&e.scale_real(1.0 / k as f64))?;
        let rk = s_spectrum(&tk, params.cluster_tol)?;
        let delta = rk
            .spheres
            .iter()
            .map(|s| {
                rep.spheres
                    .iter()
                    .map(|r| sphere_distance(s.point, r.point))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        let near: Vec<&Sphere> = rk
            .spheres
            .iter()
            .filter(|s| s.point.planar_distance(&sphere.point) < 0.5 * gap)
            .collect();
        let localized = near.iter().all(|s| contour.encloses(s.point))
            && near.iter().map(|s| s.mult).sum::<usize>() == sphere.mult;
        // A sphere of T_k close to the contour makes the quadrature fail; the
        // row then simply has no projector.
        let pk = riesz_projector(&tk, &contour, gap, &params.quad)
            .ok()
            .map(|pr| pr.p);
        let (proj_rank, proj_distance, rank_stable) = match &pk {
            Some(pk) => {
                let l = projector_rank_equivalence(&p, pk, params.rank_tol)?;
                (Some(l.rank_q), Some(l.distance), l.holds())
            }
            None => (None, None, true),
        };
        let settled = localized && proj_rank == Some(rank);
        rows.push(PerturbRow {
            k,
            spheres: rk.spheres,
            delta,
            proj_rank,
            proj_distance,
            localized,
            rank_stable,
            settled,
        });
    }
    let settled_from = match rows.iter().rposition(|r| !r.settled) {
        None => Some(1),
        Some(i) if i + 1 < rows.len() => Some(rows[i + 1].k),
        Some(_) => None,
    };
    Ok(PerturbTable {
        target: sphere,
        radius: contour.radius,
        rank,
        rows,
        settled_from,
    })
}
