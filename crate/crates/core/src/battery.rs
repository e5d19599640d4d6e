//! The verification battery behind `quatspec verify`.
//!
//! Each case draws its own ChaCha8 stream from `(seed, case index)`, so cases
//! run in parallel while the report stays byte-identical for a given seed.
//! Residuals are reported already divided by the scale named in the
//! identity table, so `max_residual` and `tolerance` are directly comparable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::browder::{
    browder_equation_residuals, browder_product_residuals, browder_resolvent_left,
    browder_resolvent_right, classify, factored_form_residual, inverse_perturbation_bound,
    projector_rank_equivalence, quasinilpotent_check, range_radius, BrowderPoint, FiniteTypeRecord,
    PointStatus, DEFAULT_DECAY_FLOOR,
};
use crate::error::{Error, Result};
use crate::oracle::{
    random_matrix, random_oracle, random_quaternion, random_real_entry_oracle, random_real_poly,
    random_similarity, random_unit, OracleMatrix, OracleParams, Similarity,
};
use crate::qmat::{vector_norm, QMatrix, DEFAULT_RANK_TOL};
use crate::quat::{psi, slice_embed, sphere_distance, Quaternion, SliceUnit, SpherePoint};
use crate::scalculus::{
    cauchy_series_left, cauchy_series_right, cauchy_terms, func_calc, left_resolvent_equation,
    riesz_projector_right, right_resolvent_equation, s_resolvent_equation, s_resolvent_left,
    s_resolvent_right, spectral_mapping_check, ContourSpec, IntrinsicPoly, QuadParams,
};
use crate::spectral::{default_cluster_tol, s_spectrum, SpectrumReport};

/// `(name, scale, tolerance)`, in report order. Scales: `1` absolute,
/// `T` divides by `max(1, ‖T‖)`, `T2`/`T3` by its square/cube, `f(T)` by
/// `‖f(T)‖`, `chi` by `‖chi(S)‖_F ‖chi(T)‖_F`.
pub const IDENTITIES: &[(&str, &str, f64)] = &[
    ("chi_homomorphism", "chi", 1e-11),
    ("eigen_residual", "1", 1e-9),
    ("multiplicity_sum", "1", 0.0),
    ("spectrum_points", "1", 1e-7),
    ("spectrum_multiplicities", "1", 0.0),
    ("projector_idempotent", "1", 1e-8),
    ("projector_commutes_with_t", "T", 1e-8),
    ("projector_scalar_commutation", "1", 1e-8),
    ("projector_matches_oracle", "1", 1e-7),
    ("projector_right_kernel", "1", 1e-7),
    ("projector_completeness", "1", 1e-7),
    ("projector_rank_sum", "1", 0.0),
    ("functional_calculus", "f(T)", 1e-7),
    ("spectral_mapping", "1", 1e-6),
    ("cauchy_series_left", "1", 1e-9),
    ("cauchy_series_right", "1", 1e-9),
    ("left_resolvent_equation", "1", 1e-9),
    ("right_resolvent_equation", "1", 1e-9),
    ("browder_extends_resolvent", "1", 1e-10),
    ("browder_equation_left", "T2", 1e-7),
    ("browder_equation_right", "T2", 1e-7),
    ("browder_product", "T3", 1e-6),
    ("browder_product_normalized", "T3", 1e-6),
    ("browder_product_resolvent_pairs", "1", 1e-8),
    ("commutative_factored_form", "1", 1e-8),
    ("range_decay", "1", 1e-6),
    ("range_growth_deficit", "1", 0.0),
    ("quasinilpotent_radius", "T2", 1e-6),
    ("perturbed_condition", "1", 1e10),
    ("nilpotent_neumann", "1", 1e-8),
    ("nilpotent_commutator", "T2", 1e-8),
    ("inverse_perturbation_ratio", "1", 1.0),
    ("projector_rank_equivalence", "1", 0.0),
    ("case_errors", "1", 0.0),
];

#[derive(Clone, Debug)]
pub struct BatteryConfig {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub similarity: Similarity,
    /// `None` uses `1e-7·max(1, ‖T‖)` per matrix.
    pub cluster_tol: Option<f64>,
    pub quad: QuadParams,
    pub nodes: usize,
    /// Negative control: perturbs the first projector of every case.
    pub corrupt_projector: bool,
}

impl BatteryConfig {
    pub fn new(n: usize, count: usize, seed: u64) -> Self {
        BatteryConfig {
            n,
            count,
            seed,
            similarity: Similarity::Real,
            cluster_tol: None,
            quad: QuadParams::default(),
            nodes: crate::scalculus::DEFAULT_NODES,
            corrupt_projector: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub count: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub scale: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Provenance {
    Seeded {
        seed: u64,
        n: usize,
        count: usize,
        similarity: &'static str,
    },
    File {
        sha256: String,
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseError {
    pub case: usize,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub provenance: Provenance,
    pub identities: Vec<IdentityResult>,
    pub errors: Vec<CaseError>,
    pub pass: bool,
    pub first_failure: Option<&'static str>,
}

impl VerifyReport {
    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.identities.iter().find(|r| r.name == name)
    }
}

#[derive(Default)]
struct Samples(Vec<(&'static str, f64)>);

impl Samples {
    fn push(&mut self, name: &'static str, residual: f64) {
        debug_assert!(
            IDENTITIES.iter().any(|(n, _, _)| *n == name),
            "unknown identity {name}"
        );
        self.0.push((name, residual));
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn run_random(cfg: &BatteryConfig) -> Result<VerifyReport> {
    if cfg.n == 0 || cfg.n > 32 {
        return Err(Error::Domain(format!(
            "battery size {} outside 1..=32",
            cfg.n
        )));
    }
    let params = OracleParams {
        similarity: cfg.similarity,
        ..OracleParams::default()
    };
    let outcomes: Vec<std::result::Result<Samples, String>> = (0..cfg.count)
        .into_par_iter()
        .map(|case| {
            let mut rng = case_rng(cfg.seed, case);
            let oracle = random_oracle(cfg.n, &params, &mut rng);
            let real = random_real_entry_oracle(cfg.n, &params, &mut rng);
            run_case(&oracle.t, Some(&oracle), Some(&real.t), &mut rng, cfg)
                .map_err(|e| e.to_string())
        })
        .collect();
    let provenance = Provenance::Seeded {
        seed: cfg.seed,
        n: cfg.n,
        count: cfg.count,
        similarity: match cfg.similarity {
            Similarity::Real => "real",
            Similarity::Quaternionic => "quaternionic",
        },
    };
    Ok(assemble(provenance, outcomes))
}

/// Battery on a single given matrix; oracle-only identities are skipped.
pub fn run_file(t: &QMatrix, bytes: &[u8], cfg: &BatteryConfig) -> VerifyReport {
    let sha256 = Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    let mut rng = case_rng(cfg.seed, 0);
    let real = t.is_real().then_some(t);
    let outcome = run_case(t, None, real, &mut rng, cfg).map_err(|e| e.to_string());
    assemble(
        Provenance::File {
            sha256,
            seed: cfg.seed,
        },
        vec![outcome],
    )
}

fn assemble(
    provenance: Provenance,
    outcomes: Vec<std::result::Result<Samples, String>>,
) -> VerifyReport {
    let mut errors = Vec::new();
    let mut all: Vec<(&'static str, f64)> = Vec::new();
    for (case, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(s) => all.extend(s.0),
            Err(message) => errors.push(CaseError { case, message }),
        }
    }
    all.push(("case_errors", errors.len() as f64));
    let identities: Vec<IdentityResult> = IDENTITIES
        .iter()
        .filter_map(|&(name, scale, tolerance)| {
            let vals: Vec<f64> = all
                .iter()
                .filter(|(n, _)| *n == name)
                .map(|&(_, v)| v)
                .collect();
            if vals.is_empty() {
                return None;
            }
            let pass = vals.iter().all(|&v| v <= tolerance);
            let max_residual = vals.iter().copied().fold(0.0, |a: f64, b| {
                if b.is_nan() || a.is_nan() {
                    f64::NAN
                } else {
                    a.max(b)
                }
            });
            Some(IdentityResult {
                name,
                count: vals.len(),
                max_residual,
                tolerance,
                scale,
                pass,
            })
        })
        .collect();
    let first_failure = identities.iter().find(|r| !r.pass).map(|r| r.name);
    VerifyReport {
        provenance,
        identities,
        errors,
        pass: first_failure.is_none(),
        first_failure,
    }
}

fn op(a: &QMatrix, b: &QMatrix) -> f64 {
    a.sub(b).map(|d| d.op_norm()).unwrap_or(f64::INFINITY)
}

/// A point of `ρ_S(T)` at Ψ-distance at least `margin` from every sphere.
fn resolvent_point(
    rep: &SpectrumReport,
    radius: f64,
    margin: f64,
    rng: &mut ChaCha8Rng,
) -> Quaternion {
    loop {
        let p = SpherePoint::new(rng.gen_range(-radius..radius), rng.gen_range(0.0..radius));
        if rep
            .spheres
            .iter()
            .all(|s| sphere_distance(s.point, p) >= margin)
        {
            return slice_embed(p, random_unit(rng));
        }
    }
}

fn run_case(
    t: &QMatrix,
    oracle: Option<&OracleMatrix>,
    real: Option<&QMatrix>,
    rng: &mut ChaCha8Rng,
    cfg: &BatteryConfig,
) -> Result<Samples> {
    let n = t.n();
    let mut out = Samples::default();
    let tn = t.op_norm().max(1.0);

    let other = random_matrix(n, rng);
    let (ct, co) = (t.chi(), other.chi());
    let scale = ct.frobenius_norm() * co.frobenius_norm();
    let prod = t
        .matmul(&other)?
        .chi()
        .sub(&ct.matmul(&co)?)?
        .frobenius_norm();
    let sum = t.add(&other)?.chi().sub(&ct.add(&co)?)?.frobenius_norm();
    out.push(
        "chi_homomorphism",
        prod.max(sum) / scale.max(f64::MIN_POSITIVE),
    );

    let cluster_tol = cfg.cluster_tol.unwrap_or_else(|| default_cluster_tol(t));
    let rep = s_spectrum(t, cluster_tol)?;
    out.push("eigen_residual", rep.eig_residual);
    out.push(
        "multiplicity_sum",
        (rep.total_mult() as f64 - n as f64).abs(),
    );
    let matched = oracle.filter(|o| {
        o.spheres.len() == rep.spheres.len()
            && o.spheres
                .iter()
                .zip(&rep.spheres)
                .all(|(a, b)| a.mult == b.mult)
    });
    if oracle.is_some() {
        out.push(
            "spectrum_multiplicities",
            if matched.is_some() { 0.0 } else { 1.0 },
        );
    }
    if let Some(o) = matched {
        for (a, b) in o.spheres.iter().zip(&rep.spheres) {
            out.push("spectrum_points", a.point.planar_distance(&b.point));
        }
    }

    let mut records = classify(t, &rep, cfg.nodes, &cfg.quad, DEFAULT_RANK_TOL)?;
    if cfg.corrupt_projector {
        let p = &mut records[0].projection.p;
        p.set(0, 0, p.get(0, 0) + Quaternion::real(1e-3));
    }
    let mut total = QMatrix::zeros(n);
    let mut rank_sum = 0;
    for (i, r) in records.iter().enumerate() {
        let p = &r.projection.p;
        out.push("projector_idempotent", op(&p.matmul(p)?, p));
        out.push(
            "projector_commutes_with_t",
            op(&p.matmul(t)?, &t.matmul(p)?) / tn,
        );
        for _ in 0..3 {
            let q = random_quaternion(rng);
            out.push(
                "projector_scalar_commutation",
                op(&p.scale_left(q), &p.scale_right(q)),
            );
        }
        if let Some(o) = matched {
            out.push("projector_matches_oracle", op(p, &o.projectors[i]));
        }
        let c = ContourSpec::default_for(r.sphere.point, r.gap, cfg.nodes);
        let right = riesz_projector_right(t, &c, r.gap, &cfg.quad)?;
        out.push("projector_right_kernel", op(p, &right.p));
        total = total.add(p)?;
        rank_sum += p.hrank(DEFAULT_RANK_TOL)?;
    }
    out.push("projector_completeness", op(&total, &QMatrix::identity(n)));
    out.push("projector_rank_sum", (rank_sum as f64 - n as f64).abs());

    let degree = rng.gen_range(0..=4);
    let f = IntrinsicPoly::new(random_real_poly(degree, rng))?;
    let horner = f.eval_matrix(t);
    let (contour, _) = func_calc(&f, t, &rep, cfg.nodes, &cfg.quad)?;
    let fn_norm = horner.op_norm();
    out.push(
        "functional_calculus",
        op(&contour, &horner) / if fn_norm > 0.0 { fn_norm } else { 1.0 },
    );
    out.push(
        "spectral_mapping",
        spectral_mapping_check(&f, t, cluster_tol)?,
    );

    let t_op = t.op_norm();
    let dir = random_quaternion(rng);
    let q_far = dir * (2.0 * t_op.max(0.5) / dir.norm());
    let k = cauchy_terms(t_op, q_far.norm(), 1e-10)?;
    out.push(
        "cauchy_series_left",
        op(
            &cauchy_series_left(q_far, t, k)?,
            &s_resolvent_left(q_far, t)?,
        ),
    );
    out.push(
        "cauchy_series_right",
        op(
            &cauchy_series_right(q_far, t, k)?,
            &s_resolvent_right(q_far, t)?,
        ),
    );
    out.push(
        "left_resolvent_equation",
        left_resolvent_equation(q_far, t)?,
    );
    out.push(
        "right_resolvent_equation",
        right_resolvent_equation(q_far, t)?,
    );

    let mut points: Vec<BrowderPoint> = Vec::new();
    for (i, s) in rep.spheres.iter().enumerate() {
        let q = slice_embed(s.point, random_unit(rng));
        points.push(BrowderPoint::finite_type(
            q,
            records[i].projection.p.clone(),
            i,
        ));
    }
    let reach = rep
        .spheres
        .iter()
        .map(|s| s.point.u.abs().max(s.point.v))
        .fold(1.0, f64::max)
        + 0.5;
    for _ in 0..2 {
        points.push(BrowderPoint::resolvent(
            resolvent_point(&rep, reach, 0.25, rng),
            n,
        ));
    }
    for b in points.iter().filter(|b| b.status == PointStatus::Resolvent) {
        let l = op(&browder_resolvent_left(b, t)?, &s_resolvent_left(b.q, t)?);
        let r = op(&browder_resolvent_right(b, t)?, &s_resolvent_right(b.q, t)?);
        out.push("browder_extends_resolvent", l.max(r));
    }
    for b in &points {
        let (l, r) = browder_equation_residuals(b, t)?;
        out.push("browder_equation_left", l / (tn * tn));
        out.push("browder_equation_right", r / (tn * tn));
    }
    for s in &points {
        for p in &points {
            if sphere_distance(psi(s.q), psi(p.q)) <= cluster_tol {
                continue;
            }
            let res = browder_product_residuals(s, p, t, cluster_tol)?;
            out.push("browder_product", res.displayed / tn.powi(3));
            out.push("browder_product_normalized", res.normalized / tn.powi(3));
            if s.status == PointStatus::Resolvent && p.status == PointStatus::Resolvent {
                out.push(
                    "browder_product_resolvent_pairs",
                    s_resolvent_equation(s.q, p.q, t)?,
                );
            }
        }
    }

    if let Some(tr) = real {
        factored_form_samples(tr, rng, cfg, &mut out)?;
    }

    range_samples(t, &rep, &records, rng, &mut out)?;

    for (i, r) in records.iter().enumerate() {
        let q = points[i].q;
        let qn = quasinilpotent_check(q, t, &r.projection.p)?;
        out.push(
            "quasinilpotent_radius",
            qn.radius_qp.max(qn.radius_q2p) / (tn * tn),
        );
        out.push("perturbed_condition", qn.cond_plus_p.max(qn.cond_plus_2p));
        out.push("nilpotent_neumann", qn.neumann_residual);
        out.push("nilpotent_commutator", qn.commutator / (tn * tn));
    }

    let s = random_similarity(n, Similarity::Quaternionic, 50.0, rng);
    let s_inv_norm = s.invert()?.op_norm();
    let e = random_matrix(n, rng);
    let theta = rng.gen_range(0.05..1.0);
    let pert = s.add(&e.scale_real(theta * 0.5 / (s_inv_norm * e.op_norm())))?;
    let bound = inverse_perturbation_bound(&s, &pert)?;
    out.push(
        "inverse_perturbation_ratio",
        if bound.rhs > 0.0 {
            bound.lhs / bound.rhs
        } else {
            0.0
        },
    );

    for r in &records {
        let w = QMatrix::identity(n)
            .add(&random_matrix(n, rng).scale_real(rng.gen_range(0.001..0.1) / n as f64))?;
        let moved = w.matmul(&r.projection.p)?.matmul(&w.invert()?)?;
        let eq = projector_rank_equivalence(&r.projection.p, &moved, DEFAULT_RANK_TOL)?;
        out.push(
            "projector_rank_equivalence",
            if eq.holds() { 0.0 } else { 1.0 },
        );
    }
    Ok(out)
}

/// Factored form on a real-entry matrix, with `s` and `p` in one common
/// random slice so that `T`, `s` and `p` commute.
fn factored_form_samples(
    t: &QMatrix,
    rng: &mut ChaCha8Rng,
    cfg: &BatteryConfig,
    out: &mut Samples,
) -> Result<()> {
    let cluster_tol = cfg.cluster_tol.unwrap_or_else(|| default_cluster_tol(t));
    let rep = s_spectrum(t, cluster_tol)?;
    let records = classify(t, &rep, cfg.nodes, &cfg.quad, DEFAULT_RANK_TOL)?;
    let slice: SliceUnit = random_unit(rng);
    let reach = rep
        .spheres
        .iter()
        .map(|s| s.point.u.abs().max(s.point.v))
        .fold(1.0, f64::max)
        + 0.5;
    let mut points: Vec<BrowderPoint> = rep
        .spheres
        .iter()
        .enumerate()
        .map(|(i, s)| {
            BrowderPoint::finite_type(
                slice_embed(s.point, slice),
                records[i].projection.p.clone(),
                i,
            )
        })
        .collect();
    for _ in 0..2 {
        let q = resolvent_point(&rep, reach, 0.25, rng);
        points.push(BrowderPoint::resolvent(slice_embed(psi(q), slice), t.n()));
    }
    for s in &points {
        for p in &points {
            if sphere_distance(psi(s.q), psi(p.q)) > cluster_tol {
                out.push(
                    "commutative_factored_form",
                    factored_form_residual(s, p, t)?,
                );
            }
        }
    }
    Ok(())
}

/// Decay of `Q_q(T)ᵏ x` on `R(P)` and growth off it.
fn range_samples(
    t: &QMatrix,
    rep: &SpectrumReport,
    records: &[FiniteTypeRecord],
    rng: &mut ChaCha8Rng,
    out: &mut Samples,
) -> Result<()> {
    let n = t.n();
    let k_hi = 3 * n;
    for (i, r) in records.iter().enumerate() {
        let q = rep.spheres[i].point.canonical();
        let p = &r.projection.p;
        let z: Vec<Quaternion> = (0..n).map(|_| random_quaternion(rng)).collect();
        let x_in = p.apply(&z)?;
        if vector_norm(&x_in) > 1e-8 {
            let rr = range_radius(&x_in, q, t, 2 * n, DEFAULT_DECAY_FLOOR)?;
            out.push("range_decay", rr.radii[2 * n - 1]);
        }
        let others: Vec<f64> = rep
            .spheres
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| {
                let lam = s.point.as_complex();
                let c = rep.spheres[i].point.as_complex();
                ((lam - c) * (lam - c.conj())).norm()
            })
            .collect();
        let Some(bound) = others.iter().copied().reduce(f64::min).map(|m| 0.5 * m) else {
            continue;
        };
        let complement = p.scale_real(-1.0).add_scalar(Quaternion::ONE);
        let mut x_out = Vec::new();
        for _ in 0..20 {
            let z: Vec<Quaternion> = (0..n).map(|_| random_quaternion(rng)).collect();
            let zn = vector_norm(&z);
            let unit: Vec<Quaternion> = z.iter().map(|&c| c / zn).collect();
            if vector_norm(&complement.apply(&unit)?) >= 0.5 {
                x_out = unit;
                break;
            }
        }
        if x_out.is_empty() {
            continue;
        }
        let rr = range_radius(&x_out, q, t, k_hi, DEFAULT_DECAY_FLOOR)?;
        let deficit = rr.radii[2 * n - 1..]
            .iter()
            .map(|&rk| (1.0 - rk / bound).max(0.0))
            .fold(0.0, f64::max);
        out.push("range_growth_deficit", deficit);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes_and_is_deterministic() {
        let cfg = BatteryConfig::new(3, 4, 7);
        let a = run_random(&cfg).unwrap();
        assert!(a.pass, "{:#?}", a);
        let b = run_random(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn corrupted_projector_is_caught() {
        let cfg = BatteryConfig {
            corrupt_projector: true,
            ..BatteryConfig::new(3, 2, 7)
        };
        let r = run_random(&cfg).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_failure, Some("projector_idempotent"));
    }

    #[test]
    fn file_mode_skips_oracle_identities() {
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0]);
        let r = run_file(&t, t.to_json().as_bytes(), &BatteryConfig::new(2, 1, 7));
        assert!(r.get("spectrum_points").is_none());
        assert!(r.pass, "{:#?}", r);
    }
}
