//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its `criterion NN PASS|FAIL` line, passing or not; the
//! process exits nonzero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quatspec::browder::{
    browder_equation_residuals, browder_product_residuals, browder_resolvent_left,
    browder_resolvent_right, factored_form_residual, inverse_perturbation_bound,
    perturbation_localization, projector_rank_equivalence, quasinilpotent_check, range_radius,
    BrowderPoint, PerturbParams, PointStatus, DEFAULT_DECAY_FLOOR,
};
use quatspec::oracle::{
    random_matrix, random_quaternion, random_real_entry_oracle, random_real_poly,
    random_similarity, random_unit, OracleParams, Similarity,
};
use quatspec::qmat::{vector_norm, DEFAULT_RANK_TOL};
use quatspec::quat::{psi, slice_embed, sphere_distance};
use quatspec::scalculus::{
    cauchy_series_left, cauchy_series_right, cauchy_terms, func_calc, riesz_projector,
    s_resolvent_equation, s_resolvent_left, s_resolvent_right, spectral_mapping_check, ContourSpec,
    IntrinsicPoly, QuadParams, DEFAULT_NODES,
};
use quatspec::spectral::{default_cluster_tol, s_spectrum};
use quatspec::{QMatrix, Quaternion};
use quatspec_acceptance::{
    analyse, browder_points, op, oracles, quatspec_bin, report, resolvent_point, Criterion, Split,
};

fn c01_chi_homomorphism() -> Vec<Criterion> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = 1 + i % 8;
        let (a, b) = (random_matrix(n, &mut rng), random_matrix(n, &mut rng));
        let (ca, cb) = (a.chi(), b.chi());
        let scale = ca.frobenius_norm() * cb.frobenius_norm();
        let mul = a
            .matmul(&b)
            .unwrap()
            .chi()
            .sub(&ca.matmul(&cb).unwrap())
            .unwrap()
            .frobenius_norm()
            / scale;
        let add = a
            .add(&b)
            .unwrap()
            .chi()
            .sub(&ca.add(&cb).unwrap())
            .unwrap()
            .frobenius_norm()
            / (ca.frobenius_norm() + cb.frobenius_norm());
        worst = worst.max(mul).max(add);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-11 && secs < 5.0;
    vec![report(1, pass, format!("chi homomorphism: 200 pairs, max relative residual {worst:.2e} (tol 1e-11), {secs:.2}s (< 5s)"))]
}

fn c02_spectrum_oracle() -> Vec<Criterion> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mult_errors = 0;
    for o in oracles(100, 202) {
        let rep = s_spectrum(&o.t, default_cluster_tol(&o.t)).unwrap();
        if rep.spheres.len() != o.spheres.len()
            || rep
                .spheres
                .iter()
                .zip(&o.spheres)
                .any(|(a, b)| a.mult != b.mult)
        {
            mult_errors += 1;
            continue;
        }
        for (a, b) in rep.spheres.iter().zip(&o.spheres) {
            worst = worst.max(a.point.planar_distance(&b.point));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-7 && mult_errors == 0 && secs < 30.0;
    vec![report(
        2,
        pass,
        format!("S-spectrum oracle: 100 matrices, max point error {worst:.2e} (tol 1e-7), {mult_errors} multiplicity mismatches, {secs:.2}s (< 30s)"),
    )]
}

fn c03_riesz_projector_laws() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut idem, mut comm, mut scalar, mut complete) = (
        Split::default(),
        Split::default(),
        Split::default(),
        Split::default(),
    );
    let mut rank_errors = 0;
    for o in oracles(100, 202) {
        let fam = o.similarity;
        let (_, records) = analyse(&o.t);
        let t_norm = o.t.op_norm();
        let mut total = QMatrix::zeros(o.n());
        let mut ranks = 0;
        for r in &records {
            let p = &r.projection.p;
            idem.add(fam, op(&p.matmul(p).unwrap(), p));
            comm.add(
                fam,
                op(&p.matmul(&o.t).unwrap(), &o.t.matmul(p).unwrap()) / t_norm,
            );
            for _ in 0..10 {
                let q = random_quaternion(&mut rng);
                scalar.add(fam, op(&p.scale_left(q), &p.scale_right(q)));
            }
            total = total.add(p).unwrap();
            ranks += p.hrank(DEFAULT_RANK_TOL).unwrap();
        }
        complete.add(fam, op(&total, &QMatrix::identity(o.n())));
        rank_errors += usize::from(ranks != o.n());
    }
    let pass = idem.within(1e-8)
        && comm.within(1e-8)
        && scalar.within(1e-8)
        && complete.within(1e-7)
        && rank_errors == 0;
    vec![report(
        3,
        pass,
        format!(
            "Riesz projector laws: ‖P²−P‖ {idem} (tol 1e-8); ‖PT−TP‖/‖T‖ {comm} (tol 1e-8); ‖qP−Pq‖ {scalar} (tol 1e-8); ‖ΣP−𝕀‖ {complete} (tol 1e-7); {rank_errors} rank-sum errors"
        ),
    )]
}

fn c04_c05_functional_calculus_and_spectral_mapping() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut agree, mut mapping): (f64, f64) = (0.0, 0.0);
    for o in oracles(50, 405) {
        let f = IntrinsicPoly::new(random_real_poly(rng.gen_range(0..=4), &mut rng)).unwrap();
        let rep = s_spectrum(&o.t, default_cluster_tol(&o.t)).unwrap();
        let horner = f.eval_matrix(&o.t);
        let (contour, _) =
            func_calc(&f, &o.t, &rep, DEFAULT_NODES, &QuadParams::default()).unwrap();
        let scale = horner.op_norm();
        agree = agree.max(op(&contour, &horner) / if scale > 0.0 { scale } else { 1.0 });
        mapping = mapping.max(spectral_mapping_check(&f, &o.t, rep.cluster_tol).unwrap());
    }
    let pass4 = agree <= 1e-7;
    let pass5 = mapping <= 1e-6;
    vec![
        report(4, pass4, format!("functional calculus: 50 polynomials, max ‖contour − Horner‖/‖f(T)‖ {agree:.2e} (tol 1e-7)")),
        report(5, pass5, format!("spectral mapping: 50 polynomials, max Hausdorff distance {mapping:.2e} (tol 1e-6)")),
    ]
}

fn c06_cauchy_series() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut left, mut right): (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        let t = random_matrix(1 + i % 8, &mut rng);
        let t_norm = t.op_norm();
        let d = random_quaternion(&mut rng);
        let q = d * (2.0 * t_norm / d.norm());
        let k = cauchy_terms(t_norm, q.norm(), 1e-12).unwrap();
        left = left.max(op(
            &cauchy_series_left(q, &t, k).unwrap(),
            &s_resolvent_left(q, &t).unwrap(),
        ));
        right = right.max(op(
            &cauchy_series_right(q, &t, k).unwrap(),
            &s_resolvent_right(q, &t).unwrap(),
        ));
    }
    let pass = left <= 1e-9 && right <= 1e-9;
    vec![report(6, pass, format!("Cauchy kernel series at |q| = 2‖T‖: 50 cases, left {left:.2e}, right {right:.2e} (tol 1e-9)"))]
}

fn c07_browder_resolvent_equations() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut finite, mut resolvent) = (Split::default(), Split::default());
    let mut count = 0;
    for o in oracles(50, 708) {
        let (rep, records) = analyse(&o.t);
        let scale = o.t.op_norm().max(1.0).powi(2);
        for b in browder_points(&o.t, &rep, &records, &mut rng) {
            let (l, r) = browder_equation_residuals(&b, &o.t).unwrap();
            let slot = if b.status == PointStatus::Resolvent {
                &mut resolvent
            } else {
                &mut finite
            };
            slot.add(o.similarity, l.max(r) / scale);
            count += 1;
        }
    }
    let pass = finite.within(1e-7) && resolvent.within(1e-7);
    vec![report(
        7,
        pass,
        format!(
            "Browder S-resolvent equations (L),(R) / max(1,‖T‖²) over {count} points: finite-type {finite}; resolvent set {resolvent} (tol 1e-7)"
        ),
    )]
}

fn c08_browder_product_equation() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut mixed, mut rho) = (Split::default(), Split::default());
    let (mut pairs, mut reduction, mut extends): (usize, f64, f64) = (0, 0.0, 0.0);
    for o in oracles(50, 708) {
        let (rep, records) = analyse(&o.t);
        let scale = o.t.op_norm().max(1.0).powi(3);
        let points = browder_points(&o.t, &rep, &records, &mut rng);
        for s in &points {
            for p in &points {
                if sphere_distance(psi(s.q), psi(p.q)) <= rep.cluster_tol {
                    continue;
                }
                let r = browder_product_residuals(s, p, &o.t, rep.cluster_tol).unwrap();
                let worst = r.displayed.max(r.normalized) / scale;
                pairs += 1;
                if s.status == PointStatus::Resolvent && p.status == PointStatus::Resolvent {
                    rho.add(o.similarity, worst);
                    reduction = reduction.max(s_resolvent_equation(s.q, p.q, &o.t).unwrap());
                } else {
                    mixed.add(o.similarity, worst);
                }
            }
            if s.status == PointStatus::Resolvent {
                extends = extends
                    .max(op(
                        &browder_resolvent_left(s, &o.t).unwrap(),
                        &s_resolvent_left(s.q, &o.t).unwrap(),
                    ))
                    .max(op(
                        &browder_resolvent_right(s, &o.t).unwrap(),
                        &s_resolvent_right(s.q, &o.t).unwrap(),
                    ));
            }
        }
    }

    let mut factored: f64 = 0.0;
    for i in 0..50 {
        let params = OracleParams::default();
        let o = random_real_entry_oracle(2 + i % 7, &params, &mut rng);
        let (rep, records) = analyse(&o.t);
        let slice = random_unit(&mut rng);
        let mut points: Vec<BrowderPoint> = rep
            .spheres
            .iter()
            .enumerate()
            .map(|(k, s)| {
                BrowderPoint::finite_type(
                    slice_embed(s.point, slice),
                    records[k].projection.p.clone(),
                    k,
                )
            })
            .collect();
        for _ in 0..2 {
            let q = resolvent_point(&rep, &mut rng);
            points.push(BrowderPoint::resolvent(slice_embed(psi(q), slice), o.t.n()));
        }
        for s in &points {
            for p in &points {
                if sphere_distance(psi(s.q), psi(p.q)) > rep.cluster_tol {
                    factored = factored.max(factored_form_residual(s, p, &o.t).unwrap());
                }
            }
        }
    }

    let pass = pairs >= 500
        && mixed.within(1e-6)
        && rho.within(1e-6)
        && reduction <= 1e-8
        && extends <= 1e-10
        && factored <= 1e-8;
    vec![report(
        8,
        pass,
        format!(
            "Browder product equation / max(1,‖T‖³) over {pairs} pairs (≥ 500): with a finite-type point {mixed}; both in ρ_S {rho} (tol 1e-6); S-resolvent reduction {reduction:.2e} (tol 1e-8), Browder = S-resolvent on ρ_S {extends:.2e} (tol 1e-10); factored form on real matrices {factored:.2e} (tol 1e-8)"
        ),
    )]
}

fn c09_range_dichotomy_and_quasinilpotency() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut failures = Vec::new();
    let (mut decay, mut deficit, mut radius, mut cond): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (case, o) in oracles(100, 202).into_iter().enumerate() {
        let (rep, records) = analyse(&o.t);
        let n = o.n();
        let t2 = o.t.op_norm().powi(2);
        for (i, r) in records.iter().enumerate() {
            let p = &r.projection.p;
            let q = rep.spheres[i].point.canonical();
            let z: Vec<Quaternion> = (0..n).map(|_| random_quaternion(&mut rng)).collect();
            let x_in = p.apply(&z).unwrap();
            let rr = range_radius(&x_in, q, &o.t, 2 * n, DEFAULT_DECAY_FLOOR).unwrap();
            let first_small = rr.radii.iter().copied().fold(f64::INFINITY, f64::min);
            decay = decay.max(first_small);

            let c = rep.spheres[i].point.as_complex();
            let bound = rep
                .spheres
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, s)| {
                    let lam = s.point.as_complex();
                    ((lam - c) * (lam - c.conj())).norm()
                })
                .reduce(f64::min);
            if let Some(bound) = bound.map(|m| 0.5 * m) {
                let complement = p.scale_real(-1.0).add_scalar(Quaternion::ONE);
                let x_out = loop {
                    let z: Vec<Quaternion> = (0..n).map(|_| random_quaternion(&mut rng)).collect();
                    let zn = vector_norm(&z);
                    let unit: Vec<Quaternion> = z.iter().map(|&c| c / zn).collect();
                    if vector_norm(&complement.apply(&unit).unwrap()) >= 0.5 {
                        break unit;
                    }
                };
                let rr = range_radius(&x_out, q, &o.t, 3 * n, DEFAULT_DECAY_FLOOR).unwrap();
                let d = rr.radii[2 * n - 1..]
                    .iter()
                    .map(|&rk| (1.0 - rk / bound).max(0.0))
                    .fold(0.0, f64::max);
                deficit = deficit.max(d);
            }

            let qn = quasinilpotent_check(q, &o.t, p).unwrap();
            radius = radius.max(qn.radius_qp.max(qn.radius_q2p) / t2);
            cond = cond.max(qn.cond_plus_p.max(qn.cond_plus_2p));
            if qn.neumann_residual > 1e-8 {
                failures.push(format!(
                    "case {case}: nilpotent perturbation residual {:.2e}",
                    qn.neumann_residual
                ));
            }
        }
    }

    let t = QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0]);
    let e1 = [Quaternion::ONE, Quaternion::ZERO];
    let e2 = [Quaternion::ZERO, Quaternion::ONE];
    let r1 = range_radius(&e1, Quaternion::I, &t, 8, DEFAULT_DECAY_FLOOR).unwrap();
    let r2 = range_radius(&e2, Quaternion::I, &t, 8, DEFAULT_DECAY_FLOOR).unwrap();
    let example = r1
        .radii
        .iter()
        .map(|r| r.abs())
        .chain(r2.radii.iter().map(|r| (r - 3.0).abs()))
        .fold(0.0, f64::max);

    let pass = decay < 1e-6
        && deficit == 0.0
        && radius <= 1e-6
        && cond.is_finite()
        && example <= 1e-10
        && failures.is_empty();
    vec![report(
        9,
        pass,
        format!(
            "range dichotomy: min r_k on R(P) {decay:.2e} (< 1e-6), growth deficit off R(P) {deficit:.2e} (0); quasi-nilpotent radius / ‖T‖² {radius:.2e} (tol 1e-6), worst condition {cond:.2e}; diag(i,2j) example error {example:.2e} (tol 1e-10){}",
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )]
}

fn c10_inverse_bound_and_rank_equivalence() -> Vec<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..200 {
        let n = 1 + i % 8;
        let s = random_similarity(n, Similarity::Quaternionic, 50.0, &mut rng);
        let s_inv_norm = s.invert().unwrap().op_norm();
        let e = random_matrix(n, &mut rng);
        let theta = rng.gen_range(0.0..1.0);
        let t = s
            .add(&e.scale_real(theta * 0.5 / (s_inv_norm * e.op_norm())))
            .unwrap();
        let b = inverse_perturbation_bound(&s, &t).unwrap();
        worst_ratio = worst_ratio.max(if b.rhs > 0.0 { b.lhs / b.rhs } else { 0.0 });
    }

    let oracle_list = oracles(100, 1011);
    let (mut close, mut violations, mut instances) = (0, 0, 0);
    for (idx, o) in oracle_list.iter().cycle().enumerate().take(200) {
        let (rep, records) = analyse(&o.t);
        let k = idx % rep.spheres.len();
        let contour = ContourSpec::default_for(rep.spheres[k].point, rep.gaps[k], DEFAULT_NODES);
        let e = random_matrix(o.n(), &mut rng);
        let eps = rng.gen_range(1e-3..0.2) * rep.gaps[k].min(1.0) / e.op_norm();
        let perturbed = o.t.add(&e.scale_real(eps)).unwrap();
        let Ok(q) = riesz_projector(&perturbed, &contour, rep.gaps[k], &QuadParams::default())
        else {
            continue;
        };
        let l =
            projector_rank_equivalence(&records[k].projection.p, &q.p, DEFAULT_RANK_TOL).unwrap();
        instances += 1;
        close += usize::from(l.distance < 1.0);
        violations += usize::from(!l.holds());
    }
    let pass = worst_ratio <= 1.0 && instances == 200 && violations == 0;
    vec![report(
        10,
        pass,
        format!(
            "inverse perturbation bound: 200 instances, max ‖T⁻¹−S⁻¹‖ / (2‖S⁻¹‖²‖T−S‖) {worst_ratio:.3} (≤ 1); projector rank equivalence: {instances} instances, {close} with ‖P−Q‖ < 1, {violations} violations"
        ),
    )]
}

fn c11_perturbation_localization() -> Vec<Criterion> {
    let t = QMatrix::diag(&[Quaternion::ZERO, Quaternion::real(2.0)]);
    let mut e = QMatrix::zeros(2);
    e.set(0, 1, Quaternion::ONE);
    e.set(1, 0, Quaternion::ONE);
    let params = PerturbParams {
        cluster_tol: 1e-7,
        nodes: DEFAULT_NODES,
        quad: QuadParams::default(),
        rank_tol: DEFAULT_RANK_TOL,
    };
    let table = perturbation_localization(&t, &e, 50, None, &params).unwrap();
    let fitted = table
        .rows
        .iter()
        .map(|r| r.k as f64 * r.delta)
        .fold(0.0, f64::max);
    let analytic = 2f64.sqrt() - 1.0;
    let rel = (fitted - analytic).abs() / analytic;
    let envelope = table
        .rows
        .iter()
        .all(|r| r.delta <= fitted / r.k as f64 * (1.0 + 1e-12));
    let unstable = table
        .rows
        .iter()
        .filter(|r| r.proj_distance.is_some_and(|d| d < 1.0) && !r.rank_stable)
        .count();
    let pass = rel <= 0.2 && envelope && unstable == 0;
    vec![report(
        11,
        pass,
        format!("perturbation localization: fitted C {fitted:.6} vs analytic {analytic:.6} ({:.2}% off, ≤ 20%), {unstable} rank-stability failures", 100.0 * rel),
    )]
}

fn c12_deterministic_verify() -> Vec<Criterion> {
    let run = || {
        let out = Command::new(quatspec_bin())
            .args(["verify", "--random", "4", "--count", "20", "--seed", "7"])
            .output()
            .expect("binary runs");
        (out.status.code(), out.stdout)
    };
    let start = Instant::now();
    let (code_a, a) = run();
    let (code_b, b) = run();
    let secs = start.elapsed().as_secs_f64();
    let pass = code_a == Some(0) && code_b == Some(0) && a == b && !a.is_empty();
    vec![report(
        12,
        pass,
        format!("verify --seed 7 twice: exit codes {code_a:?}/{code_b:?}, {} bytes, identical {}, {secs:.2}s", a.len(), a == b),
    )]
}

fn main() {
    let start = Instant::now();
    let criteria: [fn() -> Vec<Criterion>; 11] = [
        c01_chi_homomorphism,
        c02_spectrum_oracle,
        c03_riesz_projector_laws,
        c04_c05_functional_calculus_and_spectral_mapping,
        c06_cauchy_series,
        c07_browder_resolvent_equations,
        c08_browder_product_equation,
        c09_range_dichotomy_and_quasinilpotency,
        c10_inverse_bound_and_rank_equivalence,
        c11_perturbation_localization,
        c12_deterministic_verify,
    ];
    let results: Vec<Criterion> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|c| s.spawn(c)).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("criterion panicked"))
            .collect()
    });
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!(
        "acceptance: {} of {} criteria pass, {:.1}s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
