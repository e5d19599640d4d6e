//! Shared fixtures for the acceptance criteria: oracle families, Browder
//! point sampling and the one-line report format.

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quatspec::browder::{classify, BrowderPoint, FiniteTypeRecord};
use quatspec::oracle::{random_oracle, random_unit, OracleMatrix, OracleParams, Similarity};
use quatspec::qmat::DEFAULT_RANK_TOL;
use quatspec::quat::{slice_embed, sphere_distance};
use quatspec::scalculus::{QuadParams, DEFAULT_NODES};
use quatspec::spectral::{default_cluster_tol, s_spectrum, SpectrumReport};
use quatspec::{QMatrix, Quaternion, SpherePoint};

/// Outcome of one acceptance criterion.
pub struct Criterion {
    pub id: u32,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {}", self.id, self.detail)
    }
}

pub fn report(id: u32, pass: bool, detail: String) -> Criterion {
    Criterion { id, pass, detail }
}

pub fn op(a: &QMatrix, b: &QMatrix) -> f64 {
    a.sub(b).unwrap().op_norm()
}

/// Worst value seen on each similarity family.
#[derive(Default, Clone, Copy)]
pub struct Split {
    pub real: f64,
    pub quaternionic: f64,
}

impl Split {
    pub fn add(&mut self, family: Similarity, x: f64) {
        let slot = match family {
            Similarity::Real => &mut self.real,
            Similarity::Quaternionic => &mut self.quaternionic,
        };
        *slot = if x.is_nan() { f64::NAN } else { slot.max(x) };
    }

    pub fn max(&self) -> f64 {
        if self.real.is_nan() || self.quaternionic.is_nan() {
            f64::NAN
        } else {
            self.real.max(self.quaternionic)
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:.2e} (real S {:.2e}, quaternionic S {:.2e})",
            self.max(),
            self.real,
            self.quaternionic
        )
    }
}

/// Oracle matrices of size 2..=8, alternating real and quaternionic similarity.
pub fn oracles(count: usize, seed: u64) -> Vec<OracleMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let similarity = if i % 2 == 0 {
                Similarity::Real
            } else {
                Similarity::Quaternionic
            };
            let params = OracleParams {
                similarity,
                ..OracleParams::default()
            };
            random_oracle(2 + i % 7, &params, &mut rng)
        })
        .collect()
}

pub fn analyse(t: &QMatrix) -> (SpectrumReport, Vec<FiniteTypeRecord>) {
    let rep = s_spectrum(t, default_cluster_tol(t)).unwrap();
    let records = classify(
        t,
        &rep,
        DEFAULT_NODES,
        &QuadParams::default(),
        DEFAULT_RANK_TOL,
    )
    .unwrap();
    (rep, records)
}

/// A point of `ρ_S(T)` at Ψ-distance at least 0.25 from every sphere.
pub fn resolvent_point(rep: &SpectrumReport, rng: &mut ChaCha8Rng) -> Quaternion {
    let reach = rep
        .spheres
        .iter()
        .map(|s| s.point.u.abs().max(s.point.v))
        .fold(1.0, f64::max)
        + 0.5;
    loop {
        let p = SpherePoint::new(rng.gen_range(-reach..reach), rng.gen_range(0.0..reach));
        if rep
            .spheres
            .iter()
            .all(|s| sphere_distance(s.point, p) >= 0.25)
        {
            return slice_embed(p, random_unit(rng));
        }
    }
}

/// One random slice representative per sphere, then three resolvent points.
pub fn browder_points(
    t: &QMatrix,
    rep: &SpectrumReport,
    records: &[FiniteTypeRecord],
    rng: &mut ChaCha8Rng,
) -> Vec<BrowderPoint> {
    let mut points: Vec<BrowderPoint> = rep
        .spheres
        .iter()
        .enumerate()
        .map(|(i, s)| {
            BrowderPoint::finite_type(
                slice_embed(s.point, random_unit(rng)),
                records[i].projection.p.clone(),
                i,
            )
        })
        .collect();
    for _ in 0..3 {
        points.push(BrowderPoint::resolvent(resolvent_point(rep, rng), t.n()));
    }
    points
}

/// The `quatspec` binary, built alongside the test executables.
pub fn quatspec_bin() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    let bin = exe
        .parent()
        .and_then(|deps| deps.parent())
        .expect("target layout")
        .join("quatspec");
    assert!(
        bin.exists(),
        "{} not built; run `cargo test --workspace`",
        bin.display()
    );
    bin
}
