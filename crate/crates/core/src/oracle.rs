//! Seeded random matrices with known S-spectrum.
//!
//! `T = S D S⁻¹` where `D` is block diagonal with one block per sphere and
//! `S` is a random similarity, so the spheres, multiplicities and Riesz
//! projectors `S E_k S⁻¹` are all known exactly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::qmat::QMatrix;
use crate::quat::{slice_embed, sphere_distance, Quaternion, SliceUnit, SpherePoint};
use crate::spectral::Sphere;

/// How the similarity `S` is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Similarity {
    /// Real entries: projectors then have real entries and commute with
    /// every scalar matrix `q𝕀`.
    Real,
    /// Full quaternionic entries.
    Quaternionic,
}

#[derive(Clone, Debug)]
pub struct OracleParams {
    pub similarity: Similarity,
    /// Probability that a multiplicity-two sphere is a Jordan block.
    pub jordan_prob: f64,
    pub min_gap: f64,
    pub max_cond: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            similarity: Similarity::Real,
            jordan_prob: 0.3,
            min_gap: 0.5,
            max_cond: 20.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleMatrix {
    pub t: QMatrix,
    /// Sorted by `(u, v)`.
    pub spheres: Vec<Sphere>,
    /// Exact Riesz projector per sphere, same order.
    pub projectors: Vec<QMatrix>,
    pub jordan: Vec<bool>,
    pub similarity: Similarity,
}

impl OracleMatrix {
    pub fn n(&self) -> usize {
        self.t.n()
    }
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> SliceUnit {
    loop {
        let (x, y, z) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let r2: f64 = x * x + y * y + z * z;
        if r2 > 0.01 && r2 <= 1.0 {
            return SliceUnit::new(x, y, z).expect("nonzero");
        }
    }
}

/// Components uniform on `[-1, 1]`.
pub fn random_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

/// Dense matrix with every component uniform on `[-1, 1]`.
pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    QMatrix::from_fn(n, |_, _| random_quaternion(rng)).expect("valid size")
}

pub fn random_real_matrix(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    QMatrix::from_fn(n, |_, _| Quaternion::real(rng.gen_range(-1.0..1.0))).expect("valid size")
}

/// Random similarity with condition number at most `max_cond`.
pub fn random_similarity(
    n: usize,
    kind: Similarity,
    max_cond: f64,
    rng: &mut ChaCha8Rng,
) -> QMatrix {
    let draw = |rng: &mut ChaCha8Rng| match kind {
        Similarity::Real => random_real_matrix(n, rng),
        Similarity::Quaternionic => random_matrix(n, rng),
    };
    for _ in 0..40 {
        let s = draw(rng);
        if s.condition_number() <= max_cond {
            return s;
        }
    }
    // Fall back to a contraction of the identity: cond ≤ (1 + a) / (1 − a).
    let a = (max_cond - 1.0) / (max_cond + 1.0) * 0.95;
    let e = draw(rng);
    let scale = a / e.op_norm().max(f64::MIN_POSITIVE);
    QMatrix::identity(n)
        .add(&e.scale_real(scale))
        .expect("same size")
}

/// Random sphere point with `u ∈ [−1.5, 1.5]` and `v ∈ {0} ∪ [0.4, 1.5]`.
fn random_point(rng: &mut ChaCha8Rng) -> SpherePoint {
    let u = rng.gen_range(-1.5..1.5);
    let v = if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen_range(0.4..1.5)
    };
    SpherePoint::new(u, v)
}

/// Random well-separated spheres with multiplicities summing to `n`.
pub fn random_spheres(n: usize, min_gap: f64, rng: &mut ChaCha8Rng) -> Vec<Sphere> {
    loop {
        let mut spheres: Vec<Sphere> = Vec::new();
        let mut left = n;
        let mut tries = 0;
        while left > 0 && tries < 200 {
            tries += 1;
            let p = random_point(rng);
            if spheres
                .iter()
                .any(|s| sphere_distance(s.point, p) < min_gap)
            {
                continue;
            }
            let mult = if left >= 2 && rng.gen_bool(0.35) {
                2
            } else {
                1
            };
            spheres.push(Sphere { point: p, mult });
            left -= mult;
        }
        if left == 0 {
            spheres.sort_by(|a, b| {
                a.point
                    .u
                    .total_cmp(&b.point.u)
                    .then(a.point.v.total_cmp(&b.point.v))
            });
            return spheres;
        }
    }
}

/// `S D S⁻¹` for the given spheres; mult-2 spheres become Jordan blocks with
/// probability `jordan_prob`, otherwise two representatives of the sphere in
/// independent random slices.
pub fn construct(spheres: &[Sphere], params: &OracleParams, rng: &mut ChaCha8Rng) -> OracleMatrix {
    let n: usize = spheres.iter().map(|s| s.mult).sum();
    let mut d = QMatrix::zeros(n);
    let mut blocks = Vec::with_capacity(spheres.len());
    let mut jordan = Vec::with_capacity(spheres.len());
    let mut at = 0;
    for s in spheres {
        let is_jordan = s.mult > 1 && rng.gen_bool(params.jordan_prob);
        let unit = random_unit(rng);
        for k in 0..s.mult {
            let slice = if is_jordan { unit } else { random_unit(rng) };
            d.set(at + k, at + k, slice_embed(s.point, slice));
            if is_jordan && k + 1 < s.mult {
                d.set(at + k, at + k + 1, Quaternion::ONE);
            }
        }
        blocks.push(at..at + s.mult);
        jordan.push(is_jordan);
        at += s.mult;
    }
    let s = random_similarity(n, params.similarity, params.max_cond, rng);
    let s_inv = s.invert().expect("conditioned similarity");
    let t = s
        .matmul(&d)
        .and_then(|sd| sd.matmul(&s_inv))
        .expect("same size");
    let projectors = blocks
        .iter()
        .map(|b| {
            let e = QMatrix::diag(
                &(0..n)
                    .map(|i| {
                        if b.contains(&i) {
                            Quaternion::ONE
                        } else {
                            Quaternion::ZERO
                        }
                    })
                    .collect::<Vec<_>>(),
            );
            s.matmul(&e)
                .and_then(|se| se.matmul(&s_inv))
                .expect("same size")
        })
        .collect();
    OracleMatrix {
        t,
        spheres: spheres.to_vec(),
        projectors,
        jordan,
        similarity: params.similarity,
    }
}

pub fn random_oracle(n: usize, params: &OracleParams, rng: &mut ChaCha8Rng) -> OracleMatrix {
    let spheres = random_spheres(n, params.min_gap, rng);
    construct(&spheres, params, rng)
}

/// `S D S⁻¹` with real `S` and real block-diagonal `D`: real spheres are
/// 1x1 blocks, a nonreal sphere `(u, v)` is the rotation-scaling block
/// `[[u, v], [−v, u]]` and carries multiplicity two.
pub fn random_real_entry_oracle(
    n: usize,
    params: &OracleParams,
    rng: &mut ChaCha8Rng,
) -> OracleMatrix {
    let spheres: Vec<Sphere> = loop {
        let mut spheres: Vec<Sphere> = Vec::new();
        let mut left = n;
        let mut tries = 0;
        while left > 0 && tries < 200 {
            tries += 1;
            let mut p = random_point(rng);
            if left < 2 {
                p = SpherePoint::new(p.u, 0.0);
            }
            if spheres
                .iter()
                .any(|s| sphere_distance(s.point, p) < params.min_gap)
            {
                continue;
            }
            let mult = if p.v > 0.0 { 2 } else { 1 };
            spheres.push(Sphere { point: p, mult });
            left -= mult;
        }
        if left == 0 {
            spheres.sort_by(|a, b| {
                a.point
                    .u
                    .total_cmp(&b.point.u)
                    .then(a.point.v.total_cmp(&b.point.v))
            });
            break spheres;
        }
    };
    let mut d = QMatrix::zeros(n);
    let mut blocks = Vec::with_capacity(spheres.len());
    let mut at = 0;
    for s in &spheres {
        let (u, v) = (s.point.u, s.point.v);
        d.set(at, at, Quaternion::real(u));
        if s.mult == 2 {
            d.set(at, at + 1, Quaternion::real(v));
            d.set(at + 1, at, Quaternion::real(-v));
            d.set(at + 1, at + 1, Quaternion::real(u));
        }
        blocks.push(at..at + s.mult);
        at += s.mult;
    }
    let s = random_similarity(n, Similarity::Real, params.max_cond, rng);
    let s_inv = s.invert().expect("conditioned similarity");
    let t = s
        .matmul(&d)
        .and_then(|sd| sd.matmul(&s_inv))
        .expect("same size");
    let projectors = blocks
        .iter()
        .map(|b| {
            let e = QMatrix::diag(
                &(0..n)
                    .map(|i| {
                        if b.contains(&i) {
                            Quaternion::ONE
                        } else {
                            Quaternion::ZERO
                        }
                    })
                    .collect::<Vec<_>>(),
            );
            s.matmul(&e)
                .and_then(|se| se.matmul(&s_inv))
                .expect("same size")
        })
        .collect();
    let jordan = vec![false; spheres.len()];
    OracleMatrix {
        t,
        spheres,
        projectors,
        jordan,
        similarity: Similarity::Real,
    }
}

/// Real polynomial coefficients, uniform on `[-1, 1]`, ascending order.
pub fn random_real_poly(degree: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
