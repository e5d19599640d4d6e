//! Dense quaternionic matrices acting as right-linear operators on ℍⁿ.
//!
//! A matrix acts on column vectors by `(Tx)_r = Σ_c T[r][c] · x_c`, which
//! makes it right linear: `T(x q) = (Tx) q`. Left scalar multiplication on
//! operators is the one induced by the standard basis `e_1 … e_n`: `q·T`
//! multiplies every entry by `q` on the left, `T·q` on the right.
//!
//! All numerical work (solves, norms, ranks) goes through the complex adjoint
//! embedding `chi(T) = [[A, B], [-conj B, conj A]]` where `T = A + B j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmat::CMatrix;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Largest supported side.
pub const MAX_DIM: usize = 64;

/// Default relative pivot threshold for LU on `chi(T)`.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-13;

/// Default relative structure tolerance for [`QMatrix::chi_back`].
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-8;

/// Default relative singular value cutoff for [`QMatrix::hrank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// A quaternionic column vector.
pub type QVector = Vec<Quaternion>;

pub fn vector_norm(x: &[Quaternion]) -> f64 {
    x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct QMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

/// On-disk layout: `{"n": <int>, "entries": [[[w,x,y,z], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl TryFrom<MatrixFile> for QMatrix {
    type Error = Error;
    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.entries.len() != f.n {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                f.n,
                f.entries.len()
            )));
        }
        if let Some((r, row)) = f
            .entries
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != f.n)
        {
            return Err(Error::Parse(format!(
                "row {r} has {} entries, expected {}",
                row.len(),
                f.n
            )));
        }
        QMatrix::from_entries(f.n, f.entries.concat())
    }
}

impl From<QMatrix> for MatrixFile {
    fn from(m: QMatrix) -> Self {
        MatrixFile {
            n: m.n,
            entries: m.entries.chunks(m.n).map(|r| r.to_vec()).collect(),
        }
    }
}

impl QMatrix {
    /// Validates size and finiteness.
    pub fn from_entries(n: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dim("matrix side must be positive".into()));
        }
        if n > MAX_DIM {
            return Err(Error::Size { n, max: MAX_DIM });
        }
        if entries.len() != n * n {
            return Err(Error::Dim(format!(
                "{} entries for side {n}",
                entries.len()
            )));
        }
        if let Some(q) = entries.iter().find(|q| !q.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry {q}")));
        }
        Ok(QMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let n = rows.len();
        QMatrix::try_from(MatrixFile { n, entries: rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization is infallible")
    }

    fn from_fn_unchecked(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        QMatrix { n, entries }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Quaternion) -> Result<Self> {
        let m = QMatrix::from_fn_unchecked(n, f);
        QMatrix::from_entries(m.n, m.entries)
    }

    pub fn zeros(n: usize) -> Self {
        QMatrix {
            n,
            entries: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix::scalar(n, Quaternion::ONE)
    }

    /// `q 𝕀`; left and right scalings of the identity coincide.
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        QMatrix::from_fn_unchecked(n, |r, c| if r == c { q } else { Quaternion::ZERO })
    }

    pub fn diag(values: &[Quaternion]) -> Self {
        let n = values.len();
        QMatrix::from_fn_unchecked(n, |r, c| if r == c { values[r] } else { Quaternion::ZERO })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.entries[r * self.n + c] = q;
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|q| q.is_real())
    }

    fn check_same(&self, other: &QMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dim(format!(
                "{}x{} vs {}x{}",
                self.n, self.n, other.n, other.n
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same(other)?;
        Ok(QMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same(other)?;
        Ok(QMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn scale_real(&self, s: f64) -> QMatrix {
        QMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&a| a * s).collect(),
        }
    }

    /// `q·T`: every entry multiplied by `q` on the left.
    pub fn scale_left(&self, q: Quaternion) -> QMatrix {
        QMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&a| q * a).collect(),
        }
    }

    /// `T·q`: every entry multiplied by `q` on the right.
    pub fn scale_right(&self, q: Quaternion) -> QMatrix {
        QMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&a| a * q).collect(),
        }
    }

    /// `T + q𝕀`.
    pub fn add_scalar(&self, q: Quaternion) -> QMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += q;
        }
        out
    }

    pub fn apply(&self, x: &[Quaternion]) -> Result<QVector> {
        if x.len() != self.n {
            return Err(Error::Dim(format!(
                "{}x{} applied to vector of {}",
                self.n,
                self.n,
                x.len()
            )));
        }
        Ok((0..self.n)
            .map(|r| (0..self.n).fold(Quaternion::ZERO, |acc, c| acc + self.get(r, c) * x[c]))
            .collect())
    }

    /// `T^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> QMatrix {
        let mut base = self.clone();
        let mut acc = QMatrix::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.matmul(&base).expect("same size");
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base).expect("same size");
            }
        }
        acc
    }

    /// Complex adjoint embedding `[[A, B], [-conj B, conj A]]`, a unital
    /// ring homomorphism into `2n x 2n` complex matrices.
    pub fn chi(&self) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let (a, b) = self.get(r, c).to_complex_pair();
                m[(r, c)] = a;
                m[(r, c + n)] = b;
                m[(r + n, c)] = -b.conj();
                m[(r + n, c + n)] = a.conj();
            }
        }
        m
    }

    /// Inverse of [`QMatrix::chi`], after projecting onto the adjoint
    /// structure. Fails when the structure defect exceeds
    /// `structure_tol * max(‖M‖_F, 1e-300)`.
    pub fn chi_back(m: &CMatrix, structure_tol: f64) -> Result<QMatrix> {
        Ok(QMatrix::chi_back_with_defect(m, structure_tol)?.0)
    }

    /// As [`QMatrix::chi_back`], also returning the structure defect
    /// `‖D - conj A‖_F + ‖C + conj B‖_F`.
    pub fn chi_back_with_defect(m: &CMatrix, structure_tol: f64) -> Result<(QMatrix, f64)> {
        if !m.is_square() || m.rows() % 2 != 0 {
            return Err(Error::Dim(format!(
                "chi_back needs an even square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows() / 2;
        let mut d_sq = 0.0;
        let mut entries = Vec::with_capacity(n * n);
        let mut defect_d = 0.0;
        let mut defect_c = 0.0;
        for r in 0..n {
            for c in 0..n {
                let a = m[(r, c)];
                let b = m[(r, c + n)];
                let cc = m[(r + n, c)];
                let d = m[(r + n, c + n)];
                defect_d += (d - a.conj()).norm_sqr();
                defect_c += (cc + b.conj()).norm_sqr();
                d_sq += a.norm_sqr() + b.norm_sqr() + cc.norm_sqr() + d.norm_sqr();
                let alpha = (a + d.conj()) * 0.5;
                let beta = (b - cc.conj()) * 0.5;
                entries.push(Quaternion::from_complex_pair(alpha, beta));
            }
        }
        let defect = defect_d.sqrt() + defect_c.sqrt();
        let tol = structure_tol * d_sq.sqrt();
        if defect > tol {
            return Err(Error::Structure { defect, tol });
        }
        Ok((QMatrix::from_entries(n, entries)?, defect))
    }

    /// `X` with `T X = B`, via LU with partial pivoting on `chi(T)`.
    pub fn solve(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.solve_with(rhs, DEFAULT_PIVOT_TOL)
    }

    pub fn solve_with(&self, rhs: &QMatrix, pivot_tol: f64) -> Result<QMatrix> {
        self.check_same(rhs)?;
        let x = self.chi().solve(&rhs.chi(), pivot_tol)?;
        // Rounding can only leave a structure defect of order eps·cond.
        QMatrix::chi_back(&x, 1e-6)
    }

    pub fn invert(&self) -> Result<QMatrix> {
        self.solve(&QMatrix::identity(self.n))
    }

    /// Operator norm `sup ‖Tx‖/‖x‖`, the largest singular value of `chi(T)`.
    pub fn op_norm(&self) -> f64 {
        self.chi().op_norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|q| q.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Quaternionic rank: half the number of singular values of `chi(T)`
    /// above `rank_tol * σ_max`.
    pub fn hrank(&self, rank_tol: f64) -> Result<usize> {
        if !(rank_tol > 0.0) {
            return Err(Error::Domain("rank_tol must be positive".into()));
        }
        let sv = self.chi().singular_values();
        let smax = sv.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return Ok(0);
        }
        let rank = sv.iter().filter(|&&s| s > rank_tol * smax).count();
        if rank % 2 != 0 {
            return Err(Error::RankParity { rank });
        }
        Ok(rank / 2)
    }

    /// Smallest singular value of `chi(T)`.
    pub fn min_singular_value(&self) -> f64 {
        self.chi().singular_values().last().copied().unwrap_or(0.0)
    }

    /// `σ_max / σ_min` of `chi(T)`.
    pub fn condition_number(&self) -> f64 {
        let sv = self.chi().singular_values();
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Entrywise maximum of `|imaginary part|`.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|q| q.im_norm()).fold(0.0, f64::max)
    }
}

/// Fixed-order pairwise sum, independent of how the terms were produced.
pub fn pairwise_sum(terms: &[QMatrix]) -> Option<QMatrix> {
    match terms.len() {
        0 => None,
        1 => Some(terms[0].clone()),
        len => {
            let (a, b) = terms.split_at(len / 2);
            let (a, b) = (pairwise_sum(a)?, pairwise_sum(b)?);
            a.add(&b).ok()
        }
    }
}

/// Complex entries of a quaternion in ℂ_i, for building examples.
pub fn cq(re: f64, im: f64) -> Quaternion {
    Quaternion::from_complex(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chi_of_units() {
        let mj = QMatrix::diag(&[Quaternion::J]).chi();
        let expect = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(mj, expect);
        let mi = QMatrix::diag(&[Quaternion::I]).chi();
        assert_eq!(mi, CMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]));
        assert_eq!(QMatrix::identity(3).chi(), CMatrix::identity(6));
    }

    #[test]
    fn chi_back_examples() {
        let t = QMatrix::from_rows(vec![
            vec![q(1.0, -2.0, 0.5, 3.0), q(0.0, 0.0, 1.0, 0.0)],
            vec![q(0.25, 1.0, -1.0, 2.0), q(-4.0, 0.0, 0.0, 0.1)],
        ])
        .unwrap();
        assert_eq!(
            QMatrix::chi_back(&t.chi(), DEFAULT_STRUCTURE_TOL).unwrap(),
            t
        );
        let rot = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(
            QMatrix::chi_back(&rot, DEFAULT_STRUCTURE_TOL).unwrap(),
            QMatrix::diag(&[Quaternion::J])
        );
        let bad = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            QMatrix::chi_back(&bad, DEFAULT_STRUCTURE_TOL),
            Err(Error::Structure { .. })
        ));
    }

    #[test]
    fn scalar_multiplication_sides() {
        let id2 = QMatrix::identity(2);
        assert_eq!(
            id2.scale_left(Quaternion::I),
            id2.scale_right(Quaternion::I)
        );
        let ti = QMatrix::diag(&[Quaternion::I]);
        assert_eq!(
            ti.scale_left(Quaternion::J),
            QMatrix::diag(&[-Quaternion::K])
        );
        assert_eq!(
            ti.scale_right(Quaternion::J),
            QMatrix::diag(&[Quaternion::K])
        );
    }

    #[test]
    fn identity_products_and_inverses() {
        let t = QMatrix::from_rows(vec![
            vec![q(1.0, 2.0, 0.0, -1.0), q(0.5, 0.0, 1.0, 0.0)],
            vec![q(0.0, 0.0, 0.0, 1.0), q(3.0, 0.0, 0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(t.matmul(&QMatrix::identity(2)).unwrap(), t);
        assert_eq!(QMatrix::identity(4).invert().unwrap(), QMatrix::identity(4));
        assert_eq!(
            QMatrix::diag(&[Quaternion::J]).invert().unwrap(),
            QMatrix::diag(&[-Quaternion::J])
        );
    }

    #[test]
    fn size_mismatch_and_cap() {
        let a = QMatrix::identity(2);
        let b = QMatrix::identity(3);
        assert!(matches!(a.matmul(&b), Err(Error::Dim(_))));
        assert!(matches!(a.add(&b), Err(Error::Dim(_))));
        assert!(matches!(
            QMatrix::from_entries(65, vec![Quaternion::ZERO; 65 * 65]),
            Err(Error::Size { n: 65, max: 64 })
        ));
    }

    #[test]
    fn norms_and_ranks() {
        assert!((QMatrix::identity(5).op_norm() - 1.0).abs() < 1e-15);
        let d = QMatrix::diag(&[Quaternion::ONE, Quaternion::ZERO]);
        assert_eq!(d.hrank(DEFAULT_RANK_TOL).unwrap(), 1);
        assert_eq!(QMatrix::zeros(3).hrank(DEFAULT_RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn right_linearity() {
        let t = QMatrix::from_rows(vec![
            vec![q(1.0, 2.0, 0.0, -1.0), q(0.5, 0.0, 1.0, 0.0)],
            vec![q(0.0, 0.3, 0.0, 1.0), q(3.0, 0.0, -2.0, 0.0)],
        ])
        .unwrap();
        let x = vec![q(0.2, -1.0, 0.5, 0.0), q(1.0, 0.0, 0.0, 2.0)];
        let s = q(0.1, 0.7, -0.3, 0.4);
        let lhs = t
            .apply(&x.iter().map(|&xi| xi * s).collect::<Vec<_>>())
            .unwrap();
        let rhs: Vec<_> = t.apply(&x).unwrap().into_iter().map(|y| y * s).collect();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((*a - *b).norm() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_ragged_rows() {
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0]);
        let text = t.to_json();
        assert_eq!(
            text,
            r#"{"n":2,"entries":[[[0.0,1.0,0.0,0.0],[0.0,0.0,0.0,0.0]],[[0.0,0.0,0.0,0.0],[0.0,0.0,2.0,0.0]]]}"#
        );
        assert_eq!(QMatrix::from_json(&text).unwrap(), t);
        let ragged = r#"{"n":2,"entries":[[[1,0,0,0],[0,0,0,0]],[[0,0,0,0]]]}"#;
        assert!(matches!(QMatrix::from_json(ragged), Err(Error::Parse(_))));
        assert!(matches!(
            QMatrix::from_json("{not json"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn powers() {
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::real(2.0)]);
        assert_eq!(t.pow(0), QMatrix::identity(2));
        assert_eq!(
            t.pow(3),
            QMatrix::diag(&[-Quaternion::I, Quaternion::real(8.0)])
        );
    }
}
