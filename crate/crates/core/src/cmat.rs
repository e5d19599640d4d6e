//! Dense complex matrices: the numerical kernel behind every quaternionic
//! computation. Quaternionic matrices are mapped here through the complex
//! adjoint embedding (see [`crate::qmat::QMatrix::chi`]).

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut out = CMatrix::zeros(m, m);
        for i in 0..m {
            out[(i, i)] = ONE;
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds from nested rows; rejects ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dim("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut out = CMatrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            out[(i, i)] = v;
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dim(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dim(format!(
                "{}x{} times vector of {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    fn zip_with(
        &self,
        other: &CMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// LU factorization with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] when a pivot magnitude drops below
    /// `pivot_tol * ‖self‖_F`.
    pub fn lu(&self, pivot_tol: f64) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::Dim(format!("LU of {}x{}", self.rows, self.cols)));
        }
        let m = self.rows;
        let threshold = pivot_tol * self.frobenius_norm();
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let (p, pivot) = (k..m)
                .map(|r| (r, a[(r, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot > threshold) {
                return Err(Error::Singular { pivot, threshold });
            }
            if p != k {
                for c in 0..m {
                    a.data.swap(k * m + c, p * m + c);
                }
                perm.swap(k, p);
            }
            let inv = ONE / a[(k, k)];
            for r in (k + 1)..m {
                let f = a[(r, k)] * inv;
                if f == ZERO {
                    continue;
                }
                a[(r, k)] = f;
                for c in (k + 1)..m {
                    let t = a[(k, c)];
                    a[(r, c)] -= f * t;
                }
            }
        }
        Ok(Lu { lu: a, perm })
    }

    pub fn solve(&self, rhs: &CMatrix, pivot_tol: f64) -> Result<CMatrix> {
        self.lu(pivot_tol)?.solve(rhs)
    }

    /// Singular values in descending order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        // Work on columns of A, or of A^H when A is wide.
        let a = if self.rows >= self.cols {
            self.clone()
        } else {
            self.adjoint()
        };
        let (rows, cols) = (a.rows, a.cols);
        let mut colv: Vec<Vec<Complex64>> = (0..cols).map(|c| a.column(c)).collect();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..cols {
                for q in (p + 1)..cols {
                    let (alpha, beta, gamma) = {
                        let (cp, cq) = (&colv[p], &colv[q]);
                        let mut alpha = 0.0;
                        let mut beta = 0.0;
                        let mut gamma = ZERO;
                        for i in 0..rows {
                            alpha += cp[i].norm_sqr();
                            beta += cq[i].norm_sqr();
                            gamma += cp[i].conj() * cq[i];
                        }
                        (alpha, beta, gamma)
                    };
                    let g = gamma.norm();
                    if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let (left, right) = colv.split_at_mut(q);
                    let cp = &mut left[p];
                    let cq = &mut right[0];
                    for i in 0..rows {
                        let xp = cp[i];
                        let xq = cq[i] * phase.conj();
                        cp[i] = xp * c - xq * s;
                        cq[i] = (xp * s + xq * c) * phase;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = colv
            .iter()
            .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }
}

/// Packed LU factors with row permutation.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let m = self.lu.rows;
        if rhs.rows != m {
            return Err(Error::Dim(format!(
                "solve with {} rows against {m}",
                rhs.rows
            )));
        }
        let k = rhs.cols;
        let mut x = CMatrix::from_fn(m, k, |r, c| rhs[(self.perm[r], c)]);
        for r in 0..m {
            for j in 0..r {
                let l = self.lu[(r, j)];
                if l == ZERO {
                    continue;
                }
                for c in 0..k {
                    let t = x[(j, c)];
                    x[(r, c)] -= l * t;
                }
            }
        }
        for r in (0..m).rev() {
            for j in (r + 1)..m {
                let u = self.lu[(r, j)];
                if u == ZERO {
                    continue;
                }
                for c in 0..k {
                    let t = x[(j, c)];
                    x[(r, c)] -= u * t;
                }
            }
            let inv = ONE / self.lu[(r, r)];
            for c in 0..k {
                x[(r, c)] *= inv;
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_small_system() {
        let a = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 3.0)],
            vec![c(4.0, 0.0), c(0.0, 0.0), c(-1.0, 1.0)],
        ])
        .unwrap();
        let b = CMatrix::identity(3);
        let x = a.solve(&b, 1e-14).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(r.frobenius_norm() < 1e-14);
    }

    #[test]
    fn lu_flags_singular() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(a.lu(1e-13), Err(Error::Singular { .. })));
    }

    #[test]
    fn singular_values_of_known_matrices() {
        let d = CMatrix::diag(&[c(3.0, 4.0), c(0.0, -2.0), c(0.0, 0.0)]);
        let sv = d.singular_values();
        assert!((sv[0] - 5.0).abs() < 1e-14 && (sv[1] - 2.0).abs() < 1e-14 && sv[2] == 0.0);
        // [[1,1],[0,1]] has singular values golden ratio and its inverse.
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let sv = a.singular_values();
        assert!((sv[0] - phi).abs() < 1e-14 && (sv[1] - 1.0 / phi).abs() < 1e-14);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(CMatrix::from_rows(&[vec![ONE], vec![ONE, ONE]]).is_err());
    }
}
