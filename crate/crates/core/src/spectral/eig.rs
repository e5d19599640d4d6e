//! Complex Schur decomposition: Householder reduction to Hessenberg form,
//! then single-shift QR with Wilkinson shifts and Givens chasing.

use num_complex::Complex64;

use crate::cmat::CMatrix;
use crate::error::{Error, Result};

/// Largest accepted side.
pub const MAX_EIG_DIM: usize = 128;

/// Relative deflation threshold on subdiagonal entries.
const DEFLATE: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Sorted by `(Re, Im)`.
    pub values: Vec<Complex64>,
    /// `max_i ‖M v_i − λ_i v_i‖ / max(‖M‖_F, 1)` over unit vectors `v_i`.
    pub residual: f64,
}

pub fn complex_eigs(m: &CMatrix) -> Result<Eigen> {
    complex_eigs_with(m, 30 * m.rows().max(1))
}

pub fn complex_eigs_with(m: &CMatrix, max_sweeps: usize) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Dim(format!(
            "eigenvalues of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > MAX_EIG_DIM {
        return Err(Error::Size {
            n: m.rows(),
            max: MAX_EIG_DIM,
        });
    }
    if !m.is_finite() {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let (t, z) = schur(m, max_sweeps)?;
    let n = m.rows();
    let scale = m.frobenius_norm().max(1.0);
    let mut residual: f64 = 0.0;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let y = triangular_eigvec(&t, i);
        let mut v = z.matvec(&y)?;
        let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= nv);
        let mv = m.matvec(&v)?;
        let r = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r / scale);
        values.push(lambda);
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Eigen { values, residual })
}

/// `(T, Z)` with `M = Z T Z^H`, `T` upper triangular, `Z` unitary.
pub fn schur(m: &CMatrix, max_sweeps: usize) -> Result<(CMatrix, CMatrix)> {
    let n = m.rows();
    let (mut h, mut z) = hessenberg(m);
    let norm = h.frobenius_norm();
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let mut hi = n.saturating_sub(1);
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= DEFLATE * diag || sub <= tiny {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::Convergence { sweeps: max_sweeps });
        }
        since_deflation += 1;
        let mu = if since_deflation % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, &mut z, l, hi, mu);
    }
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((h, z))
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let (r1, r2) = (d + half + disc, d + half - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Unitary `G = [[c, s], [-conj s, c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let rn = x.norm().hypot(y.norm());
    if rn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    (ax / rn, (x / ax) * y.conj() / rn)
}

fn qr_sweep(h: &mut CMatrix, z: &mut CMatrix, l: usize, hi: usize, mu: Complex64) {
    let n = h.rows();
    for k in l..hi {
        let (x, y) = if k == l {
            (h[(l, l)] - mu, h[(l + 1, l)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s) = givens(x, y);
        let c0 = if k == l { k } else { k - 1 };
        for j in c0..n {
            let (a, b) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        if k > l {
            h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
        }
        let rmax = (k + 2).min(hi);
        for i in 0..=rmax {
            let (a, b) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
        for i in 0..n {
            let (a, b) = (z[(i, k)], z[(i, k + 1)]);
            z[(i, k)] = a * c + b * s.conj();
            z[(i, k + 1)] = -a * s + b * c;
        }
    }
}

/// Householder reduction `M = Q H Q^H`; returns `(H, Q)`.
pub fn hessenberg(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let xnorm = ((k + 1)..n)
            .map(|r| h[(r, k)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|r| h[(r, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vn);
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v^H), Q <- Q (I - 2 v v^H)
        for mat in [&mut h, &mut q] {
            for r in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| mat[(r, k + 1 + i)] * vi)
                    .sum();
                for (i, vi) in v.iter().enumerate() {
                    mat[(r, k + 1 + i)] -= dot * vi.conj() * 2.0;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for r in (k + 2)..n {
            h[(r, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvector of upper triangular `t` for `t[i][i]`, by back substitution.
fn triangular_eigvec(t: &CMatrix, i: usize) -> Vec<Complex64> {
    let n = t.rows();
    let lambda = t[(i, i)];
    let floor = f64::EPSILON * t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[i] = Complex64::new(1.0, 0.0);
    for j in (0..i).rev() {
        let s: Complex64 = ((j + 1)..=i).map(|k| t[(j, k)] * y[k]).sum();
        let mut d = t[(j, j)] - lambda;
        if d.norm() < floor {
            d = Complex64::new(floor, 0.0);
        }
        y[j] = -s / d;
    }
    y
}
