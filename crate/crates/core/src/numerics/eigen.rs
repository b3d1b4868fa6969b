//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use super::{Matrix, SymMatrix};
use crate::{Error, Result};

/// Off-diagonal Frobenius norm target, relative to ‖A‖F.
const OFF_DIAG_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition `A = V diag(values) Vᵀ`.
///
/// `values` are sorted in descending order and column `k` of `vectors` is the
/// eigenvector for `values[k]`. Each eigenvector has its largest-magnitude
/// entry positive (lowest index on ties).
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigDecomp {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V diag(weights) Vᵀ`; zero weights are skipped.
    pub fn reconstruct_with(&self, weights: &[f64]) -> SymMatrix {
        let n = self.dim();
        assert_eq!(weights.len(), n);
        let active: Vec<usize> = (0..n).filter(|&k| weights[k] != 0.0).collect();
        let mut data = vec![0.0; n * n];
        let v = self.vectors.as_slice();
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for &k in &active {
                    acc += weights[k] * v[i * n + k] * v[j * n + k];
                }
                data[i * n + j] = acc;
                data[j * n + i] = acc;
            }
        }
        SymMatrix::from_raw(n, data)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(&self.values)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eigh(a: &SymMatrix) -> Result<EigDecomp> {
    check_finite(a)?;
    let n = a.dim();
    let mut work = a.as_slice().to_vec();
    let mut vecs = identity(n);
    jacobi_in_place(&mut work, &mut vecs, n);
    Ok(finish(n, &work, vecs))
}

/// Jacobi started from an approximate eigenbasis `basis` (orthonormal columns).
///
/// Rotating `A` into the basis first leaves a nearly diagonal matrix, so a
/// sequence of slowly varying inputs (e.g. ADMM iterates) needs only one or
/// two sweeps per call. The result obeys the same contract as [`eigh`].
pub fn eigh_with_basis(a: &SymMatrix, basis: &Matrix) -> Result<EigDecomp> {
    check_finite(a)?;
    let n = a.dim();
    if basis.rows() != n || basis.cols() != n {
        return Err(Error::invalid("basis dimension mismatch"));
    }
    let v = basis.as_slice();
    // B = Vᵀ A V
    let av = matmul(a.as_slice(), v, n);
    let mut work = matmul_tn(v, &av, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (work[i * n + j] + work[j * n + i]);
            work[i * n + j] = s;
            work[j * n + i] = s;
        }
    }
    let mut rot = identity(n);
    jacobi_in_place(&mut work, &mut rot, n);
    let vecs = matmul(v, &rot, n);
    Ok(finish(n, &work, vecs))
}

fn check_finite(a: &SymMatrix) -> Result<()> {
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("eigh: non-finite entries"));
    }
    Ok(())
}

fn identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    v
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let bk = &b[k * n..(k + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(bk) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// `aᵀ b`.
fn matmul_tn(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for k in 0..n {
        let ak = &a[k * n..(k + 1) * n];
        let bk = &b[k * n..(k + 1) * n];
        for i in 0..n {
            let aki = ak[i];
            if aki == 0.0 {
                continue;
            }
            let row = &mut out[i * n..(i + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(bk) {
                *o += aki * bkj;
            }
        }
    }
    out
}

fn off_diag_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// Diagonalizes `a` in place, accumulating rotations into the columns of `v`.
fn jacobi_in_place(a: &mut [f64], v: &mut [f64], n: usize) {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_DIAG_TOL * norm;
    // Entries this small cannot keep the off-diagonal norm above `target`.
    let skip = target / n.max(1) as f64;
    for _ in 0..MAX_SWEEPS {
        if off_diag_norm(a, n) <= target {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
}

fn finish(n: usize, diag_work: &[f64], vecs: Vec<f64>) -> EigDecomp {
    let raw: Vec<f64> = (0..n).map(|i| diag_work[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // descending; ties keep the lower index first
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]).then(i.cmp(&j)));

    let values = order.iter().map(|&k| raw[k]).collect();
    let mut sorted = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..n {
            let x = vecs[i * n + k].abs();
            if x > best_abs {
                best_abs = x;
                best = i;
            }
        }
        let sign = if vecs[best * n + k] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            sorted[i * n + col] = sign * vecs[i * n + k];
        }
    }
    EigDecomp {
        values,
        vectors: Matrix::from_row_major(n, n, sorted).expect("finite eigenvectors"),
    }
}

/// Largest singular value of a rectangular matrix.
///
/// Computed as the square root of the top eigenvalue of the smaller Gram
/// matrix, so `spectral_norm(A) == spectral_norm(Aᵀ)` for non-square `A`.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("spectral_norm: non-finite entries"));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let gram = if a.rows() <= a.cols() {
        a.gram_rows()
    } else {
        a.transpose().gram_rows()
    };
    let top = eigh(&gram)?.values[0];
    Ok(top.max(0.0).sqrt())
}

/// ‖A‖₂ of a symmetric matrix, as the largest eigenvalue magnitude.
pub fn sym_spectral_norm(a: &SymMatrix) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    let e = eigh(a)?;
    Ok(e.values[0].abs().max(e.values[e.dim() - 1].abs()))
}
