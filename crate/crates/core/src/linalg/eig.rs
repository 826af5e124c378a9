//! Cyclic Jacobi diagonalisation of complex Hermitian matrices.
//!
//! Each rotation first strips the phase of the pivot a_pq, then applies the
//! classical real symmetric Jacobi rotation. Sweeps run in a fixed (p, q)
//! order so that results are bit-reproducible for a given input.

use num_complex::Complex64 as C64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// A square matrix known to be Hermitian within a tolerance; stored exactly
/// Hermitian after symmetrisation.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Accepts `m` if ‖m − m†‖_F ≤ tol·‖m‖_F, symmetrising it; errors otherwise.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let defect = m.hermiticity_defect();
        let scale = m.frobenius_norm().max(1e-300);
        if defect > tol * scale && defect > 1e-300 {
            return Err(Error::NotHermitian { relative_defect: defect / scale });
        }
        Ok(HermitianOperator(m.hermitian_part()))
    }

    /// Symmetrises without checking. For matrices Hermitian by construction.
    pub fn symmetrized(m: CMatrix) -> Self {
        HermitianOperator(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        hermitian_eig(self)
    }
}

/// Eigenvalues in descending order with the matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// V diag(f(λ)) V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in fl.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Full eigendecomposition of a Hermitian operator.
pub fn hermitian_eig(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = CMatrix::identity(n);
    let total = a.frobenius_norm();
    if n == 0 {
        return Ok(SpectralDecomposition { eigenvalues: vec![], eigenvectors: v });
    }
    let threshold = f64::EPSILON * (n as f64) * total.max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > threshold * 1e3 {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, residual: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = v.select_columns(&order);
    normalize_phases(&mut eigenvectors);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let scale = app.abs().max(aqq.abs());
    if scale > 0.0 && mag < 1e-18 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let e = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
    // G = [[c, s], [-s ē, c ē]] acting on columns p, q.
    let ebar = e.conj();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * ebar * s;
        a[(i, q)] = aip * s + aiq * ebar * c;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * e * s;
        a[(q, j)] = apj * s + aqj * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * ebar * s;
        v[(i, q)] = vip * s + viq * ebar * c;
    }
}

/// Rotates each column so its first non-negligible component is real positive.
fn normalize_phases(v: &mut CMatrix) {
    for k in 0..v.cols() {
        let col = v.column(k);
        let Some(pivot) = col.iter().find(|z| z.norm() > 1e-8) else { continue };
        let phase = pivot.conj() / pivot.norm();
        for (i, z) in col.iter().enumerate() {
            v[(i, k)] = z * phase;
        }
    }
}
