//! One-sided (Hestenes) Jacobi SVD. Small singular values come out with high
//! relative accuracy, which the numerical-rank tests depend on.

use num_complex::Complex64 as C64;

use super::matrix::{inner, CMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct Svd {
    /// m×n; columns with σ = 0 are left as zero vectors.
    pub u: CMatrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// n×n unitary.
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().filter(|&&s| s > rel_tol * smax).count()
    }
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = CMatrix::identity(n);

    let total_sq: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    let floor = f64::EPSILON * f64::EPSILON * total_sq;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g <= floor || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ebar = e.conj();
                for i in 0..m {
                    let (xp, xq) = (cols[p][i], cols[q][i]);
                    cols[p][i] = xp * c - xq * ebar * s;
                    cols[q][i] = xp * s + xq * ebar * c;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vp * c - vq * ebar * s;
                    v[(i, q)] = vp * s + vq * ebar * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, residual: f64::NAN });
    }

    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u = CMatrix::zeros(m, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular_values.push(s);
        if s > 0.0 {
            let col: Vec<C64> = cols[j].iter().map(|z| z / s).collect();
            u.set_column(k, &col);
        }
    }
    Ok(Svd { u, singular_values, v: v.select_columns(&order) })
}

/// Unitary polar factor of a square matrix (the closest unitary in Frobenius norm).
/// Rank-deficient inputs get their null directions completed arbitrarily.
pub fn polar_unitary(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("polar factor needs a square matrix".into()));
    }
    let d = svd(a)?;
    let n = a.rows();
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for k in 0..n {
        if d.singular_values[k] > 1e-12 * smax.max(f64::MIN_POSITIVE) {
            u_cols.push(d.u.column(k));
        }
    }
    let u = complete_orthonormal(&u_cols, n);
    Ok(&u * &d.v.adjoint())
}

/// Extends orthonormal vectors to an orthonormal basis of C^n (as matrix columns).
pub fn complete_orthonormal(vectors: &[Vec<C64>], n: usize) -> CMatrix {
    let mut basis: Vec<Vec<C64>> = vectors.to_vec();
    let mut candidate = 0;
    while basis.len() < n && candidate < n {
        let mut v = super::matrix::basis_vector(n, candidate);
        candidate += 1;
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = super::matrix::norm(&v);
        if nv > 1e-6 {
            basis.push(v.iter().map(|z| z / nv).collect());
        }
    }
    CMatrix::from_columns(&basis).expect("equal-length columns")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_gaussian_matrix, rng_from_seed};

    #[test]
    fn reconstructs_random_matrices() {
        let mut rng = rng_from_seed(3);
        for (m, n) in [(5, 3), (3, 5), (4, 4)] {
            let a = random_gaussian_matrix(m, n, &mut rng);
            let d = svd(&a).unwrap();
            let sig = CMatrix::from_real_diag(&d.singular_values);
            let rebuilt = &(&d.u * &sig) * &d.v.adjoint();
            assert!((&rebuilt - &a).frobenius_norm() < 1e-12, "{m}x{n}");
        }
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let v: Vec<C64> = (0..4).map(|i| C64::new(i as f64 + 1.0, 0.5)).collect();
        let a = CMatrix::outer(&v, &v);
        assert_eq!(svd(&a).unwrap().rank(1e-9), 1);
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let mut rng = rng_from_seed(4);
        let u = crate::random::haar_unitary(4, &mut rng);
        assert!(polar_unitary(&u).unwrap().approx_eq(&u, 1e-12));
    }
}
