//! Dense complex linear algebra sized for desk-scale quantum states.

pub mod eig;
pub mod matrix;
pub mod svd;
pub mod tensor;

pub use eig::{hermitian_eig, HermitianOperator, SpectralDecomposition};
pub use matrix::{basis_vector, cis, inner, kron_vec, norm, normalized, CMatrix, ONE, ZERO};
pub use svd::{complete_orthonormal, polar_unitary, svd, Svd};
pub use tensor::{apply_local_left, conjugate_local, embed_local, partial_trace};

use crate::error::{Error, Result};

/// Scalar functions applied to the spectrum on the operator's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFunction {
    Sqrt,
    /// Square root of the pseudoinverse.
    InvSqrt,
    /// Natural logarithm.
    Log,
    Log2,
}

/// Applies `f` to eigenvalues above `cutoff · λ_max`; the rest map to 0.
///
/// Errors if an eigenvalue is below `-psd_tol · max(1, λ_max)`.
pub fn matrix_function_on_support(
    a: &HermitianOperator,
    f: MatrixFunction,
    cutoff: f64,
    psd_tol: f64,
) -> Result<HermitianOperator> {
    let sd = a.eig()?;
    function_of_spectrum(&sd, f, cutoff, psd_tol)
}

pub(crate) fn function_of_spectrum(
    sd: &SpectralDecomposition,
    f: MatrixFunction,
    cutoff: f64,
    psd_tol: f64,
) -> Result<HermitianOperator> {
    let lmax = sd.max_eigenvalue();
    if let Some(&lmin) = sd.eigenvalues.last() {
        if lmin < -psd_tol * lmax.abs().max(1.0) {
            return Err(Error::NotPsd { min_eigenvalue: lmin });
        }
    }
    let floor = cutoff * lmax;
    let m = sd.reconstruct_with(|l| {
        if l <= floor || l <= 0.0 {
            return 0.0;
        }
        match f {
            MatrixFunction::Sqrt => l.sqrt(),
            MatrixFunction::InvSqrt => 1.0 / l.sqrt(),
            MatrixFunction::Log => l.ln(),
            MatrixFunction::Log2 => l.log2(),
        }
    });
    Ok(HermitianOperator::symmetrized(m))
}

/// Orthogonal projector onto eigenvectors with eigenvalue above `cutoff · λ_max`.
pub fn support_projector(sd: &SpectralDecomposition, cutoff: f64) -> CMatrix {
    let floor = cutoff * sd.max_eigenvalue();
    sd.reconstruct_with(|l| if l > floor && l > 0.0 { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(d: &[f64]) -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_real_diag(d), 1e-10).unwrap()
    }

    #[test]
    fn inv_sqrt_is_pseudoinverse_on_support() {
        let r = matrix_function_on_support(&herm(&[4.0, 0.0]), MatrixFunction::InvSqrt, 1e-10, 1e-10).unwrap();
        assert!(r.matrix().approx_eq(&CMatrix::from_real_diag(&[0.5, 0.0]), 1e-15));
    }

    #[test]
    fn sqrt_of_scaled_identity() {
        let r = matrix_function_on_support(&herm(&[0.25; 4]), MatrixFunction::Sqrt, 1e-10, 1e-10).unwrap();
        assert!(r.matrix().approx_eq(&CMatrix::from_real_diag(&[0.5; 4]), 1e-15));
    }

    #[test]
    fn log2_of_half_identity() {
        let r = matrix_function_on_support(&herm(&[0.5, 0.5]), MatrixFunction::Log2, 1e-10, 1e-10).unwrap();
        assert!(r.matrix().approx_eq(&CMatrix::from_real_diag(&[-1.0, -1.0]), 1e-15));
    }

    #[test]
    fn negative_spectrum_is_rejected() {
        let r = matrix_function_on_support(&herm(&[1.0, -0.1]), MatrixFunction::Sqrt, 1e-10, 1e-10);
        assert!(matches!(r, Err(Error::NotPsd { .. })));
    }
}
