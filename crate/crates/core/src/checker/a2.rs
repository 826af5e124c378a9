//! Reconstruction of ρ from its measured version through the Petz-type map
//! built from the twirled states, and the induced recovery channel.

use serde::{Deserialize, Serialize};

use crate::channels::{measure_channel, twirl, MeasurementBasis};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::ProjectiveUnitaryRep;
use crate::linalg::{self, function_of_spectrum, support_projector, CMatrix, HermitianOperator, MatrixFunction};
use crate::state::DensityMatrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct A2Witness {
    /// √G(ρ) · (√G∘B(ρ))⁺ · B(ρ) · (√G∘B(ρ))⁺ · √G(ρ).
    pub reconstructed: CMatrix,
    /// ‖ρ − reconstructed‖_F.
    pub residual: f64,
    /// √G(ρ)(√G∘B(ρ))⁺ on the support of G∘B(ρ), identity on its complement.
    pub recovery_factor: CMatrix,
    pub passed: bool,
}

/// Evaluates the reconstruction identity for ρ on A⊗B with the group acting on A
/// and the measurement on B.
pub fn check_a2(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<A2Witness> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a state on A⊗B, got dims {:?}", rho.dims())));
    }
    let measured = measure_channel(rho, basis, 1)?;
    let g_rho = twirl(rho, rep, 0)?;
    let gb_rho = twirl(&measured, rep, 0)?;

    let sqrt_g = function_of_spectrum(&g_rho.eig()?, MatrixFunction::Sqrt, tol.support_cutoff, tol.psd)?;
    let gb_eig = gb_rho.eig()?;
    let inv_sqrt_gb = function_of_spectrum(&gb_eig, MatrixFunction::InvSqrt, tol.support_cutoff, tol.psd)?;
    let support = support_projector(&gb_eig, tol.support_cutoff);

    let outside = &CMatrix::identity(rho.dim()) - &support;
    let leak = (&outside * measured.matrix()).trace().re;
    if leak > tol.support_leak {
        return Err(Error::Numerical(format!(
            "measured state leaks {leak:.3e} outside the support of its twirl"
        )));
    }

    let factor = sqrt_g.matrix() * inv_sqrt_gb.matrix();
    let reconstructed = measured.matrix().conjugate_by(&factor);
    let residual = (rho.matrix() - &reconstructed).frobenius_norm();
    Ok(A2Witness {
        recovery_factor: &factor + &outside,
        reconstructed,
        residual,
        passed: residual < tol.a2,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// max over g of ‖Γ(B(U_g ρ U_g†)) − U_g ρ U_g†‖_tr.
    pub max_trace_distance: f64,
    pub worst_element: usize,
    pub passed: bool,
}

fn trace_norm(m: &CMatrix) -> Result<f64> {
    let sd = HermitianOperator::symmetrized(m.clone()).eig()?;
    Ok(sd.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// Applies Γ(σ) = TσT† to every covariant measured state.
pub fn recovery_map_check(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    witness: &A2Witness,
    tol: &Tolerances,
) -> Result<RecoveryReport> {
    let measured = measure_channel(rho, basis, 1)?;
    let t = &witness.recovery_factor;
    let mut worst = (0.0f64, 0usize);
    for (g, u) in rep.matrices().iter().enumerate() {
        let target = linalg::conjugate_local(u, rho.matrix(), rho.dims(), 0)?;
        let input = linalg::conjugate_local(u, measured.matrix(), rho.dims(), 0)?;
        let d = trace_norm(&(&input.conjugate_by(t) - &target))?;
        if d > worst.0 {
            worst = (d, g);
        }
    }
    Ok(RecoveryReport { max_trace_distance: worst.0, worst_element: worst.1, passed: worst.0 < tol.a2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::memory_gap;
    use crate::group::{build_cyclic_shift_rep, build_diagonal_character_rep};
    use crate::linalg::ZERO;
    use crate::random::{random_density_matrix, rng_from_seed};
    use crate::state::PureState;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)], vec![2, 2], &tol()).unwrap().density()
    }

    fn z2() -> ProjectiveUnitaryRep {
        build_diagonal_character_rep(&[2], &[vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn bell_fails_in_computational_basis() {
        let w = check_a2(&bell(), &z2(), &MeasurementBasis::computational(2), &tol()).unwrap();
        assert!(w.residual > 0.1 && !w.passed);
        let r = recovery_map_check(&bell(), &z2(), &MeasurementBasis::computational(2), &w, &tol()).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn bell_passes_in_fourier_basis() {
        let basis = MeasurementBasis::fourier(2);
        let w = check_a2(&bell(), &z2(), &basis, &tol()).unwrap();
        assert!(w.residual < 1e-9);
        let r = recovery_map_check(&bell(), &z2(), &basis, &w, &tol()).unwrap();
        assert!(r.max_trace_distance < 1e-9);
    }

    #[test]
    fn classical_quantum_states_pass() {
        let mut rng = rng_from_seed(51);
        let rep = build_cyclic_shift_rep(3).unwrap();
        let parts: Vec<DensityMatrix> = (0..2)
            .map(|k| {
                let a = DensityMatrix::from_trusted(random_density_matrix(3, 2, &mut rng), vec![3]).unwrap();
                let e = DensityMatrix::from_trusted(CMatrix::projector(&linalg::basis_vector(2, k)), vec![2]).unwrap();
                a.tensor(&e)
            })
            .collect();
        let rho = DensityMatrix::mixture(&[(0.3, &parts[0]), (0.7, &parts[1])]).unwrap();
        let w = check_a2(&rho, &rep, &MeasurementBasis::computational(2), &tol()).unwrap();
        assert!(w.residual < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn a2_agrees_with_gap(seed in any::<u64>(), rank in 1usize..=6) {
            let rep = build_cyclic_shift_rep(3).unwrap();
            let mut rng = rng_from_seed(seed);
            let rho = DensityMatrix::from_trusted(random_density_matrix(6, rank, &mut rng), vec![3, 2]).unwrap();
            let basis = MeasurementBasis::haar(2, &mut rng);
            let w = check_a2(&rho, &rep, &basis, &tol()).unwrap();
            let g = memory_gap(&rho, &rep, &basis, &tol()).unwrap();
            prop_assert_eq!(w.passed, g.useless_at_basis);
        }
    }
}
