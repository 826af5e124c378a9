//! Block conditions for pure states: after measuring B, each outcome must
//! leave the same irrep distribution and the same irrep-factor marginals.

use serde::{Deserialize, Serialize};

use crate::capacity::block_states;
use crate::channels::{conditional_states, MeasurementBasis};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::IrrepDecomposition;
use crate::linalg::CMatrix;
use crate::state::PureState;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Report {
    pub block_probabilities: Vec<f64>,
    /// max_k ‖P_{Λ|k} − P_Λ‖₁.
    pub distribution_deviation: f64,
    /// max over λ, k, k' of ‖tr_{M_λ} ρ_{λ,k} − tr_{M_λ} ρ_{λ,k'}‖_F.
    pub marginal_deviation: f64,
    pub outcomes_used: usize,
    pub passed: bool,
}

pub fn check_c1(psi: &PureState, dec: &IrrepDecomposition, basis: &MeasurementBasis, tol: &Tolerances) -> Result<C1Report> {
    if psi.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a pure state on A⊗B, got dims {:?}", psi.dims())));
    }
    let rho = psi.density();
    let global: Vec<f64> = block_states(&rho, dec, tol.outcome_cutoff)?.iter().map(|b| b.probability).collect();
    let conds = conditional_states(&rho, basis, tol)?;

    let nb = dec.blocks.len();
    let mut marginals: Vec<Vec<CMatrix>> = vec![Vec::new(); nb];
    let mut dist_dev = 0.0f64;
    for c in &conds.conditionals {
        let blocks = block_states(&c.state, dec, tol.outcome_cutoff)?;
        let dev: f64 = blocks.iter().zip(&global).map(|(b, p)| (b.probability - p).abs()).sum();
        dist_dev = dist_dev.max(dev);
        for b in &blocks {
            if let Some(st) = &b.state {
                marginals[b.index].push(st.partial_trace(&[0])?.matrix().clone());
            }
        }
    }
    let mut marg_dev = 0.0f64;
    for list in &marginals {
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                marg_dev = marg_dev.max((&list[i] - &list[j]).frobenius_norm());
            }
        }
    }
    Ok(C1Report {
        block_probabilities: global,
        distribution_deviation: dist_dev,
        marginal_deviation: marg_dev,
        outcomes_used: conds.conditionals.len(),
        passed: dist_dev < tol.c1 && marg_dev < tol.c1,
    })
}

/// A maximally entangled state admits the block form iff every irrep's
/// multiplicity is at least its dimension.
pub fn check_max_entangled_c1(dec: &IrrepDecomposition) -> bool {
    dec.multiplicity_dominates_dimension()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::memory_gap;
    use crate::group::{build_block_rep, build_diagonal_character_rep, decompose_abelian, IrrepBlock, FiniteGroupSpec};
    use crate::linalg::ZERO;
    use num_complex::Complex64 as C64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)], vec![2, 2], &tol()).unwrap()
    }

    #[test]
    fn bell_examples() {
        let rep = build_diagonal_character_rep(&[2], &[vec![0], vec![1]]).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let f = check_c1(&bell(), &dec, &MeasurementBasis::fourier(2), &tol()).unwrap();
        assert!(f.passed);
        let g = memory_gap(&bell().density(), &rep, &MeasurementBasis::fourier(2), &tol()).unwrap();
        assert!(g.useless_at_basis);
        let c = check_c1(&bell(), &dec, &MeasurementBasis::computational(2), &tol()).unwrap();
        assert!(!c.passed);
        assert!((c.distribution_deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multiplicity_condition() {
        let rep = build_diagonal_character_rep(&[2], &[vec![0], vec![1]]).unwrap();
        assert!(check_max_entangled_c1(&decompose_abelian(&rep, 0).unwrap()));
        let (_, std) = crate::group::symmetric3_irreps();
        let (_, dec) = build_block_rep(
            FiniteGroupSpec::symmetric3(),
            vec![IrrepBlock { label: "std".into(), irrep_dim: 2, multiplicity: 1, matrices: std.clone() }],
        )
        .unwrap();
        assert!(!check_max_entangled_c1(&dec));
        let (_, dec) = build_block_rep(
            FiniteGroupSpec::symmetric3(),
            vec![IrrepBlock { label: "std".into(), irrep_dim: 2, multiplicity: 2, matrices: std }],
        )
        .unwrap();
        assert!(check_max_entangled_c1(&dec));
    }
}
