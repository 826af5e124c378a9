//! Structural witnesses for memory uselessness: a unitary V on A⊗B and a
//! direct-sum decomposition ⊕_j L_j⊗R_j such that, after copying B into B̃,
//! U_g ρ' U_g† = (V⊗I)(⊕_j p_{j|g} η_{L_j,g} ⊗ η_{R_jB̃})(V⊗I)† for every g.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{cnot_extend, conditional_states, MeasurementBasis};
use crate::config::Tolerances;
use crate::construct::PhaseMixtureParams;
use crate::error::{Error, Result};
use crate::group::{IrrepDecomposition, ProjectiveUnitaryRep};
use crate::linalg::{cis, complete_orthonormal, conjugate_local, CMatrix, HermitianOperator, ZERO};
use crate::state::DensityMatrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessBlock {
    pub left_dim: usize,
    pub right_dim: usize,
    /// p_{j|g} for every group element.
    pub probabilities: Vec<f64>,
    /// η_{L_j,g} for every group element.
    pub left_states: Vec<CMatrix>,
    /// η_{R_jB̃}, of size right_dim·d_B.
    pub right_state: CMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SixItemWitness {
    /// V on A⊗B. Block j occupies the index range starting at Σ_{i<j} l_i r_i.
    pub unitary: CMatrix,
    pub blocks: Vec<WitnessBlock>,
}

impl SixItemWitness {
    pub fn validate(&self, da: usize, db: usize, order: usize) -> Result<()> {
        let total: usize = self.blocks.iter().map(|b| b.left_dim * b.right_dim).sum();
        if total != da * db || self.unitary.rows() != da * db || self.unitary.cols() != da * db {
            return Err(Error::Dimension(format!(
                "witness spans {total} dimensions with a {}x{} unitary, expected {}",
                self.unitary.rows(),
                self.unitary.cols(),
                da * db
            )));
        }
        for b in &self.blocks {
            if b.probabilities.len() != order || b.left_states.len() != order {
                return Err(Error::Dimension(format!("witness blocks need data for all {order} group elements")));
            }
            if b.left_states.iter().any(|m| m.rows() != b.left_dim || m.cols() != b.left_dim) {
                return Err(Error::Dimension("left state has the wrong size".into()));
            }
            let r = b.right_dim * db;
            if b.right_state.rows() != r || b.right_state.cols() != r {
                return Err(Error::Dimension("right state has the wrong size".into()));
            }
        }
        for g in 0..order {
            let s: f64 = self.blocks.iter().map(|b| b.probabilities[g]).sum();
            if (s - 1.0).abs() > 1e-9 || self.blocks.iter().any(|b| b.probabilities[g] < -1e-12) {
                return Err(Error::InvalidArgument(format!("block probabilities for element {g} are not a distribution")));
            }
        }
        Ok(())
    }

    fn assemble(&self, g: usize) -> CMatrix {
        let parts: Vec<CMatrix> = self
            .blocks
            .iter()
            .map(|b| b.left_states[g].kron(&b.right_state).scale_real(b.probabilities[g]))
            .collect();
        CMatrix::direct_sum(&parts)
    }
}

/// max over g of the Frobenius distance between both sides of the witness identity.
pub fn verify_six_item(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    w: &SixItemWitness,
) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a state on A⊗B, got dims {:?}", rho.dims())));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    w.validate(da, db, rep.order())?;
    let extended = cnot_extend(rho, basis)?;
    let v = w.unitary.kron(&CMatrix::identity(db));
    let residuals: Result<Vec<f64>> = (0..rep.order())
        .into_par_iter()
        .map(|g| {
            let lhs = conjugate_local(rep.matrix(g), extended.matrix(), extended.dims(), 0)?;
            let rhs = w.assemble(g).conjugate_by(&v);
            Ok((&lhs - &rhs).frobenius_norm())
        })
        .collect();
    Ok(residuals?.into_iter().fold(0.0, f64::max))
}

/// Witness for a phase mixture: a single block with L = A, R = B and V the
/// inverse of the controlled unitary Σ_k V_k ⊗ |e_k⟩⟨e_k| that aligns every
/// ψ_{λ,k} with ψ_{λ,0}.
pub fn phase_mixture_witness(
    params: &PhaseMixtureParams,
    rep: &ProjectiveUnitaryRep,
    dec: &IrrepDecomposition,
    basis: &MeasurementBasis,
) -> Result<SixItemWitness> {
    params.validate(dec)?;
    let (da, db) = (dec.dim(), basis.dim());
    if params.outcomes() != db {
        return Err(Error::Dimension(format!("{} outcomes for a {db}-dim basis", params.outcomes())));
    }
    let w = &dec.basis_change;

    // V_k in block coordinates, then rotated back to A.
    let mut controlled = CMatrix::zeros(da * db, da * db);
    for k in 0..db {
        let mut parts = Vec::with_capacity(dec.blocks.len());
        for (b, blk) in dec.blocks.iter().enumerate() {
            let (d, n) = (blk.irrep_dim, blk.multiplicity);
            if params.block_weights[b] <= 0.0 {
                parts.push(CMatrix::identity(d * n));
                continue;
            }
            let reference = schmidt_vectors(&params.block_vectors[b][0], &params.block_vectors[b][0], d, n)?;
            let current = schmidt_vectors(&params.block_vectors[b][0], &params.block_vectors[b][k], d, n)?;
            let to = complete_orthonormal(&reference, n);
            let from = complete_orthonormal(&current, n);
            let align = &to * &from.adjoint();
            parts.push(CMatrix::identity(d).kron(&align).scale(cis(-params.block_phases[b][k])));
        }
        let vk = CMatrix::direct_sum(&parts).conjugate_by(w);
        let ek = basis.vector(k);
        controlled = &controlled + &vk.kron(&CMatrix::projector(&ek));
    }

    let mut psi_a = vec![ZERO; da];
    for (b, &p) in params.block_weights.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let lifted = dec.block_columns(b).mul_vec(&params.block_vectors[b][0]);
        for (x, y) in psi_a.iter_mut().zip(&lifted) {
            *x += y * p.sqrt();
        }
    }
    let left_states = rep.matrices().iter().map(|u| CMatrix::projector(&u.mul_vec(&psi_a))).collect();

    let mut right = CMatrix::zeros(db * db, db * db);
    for j in 0..params.classes() {
        let mut v = vec![ZERO; db * db];
        for k in 0..db {
            let c = cis(params.class_phases[k][j]) * params.outcome_given_class[j][k].sqrt();
            let ek = basis.vector(k);
            for (x, y) in v.iter_mut().zip(crate::linalg::kron_vec(&ek, &ek)) {
                *x += c * y;
            }
        }
        right = &right + &CMatrix::projector(&v).scale_real(params.class_weights[j]);
    }

    Ok(SixItemWitness {
        unitary: controlled.adjoint(),
        blocks: vec![WitnessBlock {
            left_dim: da,
            right_dim: db,
            probabilities: vec![1.0; rep.order()],
            left_states,
            right_state: right,
        }],
    })
}

/// Multiplicity-space Schmidt vectors m_l = (⟨r_l|⊗I)ψ / √c_l, where (r_l, c_l)
/// diagonalise the H_λ marginal of `reference`.
fn schmidt_vectors(reference: &[C64], psi: &[C64], d: usize, n: usize) -> Result<Vec<Vec<C64>>> {
    let m_ref = CMatrix::from_vec(d, n, reference.to_vec())?;
    let marginal = HermitianOperator::symmetrized(&m_ref * &m_ref.adjoint());
    let sd = marginal.eig()?;
    let m = CMatrix::from_vec(d, n, psi.to_vec())?;
    let cutoff = 1e-12 * sd.max_eigenvalue().max(1e-300);
    let mut out = Vec::new();
    for (i, &c) in sd.eigenvalues.iter().enumerate() {
        if c <= cutoff {
            continue;
        }
        let r = sd.vector(i);
        let v: Vec<C64> = (0..n).map(|mm| (0..d).map(|a| r[a].conj() * m[(a, mm)]).sum::<C64>() / c.sqrt()).collect();
        out.push(v);
    }
    Ok(out)
}

/// Witness for ρ = Σ_k P_K(k) ρ_k ⊗ |e_k⟩⟨e_k|: one block per outcome with L = A,
/// R one-dimensional, and V sending |a⟩ of block k to |a⟩|e_k⟩.
pub fn classical_quantum_witness(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<SixItemWitness> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a state on A⊗B, got dims {:?}", rho.dims())));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let conds = conditional_states(rho, basis, tol)?;
    let mut unitary = CMatrix::zeros(da * db, da * db);
    let mut blocks = Vec::with_capacity(db);
    for k in 0..db {
        let ek = basis.vector(k);
        for a in 0..da {
            let col = crate::linalg::kron_vec(&crate::linalg::basis_vector(da, a), &ek);
            unitary.set_column(k * da + a, &col);
        }
        let (p, state) = match conds.conditionals.iter().find(|c| c.outcome == k) {
            Some(c) => (c.probability, c.state.partial_trace(&[0])?.matrix().clone()),
            None => (0.0, CMatrix::identity(da).scale_real(1.0 / da as f64)),
        };
        blocks.push(WitnessBlock {
            left_dim: da,
            right_dim: 1,
            probabilities: vec![p; rep.order()],
            left_states: rep.matrices().iter().map(|u| state.conjugate_by(u)).collect(),
            right_state: CMatrix::projector(&ek),
        });
    }
    // Renormalise against dropped outcomes so each p_{·|g} is a distribution.
    let total: f64 = blocks.iter().map(|b| b.probabilities[0]).sum();
    for b in &mut blocks {
        for p in &mut b.probabilities {
            *p /= total;
        }
    }
    Ok(SixItemWitness { unitary, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_fourier_mixture, build_phase_mixture, random_phase_mixture_params};
    use crate::group::{build_cyclic_shift_rep, build_diagonal_character_rep, decompose_abelian};
    use crate::random::{haar_unitary, random_density_matrix, random_distribution, random_hermitian, rng_from_seed};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn perturb(w: &SixItemWitness, seed: u64) -> SixItemWitness {
        let mut rng = rng_from_seed(seed);
        let n = w.unitary.rows();
        let h = random_hermitian(n, &mut rng);
        // exp(0.3 i H) via its spectrum.
        let sd = HermitianOperator::symmetrized(h).eig().unwrap();
        let mut kick = CMatrix::zeros(n, n);
        for (i, &x) in sd.eigenvalues.iter().enumerate() {
            let v = sd.vector(i);
            kick = &kick + &CMatrix::projector(&v).scale(cis(0.3 * x));
        }
        SixItemWitness { unitary: &w.unitary * &kick, blocks: w.blocks.clone() }
    }

    #[test]
    fn fourier_mixture_witness_verifies() {
        let rep = build_diagonal_character_rep(&[3], &[vec![0], vec![1], vec![2]]).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let mut rng = rng_from_seed(4);
        for _ in 0..3 {
            let m = build_fourier_mixture(&dec, 3, &random_distribution(3, &mut rng)).unwrap();
            let w = phase_mixture_witness(&m.params, &rep, &dec, &m.basis).unwrap();
            let r = verify_six_item(&m.rho, &rep, &m.basis, &w).unwrap();
            assert!(r < 1e-10, "residual {r}");
            assert!(verify_six_item(&m.rho, &rep, &m.basis, &perturb(&w, 1)).unwrap() > 1e-2);
        }
    }

    #[test]
    fn random_phase_mixture_witness_with_multiplicity() {
        let rep = build_diagonal_character_rep(&[2], &[vec![0], vec![1], vec![1]]).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let mut rng = rng_from_seed(8);
        let p = random_phase_mixture_params(&dec, 2, 2, &mut rng);
        let basis = MeasurementBasis::haar(2, &mut rng);
        let (_, rho) = build_phase_mixture(&p, &dec, &basis).unwrap();
        let w = phase_mixture_witness(&p, &rep, &dec, &basis).unwrap();
        assert!(verify_six_item(&rho, &rep, &basis, &w).unwrap() < 1e-9);
    }

    #[test]
    fn classical_quantum_witness_verifies() {
        let rep = build_cyclic_shift_rep(3).unwrap();
        let mut rng = rng_from_seed(6);
        let basis = MeasurementBasis::from_unitary(haar_unitary(2, &mut rng)).unwrap();
        let p = random_distribution(2, &mut rng);
        let mut m = CMatrix::zeros(6, 6);
        for k in 0..2 {
            let rk = random_density_matrix(3, 2, &mut rng);
            m = &m + &rk.kron(&CMatrix::projector(&basis.vector(k))).scale_real(p[k]);
        }
        let rho = DensityMatrix::from_trusted(m, vec![3, 2]).unwrap();
        let w = classical_quantum_witness(&rho, &rep, &basis, &tol()).unwrap();
        assert!(verify_six_item(&rho, &rep, &basis, &w).unwrap() < 1e-10);
        assert!(verify_six_item(&rho, &rep, &basis, &perturb(&w, 2)).unwrap() > 1e-2);
    }

    #[test]
    fn shape_errors() {
        let rep = build_cyclic_shift_rep(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        let basis = MeasurementBasis::computational(2);
        let mut w = classical_quantum_witness(&rho, &rep, &basis, &tol()).unwrap();
        w.blocks.pop();
        assert!(verify_six_item(&rho, &rep, &basis, &w).is_err());
    }
}
