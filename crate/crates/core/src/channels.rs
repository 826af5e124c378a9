//! Group twirl, computational-basis-style measurement on one subsystem, its
//! isometric CNOT extension, and Hadamard-product (genuinely incoherent) channels.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::ProjectiveUnitaryRep;
use crate::linalg::{self, cis, inner, CMatrix, HermitianOperator, ZERO};
use crate::random::{haar_unitary, Rng};
use crate::state::DensityMatrix;

/// (1/|G|) Σ_g U_g ρ U_g† on subsystem `sys`. Terms are summed in element order.
pub fn twirl(rho: &DensityMatrix, rep: &ProjectiveUnitaryRep, sys: usize) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if sys >= dims.len() || dims[sys] != rep.dim() {
        return Err(Error::Dimension(format!(
            "representation of dimension {} cannot act on subsystem {sys} of {:?}",
            rep.dim(),
            dims
        )));
    }
    let terms: Vec<CMatrix> = rep
        .matrices()
        .par_iter()
        .map(|u| linalg::conjugate_local(u, rho.matrix(), dims, sys))
        .collect::<Result<_>>()?;
    let mut acc = CMatrix::zeros(rho.dim(), rho.dim());
    for t in &terms {
        acc = &acc + t;
    }
    DensityMatrix::from_trusted(acc.scale_real(1.0 / rep.order() as f64), dims.to_vec())
}

/// Orthonormal basis {|e_k⟩} of one subsystem, stored as the columns of a unitary.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<C64>>", into = "Vec<Vec<C64>>")]
pub struct MeasurementBasis {
    unitary: CMatrix,
}

impl MeasurementBasis {
    /// Requires ‖E†E − I‖_F ≤ 1e-10.
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Dimension(format!("a basis of C^n needs n vectors of length n, got {d}")));
        }
        let u = CMatrix::from_columns(&vectors)?;
        let defect = (&(&u.adjoint() * &u) - &CMatrix::identity(d)).frobenius_norm();
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!("basis vectors are not orthonormal (defect {defect:.3e})")));
        }
        Ok(MeasurementBasis { unitary: u })
    }

    pub fn from_unitary(u: CMatrix) -> Result<Self> {
        let cols = (0..u.cols()).map(|j| u.column(j)).collect();
        Self::new(cols)
    }

    pub fn computational(d: usize) -> Self {
        MeasurementBasis { unitary: CMatrix::identity(d) }
    }

    /// |f_k⟩ = (1/√d) Σ_j e^{2πijk/d} |j⟩.
    pub fn fourier(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let u = CMatrix::from_fn(d, d, |j, k| cis(std::f64::consts::TAU * (j * k % d) as f64 / d as f64) * s);
        MeasurementBasis { unitary: u }
    }

    pub fn haar(d: usize, rng: &mut Rng) -> Self {
        MeasurementBasis { unitary: haar_unitary(d, rng) }
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.unitary.column(k)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    /// Columns are the basis vectors.
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }
}

impl TryFrom<Vec<Vec<C64>>> for MeasurementBasis {
    type Error = Error;
    fn try_from(v: Vec<Vec<C64>>) -> Result<Self> {
        MeasurementBasis::new(v)
    }
}

impl From<MeasurementBasis> for Vec<Vec<C64>> {
    fn from(b: MeasurementBasis) -> Self {
        b.vectors()
    }
}

fn check_basis(rho: &DensityMatrix, basis: &MeasurementBasis, sys: usize) -> Result<()> {
    let dims = rho.dims();
    if sys >= dims.len() || dims[sys] != basis.dim() {
        return Err(Error::Dimension(format!(
            "basis of dimension {} cannot act on subsystem {sys} of {:?}",
            basis.dim(),
            dims
        )));
    }
    Ok(())
}

/// ρ expressed with subsystem `sys` in the measurement basis: (…⊗E†⊗…) ρ (…⊗E⊗…).
fn to_basis_coordinates(rho: &CMatrix, dims: &[usize], basis: &MeasurementBasis, sys: usize) -> Result<CMatrix> {
    linalg::conjugate_local(&basis.unitary.adjoint(), rho, dims, sys)
}

/// Σ_k (I⊗|e_k⟩⟨e_k|) ρ (I⊗|e_k⟩⟨e_k|) on subsystem `sys`.
pub fn measure_channel(rho: &DensityMatrix, basis: &MeasurementBasis, sys: usize) -> Result<DensityMatrix> {
    check_basis(rho, basis, sys)?;
    let dims = rho.dims();
    let mut m = to_basis_coordinates(rho.matrix(), dims, basis, sys)?;
    let stride: usize = dims[sys + 1..].iter().product();
    let d = dims[sys];
    let n = m.rows();
    for i in 0..n {
        for j in 0..n {
            if (i / stride) % d != (j / stride) % d {
                m[(i, j)] = ZERO;
            }
        }
    }
    let back = linalg::conjugate_local(&basis.unitary, &m, dims, sys)?;
    DensityMatrix::from_trusted(back, dims.to_vec())
}

/// One outcome of measuring the second factor of a bipartite state.
#[derive(Clone, Debug)]
pub struct Conditional {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Outcome probabilities P_K(k) and conditional states ρ_{A|k} for a
/// measurement of subsystem B of ρ on A⊗B. Outcomes below `tol.outcome_cutoff`
/// are omitted and listed in `dropped`.
#[derive(Clone, Debug)]
pub struct ConditionalStates {
    pub conditionals: Vec<Conditional>,
    pub dropped: Vec<usize>,
}

pub fn conditional_states(rho: &DensityMatrix, basis: &MeasurementBasis, tol: &Tolerances) -> Result<ConditionalStates> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("conditional states need a bipartite state, got dims {:?}", rho.dims())));
    }
    check_basis(rho, basis, 1)?;
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let m = to_basis_coordinates(rho.matrix(), rho.dims(), basis, 1)?;
    let mut conditionals = Vec::new();
    let mut dropped = Vec::new();
    for k in 0..db {
        let block = CMatrix::from_fn(da, da, |a, a2| m[(a * db + k, a2 * db + k)]);
        let p = block.trace().re;
        if p < tol.outcome_cutoff {
            dropped.push(k);
            continue;
        }
        let state = DensityMatrix::from_trusted(block.scale_real(1.0 / p), vec![da])?;
        conditionals.push(Conditional { outcome: k, probability: p, state });
    }
    Ok(ConditionalStates { conditionals, dropped })
}

/// Isometry |e_k⟩ ↦ |e_k⟩|e_k⟩ from B into B⊗B̃, i.e. CNOT from B onto a B̃
/// register prepared in |e_0⟩, with B̃ using the same basis vectors.
pub fn copy_isometry(basis: &MeasurementBasis) -> CMatrix {
    let d = basis.dim();
    let mut w = CMatrix::zeros(d * d, d);
    for k in 0..d {
        let e = basis.vector(k);
        let ee = linalg::kron_vec(&e, &e);
        for r in 0..d * d {
            for c in 0..d {
                w[(r, c)] += ee[r] * e[c].conj();
            }
        }
    }
    w
}

/// ρ' = CX_{B→B̃}(ρ ⊗ |e_0⟩⟨e_0|)CX† on A⊗B⊗B̃.
pub fn cnot_extend(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("CNOT extension needs a bipartite state, got dims {:?}", rho.dims())));
    }
    check_basis(rho, basis, 1)?;
    let da = rho.dims()[0];
    let db = basis.dim();
    let iso = CMatrix::identity(da).kron(&copy_isometry(basis));
    let out = &(&iso * rho.matrix()) * &iso.adjoint();
    DensityMatrix::from_trusted(out, vec![da, db, db])
}

/// Gram matrix J(V)_{λη} = ⟨v_λ|v_η⟩, with the generating vectors kept.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    j: HermitianOperator,
    vectors: Option<Vec<Vec<C64>>>,
}

impl GramMatrix {
    /// Accepts a PSD matrix with unit diagonal.
    pub fn from_matrix(j: CMatrix, tol: &Tolerances) -> Result<Self> {
        let op = validate_correlation(j, tol)?;
        Ok(GramMatrix { j: op, vectors: None })
    }

    pub fn matrix(&self) -> &CMatrix {
        self.j.matrix()
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn vectors(&self) -> Option<&[Vec<C64>]> {
        self.vectors.as_deref()
    }
}

/// J(V) for unit vectors v_1..v_l.
pub fn gram(vectors: &[Vec<C64>]) -> Result<GramMatrix> {
    let l = vectors.len();
    if l == 0 {
        return Err(Error::InvalidArgument("empty vector family".into()));
    }
    let db = vectors[0].len();
    if vectors.iter().any(|v| v.len() != db) {
        return Err(Error::Dimension("vectors differ in length".into()));
    }
    for (i, v) in vectors.iter().enumerate() {
        let n = linalg::norm(v);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("vector {i} has norm {n}, expected 1")));
        }
    }
    let j = CMatrix::from_fn(l, l, |a, b| inner(&vectors[a], &vectors[b]));
    Ok(GramMatrix { j: HermitianOperator::symmetrized(j), vectors: Some(vectors.to_vec()) })
}

fn validate_correlation(a: CMatrix, tol: &Tolerances) -> Result<HermitianOperator> {
    let op = HermitianOperator::new(a, tol.herm)?;
    let n = op.dim();
    for i in 0..n {
        let d = op.matrix()[(i, i)];
        if (d - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("diagonal entry {i} is {d}, expected 1")));
        }
    }
    let sd = op.eig()?;
    let lmin = sd.eigenvalues.last().copied().unwrap_or(0.0);
    if lmin < -tol.psd * n as f64 {
        return Err(Error::NotPsd { min_eigenvalue: lmin });
    }
    Ok(op)
}

/// Γ_A(ρ) = A ⊙ ρ with A PSD and unit diagonal.
#[derive(Clone, Debug)]
pub struct GioChannel {
    a: HermitianOperator,
}

impl GioChannel {
    pub fn new(a: CMatrix, tol: &Tolerances) -> Result<Self> {
        Ok(GioChannel { a: validate_correlation(a, tol)? })
    }

    pub fn from_gram(j: &GramMatrix) -> Self {
        GioChannel { a: j.j.clone() }
    }

    pub fn correlation(&self) -> &CMatrix {
        self.a.matrix()
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.a.matrix().hadamard(rho)
    }
}

/// Diagonal Kraus operators of Γ_{J(V)}: K_k = diag(conj(v_{1,k}), …, conj(v_{l,k})),
/// so that Σ_k K_k ρ K_k† = J(V) ⊙ ρ.
pub fn gio_kraus_from_columns(vectors: &[Vec<C64>]) -> Result<Vec<CMatrix>> {
    gram(vectors)?;
    let db = vectors[0].len();
    Ok((0..db)
        .map(|k| CMatrix::from_diag(&vectors.iter().map(|v| v[k].conj()).collect::<Vec<_>>()))
        .collect())
}

pub fn apply_kraus(kraus: &[CMatrix], rho: &CMatrix) -> CMatrix {
    kraus.iter().fold(CMatrix::zeros(rho.rows(), rho.cols()), |acc, k| &acc + &rho.conjugate_by(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_cyclic_shift_rep, build_diagonal_character_rep};
    use crate::linalg::{basis_vector, ONE};
    use crate::random::{random_density_matrix, random_unit_vector, rng_from_seed};
    use crate::state::PureState;
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
    fn twirl_of_plus_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(vec![C64::new(h, 0.0); 2], vec![2], &tol()).unwrap().density();
        let t = twirl(&plus, &z2(), 0).unwrap();
        assert!(t.matrix().approx_eq(&CMatrix::identity(2).scale_real(0.5), 1e-15));
        let again = twirl(&t, &z2(), 0).unwrap();
        assert!(again.matrix().approx_eq(t.matrix(), 1e-15));
    }

    #[test]
    fn twirl_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(vec![3, 2]);
        assert!(matches!(twirl(&rho, &z2(), 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn measurement_examples() {
        let m = measure_channel(&bell(), &MeasurementBasis::computational(2), 1).unwrap();
        let expect = CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(m.matrix().approx_eq(&expect, 1e-15));
        let again = measure_channel(&m, &MeasurementBasis::computational(2), 1).unwrap();
        assert!(again.matrix().approx_eq(m.matrix(), 1e-15));

        let c = conditional_states(&bell(), &MeasurementBasis::computational(2), &tol()).unwrap();
        assert_eq!(c.conditionals.len(), 2);
        for (k, cond) in c.conditionals.iter().enumerate() {
            assert!((cond.probability - 0.5).abs() < 1e-15);
            assert!(cond.state.matrix().approx_eq(&CMatrix::projector(&basis_vector(2, k)), 1e-15));
        }
    }

    #[test]
    fn product_state_conditionals_equal_marginal() {
        let mut rng = rng_from_seed(21);
        let a = DensityMatrix::from_trusted(random_density_matrix(3, 3, &mut rng), vec![3]).unwrap();
        let b = DensityMatrix::from_trusted(random_density_matrix(2, 2, &mut rng), vec![2]).unwrap();
        let basis = MeasurementBasis::haar(2, &mut rng);
        let c = conditional_states(&a.tensor(&b), &basis, &tol()).unwrap();
        for cond in &c.conditionals {
            assert!(cond.state.matrix().approx_eq(a.matrix(), 1e-12));
        }
    }

    #[test]
    fn cnot_extension_of_bell_is_ghz() {
        let ext = cnot_extend(&bell(), &MeasurementBasis::computational(2)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut ghz = vec![ZERO; 8];
        ghz[0] = C64::new(h, 0.0);
        ghz[7] = C64::new(h, 0.0);
        assert!(ext.matrix().approx_eq(&CMatrix::projector(&ghz), 1e-15));
    }

    #[test]
    fn cnot_copies_classical_states() {
        let rho = DensityMatrix::from_trusted(CMatrix::from_real_diag(&[0.25, 0.75]), vec![1, 2]).unwrap();
        let ext = cnot_extend(&rho, &MeasurementBasis::computational(2)).unwrap();
        assert!(ext.matrix().approx_eq(&CMatrix::from_real_diag(&[0.25, 0.0, 0.0, 0.75]), 1e-15));
    }

    #[test]
    fn gram_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let j = gram(&[basis_vector(2, 0), basis_vector(2, 1)]).unwrap();
        assert!(j.matrix().approx_eq(&CMatrix::identity(2), 0.0));
        let v = vec![C64::new(h, 0.0), C64::new(0.0, h)];
        let j = gram(&[v.clone(), v.clone(), v]).unwrap();
        assert!(j.matrix().approx_eq(&CMatrix::from_fn(3, 3, |_, _| ONE), 1e-15));
        let j = gram(&[basis_vector(2, 0), vec![C64::new(h, 0.0), C64::new(h, 0.0)]]).unwrap();
        let expect = CMatrix::from_rows(&[vec![ONE, C64::new(h, 0.0)], vec![C64::new(h, 0.0), ONE]]).unwrap();
        assert!(j.matrix().approx_eq(&expect, 1e-15));
    }

    #[test]
    fn gio_examples() {
        let t = tol();
        let mut rng = rng_from_seed(22);
        let rho = random_density_matrix(3, 3, &mut rng);
        let ones = GioChannel::new(CMatrix::from_fn(3, 3, |_, _| ONE), &t).unwrap();
        assert!(ones.apply(&rho).unwrap().approx_eq(&rho, 0.0));
        let deph = GioChannel::new(CMatrix::identity(3), &t).unwrap();
        let out = deph.apply(&rho).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| i == j || out[(i, j)] == ZERO)));

        let v: Vec<Vec<C64>> = (0..3).map(|_| random_unit_vector(2, &mut rng)).collect();
        let g = gram(&v).unwrap();
        let l = 3.0;
        let plus = CMatrix::from_fn(3, 3, |_, _| C64::new(1.0 / l, 0.0));
        let lhs = GioChannel::from_gram(&g).apply(&plus).unwrap();
        assert!(lhs.approx_eq(&g.matrix().scale_real(1.0 / l), 1e-15));
        assert!(GioChannel::new(CMatrix::identity(2).scale_real(2.0), &t).is_err());
    }

    #[test]
    fn kraus_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let single = gio_kraus_from_columns(&[basis_vector(1, 0), basis_vector(1, 0)]).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].approx_eq(&CMatrix::identity(2), 0.0));

        let v = vec![basis_vector(2, 0), vec![C64::new(h, 0.0), C64::new(h, 0.0)]];
        let k = gio_kraus_from_columns(&v).unwrap();
        let completeness = k.iter().fold(CMatrix::zeros(2, 2), |acc, x| &acc + &(&x.adjoint() * x));
        assert!((&completeness - &CMatrix::identity(2)).frobenius_norm() < 1e-14);

        let ortho = vec![basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)];
        let k = gio_kraus_from_columns(&ortho).unwrap();
        let mut rng = rng_from_seed(23);
        let rho = random_density_matrix(3, 3, &mut rng);
        let expect = CMatrix::from_fn(3, 3, |i, j| if i == j { rho[(i, i)] } else { ZERO });
        assert!(apply_kraus(&k, &rho).approx_eq(&expect, 1e-15));
    }

    #[test]
    fn twirl_is_phase_insensitive() {
        let rep = build_cyclic_shift_rep(3).unwrap();
        let phased = rep.rephased(&[0.3, 1.7, -2.2]).unwrap();
        let mut rng = rng_from_seed(24);
        let rho = DensityMatrix::from_trusted(random_density_matrix(6, 6, &mut rng), vec![3, 2]).unwrap();
        let a = twirl(&rho, &rep, 0).unwrap();
        let b = twirl(&rho, &phased, 0).unwrap();
        assert!(a.matrix().approx_eq(b.matrix(), 1e-12));
    }

    #[test]
    fn kraus_matches_hadamard_on_many_pairs() {
        let mut rng = rng_from_seed(25);
        for _ in 0..200 {
            let v: Vec<Vec<C64>> = (0..4).map(|_| random_unit_vector(3, &mut rng)).collect();
            let rho = random_density_matrix(4, 4, &mut rng);
            let via_kraus = apply_kraus(&gio_kraus_from_columns(&v).unwrap(), &rho);
            let via_gram = GioChannel::from_gram(&gram(&v).unwrap()).apply(&rho).unwrap();
            assert!((&via_kraus - &via_gram).frobenius_norm() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn twirl_projects_onto_commutant(seed in any::<u64>()) {
            let rep = build_cyclic_shift_rep(3).unwrap();
            let mut rng = rng_from_seed(seed);
            let rho = DensityMatrix::from_trusted(random_density_matrix(6, 4, &mut rng), vec![3, 2]).unwrap();
            let t = twirl(&rho, &rep, 0).unwrap();
            let tt = twirl(&t, &rep, 0).unwrap();
            prop_assert!(t.matrix().approx_eq(tt.matrix(), 1e-10));
            for u in rep.matrices() {
                let full = u.kron(&CMatrix::identity(2));
                let c = &(&full * t.matrix()) - &(t.matrix() * &full);
                prop_assert!(c.frobenius_norm() < 1e-9);
            }
        }

        #[test]
        fn measurement_commutes_with_twirl(seed in any::<u64>()) {
            let rep = build_cyclic_shift_rep(3).unwrap();
            let mut rng = rng_from_seed(seed);
            let rho = DensityMatrix::from_trusted(random_density_matrix(9, 9, &mut rng), vec![3, 3]).unwrap();
            let basis = MeasurementBasis::haar(3, &mut rng);
            let a = measure_channel(&twirl(&rho, &rep, 0).unwrap(), &basis, 1).unwrap();
            let b = twirl(&measure_channel(&rho, &basis, 1).unwrap(), &rep, 0).unwrap();
            prop_assert!(a.matrix().approx_eq(b.matrix(), 1e-10));
        }

        #[test]
        fn conditionals_reassemble_measurement(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let rho = DensityMatrix::from_trusted(random_density_matrix(6, 6, &mut rng), vec![2, 3]).unwrap();
            let basis = MeasurementBasis::haar(3, &mut rng);
            let c = conditional_states(&rho, &basis, &tol()).unwrap();
            let total: f64 = c.conditionals.iter().map(|x| x.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let mut acc = CMatrix::zeros(6, 6);
            for cond in &c.conditionals {
                let e = basis.vector(cond.outcome);
                acc = &acc + &cond.state.matrix().kron(&CMatrix::projector(&e)).scale_real(cond.probability);
            }
            let m = measure_channel(&rho, &basis, 1).unwrap();
            prop_assert!(acc.approx_eq(m.matrix(), 1e-12));
        }

        #[test]
        fn cnot_extension_traces_to_measurement(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let rho = DensityMatrix::from_trusted(random_density_matrix(6, 6, &mut rng), vec![2, 3]).unwrap();
            let basis = MeasurementBasis::haar(3, &mut rng);
            let ext = cnot_extend(&rho, &basis).unwrap();
            let back = ext.partial_trace(&[0, 1]).unwrap();
            let m = measure_channel(&rho, &basis, 1).unwrap();
            prop_assert!(back.matrix().approx_eq(m.matrix(), 1e-12));
        }

        #[test]
        fn gio_preserves_states(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let v: Vec<Vec<C64>> = (0..4).map(|_| random_unit_vector(2, &mut rng)).collect();
            let rho = random_density_matrix(4, 3, &mut rng);
            let out = GioChannel::from_gram(&gram(&v).unwrap()).apply(&rho).unwrap();
            prop_assert!(out.hermiticity_defect() < 1e-14);
            prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
            let lmin = *HermitianOperator::symmetrized(out).eig().unwrap().eigenvalues.last().unwrap();
            prop_assert!(lmin >= -1e-10);
        }

        #[test]
        fn gram_is_rotation_invariant(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let v: Vec<Vec<C64>> = (0..3).map(|_| random_unit_vector(3, &mut rng)).collect();
            let u = haar_unitary(3, &mut rng);
            let rotated: Vec<Vec<C64>> = v.iter().map(|x| u.mul_vec(x)).collect();
            prop_assert!(gram(&v).unwrap().matrix().approx_eq(gram(&rotated).unwrap().matrix(), 1e-12));
        }
    }
}
