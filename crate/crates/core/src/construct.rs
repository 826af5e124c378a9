//! Builders for the state families with known memory behaviour: phase-locked
//! mixtures, maximally entangled states, dephased states, useful pure states,
//! illumination inputs and purifications.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{twirl, MeasurementBasis};
use crate::checker::gram::{analytic_useful_vectors, usefulness_witness, UsefulnessWitness, WitnessVerdict};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::{build_cyclic_shift_rep, IrrepDecomposition, ProjectiveUnitaryRep};
use crate::linalg::{cis, inner, kron_vec, norm, CMatrix, ZERO};
use crate::random::{haar_unitary, random_distribution, random_phase, random_unit_vector, trial_rng, Rng};
use crate::state::{DensityMatrix, PureState};

const RETRY_CAP: usize = 100;

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(x >= -1e-12) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has negative or non-finite entries")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{what} sums to {s}, expected 1")));
    }
    Ok(())
}

/// Mixture ρ = Σ_j P_J(j)|Ψ_j⟩⟨Ψ_j| with
/// |Ψ_j⟩ = Σ_k e^{iθ_{k,j}} √P(k|j) Σ_λ e^{iθ_{λ,k}} √P_Λ(λ) |ψ_{λ,k}⟩|e_k⟩.
///
/// The state is memory-useless at basis {e_k} when the H_λ marginals of
/// ψ_{λ,k} do not depend on k.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseMixtureParams {
    pub class_weights: Vec<f64>,
    /// `outcome_given_class[j][k]` = P(k|j).
    pub outcome_given_class: Vec<Vec<f64>>,
    /// `class_phases[k][j]` = θ_{k,j}.
    pub class_phases: Vec<Vec<f64>>,
    /// One weight per block of the decomposition.
    pub block_weights: Vec<f64>,
    /// `block_phases[λ][k]` = θ_{λ,k}.
    pub block_phases: Vec<Vec<f64>>,
    /// `block_vectors[λ][k]` ∈ H_λ⊗M_λ, index a·n_λ + m.
    pub block_vectors: Vec<Vec<Vec<C64>>>,
}

impl PhaseMixtureParams {
    pub fn classes(&self) -> usize {
        self.class_weights.len()
    }

    pub fn outcomes(&self) -> usize {
        self.class_phases.len()
    }

    pub fn validate(&self, dec: &IrrepDecomposition) -> Result<()> {
        let (nj, nk, nb) = (self.classes(), self.outcomes(), dec.blocks.len());
        check_distribution(&self.class_weights, "class weights")?;
        check_distribution(&self.block_weights, "block weights")?;
        if self.block_weights.len() != nb || self.block_phases.len() != nb || self.block_vectors.len() != nb {
            return Err(Error::Dimension(format!("expected per-block data for {nb} blocks")));
        }
        if self.outcome_given_class.len() != nj {
            return Err(Error::Dimension("one outcome distribution per class required".into()));
        }
        for row in &self.outcome_given_class {
            if row.len() != nk {
                return Err(Error::Dimension(format!("outcome distributions must have {nk} entries")));
            }
            check_distribution(row, "outcome distribution")?;
        }
        if self.class_phases.iter().any(|r| r.len() != nj) || self.block_phases.iter().any(|r| r.len() != nk) {
            return Err(Error::Dimension("phase tables have the wrong shape".into()));
        }
        for (b, vecs) in dec.blocks.iter().zip(&self.block_vectors) {
            if vecs.len() != nk || vecs.iter().any(|v| v.len() != b.irrep_dim * b.multiplicity) {
                return Err(Error::Dimension(format!("block {} needs {nk} vectors of length {}", b.label, b.irrep_dim * b.multiplicity)));
            }
            if vecs.iter().any(|v| (norm(v) - 1.0).abs() > 1e-9) {
                return Err(Error::InvalidArgument(format!("block {} vectors must be unit", b.label)));
            }
        }
        Ok(())
    }
}

/// Class states |Ψ_j⟩ and their mixture.
pub fn build_phase_mixture(
    params: &PhaseMixtureParams,
    dec: &IrrepDecomposition,
    basis: &MeasurementBasis,
) -> Result<(Vec<PureState>, DensityMatrix)> {
    params.validate(dec)?;
    if basis.dim() != params.outcomes() {
        return Err(Error::Dimension(format!("basis has {} vectors for {} outcomes", basis.dim(), params.outcomes())));
    }
    let (da, db) = (dec.dim(), basis.dim());
    // Alice's conditional vectors Σ_λ e^{iθ_{λ,k}}√P_Λ W_λ ψ_{λ,k}.
    let alice: Vec<Vec<C64>> = (0..db)
        .map(|k| {
            let mut v = vec![ZERO; da];
            for (b, &w) in params.block_weights.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                let lifted = dec.block_columns(b).mul_vec(&params.block_vectors[b][k]);
                let c = cis(params.block_phases[b][k]) * w.sqrt();
                for (x, y) in v.iter_mut().zip(&lifted) {
                    *x += c * y;
                }
            }
            v
        })
        .collect();
    let mut states = Vec::with_capacity(params.classes());
    let mut rho = CMatrix::zeros(da * db, da * db);
    for j in 0..params.classes() {
        let mut amp = vec![ZERO; da * db];
        for k in 0..db {
            let c = cis(params.class_phases[k][j]) * params.outcome_given_class[j][k].sqrt();
            if c.norm() == 0.0 {
                continue;
            }
            for (x, y) in amp.iter_mut().zip(kron_vec(&alice[k], &basis.vector(k))) {
                *x += c * y;
            }
        }
        let psi = PureState::normalized(amp, vec![da, db])?;
        rho = &rho + &CMatrix::projector(psi.amplitudes()).scale_real(params.class_weights[j]);
        states.push(psi);
    }
    Ok((states, DensityMatrix::from_trusted(rho, vec![da, db])?))
}

/// Random parameters satisfying the marginal condition: ψ_{λ,k} = (I⊗U_{λ,k})ψ_{λ,0}.
pub fn random_phase_mixture_params(dec: &IrrepDecomposition, d_b: usize, classes: usize, rng: &mut Rng) -> PhaseMixtureParams {
    let nb = dec.blocks.len();
    let block_vectors = dec
        .blocks
        .iter()
        .map(|b| {
            let base = random_unit_vector(b.irrep_dim * b.multiplicity, rng);
            (0..d_b)
                .map(|_| {
                    let u = CMatrix::identity(b.irrep_dim).kron(&haar_unitary(b.multiplicity, rng));
                    u.mul_vec(&base)
                })
                .collect()
        })
        .collect();
    PhaseMixtureParams {
        class_weights: random_distribution(classes, rng),
        outcome_given_class: (0..classes).map(|_| random_distribution(d_b, rng)).collect(),
        class_phases: (0..d_b).map(|_| (0..classes).map(|_| random_phase(rng)).collect()).collect(),
        block_weights: random_distribution(nb, rng),
        block_phases: (0..nb).map(|_| (0..d_b).map(|_| random_phase(rng)).collect()).collect(),
        block_vectors,
    }
}

/// The Fourier-locked special case on l one-dimensional blocks.
#[derive(Clone, Debug)]
pub struct FourierMixture {
    pub states: Vec<PureState>,
    pub rho: DensityMatrix,
    pub basis: MeasurementBasis,
    /// Separable exactly when the class weights are uniform.
    pub separable: bool,
    pub params: PhaseMixtureParams,
}

/// θ_{λ_s,k} = 2πsk/l, θ_{k,j} = 2πjk/l, uniform P(k|j) and P_Λ over the first
/// l blocks, d_B = l and the computational basis. Indices s, k, j run over 1..=l.
pub fn build_fourier_mixture(dec: &IrrepDecomposition, l: usize, class_weights: &[f64]) -> Result<FourierMixture> {
    if l < 2 || dec.blocks.len() < l {
        return Err(Error::InvalidArgument(format!("need at least {l} blocks, found {}", dec.blocks.len())));
    }
    if class_weights.len() != l {
        return Err(Error::Dimension(format!("expected {l} class weights")));
    }
    check_distribution(class_weights, "class weights")?;
    let nb = dec.blocks.len();
    let lf = l as f64;
    let phase = |a: usize, b: usize| TAU * ((a * b) % l) as f64 / lf;
    let mut block_weights = vec![0.0; nb];
    let mut block_phases = vec![vec![0.0; l]; nb];
    let mut block_vectors = Vec::with_capacity(nb);
    for (b, blk) in dec.blocks.iter().enumerate() {
        let mut canonical = vec![ZERO; blk.irrep_dim * blk.multiplicity];
        canonical[0] = C64::new(1.0, 0.0);
        block_vectors.push(vec![canonical; l]);
        if b < l {
            block_weights[b] = 1.0 / lf;
            block_phases[b] = (1..=l).map(|k| phase(b + 1, k)).collect();
        }
    }
    let params = PhaseMixtureParams {
        class_weights: class_weights.to_vec(),
        outcome_given_class: vec![vec![1.0 / lf; l]; l],
        class_phases: (1..=l).map(|k| (1..=l).map(|j| phase(j, k)).collect()).collect(),
        block_weights,
        block_phases,
        block_vectors,
    };
    let basis = MeasurementBasis::computational(l);
    let (states, rho) = build_phase_mixture(&params, dec, &basis)?;
    let separable = class_weights.iter().all(|&w| (w - 1.0 / lf).abs() < 1e-12);
    Ok(FourierMixture { states, rho, basis, separable, params })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxEntangledForm {
    /// One-dimensional blocks without multiplicity.
    Abelian,
    /// One-dimensional blocks with multiplicity.
    AbelianMultiplicity,
    /// Blocks with n_λ ≥ d_λ.
    General,
}

#[derive(Clone, Debug)]
pub struct MaxEntangled {
    pub state: PureState,
    pub form: MaxEntangledForm,
    /// A basis of B at which the state is memory-useless.
    pub basis: MeasurementBasis,
    /// Bob's vectors v_λ for the abelian multiplicity-free form.
    pub vectors: Option<Vec<Vec<C64>>>,
}

/// Maximally entangled state on A⊗B together with a basis of B certifying
/// that Bob's memory is not needed. Errors when some block has n_λ < d_λ,
/// where no such state exists.
pub fn build_max_entangled(dec: &IrrepDecomposition) -> Result<MaxEntangled> {
    let da = dec.dim();
    let one_dim = dec.blocks.iter().all(|b| b.irrep_dim == 1);
    if one_dim && dec.is_multiplicity_free() {
        let l = dec.blocks.len();
        let lf = l as f64;
        // v_{λ_s} = l^{-1/2} Σ_k e^{−2πiks/l}|k⟩, s and k counted from 1.
        let vectors: Vec<Vec<C64>> = (1..=l)
            .map(|s| (1..=l).map(|k| cis(-TAU * ((k * s) % l) as f64 / lf) / lf.sqrt()).collect())
            .collect();
        let mut amp = vec![ZERO; da * l];
        for (s, v) in vectors.iter().enumerate() {
            for (x, y) in amp.iter_mut().zip(kron_vec(&dec.block_vector(s, 0, 0), v)) {
                *x += y / lf.sqrt();
            }
        }
        return Ok(MaxEntangled {
            state: PureState::normalized(amp, vec![da, l])?,
            form: MaxEntangledForm::Abelian,
            basis: MeasurementBasis::computational(l),
            vectors: Some(vectors),
        });
    }
    if one_dim {
        // Σ_i |w_i⟩|i⟩/√r over the columns of W, measured in the Fourier basis
        // e_k = r^{-1/2} Σ_j e^{2πikj/r}|j⟩ with j, k counted from 1.
        let r = da;
        let w = &dec.basis_change;
        let mut amp = vec![ZERO; da * r];
        for i in 0..r {
            for (x, y) in amp.iter_mut().zip(kron_vec(&w.column(i), &crate::linalg::basis_vector(r, i))) {
                *x += y / (r as f64).sqrt();
            }
        }
        let rf = r as f64;
        let cols: Vec<Vec<C64>> = (1..=r)
            .map(|k| (1..=r).map(|j| cis(TAU * ((k * j) % r) as f64 / rf) / rf.sqrt()).collect())
            .collect();
        return Ok(MaxEntangled {
            state: PureState::normalized(amp, vec![da, r])?,
            form: MaxEntangledForm::AbelianMultiplicity,
            basis: MeasurementBasis::new(cols)?,
            vectors: None,
        });
    }
    if !dec.multiplicity_dominates_dimension() {
        return Err(Error::InvalidArgument(
            "a maximally entangled state with a memory-free basis needs n_λ ≥ d_λ for every block".into(),
        ));
    }
    general_max_entangled(dec)
}

/// Σ_{k,λ'} (N l)^{-1/2} Σ_λ √(d_λ n_λ / d_A) e^{2πiλλ'/l} |ψ_{λ,k_λ,k'_λ}⟩|k, λ'⟩ with
/// ψ_{λ,k,k'} = (Z^k ⊗ X^{k'}) d_λ^{-1/2} Σ_j |j⟩|j⟩ and N = Π d_λ n_λ.
/// Bob's index is (k_1, k'_1, …, k_l, k'_l, λ') with λ' least significant.
fn general_max_entangled(dec: &IrrepDecomposition) -> Result<MaxEntangled> {
    let da = dec.dim();
    let l = dec.blocks.len();
    let sizes: Vec<usize> = dec.blocks.iter().map(|b| b.irrep_dim * b.multiplicity).collect();
    let n_total: usize = sizes.iter().product();
    let db = n_total * l;
    if db > 4096 {
        return Err(Error::InvalidArgument(format!("Bob's dimension {db} is too large")));
    }
    let lf = l as f64;
    let block_state = |b: usize, k: usize, kp: usize| -> Vec<C64> {
        let (d, n) = (dec.blocks[b].irrep_dim, dec.blocks[b].multiplicity);
        let mut v = vec![ZERO; d * n];
        for j in 0..d {
            v[j * n + (j + kp) % n] = cis(TAU * ((j * k) % d) as f64 / d as f64) / (d as f64).sqrt();
        }
        dec.block_columns(b).mul_vec(&v)
    };
    let mut amp = vec![ZERO; da * db];
    let pref = 1.0 / ((n_total as f64) * lf).sqrt();
    for idx in 0..n_total {
        // Decode (k_1, k'_1, …) with the first block most significant.
        let mut rest = idx;
        let mut digits = vec![(0usize, 0usize); l];
        for b in (0..l).rev() {
            let n = dec.blocks[b].multiplicity;
            let d = dec.blocks[b].irrep_dim;
            let kp = rest % n;
            rest /= n;
            let k = rest % d;
            rest /= d;
            digits[b] = (k, kp);
        }
        for lp in 0..l {
            let bob = idx * l + lp;
            for b in 0..l {
                let c = cis(TAU * (((b + 1) * (lp + 1)) % l) as f64 / lf)
                    * (pref * (sizes[b] as f64 / da as f64).sqrt());
                let v = block_state(b, digits[b].0, digits[b].1);
                for (a, x) in v.iter().enumerate() {
                    amp[a * db + bob] += c * x;
                }
            }
        }
    }
    Ok(MaxEntangled {
        state: PureState::normalized(amp, vec![da, db])?,
        form: MaxEntangledForm::General,
        basis: MeasurementBasis::computational(db),
        vectors: None,
    })
}

/// (1−p)|Φ⟩⟨Φ| + p G(|Φ⟩⟨Φ|) with the twirl acting on A.
pub fn build_dephased(phi: &PureState, rep: &ProjectiveUnitaryRep, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("dephasing weight {p} outside [0, 1]")));
    }
    let rho = phi.density();
    let g = twirl(&rho, rep, 0)?;
    DensityMatrix::mixture(&[(1.0 - p, &rho), (p, &g)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorSource {
    Analytic,
    Seeded,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UsefulState {
    pub vectors: Vec<Vec<C64>>,
    pub witness: UsefulnessWitness,
    /// Number of seeded draws consumed (1 for the analytic source).
    pub attempts: usize,
    #[serde(skip)]
    pub state: Option<PureState>,
}

/// Pure state Σ_j l^{-1/2}|ψ_{λ_j}⟩|v_j⟩ over the first l blocks (canonical irrep
/// vectors) whose Bob vectors pass the linear-independence witness.
pub fn build_useful_protocol(
    dec: &IrrepDecomposition,
    l: usize,
    d_b: usize,
    source: VectorSource,
    seed: u64,
    tol: &Tolerances,
) -> Result<UsefulState> {
    if d_b < 2 || d_b * d_b > l {
        return Err(Error::InvalidArgument(format!("need 1 < d_B² ≤ l, got d_B = {d_b}, l = {l}")));
    }
    if !dec.is_multiplicity_free() || dec.blocks.len() < l {
        return Err(Error::InvalidArgument(format!("need a multiplicity-free decomposition with at least {l} blocks")));
    }
    let (vectors, witness, attempts) = match source {
        VectorSource::Analytic => {
            if d_b != 2 {
                return Err(Error::InvalidArgument("the analytic vectors live in dimension 2".into()));
            }
            let v = analytic_useful_vectors(l);
            let w = usefulness_witness(&v, tol)?;
            (v, w, 1)
        }
        VectorSource::Seeded => {
            let mut found = None;
            for attempt in 0..RETRY_CAP {
                let mut rng = trial_rng(seed, attempt as u64);
                let v: Vec<Vec<C64>> = (0..l).map(|_| random_unit_vector(d_b, &mut rng)).collect();
                let w = usefulness_witness(&v, tol)?;
                if w.verdict == WitnessVerdict::UsefulAllBases {
                    found = Some((v, w, attempt + 1));
                    break;
                }
            }
            found.ok_or_else(|| Error::Numerical(format!("no independent vector set after {RETRY_CAP} draws")))?
        }
    };
    let da = dec.dim();
    let mut amp = vec![ZERO; da * d_b];
    let s = 1.0 / (l as f64).sqrt();
    for (j, v) in vectors.iter().enumerate() {
        for (x, y) in amp.iter_mut().zip(kron_vec(&dec.block_vector(j, 0, 0), v)) {
            *x += y * s;
        }
    }
    let state = PureState::normalized(amp, vec![da, d_b])?;
    Ok(UsefulState { vectors, witness, attempts, state: Some(state) })
}

#[derive(Clone, Debug)]
pub struct Illumination {
    pub rep: ProjectiveUnitaryRep,
    /// d^{-1/2} Σ_t |t⟩|t⟩ on signal ⊗ idler.
    pub input: PureState,
    /// Idler vectors |+_{−λ}⟩ paired with the signal's |+_λ⟩.
    pub idler_vectors: Vec<Vec<C64>>,
    /// Conjugate basis to the idler vectors; measuring here keeps the full exponent.
    pub idler_basis: MeasurementBasis,
}

pub fn build_illumination(d: usize) -> Result<Illumination> {
    let rep = build_cyclic_shift_rep(d)?;
    let mut amp = vec![ZERO; d * d];
    for t in 0..d {
        amp[t * d + t] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let fourier = MeasurementBasis::fourier(d);
    let idler_vectors = (0..d).map(|lam| fourier.vector((d - lam) % d)).collect();
    Ok(Illumination {
        rep,
        input: PureState::normalized(amp, vec![d, d])?,
        idler_vectors,
        idler_basis: MeasurementBasis::computational(d),
    })
}

/// Spectral purification Σ_i √μ_i |w_i⟩|i⟩_E over the support of ρ.
pub fn purify(rho: &DensityMatrix, tol: &Tolerances) -> Result<PureState> {
    let sd = rho.eig()?;
    let lmax = sd.max_eigenvalue();
    let kept: Vec<usize> = (0..sd.eigenvalues.len()).filter(|&i| sd.eigenvalues[i] > tol.support_cutoff * lmax).collect();
    let de = kept.len().max(1);
    let n = rho.dim();
    let mut amp = vec![ZERO; n * de];
    for (e, &i) in kept.iter().enumerate() {
        let w = sd.vector(i);
        let s = sd.eigenvalues[i].sqrt();
        for a in 0..n {
            amp[a * de + e] = w[a] * s;
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(de);
    PureState::normalized(amp, dims)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ConstructionRecipe {
    FourierMixture { l: usize, class_weights: Vec<f64> },
    PhaseMixture { params: PhaseMixtureParams },
    MaxEntangled { group: String, form: MaxEntangledForm },
    Dephased { group: String, p: f64 },
    UsefulProtocol { l: usize, d_b: usize, source: VectorSource, seed: u64, attempts: usize, vectors: Vec<Vec<C64>> },
    Illumination { d: usize },
    Purification { environment_dim: usize },
}

/// Overlap matrix of a set of pure states, for orthonormality checks.
pub fn overlap_defect(states: &[PureState]) -> f64 {
    let n = states.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let o = inner(states[a].amplitudes(), states[b].amplitudes());
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((o - C64::new(target, 0.0)).norm());
        }
    }
    worst
}
