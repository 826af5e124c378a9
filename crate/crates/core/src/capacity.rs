//! Dense-coding capacities under a group-covariant encoding, their measured
//! (memoryless receiver) counterparts, private-capacity lower bounds and
//! hypothesis-testing exponents.
//!
//! Everything is computed in nats; [`Quantity`] carries both bases.

use serde::{Deserialize, Serialize};

use crate::channels::{conditional_states, measure_channel, twirl, MeasurementBasis};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::{IrrepDecomposition, ProjectiveUnitaryRep};
use crate::linalg::{self, CMatrix};
use crate::state::{
    entropy_of_spectrum, nats_to_bits, relative_entropy_from_spectra, shannon_entropy, DensityMatrix, PureState,
};

/// Internal agreement demanded between two formulas for the same quantity, in nats.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub nats: f64,
    pub bits: f64,
}

impl Quantity {
    pub fn from_nats(nats: f64) -> Self {
        Quantity { nats, bits: nats_to_bits(nats) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMethod {
    Direct,
    Decomposed,
}

/// Contribution of one isotypic block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockTerm {
    pub label: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub probability: f64,
    /// Entropy of the block state with the irrep factor traced out.
    pub entropy: Quantity,
    /// Entropy of the irrep-factor marginal; filled for pure inputs only.
    pub irrep_marginal_entropy: Option<Quantity>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapacityReport {
    pub method: CapacityMethod,
    pub capacity: Quantity,
    pub measured: Option<Quantity>,
    pub gap: Option<Quantity>,
    pub block_entropy: Option<Quantity>,
    pub blocks: Vec<BlockTerm>,
    /// The pure-state form with the multiplicity space and B traced out.
    pub pure_form: Option<Quantity>,
}

impl CapacityReport {
    /// Adds the measured capacity and the resulting gap.
    pub fn with_measured(mut self, measured_nats: f64) -> Self {
        self.measured = Some(Quantity::from_nats(measured_nats));
        self.gap = Some(Quantity::from_nats(self.capacity.nats - measured_nats));
        self
    }
}

fn check_acts_on_a(rho: &DensityMatrix, dim: usize) -> Result<()> {
    if rho.dims().is_empty() || rho.dims()[0] != dim {
        return Err(Error::Dimension(format!(
            "group acts on a {dim}-dimensional system but the state has dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// D(ρ‖G(ρ)) with the twirl on the first subsystem, in nats. Computed as
/// H(G(ρ)) − H(ρ) and cross-checked against the relative entropy evaluated
/// from the same spectra.
pub fn capacity_direct(rho: &DensityMatrix, rep: &ProjectiveUnitaryRep, tol: &Tolerances) -> Result<f64> {
    check_acts_on_a(rho, rep.dim())?;
    let twirled = twirl(rho, rep, 0)?;
    let e_rho = rho.eig()?;
    let e_tw = twirled.eig()?;
    let diff = entropy_of_spectrum(&e_tw.eigenvalues, tol.support_cutoff)
        - entropy_of_spectrum(&e_rho.eigenvalues, tol.support_cutoff);
    let rel = relative_entropy_from_spectra(rho.matrix(), &e_rho, &e_tw, tol);
    if !rel.is_finite() || (rel - diff).abs() > CROSS_CHECK_TOL {
        return Err(Error::Numerical(format!(
            "entropy difference {diff:.12} and relative entropy {rel:.12} disagree"
        )));
    }
    Ok(diff)
}

pub fn capacity_direct_report(rho: &DensityMatrix, rep: &ProjectiveUnitaryRep, tol: &Tolerances) -> Result<CapacityReport> {
    Ok(CapacityReport {
        method: CapacityMethod::Direct,
        capacity: Quantity::from_nats(capacity_direct(rho, rep, tol)?),
        measured: None,
        gap: None,
        block_entropy: None,
        blocks: Vec::new(),
        pure_form: None,
    })
}

/// Block state (P_λ, ρ_λ) of ρ on A⊗B expressed on H_λ ⊗ M_λ ⊗ B.
pub(crate) struct BlockState {
    pub index: usize,
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

/// Splits ρ on A⊗(rest) into its normalized isotypic block states. Blocks
/// with probability below `cutoff` carry no state.
pub(crate) fn block_states(rho: &DensityMatrix, dec: &IrrepDecomposition, cutoff: f64) -> Result<Vec<BlockState>> {
    check_acts_on_a(rho, dec.dim())?;
    let rest: usize = rho.dims()[1..].iter().product();
    let rotated = linalg::conjugate_local(&dec.basis_change.adjoint(), rho.matrix(), &[dec.dim(), rest], 0)?;
    let mut out = Vec::with_capacity(dec.blocks.len());
    for (idx, b) in dec.blocks.iter().enumerate() {
        let off = dec.block_offset(idx) * rest;
        let size = dec.block_size(idx) * rest;
        let sub = CMatrix::from_fn(size, size, |i, j| rotated[(off + i, off + j)]);
        let p = sub.trace().re;
        let state = if p > cutoff {
            let mut dims = vec![b.irrep_dim, b.multiplicity];
            dims.extend_from_slice(&rho.dims()[1..]);
            Some(DensityMatrix::from_trusted(sub.scale_real(1.0 / p), dims)?)
        } else {
            None
        };
        out.push(BlockState { index: idx, probability: p.max(0.0), state });
    }
    Ok(out)
}

/// H(P_Λ) + Σ_λ P_Λ(λ)(log d_λ + H(tr_{H_λ} ρ_λ)) − H(ρ). For pure ρ the
/// variant with only H_λ kept is evaluated too and must agree.
pub fn capacity_decomposed(rho: &DensityMatrix, dec: &IrrepDecomposition, tol: &Tolerances) -> Result<CapacityReport> {
    let blocks = block_states(rho, dec, tol.outcome_cutoff)?;
    let h_rho = entropy_of_spectrum(&rho.eig()?.eigenvalues, tol.support_cutoff);
    let pure = h_rho < 1e-10;
    let probs: Vec<f64> = blocks.iter().map(|b| b.probability).collect();
    let h_p = shannon_entropy(&probs);
    let mut mixed_sum = 0.0;
    let mut pure_sum = 0.0;
    let mut terms = Vec::with_capacity(blocks.len());
    for bs in &blocks {
        let b = &dec.blocks[bs.index];
        let (entropy, marginal) = match &bs.state {
            Some(st) => {
                let keep: Vec<usize> = (1..st.dims().len()).collect();
                let h = entropy_of_spectrum(&st.partial_trace(&keep)?.eig()?.eigenvalues, tol.support_cutoff);
                let hm = if pure {
                    Some(entropy_of_spectrum(&st.partial_trace(&[0])?.eig()?.eigenvalues, tol.support_cutoff))
                } else {
                    None
                };
                (h, hm)
            }
            None => (0.0, if pure { Some(0.0) } else { None }),
        };
        let log_d = (b.irrep_dim as f64).ln();
        mixed_sum += bs.probability * (log_d + entropy);
        pure_sum += bs.probability * (log_d + marginal.unwrap_or(0.0));
        terms.push(BlockTerm {
            label: b.label.clone(),
            irrep_dim: b.irrep_dim,
            multiplicity: b.multiplicity,
            probability: bs.probability,
            entropy: Quantity::from_nats(entropy),
            irrep_marginal_entropy: marginal.map(Quantity::from_nats),
        });
    }
    let capacity = h_p + mixed_sum - h_rho;
    let pure_form = if pure {
        let v = h_p + pure_sum;
        if (v - capacity).abs() > CROSS_CHECK_TOL {
            return Err(Error::Numerical(format!(
                "pure-state block formulas disagree: {capacity:.12} vs {v:.12}"
            )));
        }
        Some(Quantity::from_nats(v))
    } else {
        None
    };
    Ok(CapacityReport {
        method: CapacityMethod::Decomposed,
        capacity: Quantity::from_nats(capacity),
        measured: None,
        gap: None,
        block_entropy: Some(Quantity::from_nats(h_p)),
        blocks: terms,
        pure_form,
    })
}

/// Capacity of one measurement outcome on B.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeCapacity {
    pub outcome: usize,
    pub probability: f64,
    pub capacity: Quantity,
}

/// Σ_k P_K(k) C_c(ρ_{A|k}), term by term.
pub fn capacity_per_outcome(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<Vec<OutcomeCapacity>> {
    check_acts_on_a(rho, rep.dim())?;
    conditional_states(rho, basis, tol)?
        .conditionals
        .iter()
        .map(|c| {
            Ok(OutcomeCapacity {
                outcome: c.outcome,
                probability: c.probability,
                capacity: Quantity::from_nats(capacity_direct(&c.state, rep, tol)?),
            })
        })
        .collect()
}

/// D(B(ρ)‖G∘B(ρ)) in nats, cross-checked against the per-outcome sum.
pub fn capacity_measured(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<f64> {
    check_acts_on_a(rho, rep.dim())?;
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("measured capacity needs a state on A⊗B, got dims {:?}", rho.dims())));
    }
    let measured = measure_channel(rho, basis, 1)?;
    let direct = capacity_direct(&measured, rep, tol)?;
    let summed: f64 = capacity_per_outcome(rho, rep, basis, tol)?
        .iter()
        .map(|o| o.probability * o.capacity.nats)
        .sum();
    if (direct - summed).abs() > CROSS_CHECK_TOL {
        return Err(Error::Numerical(format!(
            "measured capacity {direct:.12} disagrees with per-outcome sum {summed:.12}"
        )));
    }
    Ok(direct)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub capacity: Quantity,
    pub measured: Quantity,
    pub gap: Quantity,
    /// Gap within the zero tolerance: the receiver's memory gives no advantage in this basis.
    pub useless_at_basis: bool,
}

/// C_c(ρ) − C_c(B(ρ)).
pub fn memory_gap(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<GapReport> {
    let c = capacity_direct(rho, rep, tol)?;
    let m = capacity_measured(rho, rep, basis, tol)?;
    let gap = Quantity::from_nats(c - m);
    Ok(GapReport {
        capacity: Quantity::from_nats(c),
        measured: Quantity::from_nats(m),
        gap,
        useless_at_basis: gap.bits <= tol.zero,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrivateReport {
    pub lower_bound: Quantity,
    pub measured_lower_bound: Option<Quantity>,
    pub gap: Option<Quantity>,
    /// D(ρ_AE‖G(ρ_AE)), the eavesdropper's share.
    pub leakage: Quantity,
}

/// D(ρ_AB‖G(ρ_AB)) − D(ρ_AE‖G(ρ_AE)) for a purification ψ on A⊗B⊗E; with a
/// basis, the first term is replaced by its measured version.
pub fn private_lower_bound(
    psi: &PureState,
    rep: &ProjectiveUnitaryRep,
    basis: Option<&MeasurementBasis>,
    tol: &Tolerances,
) -> Result<PrivateReport> {
    if psi.dims().len() != 3 {
        return Err(Error::Dimension(format!("expected a pure state on A⊗B⊗E, got dims {:?}", psi.dims())));
    }
    let full = psi.density();
    let rho_ab = full.partial_trace(&[0, 1])?;
    let rho_ae = full.partial_trace(&[0, 2])?;
    let c_ab = capacity_direct(&rho_ab, rep, tol)?;
    let leak = capacity_direct(&rho_ae, rep, tol)?;
    let (measured, gap) = match basis {
        Some(b) => {
            let m = capacity_measured(&rho_ab, rep, b, tol)? - leak;
            (Some(Quantity::from_nats(m)), Some(Quantity::from_nats(c_ab - leak - m)))
        }
        None => (None, None),
    };
    Ok(PrivateReport {
        lower_bound: Quantity::from_nats(c_ab - leak),
        measured_lower_bound: measured,
        gap,
        leakage: Quantity::from_nats(leak),
    })
}

/// Optimal type-II error exponent for telling the probe's symmetry-breaking
/// evolution apart from its twirl: D(ψ‖(G⊗id)(ψ)). With an idler basis, the
/// exponent available without storing the idler.
pub fn stein_exponent(
    input: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    idler_basis: Option<&MeasurementBasis>,
    tol: &Tolerances,
) -> Result<f64> {
    match idler_basis {
        Some(b) => capacity_measured(input, rep, b, tol),
        None => capacity_direct(input, rep, tol),
    }
}
