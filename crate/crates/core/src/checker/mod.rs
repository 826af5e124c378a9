//! Certificates for and against the usefulness of the receiver's quantum memory,
//! and an orchestrator combining them into a single report.

pub mod a2;
pub mod c1;
pub mod gram;
pub mod six_item;

pub use a2::{check_a2, recovery_map_check, A2Witness, RecoveryReport};
pub use c1::{check_c1, check_max_entangled_c1, C1Report};
pub use gram::{
    analytic_useful_vectors, gram_decompose, gram_residual, usefulness_witness, GramDecomposition, GramMethod,
    GramOptions, GramOutcome, UsefulnessWitness, WitnessVerdict,
};
pub use six_item::{classical_quantum_witness, phase_mixture_witness, verify_six_item, SixItemWitness, WitnessBlock};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{capacity_direct, memory_gap, GapReport, Quantity};
use crate::channels::{gram, MeasurementBasis};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::{decompose_abelian, IrrepDecomposition, ProjectiveUnitaryRep};
use crate::linalg::{polar_unitary, svd, CMatrix, ZERO};
use crate::random::trial_rng;
use crate::state::{DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "USELESS")]
    Useless,
    #[serde(rename = "USEFUL-ALL-BASES")]
    UsefulAllBases,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Useless => "USELESS",
            Verdict::UsefulAllBases => "USEFUL-ALL-BASES",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    /// Random bases tried by the heuristic search.
    pub haar_trials: usize,
    pub seed: u64,
    pub gram: GramOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { haar_trials: 32, seed: 0, gram: GramOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct A2Summary {
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisEvaluation {
    pub label: String,
    pub gap: GapReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub capacity: Quantity,
    pub pure: bool,
    pub multiplicity_free: Option<bool>,
    /// Basis at which the reported measured capacity was obtained.
    pub basis_label: Option<String>,
    pub basis: Option<MeasurementBasis>,
    pub gap: Option<GapReport>,
    pub a2: Option<A2Summary>,
    pub recovery: Option<RecoveryReport>,
    pub c1: Option<C1Report>,
    /// Some block of a pure state is entangled between its irrep factor and B.
    pub block_entangled: Option<bool>,
    /// Bob's conditional vectors per block for pure multiplicity-free input.
    pub block_vectors: Option<Vec<Vec<C64>>>,
    pub usefulness: Option<UsefulnessWitness>,
    pub gram: Option<GramOutcome>,
    /// Best measured capacities from the basis search.
    pub search: Vec<BasisEvaluation>,
    pub warnings: Vec<String>,
}

impl CheckReport {
    fn new(capacity: f64, pure: bool, multiplicity_free: Option<bool>) -> Self {
        CheckReport {
            verdict: Verdict::Unknown,
            capacity: Quantity::from_nats(capacity),
            pure,
            multiplicity_free,
            basis_label: None,
            basis: None,
            gap: None,
            a2: None,
            recovery: None,
            c1: None,
            block_entangled: None,
            block_vectors: None,
            usefulness: None,
            gram: None,
            search: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Evaluates the gap and the reconstruction identity at `basis`; sets USELESS if both agree.
    fn certify_basis(
        &mut self,
        rho: &DensityMatrix,
        rep: &ProjectiveUnitaryRep,
        basis: &MeasurementBasis,
        label: &str,
        tol: &Tolerances,
    ) -> Result<bool> {
        let gap = memory_gap(rho, rep, basis, tol)?;
        let a2 = check_a2(rho, rep, basis, tol)?;
        if gap.useless_at_basis != a2.passed {
            self.warnings.push(format!(
                "gap ({:.3e} bits) and reconstruction residual ({:.3e}) disagree at the {label} basis",
                gap.gap.bits, a2.residual
            ));
        }
        let ok = gap.useless_at_basis && a2.passed;
        if ok {
            self.recovery = Some(recovery_map_check(rho, rep, basis, &a2, tol)?);
            self.verdict = Verdict::Useless;
        }
        self.a2 = Some(A2Summary { residual: a2.residual, passed: a2.passed });
        self.gap = Some(gap);
        self.basis = Some(basis.clone());
        self.basis_label = Some(label.to_string());
        Ok(ok)
    }
}

/// The state as a pure vector when its largest eigenvalue is one.
fn as_pure(rho: &DensityMatrix) -> Result<Option<PureState>> {
    let sd = rho.eig()?;
    if sd.max_eigenvalue() < 1.0 - 1e-9 {
        return Ok(None);
    }
    Ok(Some(PureState::normalized(sd.vector(0), rho.dims().to_vec())?))
}

/// Decides whether the receiver's memory can be dispensed with.
///
/// With a basis, that basis is tested first. Pure states on a multiplicity-free
/// representation are then settled through the Gram matrix of Bob's conditional
/// vectors; everything else falls back to a seeded basis search that can only
/// certify uselessness.
pub fn classify(
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    dec: Option<&IrrepDecomposition>,
    basis: Option<&MeasurementBasis>,
    opts: &ClassifyOptions,
    tol: &Tolerances,
) -> Result<CheckReport> {
    if rho.dims().len() != 2 {
        return Err(Error::Dimension(format!("expected a state on A⊗B, got dims {:?}", rho.dims())));
    }
    let owned;
    let dec = match dec {
        Some(d) => Some(d),
        None if rep.has_trivial_cocycle() && rep.group().is_abelian() => {
            owned = decompose_abelian(rep, opts.seed)?;
            Some(&owned)
        }
        None => None,
    };
    let capacity = capacity_direct(rho, rep, tol)?;
    let pure = as_pure(rho)?;
    let mut report = CheckReport::new(capacity, pure.is_some(), dec.map(|d| d.is_multiplicity_free()));

    if let Some(b) = basis {
        if let (Some(psi), Some(d)) = (&pure, dec) {
            report.c1 = Some(check_c1(psi, d, b, tol)?);
        }
        if report.certify_basis(rho, rep, b, "supplied", tol)? {
            return Ok(report);
        }
    }

    match (&pure, dec) {
        (Some(psi), Some(d)) if d.is_multiplicity_free() => pure_multiplicity_free(&mut report, psi, rho, rep, d, opts, tol)?,
        _ => basis_search(&mut report, rho, rep, opts, tol)?,
    }
    Ok(report)
}

fn pure_multiplicity_free(
    report: &mut CheckReport,
    psi: &PureState,
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    dec: &IrrepDecomposition,
    opts: &ClassifyOptions,
    tol: &Tolerances,
) -> Result<()> {
    let db = psi.dims()[1];
    let amp = psi.amplitudes();
    let w = &dec.basis_change;
    let mut vectors = Vec::new();
    let mut entangled = false;
    for (b, blk) in dec.blocks.iter().enumerate() {
        let off = dec.block_offset(b);
        let d = blk.irrep_dim;
        // Block component as a d_λ × d_B coefficient matrix.
        let m = CMatrix::from_fn(d, db, |a, y| {
            (0..w.rows()).map(|x| w[(x, off + a)].conj() * amp[x * db + y]).sum::<C64>()
        });
        let weight = m.frobenius_norm().powi(2);
        if weight <= tol.outcome_cutoff {
            continue;
        }
        let s = svd(&m)?;
        if s.singular_values.len() > 1 && s.singular_values[1] > 1e-6 * s.singular_values[0] {
            entangled = true;
        }
        let u0 = s.u.column(0);
        let v: Vec<C64> = (0..db).map(|y| (0..d).map(|a| u0[a].conj() * m[(a, y)]).sum::<C64>()).collect();
        vectors.push(crate::linalg::normalized(&v));
    }
    report.block_entangled = Some(entangled);
    if entangled {
        report.warnings.push("a block state is entangled between its irrep factor and B; no basis satisfies the block conditions".into());
        report.verdict = Verdict::UsefulAllBases;
        return Ok(());
    }
    let l = vectors.len();
    report.block_vectors = Some(vectors.clone());
    if l <= 1 {
        report.certify_basis(rho, rep, &MeasurementBasis::computational(db), "computational", tol)?;
        return Ok(());
    }
    let witness = usefulness_witness(&vectors, tol)?;
    let useful = witness.verdict == WitnessVerdict::UsefulAllBases;
    report.usefulness = Some(witness);
    if useful {
        report.verdict = Verdict::UsefulAllBases;
        return Ok(());
    }

    let j = gram(&vectors)?;
    let mut narrow = opts.gram.clone();
    narrow.atoms = Some(db);
    let outcome = gram_decompose(&j, &narrow, tol)?;
    if outcome.is_found() {
        let basis = basis_from_decomposition(&vectors, outcome.decomposition(), db)?;
        report.gram = Some(outcome);
        report.certify_basis(rho, rep, &basis, "gram", tol)?;
        if report.verdict != Verdict::Useless {
            report.warnings.push("the basis built from the Gram decomposition did not certify".into());
        }
        return Ok(());
    }
    let wide = gram_decompose(&j, &opts.gram, tol)?;
    match &wide {
        GramOutcome::Found(d) => report.warnings.push(format!(
            "decomposition found with {} rotations but none with {db}; no basis certificate",
            d.atoms()
        )),
        GramOutcome::NotFound { best, suspect_numeric } => {
            if *suspect_numeric {
                report.warnings.push(format!(
                    "SUSPECT-NUMERIC: no decomposition found for l = {l} (best residual {:.3e})",
                    best.residual
                ));
            }
        }
    }
    report.gram = Some(wide);
    basis_search(report, rho, rep, opts, tol)
}

/// Basis e_k = Q f_k with Q the unitary carrying the decomposition's vectors u_λ onto v_λ.
fn basis_from_decomposition(vectors: &[Vec<C64>], dec: &GramDecomposition, db: usize) -> Result<MeasurementBasis> {
    let us = dec.u_vectors();
    let mut a = CMatrix::zeros(db, db);
    for (v, u) in vectors.iter().zip(&us) {
        let mut padded = vec![ZERO; db];
        padded[..u.len()].copy_from_slice(u);
        a = &a + &CMatrix::outer(v, &padded);
    }
    MeasurementBasis::from_unitary(polar_unitary(&a)?)
}

fn basis_search(
    report: &mut CheckReport,
    rho: &DensityMatrix,
    rep: &ProjectiveUnitaryRep,
    opts: &ClassifyOptions,
    tol: &Tolerances,
) -> Result<()> {
    let db = rho.dims()[1];
    let mut candidates: Vec<(String, MeasurementBasis)> = vec![
        ("computational".into(), MeasurementBasis::computational(db)),
        ("fourier".into(), MeasurementBasis::fourier(db)),
    ];
    // Fourier transform of the eigenbasis of ρ_B.
    let sd = rho.partial_trace(&[1])?.eig()?;
    let f = MeasurementBasis::fourier(db);
    candidates.push(("schmidt-fourier".into(), MeasurementBasis::from_unitary(&sd.eigenvectors * f.unitary())?));
    for t in 0..opts.haar_trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        candidates.push((format!("haar-{t}"), MeasurementBasis::haar(db, &mut rng)));
    }
    let evals: Result<Vec<BasisEvaluation>> = candidates
        .par_iter()
        .map(|(label, b)| Ok(BasisEvaluation { label: label.clone(), gap: memory_gap(rho, rep, b, tol)? }))
        .collect();
    let mut evals = evals?;
    evals.sort_by(|a, b| a.gap.gap.nats.total_cmp(&b.gap.gap.nats).then_with(|| a.label.cmp(&b.label)));
    if let Some(best) = evals.first() {
        let (label, basis) = candidates.iter().find(|(l, _)| *l == best.label).expect("label from candidates");
        if best.gap.useless_at_basis {
            report.certify_basis(rho, rep, basis, label, tol)?;
        } else if report.gap.is_none() {
            report.gap = Some(best.gap.clone());
            report.basis = Some(basis.clone());
            report.basis_label = Some(label.clone());
        }
    }
    evals.truncate(5);
    report.search = evals;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_max_entangled, build_useful_protocol, VectorSource};
    use crate::group::{build_cyclic_shift_rep, build_diagonal_character_rep};
    use crate::random::{random_density_matrix, random_unit_vector, rng_from_seed};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn max_entangled_is_useless() {
        let rep = build_cyclic_shift_rep(3).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let me = build_max_entangled(&dec).unwrap();
        let r = classify(&me.state.density(), &rep, Some(&dec), Some(&me.basis), &ClassifyOptions::default(), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Useless);
        assert!(r.c1.unwrap().passed);
        assert!(r.recovery.unwrap().passed);
        // Without a basis the Gram route finds one.
        let r = classify(&me.state.density(), &rep, Some(&dec), None, &ClassifyOptions::default(), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Useless, "{:?}", r.warnings);
    }

    #[test]
    fn protocol_output_is_useful_everywhere() {
        let w: Vec<Vec<usize>> = (0..5).map(|x| vec![x]).collect();
        let rep = build_diagonal_character_rep(&[5], &w).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let u = build_useful_protocol(&dec, 5, 2, VectorSource::Analytic, 0, &tol()).unwrap();
        let psi = u.state.unwrap();
        let r = classify(&psi.density(), &rep, Some(&dec), None, &ClassifyOptions::default(), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::UsefulAllBases);
    }

    #[test]
    fn random_pure_three_blocks_is_useless() {
        let rep = build_diagonal_character_rep(&[3], &[vec![0], vec![1], vec![2]]).unwrap();
        let dec = decompose_abelian(&rep, 0).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..3 {
            let vs: Vec<Vec<C64>> = (0..3).map(|_| random_unit_vector(3, &mut rng)).collect();
            let mut amp = vec![ZERO; 9];
            for (a, v) in vs.iter().enumerate() {
                for y in 0..3 {
                    amp[a * 3 + y] = v[y] / 3f64.sqrt();
                }
            }
            let psi = PureState::normalized(amp, vec![3, 3]).unwrap();
            let r = classify(&psi.density(), &rep, Some(&dec), None, &ClassifyOptions::default(), &tol()).unwrap();
            assert_eq!(r.verdict, Verdict::Useless, "{:?}", r.warnings);
        }
    }

    #[test]
    fn random_mixed_is_unknown() {
        let rep = build_cyclic_shift_rep(2).unwrap();
        let mut rng = rng_from_seed(11);
        let rho = DensityMatrix::from_trusted(random_density_matrix(4, 4, &mut rng), vec![2, 2]).unwrap();
        let opts = ClassifyOptions { haar_trials: 8, ..Default::default() };
        let r = classify(&rho, &rep, None, None, &opts, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        assert!(!r.search.is_empty());
        assert!(r.gap.unwrap().gap.nats > 0.0);
    }
}
