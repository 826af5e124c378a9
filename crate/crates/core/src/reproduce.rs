//! Regenerates the known examples as pass/fail tables.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::capacity::{capacity_direct, capacity_measured, memory_gap, private_lower_bound, stein_exponent};
use crate::channels::{gram, MeasurementBasis};
use crate::checker::a2::{check_a2, recovery_map_check};
use crate::checker::c1::{check_c1, check_max_entangled_c1};
use crate::checker::gram::{gram_decompose, GramOptions};
use crate::checker::six_item::{classical_quantum_witness, phase_mixture_witness, verify_six_item};
use crate::checker::{classify, ClassifyOptions, Verdict};
use crate::config::Tolerances;
use crate::construct::{
    build_dephased, build_fourier_mixture, build_illumination, build_max_entangled, build_phase_mixture,
    build_useful_protocol, overlap_defect, purify, random_phase_mixture_params, VectorSource,
};
use crate::error::{Error, Result};
use crate::group::{
    build_diagonal_character_rep, count_commutative_subgroups, count_maximal_simplified, decompose_abelian,
    enumerate_commutative_subgroups, IrrepDecomposition, ProjectiveUnitaryRep,
};
use crate::io::{symmetric3_rep, CheckRow};
use crate::linalg::CMatrix;
use crate::random::{random_density_matrix, random_distribution, random_unit_vector, trial_rng};
use crate::state::{nats_to_bits, DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FourierMixture,
    MaxEntangled,
    UsefulState,
    Subgroups,
    Illumination,
    BlockConditions,
    Private,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::FourierMixture,
        Suite::MaxEntangled,
        Suite::UsefulState,
        Suite::Subgroups,
        Suite::Illumination,
        Suite::BlockConditions,
        Suite::Private,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FourierMixture => "fourier-mixture",
            Suite::MaxEntangled => "max-entangled",
            Suite::UsefulState => "useful-state",
            Suite::Subgroups => "subgroups",
            Suite::Illumination => "illumination",
            Suite::BlockConditions => "block-conditions",
            Suite::Private => "private",
        }
    }

    /// Short aliases accepted on the command line.
    fn alias(self) -> Option<&'static str> {
        match self {
            Suite::FourierMixture => Some("sec32"),
            Suite::MaxEntangled => Some("sec33"),
            Suite::UsefulState => Some("sec43"),
            Suite::Subgroups => Some("sec5b"),
            Suite::BlockConditions => Some("appendix"),
            _ => None,
        }
    }

    pub fn run(self, seed: u64, tol: &Tolerances) -> Result<Vec<CheckRow>> {
        match self {
            Suite::FourierMixture => fourier_mixture(seed, tol),
            Suite::MaxEntangled => max_entangled(tol),
            Suite::UsefulState => useful_state(seed, tol),
            Suite::Subgroups => subgroups(tol),
            Suite::Illumination => illumination(tol),
            Suite::BlockConditions => block_conditions(seed, tol),
            Suite::Private => private(seed, tol),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s || x.alias() == Some(s.as_str()))
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidArgument(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Z_l with characters 0..l on C^l, and its decomposition.
pub fn cyclic_characters(l: usize) -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    let w: Vec<Vec<usize>> = (0..l).map(|x| vec![x]).collect();
    let rep = build_diagonal_character_rep(&[l], &w)?;
    let dec = decompose_abelian(&rep, 0)?;
    Ok((rep, dec))
}

/// Z_2 × Z_2 on C^3 with the sign character of the first factor twice.
pub fn klein_with_multiplicity() -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    let rep = build_diagonal_character_rep(&[2, 2], &[vec![0, 0], vec![1, 0], vec![1, 0], vec![0, 1]])?;
    let dec = decompose_abelian(&rep, 0)?;
    Ok((rep, dec))
}

fn log2(l: usize) -> f64 {
    (l as f64).log2()
}

/// A2 and recovery residuals at a basis.
fn a2_rows(rows: &mut Vec<CheckRow>, name: &str, rho: &DensityMatrix, rep: &ProjectiveUnitaryRep, basis: &MeasurementBasis, tol: &Tolerances) -> Result<()> {
    let w = check_a2(rho, rep, basis, tol)?;
    let r = recovery_map_check(rho, rep, basis, &w, tol)?;
    rows.push(CheckRow::below(format!("{name} reconstruction residual"), w.residual, tol.a2));
    rows.push(CheckRow::below(format!("{name} recovery residual"), r.max_trace_distance, tol.a2));
    Ok(())
}

fn fourier_mixture(seed: u64, tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for l in 2..=4 {
        let (rep, dec) = cyclic_characters(l)?;
        let uniform = vec![1.0 / l as f64; l];
        let fm = build_fourier_mixture(&dec, l, &uniform)?;
        rows.push(CheckRow::below(format!("l={l} class states orthonormal"), overlap_defect(&fm.states), 1e-10));
        let g = memory_gap(&fm.rho, &rep, &fm.basis, tol)?;
        rows.push(CheckRow::close(format!("l={l} memory gap (bits)"), 0.0, g.gap.bits, tol.zero));
        a2_rows(&mut rows, &format!("l={l} uniform"), &fm.rho, &rep, &fm.basis, tol)?;
        let w = phase_mixture_witness(&fm.params, &rep, &dec, &fm.basis)?;
        rows.push(CheckRow::below(format!("l={l} six-item witness residual"), verify_six_item(&fm.rho, &rep, &fm.basis, &w)?, 1e-8));
        let cq = classical_quantum_witness(&fm.rho, &rep, &fm.basis, tol)?;
        rows.push(CheckRow::below(format!("l={l} classical-quantum witness residual"), verify_six_item(&fm.rho, &rep, &fm.basis, &cq)?, 1e-8));

        let mut worst = (0.0f64, 0.0f64);
        for t in 0..20 {
            let mut rng = trial_rng(seed, t);
            let fm = build_fourier_mixture(&dec, l, &random_distribution(l, &mut rng))?;
            let a = check_a2(&fm.rho, &rep, &fm.basis, tol)?;
            let r = recovery_map_check(&fm.rho, &rep, &fm.basis, &a, tol)?;
            worst = (worst.0.max(a.residual), worst.1.max(r.max_trace_distance));
        }
        rows.push(CheckRow::below(format!("l={l} 20 random class weights max reconstruction residual"), worst.0, tol.a2));
        rows.push(CheckRow::below(format!("l={l} 20 random class weights max recovery residual"), worst.1, tol.a2));
    }
    Ok(rows)
}

fn max_entangled(tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for l in 2..=5 {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        let rho = me.state.density();
        let c = nats_to_bits(capacity_direct(&rho, &rep, tol)?);
        let m = nats_to_bits(capacity_measured(&rho, &rep, &me.basis, tol)?);
        rows.push(CheckRow::close(format!("l={l} capacity (bits)"), log2(l), c, 1e-8));
        rows.push(CheckRow::close(format!("l={l} measured capacity (bits)"), log2(l), m, 1e-8));
        a2_rows(&mut rows, &format!("l={l}"), &rho, &rep, &me.basis, tol)?;
    }
    let (rep, dec) = cyclic_characters(3)?;
    let me = build_max_entangled(&dec)?;
    for p in [0.0, 0.3, 0.7, 1.0] {
        let rho = build_dephased(&me.state, &rep, p)?;
        a2_rows(&mut rows, &format!("dephased p={p}"), &rho, &rep, &me.basis, tol)?;
    }
    let g = build_dephased(&me.state, &rep, 1.0)?;
    rows.push(CheckRow::close("fully dephased capacity (bits)", 0.0, nats_to_bits(capacity_direct(&g, &rep, tol)?), 1e-8));
    Ok(rows)
}

fn useful_state(seed: u64, tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let (rep, dec) = cyclic_characters(5)?;
    let u = build_useful_protocol(&dec, 5, 2, VectorSource::Analytic, seed, tol)?;
    let sv = &u.witness.singular_values;
    rows.push(CheckRow::close("analytic l=5 witness rank", 4.0, u.witness.rank as f64, 0.0));
    rows.push(CheckRow::above("analytic l=5 smallest singular value", sv[3], 1e-6));
    let psi = u.state.ok_or_else(|| Error::Numerical("protocol returned no state".into()))?;
    let rho = psi.density();
    let c = nats_to_bits(capacity_direct(&rho, &rep, tol)?);
    let mut min_gap = f64::INFINITY;
    for t in 0..200 {
        let b = MeasurementBasis::haar(2, &mut trial_rng(seed, t));
        let m = nats_to_bits(capacity_measured(&rho, &rep, &b, tol)?);
        min_gap = min_gap.min(c - m);
    }
    rows.push(CheckRow::above("analytic l=5 min gap over 200 Haar bases (bits)", min_gap, 1e-6));
    let r = classify(&rho, &rep, Some(&dec), None, &ClassifyOptions { seed, ..Default::default() }, tol)?;
    rows.push(CheckRow::exact("analytic l=5 verdict", &Verdict::UsefulAllBases.to_string(), &r.verdict.to_string()));

    let (rep4, dec4) = cyclic_characters(4)?;
    let s = build_useful_protocol(&dec4, 4, 2, VectorSource::Seeded, seed, tol)?;
    rows.push(CheckRow::close("seeded l=4 witness rank", 4.0, s.witness.rank as f64, 0.0));
    let rho4 = s.state.ok_or_else(|| Error::Numerical("protocol returned no state".into()))?.density();
    let r = classify(&rho4, &rep4, Some(&dec4), None, &ClassifyOptions { seed, ..Default::default() }, tol)?;
    rows.push(CheckRow::exact("seeded l=4 verdict", &Verdict::UsefulAllBases.to_string(), &r.verdict.to_string()));
    Ok(rows)
}

fn big(x: &BigUint) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

fn subgroups(tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (p, n, m, expected) in [(2u64, 1usize, 1usize, Some(3u64)), (2, 2, 1, None), (2, 2, 2, Some(15)), (3, 1, 1, Some(4))] {
        let formula = count_commutative_subgroups(p, n, m)?;
        let listed = BigUint::from(enumerate_commutative_subgroups(p, n, m)?.len());
        rows.push(CheckRow::close(format!("p={p} n={n} m={m} enumeration vs formula"), big(&formula), big(&listed), 0.0));
        if let Some(e) = expected {
            rows.push(CheckRow::close(format!("p={p} n={n} m={m} count"), e as f64, big(&formula), 0.0));
        }
    }
    for (p, n) in [(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2), (5, 3), (7, 4)] {
        let a = count_commutative_subgroups(p, n, n)?;
        let b = count_maximal_simplified(p, n)?;
        rows.push(CheckRow::exact(format!("p={p} n={n} maximal count product form"), &a.to_string(), &b.to_string()));
    }

    // Blocks with n_λ ≥ d_λ admit a memory-useless maximally entangled state.
    let (rep, dec) = symmetric3_rep(2, 2)?;
    rows.push(CheckRow::exact("S3 multiplicities dominate dimensions", "true", &check_max_entangled_c1(&dec).to_string()));
    let me = build_max_entangled(&dec)?;
    let c1 = check_c1(&me.state, &dec, &me.basis, tol)?;
    rows.push(CheckRow::below("S3 maximally entangled block-condition deviation", c1.distribution_deviation.max(c1.marginal_deviation), tol.c1));
    let g = memory_gap(&me.state.density(), &rep, &me.basis, tol)?;
    rows.push(CheckRow::close("S3 maximally entangled memory gap (bits)", 0.0, g.gap.bits, tol.zero));
    let (_, short) = symmetric3_rep(1, 1)?;
    rows.push(CheckRow::exact("S3 with a standard block of multiplicity 1", "false", &check_max_entangled_c1(&short).to_string()));
    Ok(rows)
}

fn illumination(tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for d in [2, 3, 5] {
        let il = build_illumination(d)?;
        let rho = il.input.density();
        let q = nats_to_bits(stein_exponent(&rho, &il.rep, None, tol)?);
        let m = nats_to_bits(stein_exponent(&rho, &il.rep, Some(&il.idler_basis), tol)?);
        rows.push(CheckRow::close(format!("d={d} exponent with memory (bits)"), log2(d), q, 1e-8));
        rows.push(CheckRow::close(format!("d={d} exponent without memory (bits)"), log2(d), m, 1e-8));
        let j = gram(&il.idler_vectors)?;
        let defect = (j.matrix() - &CMatrix::identity(d)).frobenius_norm();
        rows.push(CheckRow::below(format!("d={d} idler vectors orthonormal"), defect, 1e-10));
    }
    Ok(rows)
}

/// Pure states in the phase-locked form on a representation with multiplicity.
fn block_conditions(seed: u64, tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let (rep, dec) = klein_with_multiplicity()?;
    let mut worst_a2 = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut worst_c1 = 0.0f64;
    for t in 0..100 {
        let mut rng = trial_rng(seed, t);
        let d_b = 2 + (t as usize % 3);
        let params = random_phase_mixture_params(&dec, d_b, 1, &mut rng);
        let basis = MeasurementBasis::haar(d_b, &mut rng);
        let (states, rho) = build_phase_mixture(&params, &dec, &basis)?;
        worst_a2 = worst_a2.max(check_a2(&rho, &rep, &basis, tol)?.residual);
        worst_gap = worst_gap.max(memory_gap(&rho, &rep, &basis, tol)?.gap.bits.abs());
        let c1 = check_c1(&states[0], &dec, &basis, tol)?;
        worst_c1 = worst_c1.max(c1.distribution_deviation.max(c1.marginal_deviation));
    }
    rows.push(CheckRow::below("100 block-condition states max block deviation", worst_c1, tol.c1));
    rows.push(CheckRow::below("100 block-condition states max reconstruction residual", worst_a2, tol.a2));
    rows.push(CheckRow::below("100 block-condition states max |gap| (bits)", worst_gap, tol.zero));

    // Gram decompositions for two and three vectors always exist.
    for l in [2usize, 3] {
        let mut worst = 0.0f64;
        for t in 0..100 {
            let mut rng = trial_rng(seed ^ 0x9e37, (l as u64) * 1000 + t);
            let d = 2 + (t as usize % 2);
            let v: Vec<_> = (0..l).map(|_| random_unit_vector(d, &mut rng)).collect();
            let out = gram_decompose(&gram(&v)?, &GramOptions { seed: t, ..Default::default() }, tol)?;
            worst = worst.max(out.decomposition().residual);
        }
        rows.push(CheckRow::below(format!("l={l} 100 random Gram decompositions max residual"), worst, tol.gram));
    }
    Ok(rows)
}

fn private(seed: u64, tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for l in 2..=5 {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        let e = PureState::normalized(vec![num_complex::Complex64::new(1.0, 0.0)], vec![1])?;
        let psi = me.state.tensor(&e);
        let r = private_lower_bound(&psi, &rep, Some(&me.basis), tol)?;
        rows.push(CheckRow::close(format!("l={l} private lower bound (bits)"), log2(l), r.lower_bound.bits, 1e-8));
        let m = r.measured_lower_bound.map(|q| q.bits).unwrap_or(f64::NAN);
        rows.push(CheckRow::close(format!("l={l} measured private lower bound (bits)"), log2(l), m, 1e-8));
    }
    let (rep, _) = cyclic_characters(2)?;
    let mut worst = 0.0f64;
    for t in 0..100 {
        let mut rng = trial_rng(seed, t);
        let d_b = 2 + (t as usize % 2);
        let rank = 1 + (t as usize % (2 * d_b));
        let rho = DensityMatrix::from_trusted(random_density_matrix(2 * d_b, rank, &mut rng), vec![2, d_b])?;
        let basis = MeasurementBasis::haar(d_b, &mut rng);
        let psi = purify(&rho, tol)?;
        let p = private_lower_bound(&psi, &rep, Some(&basis), tol)?;
        let g = memory_gap(&rho, &rep, &basis, tol)?;
        let pg = p.gap.map(|q| q.bits).unwrap_or(f64::NAN);
        worst = worst.max((pg - g.gap.bits).abs());
    }
    rows.push(CheckRow::below("100 purified states max |private gap − memory gap| (bits)", worst, 1e-8));
    Ok(rows)
}
