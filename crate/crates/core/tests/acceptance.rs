//! End-to-end acceptance criteria. Runs as a plain binary so that every
//! criterion prints its PASS/FAIL line under `cargo test`.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64 as C64;

use densecap::capacity::{
    capacity_decomposed, capacity_direct, capacity_measured, capacity_per_outcome, memory_gap, private_lower_bound,
    stein_exponent,
};
use densecap::channels::{gram, measure_channel, MeasurementBasis};
use densecap::checker::a2::{check_a2, recovery_map_check};
use densecap::checker::c1::check_c1;
use densecap::checker::gram::{gram_decompose, usefulness_witness, GramMethod, GramOptions};
use densecap::checker::six_item::{classical_quantum_witness, phase_mixture_witness, verify_six_item, SixItemWitness};
use densecap::construct::{
    build_dephased, build_fourier_mixture, build_illumination, build_max_entangled, build_phase_mixture,
    build_useful_protocol, purify, random_phase_mixture_params, VectorSource,
};
use densecap::group::{
    build_cyclic_shift_rep, count_commutative_subgroups, count_maximal_simplified, decompose_abelian,
    enumerate_commutative_subgroups, IrrepDecomposition, ProjectiveUnitaryRep,
};
use densecap::linalg::{cis, CMatrix, HermitianOperator};
use densecap::random::{random_density_matrix, random_distribution, random_hermitian, random_unit_vector, trial_rng};
use densecap::reproduce::{cyclic_characters, klein_with_multiplicity};
use densecap::state::{DensityMatrix, PureState};
use densecap::{Result, Tolerances};

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn bits(nats: f64) -> f64 {
    nats / LN_2
}

/// Textbook Σ_t |t⟩|t⟩/√l.
fn textbook_max_entangled(l: usize) -> DensityMatrix {
    let mut amp = vec![C64::new(0.0, 0.0); l * l];
    for t in 0..l {
        amp[t * l + t] = C64::new(1.0, 0.0);
    }
    PureState::normalized(amp, vec![l, l]).unwrap().density()
}

fn random_state(da: usize, db: usize, seed: u64, index: u64) -> DensityMatrix {
    let mut rng = trial_rng(seed, index);
    let rank = 1 + (index as usize % (da * db));
    DensityMatrix::from_trusted(random_density_matrix(da * db, rank, &mut rng), vec![da, db]).unwrap()
}

fn criterion_1(tol: &Tolerances) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for l in 2..=5 {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        let target = (l as f64).log2();
        let c = bits(capacity_direct(&me.state.density(), &rep, tol)?);
        let m = bits(capacity_measured(&me.state.density(), &rep, &me.basis, tol)?);
        let textbook = bits(capacity_direct(&textbook_max_entangled(l), &rep, tol)?);
        worst = worst.max((c - target).abs()).max((m - target).abs()).max((textbook - target).abs());
    }
    outcome(worst < 1e-8, format!("max |C − log2 l| over l=2..5 (full and measured) = {worst:.2e}"))
}

fn criterion_2(tol: &Tolerances) -> Result<Outcome> {
    let mut cases: Vec<(ProjectiveUnitaryRep, DensityMatrix, MeasurementBasis)> = Vec::new();
    for l in 2..=5 {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        cases.push((rep, me.state.density(), me.basis));
    }
    for l in [2, 3] {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        for p in [0.0, 0.3, 0.7, 1.0] {
            cases.push((rep.clone(), build_dephased(&me.state, &rep, p)?, me.basis.clone()));
        }
    }
    for l in [2, 3, 4] {
        let (rep, dec) = cyclic_characters(l)?;
        for t in 0..20 {
            let w = random_distribution(l, &mut trial_rng(SEED ^ 2, (l * 100 + t) as u64));
            let fm = build_fourier_mixture(&dec, l, &w)?;
            cases.push((rep.clone(), fm.rho, fm.basis));
        }
    }
    let (mut a2, mut rec) = (0.0f64, 0.0f64);
    for (rep, rho, basis) in &cases {
        let w = check_a2(rho, rep, basis, tol)?;
        let r = recovery_map_check(rho, rep, basis, &w, tol)?;
        a2 = a2.max(w.residual);
        rec = rec.max(r.max_trace_distance);
    }
    outcome(
        a2 < 1e-7 && rec < 1e-7,
        format!("{} states: max reconstruction residual {a2:.2e}, max recovery residual {rec:.2e}", cases.len()),
    )
}

fn criterion_3(tol: &Tolerances) -> Result<Outcome> {
    let z2 = cyclic_characters(2)?;
    let z3_shift = {
        let rep = build_cyclic_shift_rep(3)?;
        let dec = decompose_abelian(&rep, 0)?;
        (rep, dec)
    };
    let klein = klein_with_multiplicity()?;
    let reps: [&(ProjectiveUnitaryRep, IrrepDecomposition); 3] = [&z2, &z3_shift, &klein];
    let (mut worst, mut worst_pure, mut pure_count) = (0.0f64, 0.0f64, 0);
    for t in 0..200u64 {
        let (rep, dec) = reps[t as usize % 3];
        let db = 1 + (t as usize / 3) % 3;
        let rho = if t % 5 == 0 {
            let v = random_unit_vector(rep.dim() * db, &mut trial_rng(SEED ^ 3, t));
            PureState::normalized(v, vec![rep.dim(), db])?.density()
        } else {
            random_state(rep.dim(), db, SEED ^ 3, t)
        };
        let direct = capacity_direct(&rho, rep, tol)?;
        let report = capacity_decomposed(&rho, dec, tol)?;
        worst = worst.max((direct - report.capacity.nats).abs());
        if let Some(p) = report.pure_form {
            pure_count += 1;
            worst_pure = worst_pure.max((direct - p.nats).abs());
        }
    }
    let pass = worst < 1e-8 && worst_pure < 1e-8 && pure_count >= 40;
    outcome(pass, format!("200 states: max |direct − block form| {worst:.2e}; pure form on {pure_count} states {worst_pure:.2e}"))
}

fn criterion_4(tol: &Tolerances) -> Result<Outcome> {
    let reps = [cyclic_characters(2)?.0, build_cyclic_shift_rep(3)?, klein_with_multiplicity()?.0];
    let (mut min_gap, mut worst_sum) = (f64::INFINITY, 0.0f64);
    for t in 0..1000u64 {
        let rep = &reps[t as usize % 3];
        let db = 2 + (t as usize / 3) % 2;
        let rho = random_state(rep.dim(), db, SEED ^ 4, t);
        let basis = MeasurementBasis::haar(db, &mut trial_rng(SEED ^ 40, t));
        let full = capacity_direct(&rho, rep, tol)?;
        let measured = capacity_direct(&measure_channel(&rho, &basis, 1)?, rep, tol)?;
        let summed: f64 = capacity_per_outcome(&rho, rep, &basis, tol)?.iter().map(|o| o.probability * o.capacity.nats).sum();
        min_gap = min_gap.min(bits(full - measured));
        worst_sum = worst_sum.max(bits((measured - summed).abs()));
    }
    outcome(
        min_gap >= -1e-9 && worst_sum < 1e-8,
        format!("1000 draws: min gap {min_gap:.3e} bits, max |measured − per-outcome sum| {worst_sum:.2e}"),
    )
}

fn criterion_5(tol: &Tolerances) -> Result<Outcome> {
    let systems = [cyclic_characters(3)?, klein_with_multiplicity()?];
    let (mut mismatches, mut useless) = (0, 0);
    for t in 0..200u64 {
        let (rep, dec) = &systems[t as usize % 2];
        let db = 2 + (t as usize / 2) % 2;
        let mut rng = trial_rng(SEED ^ 5, t);
        // Half in the block-condition form, half generic.
        let (psi, basis) = if t % 4 < 2 {
            let params = random_phase_mixture_params(dec, db, 1, &mut rng);
            let basis = MeasurementBasis::haar(db, &mut rng);
            let (states, _) = build_phase_mixture(&params, dec, &basis)?;
            (states[0].clone(), basis)
        } else {
            let v = random_unit_vector(rep.dim() * db, &mut rng);
            (PureState::normalized(v, vec![rep.dim(), db])?, MeasurementBasis::haar(db, &mut rng))
        };
        let c1 = check_c1(&psi, dec, &basis, tol)?;
        let gap = memory_gap(&psi.density(), rep, &basis, tol)?;
        let zero = gap.gap.bits <= 1e-7;
        useless += zero as usize;
        if c1.passed != zero {
            mismatches += 1;
        }
    }
    let (rep, dec) = klein_with_multiplicity()?;
    let mut worst = 0.0f64;
    for t in 0..100u64 {
        let mut rng = trial_rng(SEED ^ 55, t);
        let db = 2 + (t as usize % 3);
        let params = random_phase_mixture_params(&dec, db, 1, &mut rng);
        let basis = MeasurementBasis::haar(db, &mut rng);
        let (_, rho) = build_phase_mixture(&params, &dec, &basis)?;
        worst = worst.max(check_a2(&rho, &rep, &basis, tol)?.residual);
    }
    outcome(
        mismatches == 0 && useless > 0 && useless < 200 && worst < 1e-7,
        format!("200 pairs: {mismatches} verdict mismatches ({useless} gap-free); 100 block-condition states max reconstruction residual {worst:.2e}"),
    )
}

fn criterion_6(tol: &Tolerances) -> Result<Outcome> {
    let mut worst = [0.0f64; 2];
    for (slot, l) in [2usize, 3].into_iter().enumerate() {
        for t in 0..100u64 {
            let mut rng = trial_rng(SEED ^ 6, (l as u64) << 32 | t);
            let d = 2 + (t as usize % l);
            let v: Vec<_> = (0..l).map(|_| random_unit_vector(d, &mut rng)).collect();
            let out = gram_decompose(&gram(&v)?, &GramOptions { seed: t, ..Default::default() }, tol)?;
            worst[slot] = worst[slot].max(out.decomposition().residual);
        }
    }
    // Closed forms: J = I for several l, and l = 2.
    let mut closed = 0.0f64;
    let mut closed_methods_ok = true;
    for l in 2..=5 {
        let id: Vec<_> = (0..l).map(|i| {
            let mut e = vec![C64::new(0.0, 0.0); l];
            e[i] = C64::new(1.0, 0.0);
            e
        }).collect();
        let d = gram_decompose(&gram(&id)?, &GramOptions::default(), tol)?;
        closed = closed.max(d.decomposition().residual);
        closed_methods_ok &= d.decomposition().method == GramMethod::Orthonormal;
    }
    for t in 0..20u64 {
        let mut rng = trial_rng(SEED ^ 66, t);
        let v: Vec<_> = (0..2).map(|_| random_unit_vector(3, &mut rng)).collect();
        let d = gram_decompose(&gram(&v)?, &GramOptions::default(), tol)?;
        closed = closed.max(d.decomposition().residual);
        closed_methods_ok &= d.decomposition().method == GramMethod::TwoVector;
    }
    outcome(
        worst[0] < 1e-6 && worst[1] < 1e-6 && closed < 1e-12 && closed_methods_ok,
        format!("max residual l=2 {:.2e}, l=3 {:.2e}; closed forms {closed:.2e}", worst[0], worst[1]),
    )
}

fn criterion_7(tol: &Tolerances) -> Result<Outcome> {
    let (rep, dec) = cyclic_characters(5)?;
    let u = build_useful_protocol(&dec, 5, 2, VectorSource::Analytic, 0, tol)?;
    // Independent rank check on the vectors themselves.
    let w = usefulness_witness(&u.vectors, tol)?;
    let sv = &w.singular_values;
    let rank_ok = w.rank == 4 && sv.len() >= 4 && sv[3] > 1e-6;
    let rho = u.state.as_ref().expect("protocol state").density();
    let c = bits(capacity_direct(&rho, &rep, tol)?);
    let mut min_gap = f64::INFINITY;
    for t in 0..200u64 {
        let b = MeasurementBasis::haar(2, &mut trial_rng(SEED ^ 7, t));
        min_gap = min_gap.min(c - bits(capacity_measured(&rho, &rep, &b, tol)?));
    }
    outcome(
        rank_ok && min_gap >= 1e-6,
        format!("witness rank {} (4th singular value {:.3e}); min gap over 200 Haar bases {min_gap:.3e} bits", w.rank, sv.get(3).copied().unwrap_or(0.0)),
    )
}

fn criterion_8(_tol: &Tolerances) -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, n, m, expected) in [(2u64, 1usize, 1usize, Some(3u32)), (2, 2, 1, Some(15)), (2, 2, 2, Some(15)), (3, 1, 1, Some(4))] {
        let formula = count_commutative_subgroups(p, n, m)?;
        let listed = enumerate_commutative_subgroups(p, n, m)?.len();
        ok &= formula.to_string() == listed.to_string();
        if let Some(e) = expected {
            ok &= formula == e.into();
        }
        notes.push(format!("({p},{n},{m})→{formula}"));
    }
    for (p, n) in [(2u64, 1usize), (2, 2), (2, 3), (3, 2), (5, 3), (7, 6), (11, 8)] {
        ok &= count_commutative_subgroups(p, n, n)? == count_maximal_simplified(p, n)?;
    }
    outcome(ok, format!("enumeration = formula for {}; product form exact", notes.join(", ")))
}

fn criterion_9(tol: &Tolerances) -> Result<Outcome> {
    let il = build_illumination(3)?;
    let rho = il.input.density();
    let with_memory = bits(stein_exponent(&rho, &il.rep, None, tol)?);
    let measured = bits(stein_exponent(&rho, &il.rep, Some(&il.idler_basis), tol)?);
    let target = 3f64.log2();
    let err = (with_memory - target).abs().max((measured - target).abs());
    outcome(err < 1e-8, format!("exponent {with_memory:.10} bits, without memory {measured:.10} bits (target log2 3)"))
}

fn criterion_10(tol: &Tolerances) -> Result<Outcome> {
    let mut worst_max = 0.0f64;
    for l in 2..=5 {
        let (rep, dec) = cyclic_characters(l)?;
        let me = build_max_entangled(&dec)?;
        let psi = purify(&me.state.density(), tol)?;
        let r = private_lower_bound(&psi, &rep, Some(&me.basis), tol)?;
        let target = (l as f64).log2();
        let m = r.measured_lower_bound.map_or(f64::NAN, |q| q.bits);
        worst_max = worst_max.max((r.lower_bound.bits - target).abs()).max((m - target).abs());
    }
    let reps = [cyclic_characters(2)?.0, build_cyclic_shift_rep(3)?];
    let mut worst = 0.0f64;
    for t in 0..100u64 {
        let rep = &reps[t as usize % 2];
        let db = 2 + (t as usize / 2) % 2;
        let rho = random_state(rep.dim(), db, SEED ^ 10, t);
        let basis = MeasurementBasis::haar(db, &mut trial_rng(SEED ^ 100, t));
        let p = private_lower_bound(&purify(&rho, tol)?, rep, Some(&basis), tol)?;
        let g = memory_gap(&rho, rep, &basis, tol)?;
        worst = worst.max((p.gap.map_or(f64::NAN, |q| q.bits) - g.gap.bits).abs());
    }
    outcome(
        worst_max < 1e-8 && worst < 1e-8,
        format!("maximally entangled private bounds off by {worst_max:.2e}; 100 purified states max |private gap − memory gap| {worst:.2e}"),
    )
}

fn perturb(w: &SixItemWitness, seed: u64) -> SixItemWitness {
    let n = w.unitary.rows();
    let sd = HermitianOperator::symmetrized(random_hermitian(n, &mut trial_rng(seed, 0))).eig().unwrap();
    let mut kick = CMatrix::zeros(n, n);
    for (i, &x) in sd.eigenvalues.iter().enumerate() {
        kick = &kick + &CMatrix::projector(&sd.vector(i)).scale(cis(0.3 * x));
    }
    SixItemWitness { unitary: &w.unitary * &kick, blocks: w.blocks.clone() }
}

fn criterion_11(tol: &Tolerances) -> Result<Outcome> {
    let (mut good, mut bad) = (0.0f64, f64::INFINITY);
    for l in 2..=4 {
        let (rep, dec) = cyclic_characters(l)?;
        for t in 0..5u64 {
            let w = random_distribution(l, &mut trial_rng(SEED ^ 11, (l as u64) * 10 + t));
            let fm = build_fourier_mixture(&dec, l, &w)?;
            let wit = phase_mixture_witness(&fm.params, &rep, &dec, &fm.basis)?;
            good = good.max(verify_six_item(&fm.rho, &rep, &fm.basis, &wit)?);
            bad = bad.min(verify_six_item(&fm.rho, &rep, &fm.basis, &perturb(&wit, t + 1))?);
        }
    }
    // Basis-diagonal separable form Σ_k P_K(k) ρ_k ⊗ |e_k⟩⟨e_k|.
    let rep = build_cyclic_shift_rep(3)?;
    for t in 0..5u64 {
        let mut rng = trial_rng(SEED ^ 111, t);
        let db = 2 + (t as usize % 2);
        let basis = MeasurementBasis::haar(db, &mut rng);
        let p = random_distribution(db, &mut rng);
        let mut m = CMatrix::zeros(3 * db, 3 * db);
        for k in 0..db {
            let rk = random_density_matrix(3, 1 + k % 3, &mut rng);
            m = &m + &rk.kron(&CMatrix::projector(&basis.vector(k))).scale_real(p[k]);
        }
        let rho = DensityMatrix::from_trusted(m, vec![3, db])?;
        let wit = classical_quantum_witness(&rho, &rep, &basis, tol)?;
        good = good.max(verify_six_item(&rho, &rep, &basis, &wit)?);
        bad = bad.min(verify_six_item(&rho, &rep, &basis, &perturb(&wit, 100 + t))?);
    }
    outcome(good < 1e-8 && bad > 1e-2, format!("max witness residual {good:.2e}; min perturbed residual {bad:.3e}"))
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let criteria: [(&str, fn(&Tolerances) -> Result<Outcome>); 11] = [
        ("cyclic maximally entangled capacity", criterion_1),
        ("reconstruction and recovery residuals", criterion_2),
        ("direct and block-form capacities agree", criterion_3),
        ("data processing and per-outcome identity", criterion_4),
        ("block conditions match gap-free bases", criterion_5),
        ("Gram decompositions for two and three vectors", criterion_6),
        ("linearly independent state is useful at every basis", criterion_7),
        ("commutative subgroup counts", criterion_8),
        ("illumination exponent without memory", criterion_9),
        ("private capacity bounds", criterion_10),
        ("six-item witnesses", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match f(&tol) {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
