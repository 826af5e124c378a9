use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use densecap::capacity::{capacity_decomposed, capacity_direct_report, capacity_per_outcome, memory_gap, CapacityReport, GapReport, OutcomeCapacity, Quantity};
use densecap::checker::{classify, ClassifyOptions};
use densecap::construct::{
    build_dephased, build_fourier_mixture, build_illumination, build_max_entangled, build_phase_mixture,
    build_useful_protocol, random_phase_mixture_params, ConstructionRecipe, VectorSource,
};
use densecap::group::{
    count_commutative_subgroups, count_maximal_simplified, decompose_abelian, enumerate_commutative_subgroups,
    IrrepDecomposition, ProjectiveUnitaryRep,
};
use densecap::io::{
    checked_decomposition, format_sig, load_basis, read_json, rows_to_csv, write_atomic, Envelope, InputHash, RepFile,
    StateFile,
};
use densecap::random::rng_from_seed;
use densecap::reproduce::Suite;
use densecap::state::{DensityMatrix, LogBase};
use densecap::{Error, Result, Tolerances};

#[derive(Parser)]
#[command(name = "densecap", version, about = "Dense-coding capacities with and without receiver quantum memory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report quantities in nats instead of bits.
    #[arg(long, global = true)]
    nats: bool,
    /// Output format; `reproduce` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with status 1 when the report carries warnings.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_herm: Option<f64>,
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    #[arg(long, global = true)]
    tol_trace: Option<f64>,
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
    #[arg(long, global = true)]
    tol_a2: Option<f64>,
    #[arg(long, global = true)]
    tol_c1: Option<f64>,
    #[arg(long, global = true)]
    tol_gram: Option<f64>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Inputs {
    /// State file on A⊗B.
    #[arg(long)]
    state: PathBuf,
    /// Representation file acting on A.
    #[arg(long, conflicts_with = "group", required_unless_present = "group")]
    rep: Option<PathBuf>,
    /// Built-in representation: Zd (shift), Zd-diag, WHd or S3.
    #[arg(long)]
    group: Option<String>,
    /// Irrep decomposition file; overrides one implied by the representation.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// `computational`, `fourier`, or a JSON list of basis vectors for B.
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity with full memory, and at a measurement basis when one is given.
    Capacity {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Classify whether the receiver's quantum memory is useful.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        /// Haar-random bases tried by the fallback search.
        #[arg(long, default_value_t = 32)]
        haar_trials: usize,
    },
    /// Build a state from one of the known families.
    Construct {
        #[command(subcommand)]
        family: Family,
        /// Also write the bare state file here.
        #[arg(long, global = true)]
        state_out: Option<PathBuf>,
    },
    /// Regenerate a suite of known results as a pass/fail table.
    Reproduce {
        /// Suite name, or `all`.
        suite: String,
    },
    /// Count (and optionally list) m-dimensional commutative subgroups of the
    /// Weyl–Heisenberg group over F_p^n.
    Subgroups {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        enumerate: bool,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Maximally entangled state with a certifying basis.
    MaxEntangled {
        #[arg(long, default_value = "Z2")]
        group: String,
    },
    /// Mixture of a maximally entangled state with its twirl.
    Dephased {
        #[arg(long, default_value = "Z2")]
        group: String,
        #[arg(long)]
        p: f64,
    },
    /// Fourier-locked mixture on Z_l characters.
    FourierMixture {
        #[arg(long)]
        l: usize,
        /// Comma-separated class weights; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Random phase-locked mixture.
    PhaseMixture {
        #[arg(long, default_value = "Z2")]
        group: String,
        #[arg(long = "dB", alias = "db", default_value_t = 2)]
        d_b: usize,
        #[arg(long, default_value_t = 1)]
        classes: usize,
    },
    /// Pure state whose memory gap is positive at every basis.
    Useful {
        #[arg(long)]
        l: usize,
        #[arg(long = "dB", alias = "db")]
        d_b: usize,
        /// Use the closed-form vectors instead of seeded draws.
        #[arg(long)]
        analytic: bool,
    },
    /// Probe/idler input for symmetry-breaking detection.
    Illumination {
        #[arg(long)]
        d: usize,
    },
}

impl Global {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.herm, self.tol_herm);
        set(&mut t.psd, self.tol_psd);
        set(&mut t.trace, self.tol_trace);
        set(&mut t.zero, self.tol_zero);
        set(&mut t.a2, self.tol_a2);
        set(&mut t.c1, self.tol_c1);
        set(&mut t.gram, self.tol_gram);
        set(&mut t.rank, self.tol_rank);
        t
    }

    fn units(&self) -> LogBase {
        if self.nats {
            LogBase::Nats
        } else {
            LogBase::Bits
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => write_atomic(p, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

struct Loaded {
    rho: DensityMatrix,
    rep: ProjectiveUnitaryRep,
    dec: Option<IrrepDecomposition>,
    basis: Option<densecap::channels::MeasurementBasis>,
    hashes: Vec<InputHash>,
}

fn load_rep(rep: Option<&Path>, group: Option<&str>, tol: &Tolerances) -> Result<(ProjectiveUnitaryRep, Option<IrrepDecomposition>, Option<InputHash>)> {
    let (file, hash) = match (rep, group) {
        (Some(p), _) => {
            let (f, h): (RepFile, _) = read_json(p, "rep")?;
            (f, Some(h))
        }
        (None, Some(name)) => (RepFile::from_name(name)?, None),
        (None, None) => return Err(Error::InvalidArgument("need --rep or --group".into())),
    };
    let (r, d) = file.build(tol)?;
    Ok((r, d, hash))
}

fn load_inputs(inputs: &Inputs, tol: &Tolerances) -> Result<Loaded> {
    let mut hashes = Vec::new();
    let (sf, h): (StateFile, _) = read_json(&inputs.state, "state")?;
    hashes.push(h);
    let rho = sf.into_density(tol)?;
    let (rep, mut dec, h) = load_rep(inputs.rep.as_deref(), inputs.group.as_deref(), tol)?;
    hashes.extend(h);
    if let Some(p) = &inputs.decomposition {
        let (d, h): (IrrepDecomposition, _) = read_json(p, "decomposition")?;
        hashes.push(h);
        dec = Some(checked_decomposition(&rep, d, tol)?);
    }
    if rho.dims().len() != 2 || rho.dims()[0] != rep.dim() {
        return Err(Error::Dimension(format!(
            "state dims {:?} do not fit a representation of dimension {} on the first factor",
            rho.dims(),
            rep.dim()
        )));
    }
    let basis = match &inputs.basis {
        Some(source) => {
            let (b, h) = load_basis(source, rho.dims()[1])?;
            hashes.extend(h);
            Some(b)
        }
        None => None,
    };
    Ok(Loaded { rho, rep, dec, basis, hashes })
}

#[derive(Serialize)]
struct CapacityResult {
    direct: CapacityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposed: Option<CapacityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured: Option<GapReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    outcomes: Vec<OutcomeCapacity>,
}

fn quantity_rows(rows: &mut Vec<(String, String)>, name: &str, q: Quantity, units: LogBase) {
    let v = if units == LogBase::Nats { q.nats } else { q.bits };
    rows.push((name.into(), format_sig(v)));
}

fn pairs_to_csv(rows: &[(String, String)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"]).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    for (a, b) in rows {
        w.write_record([a, b]).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Renders the envelope and returns whether the run counts as clean.
fn finish<T: Serialize>(g: &Global, env: Envelope<T>, csv_rows: Option<Vec<(String, String)>>) -> Result<bool> {
    let text = match (g.format.unwrap_or(Format::Json), csv_rows) {
        (Format::Csv, Some(rows)) => pairs_to_csv(&rows)?,
        _ => env.to_json()?,
    };
    g.emit(&text)?;
    for w in &env.warnings {
        eprintln!("warning: {w}");
    }
    Ok(!(g.strict && !env.warnings.is_empty()))
}

fn cmd_capacity(g: &Global, inputs: &Inputs) -> Result<bool> {
    let tol = g.tolerances();
    let l = load_inputs(inputs, &tol)?;
    let direct = capacity_direct_report(&l.rho, &l.rep, &tol)?;
    let decomposed = l.dec.as_ref().map(|d| capacity_decomposed(&l.rho, d, &tol)).transpose()?;
    let (measured, outcomes) = match &l.basis {
        Some(b) => (Some(memory_gap(&l.rho, &l.rep, b, &tol)?), capacity_per_outcome(&l.rho, &l.rep, b, &tol)?),
        None => (None, Vec::new()),
    };
    let units = g.units();
    let mut rows = Vec::new();
    quantity_rows(&mut rows, "capacity", direct.capacity, units);
    if let Some(d) = &decomposed {
        quantity_rows(&mut rows, "capacity_decomposed", d.capacity, units);
    }
    if let Some(m) = &measured {
        quantity_rows(&mut rows, "capacity_measured", m.measured, units);
        quantity_rows(&mut rows, "memory_gap", m.gap, units);
    }
    let result = CapacityResult { direct, decomposed, measured, outcomes };
    let env = Envelope::new("capacity", g.seed, units, tol, l.hashes, result);
    finish(g, env, Some(rows))
}

fn cmd_check(g: &Global, inputs: &Inputs, haar_trials: usize) -> Result<bool> {
    let tol = g.tolerances();
    let l = load_inputs(inputs, &tol)?;
    let opts = ClassifyOptions { haar_trials, seed: g.seed, ..Default::default() };
    let report = classify(&l.rho, &l.rep, l.dec.as_ref(), l.basis.as_ref(), &opts, &tol)?;
    let units = g.units();
    let mut rows = vec![("verdict".to_string(), report.verdict.to_string())];
    quantity_rows(&mut rows, "capacity", report.capacity, units);
    if let Some(gap) = &report.gap {
        quantity_rows(&mut rows, "capacity_measured", gap.measured, units);
        quantity_rows(&mut rows, "memory_gap", gap.gap, units);
    }
    if let Some(a2) = &report.a2 {
        rows.push(("reconstruction_residual".into(), format_sig(a2.residual)));
    }
    let mut env = Envelope::new("check", g.seed, units, tol, l.hashes, &report);
    env.warnings = report.warnings.clone();
    finish(g, env, Some(rows))
}

fn named_rep(name: &str, seed: u64, tol: &Tolerances) -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    let (rep, dec) = RepFile::from_name(name)?.build(tol)?;
    let dec = match dec {
        Some(d) => d,
        None => decompose_abelian(&rep, seed)?,
    };
    Ok((rep, dec))
}

#[derive(Serialize)]
struct Constructed {
    recipe: ConstructionRecipe,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<densecap::channels::MeasurementBasis>,
    state: StateFile,
}

fn cmd_construct(g: &Global, family: &Family, state_out: Option<&Path>) -> Result<bool> {
    let tol = g.tolerances();
    let (recipe, state, basis) = match family {
        Family::MaxEntangled { group } => {
            let (_, dec) = named_rep(group, g.seed, &tol)?;
            let me = build_max_entangled(&dec)?;
            (ConstructionRecipe::MaxEntangled { group: group.clone(), form: me.form }, StateFile::from_pure(&me.state), Some(me.basis))
        }
        Family::Dephased { group, p } => {
            let (rep, dec) = named_rep(group, g.seed, &tol)?;
            let me = build_max_entangled(&dec)?;
            let rho = build_dephased(&me.state, &rep, *p)?;
            (ConstructionRecipe::Dephased { group: group.clone(), p: *p }, StateFile::from_density(&rho), Some(me.basis))
        }
        Family::FourierMixture { l, weights } => {
            let (_, dec) = named_rep(&format!("Z{l}-diag"), g.seed, &tol)?;
            let w = weights.clone().unwrap_or_else(|| vec![1.0 / *l as f64; *l]);
            let fm = build_fourier_mixture(&dec, *l, &w)?;
            (ConstructionRecipe::FourierMixture { l: *l, class_weights: w }, StateFile::from_density(&fm.rho), Some(fm.basis))
        }
        Family::PhaseMixture { group, d_b, classes } => {
            let (_, dec) = named_rep(group, g.seed, &tol)?;
            let mut rng = rng_from_seed(g.seed);
            let params = random_phase_mixture_params(&dec, *d_b, *classes, &mut rng);
            let basis = densecap::channels::MeasurementBasis::computational(*d_b);
            let (_, rho) = build_phase_mixture(&params, &dec, &basis)?;
            (ConstructionRecipe::PhaseMixture { params }, StateFile::from_density(&rho), Some(basis))
        }
        Family::Useful { l, d_b, analytic } => {
            let (_, dec) = named_rep(&format!("Z{l}-diag"), g.seed, &tol)?;
            let source = if *analytic { VectorSource::Analytic } else { VectorSource::Seeded };
            let u = build_useful_protocol(&dec, *l, *d_b, source, g.seed, &tol)?;
            let psi = u.state.clone().ok_or_else(|| Error::Numerical("protocol returned no state".into()))?;
            let recipe = ConstructionRecipe::UsefulProtocol { l: *l, d_b: *d_b, source, seed: g.seed, attempts: u.attempts, vectors: u.vectors };
            (recipe, StateFile::from_pure(&psi), None)
        }
        Family::Illumination { d } => {
            let il = build_illumination(*d)?;
            (ConstructionRecipe::Illumination { d: *d }, StateFile::from_pure(&il.input), Some(il.idler_basis))
        }
    };
    if let Some(p) = state_out {
        write_atomic(p, format!("{}\n", serde_json::to_string_pretty(&state)?).as_bytes())?;
    }
    let env = Envelope::new("construct", g.seed, g.units(), tol, Vec::new(), Constructed { recipe, basis, state });
    finish(g, env, None)
}

fn cmd_reproduce(g: &Global, suite: &str) -> Result<bool> {
    let tol = g.tolerances();
    let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let mut rows = Vec::new();
    for s in &suites {
        for mut r in s.run(g.seed, &tol)? {
            r.name = format!("{s}: {}", r.name);
            rows.push(r);
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    let text = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => rows_to_csv(&rows)?,
        Format::Json => {
            let names: Vec<_> = suites.iter().map(|s| s.name()).collect();
            Envelope::new("reproduce", g.seed, g.units(), tol, Vec::new(), json!({ "suites": names, "all_pass": all_pass, "rows": rows })).to_json()?
        }
    };
    g.emit(&text)?;
    Ok(all_pass)
}

fn cmd_subgroups(g: &Global, p: u64, n: usize, m: usize, enumerate: bool) -> Result<bool> {
    let count = count_commutative_subgroups(p, n, m)?;
    let simplified = if m == n { Some(count_maximal_simplified(p, n)?.to_string()) } else { None };
    let (listed, generators) = if enumerate {
        let list = enumerate_commutative_subgroups(p, n, m)?;
        (Some(list.len()), Some(list))
    } else {
        (None, None)
    };
    let mut rows = vec![("count".to_string(), count.to_string())];
    if let Some(s) = &simplified {
        rows.push(("count_product_form".into(), s.clone()));
    }
    if let Some(k) = listed {
        rows.push(("count_enumerated".into(), k.to_string()));
    }
    let result = json!({
        "p": p, "n": n, "m": m,
        "count": count.to_string(),
        "count_product_form": simplified,
        "count_enumerated": listed,
        "subgroups": generators,
    });
    let consistent = listed.is_none_or(|k| k.to_string() == count.to_string())
        && rows.iter().filter(|r| r.0 == "count_product_form").all(|r| r.1 == count.to_string());
    let mut env = Envelope::new("subgroups", g.seed, g.units(), g.tolerances(), Vec::new(), result);
    if !consistent {
        env.warnings.push("enumeration and closed forms disagree".into());
    }
    finish(g, env, Some(rows))
}

fn configure_threads() {
    if let Some(n) = std::env::var("DENSECAP_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Capacity { inputs } => cmd_capacity(g, inputs),
        Command::Check { inputs, haar_trials } => cmd_check(g, inputs, *haar_trials),
        Command::Construct { family, state_out } => cmd_construct(g, family, state_out.as_deref()),
        Command::Reproduce { suite } => cmd_reproduce(g, suite),
        Command::Subgroups { p, n, m, enumerate } => cmd_subgroups(g, *p, *n, *m, *enumerate),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
