//! File formats for states, representations and bases, and the report envelope.
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows. Reports
//! carry no timestamps so identical inputs give byte-identical output.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::MeasurementBasis;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::group::{
    build_block_rep, build_cyclic_shift_rep, build_diagonal_character_rep, build_weyl_heisenberg, symmetric3_irreps,
    verify_decomposition, FiniteGroupSpec, IrrepBlock, IrrepDecomposition, ProjectiveUnitaryRep,
};
use crate::linalg::CMatrix;
use crate::state::{DensityMatrix, LogBase, PureState};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Pure { dims: Vec<usize>, amplitudes: Vec<C64> },
    Mixed { dims: Vec<usize>, matrix: CMatrix },
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile::Pure { dims: psi.dims().to_vec(), amplitudes: psi.amplitudes().to_vec() }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateFile::Mixed { dims: rho.dims().to_vec(), matrix: rho.matrix().clone() }
    }

    pub fn into_density(self, tol: &Tolerances) -> Result<DensityMatrix> {
        match self {
            StateFile::Pure { dims, amplitudes } => Ok(PureState::new(amplitudes, dims, tol)?.density()),
            StateFile::Mixed { dims, matrix } => DensityMatrix::new(matrix, dims, tol),
        }
    }
}

/// Representation files. `blocks` and the S3 shorthand also fix the decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RepFile {
    /// Cyclic shifts of Z_d.
    Shift { d: usize },
    DiagonalCharacters { factors: Vec<usize>, weights: Vec<Vec<usize>> },
    WeylHeisenberg { d: usize },
    Explicit { group: FiniteGroupSpec, matrices: Vec<CMatrix> },
    Blocks { group: FiniteGroupSpec, blocks: Vec<IrrepBlock> },
    /// Symmetric group on three letters with the given trivial and standard multiplicities.
    Symmetric3 { trivial: usize, standard: usize },
}

impl RepFile {
    pub fn build(&self, tol: &Tolerances) -> Result<(ProjectiveUnitaryRep, Option<IrrepDecomposition>)> {
        match self {
            RepFile::Shift { d } => Ok((build_cyclic_shift_rep(*d)?, None)),
            RepFile::DiagonalCharacters { factors, weights } => Ok((build_diagonal_character_rep(factors, weights)?, None)),
            RepFile::WeylHeisenberg { d } => {
                let (r, dec) = build_weyl_heisenberg(*d)?;
                Ok((r, Some(dec)))
            }
            RepFile::Explicit { group, matrices } => {
                group.validate()?;
                Ok((ProjectiveUnitaryRep::with_inferred_cocycle(group.clone(), matrices.clone(), tol.rep)?, None))
            }
            RepFile::Blocks { group, blocks } => {
                group.validate()?;
                let (r, dec) = build_block_rep(group.clone(), blocks.clone())?;
                Ok((r, Some(dec)))
            }
            RepFile::Symmetric3 { trivial, standard } => {
                let (r, dec) = symmetric3_rep(*trivial, *standard)?;
                Ok((r, Some(dec)))
            }
        }
    }

    /// Parses names such as `Z4` (shift), `Z3-diag` (characters 0..d), `WH2` or `S3`.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown group name {name:?}"));
        let lower = name.to_ascii_lowercase();
        if lower == "s3" {
            return Ok(RepFile::Symmetric3 { trivial: 2, standard: 2 });
        }
        if let Some(rest) = lower.strip_prefix("wh") {
            return Ok(RepFile::WeylHeisenberg { d: rest.parse().map_err(|_| bad())? });
        }
        if let Some(rest) = lower.strip_prefix('z') {
            if let Some(d) = rest.strip_suffix("-diag") {
                let d: usize = d.parse().map_err(|_| bad())?;
                return Ok(RepFile::DiagonalCharacters { factors: vec![d], weights: (0..d).map(|w| vec![w]).collect() });
            }
            return Ok(RepFile::Shift { d: rest.parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

pub fn symmetric3_rep(trivial: usize, standard: usize) -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    let (t, s) = symmetric3_irreps();
    let mut blocks = Vec::new();
    if trivial > 0 {
        blocks.push(IrrepBlock { label: "trivial".into(), irrep_dim: 1, multiplicity: trivial, matrices: t });
    }
    if standard > 0 {
        blocks.push(IrrepBlock { label: "standard".into(), irrep_dim: 2, multiplicity: standard, matrices: s });
    }
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("at least one multiplicity must be positive".into()));
    }
    build_block_rep(FiniteGroupSpec::symmetric3(), blocks)
}

/// Checks a supplied decomposition against its representation.
pub fn checked_decomposition(rep: &ProjectiveUnitaryRep, dec: IrrepDecomposition, tol: &Tolerances) -> Result<IrrepDecomposition> {
    let r = verify_decomposition(rep, &dec)?;
    if r > tol.rep.max(1e-9) {
        return Err(Error::InvalidRepresentation(format!("decomposition residual {r:.3e}")));
    }
    Ok(dec)
}

/// `computational`, `fourier`, or a JSON file with a list of basis vectors.
pub fn load_basis(source: &str, dim: usize) -> Result<(MeasurementBasis, Option<InputHash>)> {
    match source {
        "computational" => Ok((MeasurementBasis::computational(dim), None)),
        "fourier" => Ok((MeasurementBasis::fourier(dim), None)),
        path => {
            let (b, h): (MeasurementBasis, _) = read_json(Path::new(path), "basis")?;
            if b.dim() != dim {
                return Err(Error::Dimension(format!("basis has dimension {}, B has {dim}", b.dim())));
            }
            Ok((b, Some(h)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, role: &str) -> Result<(T, InputHash)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let value = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((value, InputHash { role: role.into(), path: path.display().to_string(), sha256: hash_bytes(&bytes) }))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub units: LogBase,
    pub tolerances: Tolerances,
    pub inputs: Vec<InputHash>,
    pub warnings: Vec<String>,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, seed: u64, units: LogBase, tolerances: Tolerances, inputs: Vec<InputHash>, result: T) -> Self {
        Envelope {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            units,
            tolerances,
            inputs,
            warnings: Vec::new(),
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Twelve significant digits, fixed notation for moderate magnitudes.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// One line of a pass/fail table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: String,
    pub actual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// |actual − expected| ≤ tolerance.
    pub fn close(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        CheckRow { name: name.into(), expected: format_sig(expected), actual, tolerance, pass: (actual - expected).abs() <= tolerance }
    }

    /// actual < bound.
    pub fn below(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        CheckRow { name: name.into(), expected: format!("< {}", format_sig(bound)), actual, tolerance: bound, pass: actual < bound }
    }

    /// actual > bound.
    pub fn above(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        CheckRow { name: name.into(), expected: format!("> {}", format_sig(bound)), actual, tolerance: bound, pass: actual > bound }
    }

    pub fn exact(name: impl Into<String>, expected: &str, actual: &str) -> Self {
        let pass = expected == actual;
        CheckRow { name: format!("{} [{actual}]", name.into()), expected: expected.into(), actual: if pass { 1.0 } else { 0.0 }, tolerance: 0.0, pass }
    }
}

pub fn rows_to_csv(rows: &[CheckRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "expected", "actual", "tolerance", "status"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.name.as_str(),
            r.expected.as_str(),
            &format_sig(r.actual),
            &format_sig(r.tolerance),
            if r.pass { "PASS" } else { "FAIL" },
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
