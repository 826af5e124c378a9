//! C interface to densecap.
//!
//! Objects cross the boundary as opaque handles created by the `dc_*_from_*` and
//! `dc_basis_*` constructors and released with the matching `dc_*_free`. Every fallible call
//! returns a [`DcStatus`]; on failure [`dc_last_error`] describes the cause for
//! the calling thread. Strings returned by the library are freed with
//! [`dc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use densecap::capacity::{capacity_direct, capacity_measured};
use densecap::channels::MeasurementBasis;
use densecap::checker::a2::check_a2;
use densecap::checker::{classify, ClassifyOptions};
use densecap::group::{IrrepDecomposition, ProjectiveUnitaryRep};
use densecap::io::{RepFile, StateFile};
use densecap::linalg::CMatrix;
use densecap::state::{DensityMatrix, LogBase, PureState};
use densecap::{Error, Tolerances};
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Dimension = 4,
    InvalidInput = 5,
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcUnits {
    Bits = 0,
    Nats = 1,
}

/// Density matrix on A⊗B.
pub struct DcState(DensityMatrix);

/// Representation of the encoding group on A, with its decomposition when known.
pub struct DcRep {
    rep: ProjectiveUnitaryRep,
    dec: Option<IrrepDecomposition>,
}

/// Orthonormal measurement basis of B.
pub struct DcBasis(MeasurementBasis);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DcStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => DcStatus::Parse,
        Error::Dimension(_) => DcStatus::Dimension,
        Error::NoConvergence { .. } | Error::Numerical(_) | Error::NonCommuting(_) => DcStatus::Numerical,
        _ => DcStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into a status plus the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (DcStatus, String)>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DcStatus::Panic
        }
    }
}

trait Fail<T> {
    fn fail(self) -> Result<T, (DcStatus, String)>;
}

impl<T> Fail<T> for densecap::Result<T> {
    fn fail(self) -> Result<T, (DcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (DcStatus, String) {
    (DcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (DcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (DcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn units(u: DcUnits) -> LogBase {
    match u {
        DcUnits::Bits => LogBase::Bits,
        DcUnits::Nats => LogBase::Nats,
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a state file (`{dims, matrix}` or `{dims, amplitudes}`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_from_json(json: *const c_char, out: *mut *mut DcState) -> DcStatus {
    guard(|| {
        let s = str_arg(json, "json")?;
        let f: StateFile = serde_json::from_str(s).map_err(|e| (DcStatus::Parse, e.to_string()))?;
        put(out, DcState(f.into_density(&Tolerances::default()).fail()?))
    })
}

/// Pure state on A⊗B from `d_a·d_b` amplitudes given as separate real and
/// imaginary arrays, A-index major. The vector is normalized.
///
/// # Safety
/// `re` and `im` must point to `d_a * d_b` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    d_a: usize,
    d_b: usize,
    out: *mut *mut DcState,
) -> DcStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("amplitude array"));
        }
        let n = d_a.checked_mul(d_b).ok_or((DcStatus::Dimension, "dimension overflow".into()))?;
        let re = std::slice::from_raw_parts(re, n);
        let im = std::slice::from_raw_parts(im, n);
        let amp = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        put(out, DcState(PureState::normalized(amp, vec![d_a, d_b]).fail()?.density()))
    })
}

/// # Safety
/// `state` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_state_free(state: *mut DcState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Writes the subsystem dimensions of `state`.
///
/// # Safety
/// `state` must be a live handle; `d_a` and `d_b` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_state_dims(state: *const DcState, d_a: *mut usize, d_b: *mut usize) -> DcStatus {
    guard(|| {
        let s = ref_arg(state, "state")?;
        if d_a.is_null() || d_b.is_null() {
            return Err(null("output pointer"));
        }
        *d_a = s.0.dims()[0];
        *d_b = s.0.dims().get(1).copied().unwrap_or(1);
        Ok(())
    })
}

/// Built-in representation by name: `Zd`, `Zd-diag`, `WHd` or `S3`.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_rep_from_name(name: *const c_char, out: *mut *mut DcRep) -> DcStatus {
    guard(|| {
        let f = RepFile::from_name(str_arg(name, "name")?).fail()?;
        let (rep, dec) = f.build(&Tolerances::default()).fail()?;
        put(out, DcRep { rep, dec })
    })
}

/// Parses a representation file (tagged by `kind`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_rep_from_json(json: *const c_char, out: *mut *mut DcRep) -> DcStatus {
    guard(|| {
        let f: RepFile = serde_json::from_str(str_arg(json, "json")?).map_err(|e| (DcStatus::Parse, e.to_string()))?;
        let (rep, dec) = f.build(&Tolerances::default()).fail()?;
        put(out, DcRep { rep, dec })
    })
}

/// # Safety
/// `rep` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_rep_free(rep: *mut DcRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Dimension of the space the representation acts on.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_rep_dim(rep: *const DcRep) -> usize {
    rep.as_ref().map_or(0, |r| r.rep.dim())
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_basis_computational(d: usize, out: *mut *mut DcBasis) -> DcStatus {
    guard(|| {
        if d == 0 {
            return Err((DcStatus::Dimension, "basis dimension must be positive".into()));
        }
        put(out, DcBasis(MeasurementBasis::computational(d)))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_basis_fourier(d: usize, out: *mut *mut DcBasis) -> DcStatus {
    guard(|| {
        if d == 0 {
            return Err((DcStatus::Dimension, "basis dimension must be positive".into()));
        }
        put(out, DcBasis(MeasurementBasis::fourier(d)))
    })
}

/// Basis from the columns of a d×d unitary given row-major as real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to `d * d` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_basis_from_unitary(re: *const f64, im: *const f64, d: usize, out: *mut *mut DcBasis) -> DcStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("matrix array"));
        }
        let re = std::slice::from_raw_parts(re, d * d);
        let im = std::slice::from_raw_parts(im, d * d);
        let rows: Vec<Vec<Complex64>> = (0..d).map(|r| (0..d).map(|c| Complex64::new(re[r * d + c], im[r * d + c])).collect()).collect();
        let u = CMatrix::from_rows(&rows).fail()?;
        put(out, DcBasis(MeasurementBasis::from_unitary(u).fail()?))
    })
}

/// # Safety
/// `basis` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_basis_free(basis: *mut DcBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Capacity with the receiver's full quantum memory.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_capacity(state: *const DcState, rep: *const DcRep, u: DcUnits, out: *mut f64) -> DcStatus {
    guard(|| {
        let (s, r) = (ref_arg(state, "state")?, ref_arg(rep, "rep")?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = units(u).from_nats(capacity_direct(&s.0, &r.rep, &Tolerances::default()).fail()?);
        Ok(())
    })
}

/// Capacity when the receiver measures B in `basis` before decoding.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_capacity_measured(
    state: *const DcState,
    rep: *const DcRep,
    basis: *const DcBasis,
    u: DcUnits,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let (s, r, b) = (ref_arg(state, "state")?, ref_arg(rep, "rep")?, ref_arg(basis, "basis")?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = units(u).from_nats(capacity_measured(&s.0, &r.rep, &b.0, &Tolerances::default()).fail()?);
        Ok(())
    })
}

/// Frobenius residual of reconstructing the state from its measured version.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_reconstruction_residual(
    state: *const DcState,
    rep: *const DcRep,
    basis: *const DcBasis,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let (s, r, b) = (ref_arg(state, "state")?, ref_arg(rep, "rep")?, ref_arg(basis, "basis")?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = check_a2(&s.0, &r.rep, &b.0, &Tolerances::default()).fail()?.residual;
        Ok(())
    })
}

/// Full classification report as JSON. `basis` may be null. Free the result
/// with [`dc_string_free`].
///
/// # Safety
/// Non-null handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_classify_json(
    state: *const DcState,
    rep: *const DcRep,
    basis: *const DcBasis,
    seed: u64,
    out: *mut *mut c_char,
) -> DcStatus {
    guard(|| {
        let (s, r) = (ref_arg(state, "state")?, ref_arg(rep, "rep")?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let b = basis.as_ref().map(|b| &b.0);
        let opts = ClassifyOptions { seed, ..Default::default() };
        let report = classify(&s.0, &r.rep, r.dec.as_ref(), b, &opts, &Tolerances::default()).fail()?;
        let text = serde_json::to_string(&report).map_err(|e| (DcStatus::Parse, e.to_string()))?;
        *out = CString::new(text).map_err(|e| (DcStatus::InvalidInput, e.to_string()))?.into_raw();
        Ok(())
    })
}
