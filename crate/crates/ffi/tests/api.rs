use std::ffi::{CStr, CString};
use std::ptr;

use densecap_ffi::*;

fn last_error() -> String {
    let p = dc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn bell_state_roundtrip() {
    unsafe {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re = [h, 0.0, 0.0, h];
        let im = [0.0; 4];
        let mut state = ptr::null_mut();
        assert_eq!(dc_state_from_amplitudes(re.as_ptr(), im.as_ptr(), 2, 2, &mut state), DcStatus::Ok);
        let (mut da, mut db) = (0, 0);
        assert_eq!(dc_state_dims(state, &mut da, &mut db), DcStatus::Ok);
        assert_eq!((da, db), (2, 2));

        let name = CString::new("Z2-diag").unwrap();
        let mut rep = ptr::null_mut();
        assert_eq!(dc_rep_from_name(name.as_ptr(), &mut rep), DcStatus::Ok);
        assert_eq!(dc_rep_dim(rep), 2);

        let mut c = 0.0;
        assert_eq!(dc_capacity(state, rep, DcUnits::Bits, &mut c), DcStatus::Ok);
        assert!((c - 1.0).abs() < 1e-10);
        assert_eq!(dc_capacity(state, rep, DcUnits::Nats, &mut c), DcStatus::Ok);
        assert!((c - std::f64::consts::LN_2).abs() < 1e-10);

        let mut fourier = ptr::null_mut();
        assert_eq!(dc_basis_fourier(2, &mut fourier), DcStatus::Ok);
        let mut m = 0.0;
        assert_eq!(dc_capacity_measured(state, rep, fourier, DcUnits::Bits, &mut m), DcStatus::Ok);
        assert!((m - 1.0).abs() < 1e-10);
        let mut r = 1.0;
        assert_eq!(dc_reconstruction_residual(state, rep, fourier, &mut r), DcStatus::Ok);
        assert!(r < 1e-9);

        let mut comp = ptr::null_mut();
        assert_eq!(dc_basis_computational(2, &mut comp), DcStatus::Ok);
        assert_eq!(dc_capacity_measured(state, rep, comp, DcUnits::Bits, &mut m), DcStatus::Ok);
        assert!(m.abs() < 1e-10);

        let mut json = ptr::null_mut();
        assert_eq!(dc_classify_json(state, rep, ptr::null(), 0, &mut json), DcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        dc_string_free(json);
        assert!(text.contains("\"verdict\":\"USELESS\""), "{text}");

        dc_basis_free(fourier);
        dc_basis_free(comp);
        dc_rep_free(rep);
        dc_state_free(state);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut state = ptr::null_mut();
        assert_eq!(dc_state_from_json(ptr::null(), &mut state), DcStatus::NullPointer);
        let bad = CString::new("{not json").unwrap();
        assert_eq!(dc_state_from_json(bad.as_ptr(), &mut state), DcStatus::Parse);
        assert!(!last_error().is_empty());
        assert!(state.is_null());

        let js = CString::new(r#"{"dims":[2,1],"amplitudes":[[1,0],[0,0]]}"#).unwrap();
        assert_eq!(dc_state_from_json(js.as_ptr(), &mut state), DcStatus::Ok);
        let name = CString::new("Z3").unwrap();
        let mut rep = ptr::null_mut();
        assert_eq!(dc_rep_from_name(name.as_ptr(), &mut rep), DcStatus::Ok);
        let mut c = 0.0;
        assert_eq!(dc_capacity(state, rep, DcUnits::Bits, &mut c), DcStatus::Dimension);
        assert!(last_error().contains("dimension"), "{}", last_error());

        let q8 = CString::new("Q8").unwrap();
        let mut other = ptr::null_mut();
        assert_eq!(dc_rep_from_name(q8.as_ptr(), &mut other), DcStatus::Parse);

        let re = [1.0, 1.0, 0.0, 0.0];
        let im = [0.0; 4];
        let mut basis = ptr::null_mut();
        assert_eq!(dc_basis_from_unitary(re.as_ptr(), im.as_ptr(), 2, &mut basis), DcStatus::InvalidInput);
        assert_eq!(dc_basis_computational(0, &mut basis), DcStatus::Dimension);

        dc_rep_free(rep);
        dc_state_free(state);
        dc_state_free(ptr::null_mut());
        dc_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(dc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// The generated header must be valid C.
#[test]
fn header_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/densecap.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["dc_capacity", "dc_classify_json", "DC_STATUS_OK", "typedef struct DcState DcState"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let tmp = tempfile_dir();
    let src = tmp.join("use_header.c");
    std::fs::write(&src, "#include \"densecap.h\"\nint main(void) { DcState *s = 0; dc_state_free(s); return DC_STATUS_OK; }\n").unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header failed to compile"),
        Err(_) => eprintln!("no C compiler found; skipped syntax check"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("densecap-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
