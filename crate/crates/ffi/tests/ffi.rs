use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use statorforge_ffi::*;

fn last_error() -> String {
    let p = sf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn matrix(rows: usize, cols: usize, re: &[f64], im: Option<&[f64]>) -> *mut SfMatrix {
    let mut out = ptr::null_mut();
    let status = unsafe {
        sf_matrix_new(rows, cols, re.as_ptr(), im.map_or(ptr::null(), |v| v.as_ptr()), &mut out)
    };
    assert_eq!(status, SfStatus::Ok);
    out
}

fn entries(m: *const SfMatrix) -> (Vec<f64>, Vec<f64>) {
    let len = unsafe { sf_matrix_rows(m) * sf_matrix_cols(m) };
    let (mut re, mut im) = (vec![0.0; len], vec![0.0; len]);
    assert_eq!(unsafe { sf_matrix_copy(m, re.as_mut_ptr(), im.as_mut_ptr(), len) }, SfStatus::Ok);
    (re, im)
}

#[test]
fn construct_and_verify_sigma_x() {
    let theta = matrix(2, 2, &[0.0, 1.0, 1.0, 0.0], None);
    let (mut s, mut tb) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sf_stator_construct(theta, ptr::null(), ptr::null(), &mut s, &mut tb), SfStatus::Ok);
        assert_eq!((sf_stator_dim_a(s), sf_stator_dim_b(s)), (2, 2));
        let mut r = f64::NAN;
        assert_eq!(sf_stator_completeness_residual(s, &mut r), SfStatus::Ok);
        assert!(r < 1e-14);
        assert_eq!(sf_stator_eigenop_residual(s, theta, tb, &mut r), SfStatus::Ok);
        assert!(r < 1e-14);

        // both Kraus operators are rank-one projectors
        for i in 0..2 {
            let mut k = ptr::null_mut();
            assert_eq!(sf_stator_kraus(s, i, &mut k), SfStatus::Ok);
            let (re, _) = entries(k);
            assert!((re[0] - 0.5).abs() < 1e-15 && (re[3] - 0.5).abs() < 1e-15);
            sf_matrix_free(k);
        }
        let mut k = ptr::null_mut();
        assert_eq!(sf_stator_kraus(s, 2, &mut k), SfStatus::IndexOutOfRange);
        assert!(last_error().starts_with("IndexOutOfRange"));

        sf_stator_free(s);
        sf_matrix_free(tb);
        sf_matrix_free(theta);
    }
}

#[test]
fn error_codes_and_messages() {
    let nilpotent = matrix(2, 2, &[0.0, 1.0, 0.0, 0.0], None);
    let (mut s, mut tb) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sf_stator_construct(nilpotent, ptr::null(), ptr::null(), &mut s, &mut tb), SfStatus::NotNormal);
        assert!(s.is_null() && tb.is_null());
        assert!(last_error().contains("NotNormal"));
        assert_eq!(
            sf_stator_construct(ptr::null(), ptr::null(), ptr::null(), &mut s, &mut tb),
            SfStatus::NullPointer
        );
        let mut m = ptr::null_mut();
        assert_eq!(sf_matrix_new(0, 2, [0.0].as_ptr(), ptr::null(), &mut m), SfStatus::InvalidArgument);
        let nan = [f64::NAN];
        assert_eq!(sf_matrix_new(1, 1, nan.as_ptr(), ptr::null(), &mut m), SfStatus::NonFinite);
        let text = CString::new("{\"rows\": 2").unwrap();
        assert_eq!(sf_matrix_from_json(text.as_ptr(), &mut m), SfStatus::Parse);
        sf_matrix_free(nilpotent);
        // freeing NULL is a no-op
        sf_matrix_free(ptr::null_mut());
        sf_stator_free(ptr::null_mut());
        sf_group_free(ptr::null_mut());
        sf_string_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip() {
    let y = matrix(2, 2, &[0.0, 0.0, 0.0, 0.0], Some(&[0.0, -1.0, 1.0, 0.0]));
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(sf_matrix_to_json(y, &mut text), SfStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sf_matrix_from_json(text, &mut back), SfStatus::Ok);
        assert_eq!(entries(back), entries(y));
        sf_string_free(text);

        let (mut s, mut tb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sf_stator_construct(y, ptr::null(), ptr::null(), &mut s, &mut tb), SfStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(sf_stator_to_json(s, &mut json), SfStatus::Ok);
        let mut s2 = ptr::null_mut();
        assert_eq!(sf_stator_from_json(json, &mut s2), SfStatus::Ok);
        assert_eq!(sf_stator_dim_b(s2), 2);
        sf_string_free(json);
        for p in [s, s2] {
            sf_stator_free(p);
        }
        for p in [y, back, tb] {
            sf_matrix_free(p);
        }
    }
}

#[test]
fn groups_and_rebase() {
    let name = CString::new("S3").unwrap();
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(sf_group_builtin(name.as_ptr(), &mut g), SfStatus::Ok);
        assert_eq!(sf_group_order(g), 6);
        let (mut f, mut s, mut r) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(sf_group_fourier_matrix(g, &mut f), SfStatus::Ok);
        assert_eq!(sf_group_element_stator(g, &mut s), SfStatus::Ok);
        assert_eq!(sf_stator_rebase(s, f, &mut r), SfStatus::Ok);
        // the trivial irrep's Kraus operator is the uniform 1/sqrt(6) identity
        let mut k = ptr::null_mut();
        assert_eq!(sf_stator_kraus(r, 0, &mut k), SfStatus::Ok);
        let (re, _) = entries(k);
        assert!((re[0] - 1.0 / 6f64.sqrt()).abs() < 1e-14 && re[1].abs() < 1e-14);
        sf_matrix_free(k);
        sf_stator_free(r);
        sf_stator_free(s);
        sf_matrix_free(f);
        sf_group_free(g);

        let bad = CString::new("E8").unwrap();
        assert_eq!(sf_group_builtin(bad.as_ptr(), &mut g), SfStatus::UnknownBuiltin);
    }
}

#[test]
fn evolution_and_demo() {
    let sx = matrix(2, 2, &[0.0, 1.0, 1.0, 0.0], None);
    unsafe {
        let (mut s, mut tb, mut u) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(sf_stator_construct(sx, ptr::null(), ptr::null(), &mut s, &mut tb), SfStatus::Ok);
        assert_eq!(sf_stator_dilate(s, 0, &mut u), SfStatus::Ok);
        let psi = [0.6, 0.8];
        let (mut re, mut im, mut leak) = ([0.0; 2], [0.0; 2], f64::NAN);
        let status = sf_effective_evolve(u, tb, 0.4, psi.as_ptr(), ptr::null(), 2, re.as_mut_ptr(), im.as_mut_ptr(), &mut leak);
        assert_eq!(status, SfStatus::Ok);
        // e^{-i σ_x t} applied directly
        let (c, sn) = (0.4f64.cos(), 0.4f64.sin());
        assert!((re[0] - 0.6 * c).abs() < 1e-12 && (im[0] + 0.8 * sn).abs() < 1e-12);
        assert!((re[1] - 0.8 * c).abs() < 1e-12 && (im[1] + 0.6 * sn).abs() < 1e-12);
        assert!(leak.abs() < 1e-12);

        let unnormalized = [1.0, 1.0];
        let status = sf_effective_evolve(u, tb, 0.4, unnormalized.as_ptr(), ptr::null(), 2, re.as_mut_ptr(), im.as_mut_ptr(), &mut leak);
        assert_eq!(status, SfStatus::NotNormalized);

        let (mut dev, mut pass) = (f64::NAN, false);
        assert_eq!(sf_plaquette_demo(4, 1.0, 0.5, 1e-10, &mut dev, &mut leak, &mut pass), SfStatus::Ok);
        assert!(pass && dev <= 1e-10);
        assert_eq!(sf_plaquette_demo(1, 1.0, 0.5, 1e-10, &mut dev, &mut leak, &mut pass), SfStatus::InvalidArgument);

        sf_stator_free(s);
        for p in [sx, tb, u] {
            sf_matrix_free(p);
        }
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/statorforge.h")).unwrap();
    for name in [
        "SF_STATUS_NOT_NORMAL",
        "typedef struct SfMatrix SfMatrix",
        "sf_stator_construct",
        "sf_effective_evolve",
        "sf_plaquette_demo",
        "sf_last_error_message",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a C program against the generated header and the
/// static library, when a C compiler and the library are available.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .and_then(|deps| deps.parent())
        .map(|p| p.to_path_buf())
        .unwrap();
    let lib = profile_dir.join("libstatorforge_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.is_file() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C toolchain or static library; C smoke test not run");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
