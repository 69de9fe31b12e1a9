//! Exercise the C surface from Rust: handle lifecycle, status codes, and a
//! few end-to-end values that already have closed forms.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gaussent_ffi::*;

fn make_tmsv(r: f64) -> *mut GaussentCm {
    let mut cm: *mut GaussentCm = ptr::null_mut();
    let status = unsafe { gaussent_cm_tmsv(r, &mut cm) };
    assert_eq!(status, GaussentStatus::Ok);
    assert!(!cm.is_null());
    cm
}

#[test]
fn json_round_trip_through_the_abi() {
    let cm = make_tmsv(0.8);
    let mut text: *mut c_char = ptr::null_mut();
    unsafe {
        assert_eq!(gaussent_cm_to_json(cm, &mut text), GaussentStatus::Ok);
        let json = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert!(json.contains("\"ordering\":\"xpxp\""));
        let c_json = CString::new(json).unwrap();
        let mut back: *mut GaussentCm = ptr::null_mut();
        assert_eq!(gaussent_cm_from_json(c_json.as_ptr(), &mut back), GaussentStatus::Ok);
        assert_eq!(gaussent_cm_n_modes(back), 2);
        gaussent_string_free(text);
        gaussent_cm_free(back);
        gaussent_cm_free(cm);
    }
}

#[test]
fn malformed_json_reports_invalid_argument() {
    let bad = CString::new("{\"n_modes\": 1}").unwrap();
    let mut out: *mut GaussentCm = ptr::null_mut();
    let status = unsafe { gaussent_cm_from_json(bad.as_ptr(), &mut out) };
    assert_eq!(status, GaussentStatus::InvalidArgument);
    let mut buf = [0 as c_char; 256];
    let len = unsafe { gaussent_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(len > 0);
}

#[test]
fn validation_and_purity() {
    let cm = make_tmsv(1.0);
    let (mut sym, mut phys, mut nu) = (false, false, 0.0f64);
    unsafe {
        assert_eq!(
            gaussent_cm_validate(cm, &mut sym, &mut phys, &mut nu),
            GaussentStatus::Ok
        );
    }
    assert!(sym && phys);
    assert!((nu - 1.0).abs() < 1e-9);
    let mut mu = 0.0f64;
    unsafe {
        assert_eq!(gaussent_cm_purity(cm, &mut mu), GaussentStatus::Ok);
        gaussent_cm_free(cm);
    }
    assert!((mu - 1.0).abs() < 1e-9);
}

#[test]
fn log_negativity_matches_closed_form() {
    let r = 0.7;
    let cm = make_tmsv(r);
    let mut en = 0.0f64;
    unsafe {
        assert_eq!(gaussent_cm_log_negativity_split(cm, 1, &mut en), GaussentStatus::Ok);
        gaussent_cm_free(cm);
    }
    assert!((en - 2.0 * r).abs() < 1e-9);
}

#[test]
fn two_mode_analysis_record() {
    let cm = make_tmsv(1.0);
    let mut rec = GaussentTwoModeAnalysis {
        mu1: 0.0,
        mu2: 0.0,
        mu: 0.0,
        delta: 0.0,
        a: 0.0,
        b: 0.0,
        c_plus: 0.0,
        c_minus: 0.0,
        nu_tilde_minus: 0.0,
        nu_tilde_plus: 0.0,
        log_negativity: 0.0,
        classification: GaussentEntanglementClass::Separable,
    };
    unsafe {
        assert_eq!(gaussent_two_mode_analysis(cm, &mut rec), GaussentStatus::Ok);
        gaussent_cm_free(cm);
    }
    assert_eq!(rec.classification, GaussentEntanglementClass::Entangled);
    assert!((rec.nu_tilde_minus - (-2.0f64).exp()).abs() < 1e-9);
    assert!((rec.a - 2.0f64.cosh()).abs() < 1e-9);
}

#[test]
fn classify_bands_through_abi() {
    let mut class = GaussentEntanglementClass::Separable;
    unsafe {
        assert_eq!(gaussent_classify(0.5, 0.5, 0.45, &mut class), GaussentStatus::Ok);
        assert_eq!(class, GaussentEntanglementClass::Entangled);
        assert_eq!(gaussent_classify(0.5, 0.5, 0.30, &mut class), GaussentStatus::Ok);
        assert_eq!(class, GaussentEntanglementClass::Separable);
        assert_eq!(
            gaussent_classify(0.9, 0.2, 0.95, &mut class),
            GaussentStatus::UnphysicalPurities
        );
    }
}

#[test]
fn ghz_contangle_and_fidelity() {
    let mut cm: *mut GaussentCm = ptr::null_mut();
    unsafe {
        assert_eq!(gaussent_cm_ghz(3, 0.5, 1.0, &mut cm), GaussentStatus::Ok);
    }
    let mut value = 0.0f64;
    let mut analytic = false;
    unsafe {
        assert_eq!(
            gaussent_contangle_one_vs_rest(cm, 0, 7, &mut value, &mut analytic),
            GaussentStatus::Ok
        );
    }
    assert!(analytic);
    assert!(value > 0.0);

    let mut minimum = 0.0f64;
    unsafe {
        assert_eq!(gaussent_residual_contangle(cm, 7, &mut minimum), GaussentStatus::Ok);
        gaussent_cm_free(cm);
    }
    assert!(minimum > 0.0);

    let mut res = GaussentFidelityResult { fidelity: 0.0, e_t: 0.0, optimal_bias: 0.0 };
    unsafe {
        assert_eq!(gaussent_optimal_fidelity(2, 1.0, 1.0, &mut res), GaussentStatus::Ok);
    }
    assert!((res.fidelity - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-8);
    assert!((res.e_t - 1.0f64.tanh()).abs() < 1e-8);
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(gaussent_cm_n_modes(ptr::null()), 0);
        let mut out = 0.0f64;
        assert_eq!(gaussent_cm_purity(ptr::null(), &mut out), GaussentStatus::NullPointer);
        assert_eq!(
            gaussent_cm_from_json(ptr::null(), ptr::null_mut()),
            GaussentStatus::NullPointer
        );
    }
}

#[test]
fn partial_trace_and_spectrum() {
    let mut cm: *mut GaussentCm = ptr::null_mut();
    unsafe {
        assert_eq!(gaussent_cm_ghz(4, 0.6, 1.0, &mut cm), GaussentStatus::Ok);
    }
    let keep = [0usize, 1];
    let mut red: *mut GaussentCm = ptr::null_mut();
    unsafe {
        assert_eq!(
            gaussent_cm_partial_trace(cm, keep.as_ptr(), keep.len(), &mut red),
            GaussentStatus::Ok
        );
        assert_eq!(gaussent_cm_n_modes(red), 2);
        let mut values = [0.0f64; 2];
        assert_eq!(
            gaussent_cm_symplectic_spectrum(red, values.as_mut_ptr()),
            GaussentStatus::Ok
        );
        assert!(values[0] >= 1.0 - 1e-9);
        gaussent_cm_free(red);
        gaussent_cm_free(cm);
    }
}
