//! C ABI over the gaussent toolkit: opaque covariance-matrix handles,
//! status codes, and flat structs for the common analyses. The header
//! `include/gaussent.h` is generated by cbindgen at build time.
//!
//! Conventions: every fallible call returns a [`GaussentStatus`]; outputs
//! are written through pointers only on `Ok`. A thread-local message for
//! the most recent error is available via [`gaussent_last_error_message`].
//! Handles returned by constructors must be released with
//! [`gaussent_cm_free`]; strings with [`gaussent_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gaussent::error::Error;
use gaussent::multimode::GhzTypeSpec;
use gaussent::phasespace::{Bipartition, CovarianceMatrix};
use gaussent::{multimode, sharing, teleport, twomode};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    DimensionMismatch = 4,
    Unphysical = 5,
    NotPositiveDefinite = 6,
    DegenerateNumerics = 7,
    IndexOutOfRange = 8,
    ConstraintViolation = 9,
    NegativeRadicand = 10,
    UnphysicalPurities = 11,
    NotSymmetric = 12,
    NotBisymmetric = 13,
    NotPure = 14,
    OptimizerFailure = 15,
    DomainError = 16,
    InternalPanic = 17,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn status_of(e: &Error) -> GaussentStatus {
    match e {
        Error::NonFinite { .. } => GaussentStatus::NonFinite,
        Error::DimensionMismatch { .. } => GaussentStatus::DimensionMismatch,
        Error::Unphysical { .. } => GaussentStatus::Unphysical,
        Error::NotPositiveDefinite { .. } => GaussentStatus::NotPositiveDefinite,
        Error::DegenerateNumerics { .. } => GaussentStatus::DegenerateNumerics,
        Error::EmptyKeepSet => GaussentStatus::InvalidArgument,
        Error::IndexOutOfRange { .. } => GaussentStatus::IndexOutOfRange,
        Error::InvalidBipartition { .. } => GaussentStatus::InvalidArgument,
        Error::ConstraintViolation { .. } => GaussentStatus::ConstraintViolation,
        Error::NegativeRadicand { .. } => GaussentStatus::NegativeRadicand,
        Error::UnphysicalPurities { .. } => GaussentStatus::UnphysicalPurities,
        Error::NotSymmetric { .. } => GaussentStatus::NotSymmetric,
        Error::NotBisymmetric { .. } => GaussentStatus::NotBisymmetric,
        Error::NotPure { .. } => GaussentStatus::NotPure,
        Error::OptimizerFailure { .. } => GaussentStatus::OptimizerFailure,
        Error::DomainError { .. } => GaussentStatus::DomainError,
    }
}

fn fail(e: Error) -> GaussentStatus {
    let status = status_of(&e);
    set_error(&e.to_string());
    status
}

/// Run a fallible body, translating errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<GaussentStatus, Error>>(body: F) -> GaussentStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => fail(e),
        Err(_) => {
            set_error("internal panic");
            GaussentStatus::InternalPanic
        }
    }
}

/// Opaque covariance-matrix handle.
pub struct GaussentCm {
    inner: CovarianceMatrix,
}

unsafe fn cm_ref<'a>(cm: *const GaussentCm) -> Option<&'a CovarianceMatrix> {
    cm.as_ref().map(|h| &h.inner)
}

fn boxed(cm: CovarianceMatrix) -> *mut GaussentCm {
    Box::into_raw(Box::new(GaussentCm { inner: cm }))
}

/// Write the most recent error message (UTF-8, NUL-terminated, truncated to
/// `len`) into `buf`. Returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn gaussent_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len() - 1
    })
}

/// Parse a covariance matrix from its JSON representation
/// {"n_modes": N, "ordering": "xpxp", "matrix": [[...]]}.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_from_json(
    json: *const c_char,
    out: *mut *mut GaussentCm,
) -> GaussentStatus {
    if json.is_null() || out.is_null() {
        return GaussentStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("input is not valid UTF-8");
            return GaussentStatus::InvalidArgument;
        }
    };
    guarded(|| match serde_json::from_str::<CovarianceMatrix>(text) {
        Ok(cm) => {
            *out = boxed(cm);
            Ok(GaussentStatus::Ok)
        }
        Err(e) => {
            set_error(&format!("malformed CM JSON: {e}"));
            Ok(GaussentStatus::InvalidArgument)
        }
    })
}

/// Serialize a covariance matrix to JSON. The returned string must be
/// released with [`gaussent_string_free`].
///
/// # Safety
/// `cm` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_to_json(
    cm: *const GaussentCm,
    out: *mut *mut c_char,
) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), out.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let text = serde_json::to_string(state).expect("CM serializes");
        *out = CString::new(text).expect("no interior NUL").into_raw();
        Ok(GaussentStatus::Ok)
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must originate from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn gaussent_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a covariance-matrix handle.
///
/// # Safety
/// `cm` must originate from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_free(cm: *mut GaussentCm) {
    if !cm.is_null() {
        drop(Box::from_raw(cm));
    }
}

/// Vacuum state on `n_modes` modes.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_vacuum(n_modes: usize, out: *mut *mut GaussentCm) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    if n_modes == 0 {
        set_error("vacuum needs at least one mode");
        return GaussentStatus::InvalidArgument;
    }
    *out = boxed(CovarianceMatrix::vacuum(n_modes));
    GaussentStatus::Ok
}

/// Two-mode squeezed vacuum at squeezing `r`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_tmsv(r: f64, out: *mut *mut GaussentCm) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    if !r.is_finite() {
        set_error("squeezing must be finite");
        return GaussentStatus::InvalidArgument;
    }
    *out = boxed(gaussent::phasespace::two_mode_squeezed_vacuum(r));
    GaussentStatus::Ok
}

/// GHZ-type fully symmetric state.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_ghz(
    n_modes: usize,
    squeezing: f64,
    thermal_noise: f64,
    out: *mut *mut GaussentCm,
) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    guarded(|| {
        let cm = multimode::ghz_type_state(&GhzTypeSpec::new(n_modes, squeezing, thermal_noise)?)?;
        *out = boxed(cm);
        Ok(GaussentStatus::Ok)
    })
}

/// Number of modes of a handle (0 for null).
///
/// # Safety
/// `cm` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_n_modes(cm: *const GaussentCm) -> usize {
    cm_ref(cm).map_or(0, |c| c.n_modes())
}

/// Symmetry/physicality report of a covariance matrix.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_validate(
    cm: *const GaussentCm,
    out_symmetric: *mut bool,
    out_physical: *mut bool,
    out_nu_min: *mut f64,
) -> GaussentStatus {
    let Some(state) = cm_ref(cm) else {
        return GaussentStatus::NullPointer;
    };
    if out_symmetric.is_null() || out_physical.is_null() || out_nu_min.is_null() {
        return GaussentStatus::NullPointer;
    }
    let report = state.validate();
    *out_symmetric = report.symmetric;
    *out_physical = report.physical;
    *out_nu_min = report.nu_min;
    GaussentStatus::Ok
}

/// Purity μ = 1/√Det σ.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_purity(cm: *const GaussentCm, out: *mut f64) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), out.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        *out = state.purity()?;
        Ok(GaussentStatus::Ok)
    })
}

/// Symplectic spectrum, ascending; `values` must hold `n_modes` doubles.
///
/// # Safety
/// All pointers must be valid and `values` large enough.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_symplectic_spectrum(
    cm: *const GaussentCm,
    values: *mut f64,
) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), values.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let spec = state.symplectic_spectrum()?;
        for (i, v) in spec.values().iter().enumerate() {
            *values.add(i) = *v;
        }
        Ok(GaussentStatus::Ok)
    })
}

/// Log-negativity across the first-k | rest bipartition.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_log_negativity_split(
    cm: *const GaussentCm,
    k: usize,
    out: *mut f64,
) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), out.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let bp = Bipartition::first_k(k, state.n_modes())?;
        *out = state.log_negativity(&bp)?;
        Ok(GaussentStatus::Ok)
    })
}

/// Reduced state on the `keep_len` modes listed in `keep` (0-based).
///
/// # Safety
/// All pointers must be valid; `keep` must hold `keep_len` indices.
#[no_mangle]
pub unsafe extern "C" fn gaussent_cm_partial_trace(
    cm: *const GaussentCm,
    keep: *const usize,
    keep_len: usize,
    out: *mut *mut GaussentCm,
) -> GaussentStatus {
    let (Some(state), false, false) = (cm_ref(cm), keep.is_null(), out.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let keep = std::slice::from_raw_parts(keep, keep_len);
        *out = boxed(state.partial_trace(keep)?);
        Ok(GaussentStatus::Ok)
    })
}

/// Entanglement class at fixed purities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussentEntanglementClass {
    Separable = 0,
    Coexistence = 1,
    Entangled = 2,
}

/// Flat two-mode analysis record.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GaussentTwoModeAnalysis {
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub nu_tilde_minus: f64,
    pub nu_tilde_plus: f64,
    pub log_negativity: f64,
    pub classification: GaussentEntanglementClass,
}

/// Full two-mode analysis: invariants, standard form, PPT pair,
/// log-negativity and classification.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_two_mode_analysis(
    cm: *const GaussentCm,
    out: *mut GaussentTwoModeAnalysis,
) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), out.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let inv = twomode::invariants_from_cm(state)?;
        let sf = twomode::standard_form_from_invariants(&inv)?;
        let ppt = twomode::ppt_eigenvalues(&inv)?;
        let class = match twomode::classify_by_purities(inv.mu1, inv.mu2, inv.mu)? {
            twomode::EntanglementClass::Separable => GaussentEntanglementClass::Separable,
            twomode::EntanglementClass::Coexistence => GaussentEntanglementClass::Coexistence,
            twomode::EntanglementClass::Entangled => GaussentEntanglementClass::Entangled,
        };
        *out = GaussentTwoModeAnalysis {
            mu1: inv.mu1,
            mu2: inv.mu2,
            mu: inv.mu,
            delta: inv.delta,
            a: sf.a,
            b: sf.b,
            c_plus: sf.c_plus,
            c_minus: sf.c_minus,
            nu_tilde_minus: ppt.nu_tilde_minus,
            nu_tilde_plus: ppt.nu_tilde_plus,
            log_negativity: twomode::log_negativity_two_mode(&inv)?,
            classification: class,
        };
        Ok(GaussentStatus::Ok)
    })
}

/// Entanglement class at given purities.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_classify(
    mu1: f64,
    mu2: f64,
    mu: f64,
    out: *mut GaussentEntanglementClass,
) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    guarded(|| {
        *out = match twomode::classify_by_purities(mu1, mu2, mu)? {
            twomode::EntanglementClass::Separable => GaussentEntanglementClass::Separable,
            twomode::EntanglementClass::Coexistence => GaussentEntanglementClass::Coexistence,
            twomode::EntanglementClass::Entangled => GaussentEntanglementClass::Entangled,
        };
        Ok(GaussentStatus::Ok)
    })
}

/// Gaussian contangle of `focus` versus the rest (seeded optimizer for
/// mixed inputs). `out_analytic` reports whether the closed-form pure-state
/// branch was taken.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_contangle_one_vs_rest(
    cm: *const GaussentCm,
    focus: usize,
    seed: u64,
    out_value: *mut f64,
    out_analytic: *mut bool,
) -> GaussentStatus {
    let (Some(state), false, false) = (cm_ref(cm), out_value.is_null(), out_analytic.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        let c = sharing::gaussian_contangle_one_vs_rest(state, focus, seed)?;
        *out_value = c.value;
        *out_analytic = c.method == sharing::ContangleMethod::AnalyticPure;
        Ok(GaussentStatus::Ok)
    })
}

/// Minimum residual contangle of a three-mode state.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_residual_contangle(
    cm: *const GaussentCm,
    seed: u64,
    out_minimum: *mut f64,
) -> GaussentStatus {
    let (Some(state), false) = (cm_ref(cm), out_minimum.is_null()) else {
        return GaussentStatus::NullPointer;
    };
    guarded(|| {
        *out_minimum = sharing::residual_contangle(state, seed)?.minimum;
        Ok(GaussentStatus::Ok)
    })
}

/// Optimal-fidelity record of a teleportation network.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GaussentFidelityResult {
    pub fidelity: f64,
    pub e_t: f64,
    pub optimal_bias: f64,
}

/// Optimal teleportation fidelity over the squeezing bias at fixed average
/// squeezing `r_bar` for `parties` users.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_optimal_fidelity(
    parties: usize,
    r_bar: f64,
    noise: f64,
    out: *mut GaussentFidelityResult,
) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    guarded(|| {
        let res = teleport::optimal_fidelity(parties, r_bar, noise)?;
        *out = GaussentFidelityResult {
            fidelity: res.fidelity,
            e_t: res.e_t,
            optimal_bias: res.optimal_bias,
        };
        Ok(GaussentStatus::Ok)
    })
}

/// Localizable entanglement of formation as a function of E_T.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_localizable_eof_from_et(e_t: f64, out: *mut f64) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    guarded(|| {
        *out = teleport::localizable_eof_from_et(e_t)?;
        Ok(GaussentStatus::Ok)
    })
}

/// Residual contangle of the pure three-mode resource as a function of E_T.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gaussent_tripartite_contangle_from_et(e_t: f64, out: *mut f64) -> GaussentStatus {
    if out.is_null() {
        return GaussentStatus::NullPointer;
    }
    guarded(|| {
        *out = teleport::tripartite_contangle_from_et(e_t)?;
        Ok(GaussentStatus::Ok)
    })
}
