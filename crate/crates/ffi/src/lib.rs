//! C interface to the steady-state engine.
//!
//! Every function returns a [`PbStatus`]; on failure a description is kept per
//! thread and can be copied out with [`pb_last_error_message`]. Engines are
//! opaque, created by [`pb_engine_new`] and released by [`pb_engine_free`].
//! Frequencies cross the boundary in GHz (ordinary, not angular).

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pairblock::error::DynamicsError;
use pairblock::model::{check_rwa, ModelParams, UserModelParams};
use pairblock::observables::{Correlator, SteadyStateEngine};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    NoEmission = 4,
    Panic = 5,
}

/// Correlator selector for [`pb_engine_zero_delay`] and [`pb_engine_correlation`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbCorrelator {
    G11 = 0,
    G22 = 1,
    G12 = 2,
    G1212 = 3,
}

/// Model constants in GHz. A NaN `omega_j_ghz` places the Josephson
/// frequency on resonance.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbModelParams {
    pub omega_1_ghz: f64,
    pub omega_2_ghz: f64,
    pub delta_ghz: f64,
    pub e_j_ghz: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub omega_j_ghz: f64,
    pub kappa_ghz: f64,
    pub gamma_ghz: f64,
    pub cutoff: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PbEmission {
    pub gamma_over_kappa: f64,
    pub n1: f64,
    pub n2: f64,
    pub nbar: f64,
    pub rate_per_ns: f64,
    pub rate_mhz: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PbRwaReport {
    pub ratio: f64,
    pub worst_ratio: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Opaque handle.
pub struct PbEngine {
    inner: SteadyStateEngine,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn guard(f: impl FnOnce() -> Result<(), (PbStatus, String)>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PbStatus::Panic
        }
    }
}

fn null(what: &str) -> (PbStatus, String) {
    (PbStatus::NullPointer, format!("{what} is null"))
}

fn dynamics(e: DynamicsError) -> (PbStatus, String) {
    let status = match e {
        DynamicsError::NoEmission { .. } | DynamicsError::NoPairEmission { .. } => PbStatus::NoEmission,
        DynamicsError::Model(_) => PbStatus::InvalidArgument,
        _ => PbStatus::Numerical,
    };
    (status, e.to_string())
}

fn to_model(p: &PbModelParams) -> Result<ModelParams, (PbStatus, String)> {
    let user = UserModelParams {
        omega_1_ghz: p.omega_1_ghz,
        omega_2_ghz: p.omega_2_ghz,
        delta_ghz: p.delta_ghz,
        e_j_ghz: p.e_j_ghz,
        lambda_1: p.lambda_1,
        lambda_2: p.lambda_2,
        omega_j_ghz: (!p.omega_j_ghz.is_nan()).then_some(p.omega_j_ghz),
        kappa_ghz: p.kappa_ghz,
        gamma_ghz: p.gamma_ghz,
        cutoff: p.cutoff as usize,
    };
    let m = user.to_internal();
    m.validate().map_err(|e| (PbStatus::InvalidArgument, e.to_string()))?;
    Ok(m)
}

fn correlator(which: u32) -> Result<Correlator, (PbStatus, String)> {
    match which {
        0 => Ok(Correlator::G11),
        1 => Ok(Correlator::G22),
        2 => Ok(Correlator::G12),
        3 => Ok(Correlator::G1212),
        w => Err((PbStatus::InvalidArgument, format!("unknown correlator {w}"))),
    }
}

/// Fills `out` with the default parameter set (resonant drive).
///
/// # Safety
/// `out` must be null or point to writable memory for one `PbModelParams`.
#[no_mangle]
pub unsafe extern "C" fn pb_default_params(out: *mut PbModelParams) -> PbStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let d = UserModelParams::default();
        *out = PbModelParams {
            omega_1_ghz: d.omega_1_ghz,
            omega_2_ghz: d.omega_2_ghz,
            delta_ghz: d.delta_ghz,
            e_j_ghz: d.e_j_ghz,
            lambda_1: d.lambda_1,
            lambda_2: d.lambda_2,
            omega_j_ghz: f64::NAN,
            kappa_ghz: d.kappa_ghz,
            gamma_ghz: d.gamma_ghz,
            cutoff: d.cutoff as u32,
        };
        Ok(())
    })
}

/// Builds the master equation and solves for its steady state.
///
/// # Safety
/// `params` must be null or point to a valid `PbModelParams`; `out` must be
/// null or writable. On success `*out` owns a handle for [`pb_engine_free`].
#[no_mangle]
pub unsafe extern "C" fn pb_engine_new(params: *const PbModelParams, out: *mut *mut PbEngine) -> PbStatus {
    guard(|| {
        let params = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = std::ptr::null_mut();
        let m = to_model(params)?;
        let inner = SteadyStateEngine::new(&m).map_err(dynamics)?;
        *out = Box::into_raw(Box::new(PbEngine { inner }));
        Ok(())
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must come from [`pb_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pb_engine_free(engine: *mut PbEngine) {
    if !engine.is_null() {
        drop(unsafe { Box::from_raw(engine) });
    }
}

/// Steady-state occupations and the emission rate `S = κ n̄`.
///
/// # Safety
/// `engine` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pb_engine_emission(engine: *const PbEngine, out: *mut PbEmission) -> PbStatus {
    guard(|| {
        let e = unsafe { engine.as_ref() }.ok_or_else(|| null("engine"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let p = e.inner.emission_rate();
        *out = PbEmission {
            gamma_over_kappa: p.gamma_over_kappa,
            n1: p.n1,
            n2: p.n2,
            nbar: p.nbar,
            rate_per_ns: p.rate_per_ns,
            rate_mhz: p.rate_mhz,
        };
        Ok(())
    })
}

/// Zero-delay value of a correlator from steady-state moments.
///
/// # Safety
/// `engine` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pb_engine_zero_delay(engine: *const PbEngine, which: u32, out: *mut f64) -> PbStatus {
    guard(|| {
        let e = unsafe { engine.as_ref() }.ok_or_else(|| null("engine"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = e.inner.direct_zero_delay(correlator(which)?).map_err(dynamics)?;
        Ok(())
    })
}

/// Normalized correlator on a grid of `κτ` values, which must start at 0 and
/// increase strictly. Writes `len` values to `out`.
///
/// # Safety
/// `kappa_tau` must point to `len` readable doubles and `out` to `len`
/// writable doubles; `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_engine_correlation(
    engine: *const PbEngine,
    which: u32,
    kappa_tau: *const f64,
    len: usize,
    out: *mut f64,
) -> PbStatus {
    guard(|| {
        let e = unsafe { engine.as_ref() }.ok_or_else(|| null("engine"))?;
        if kappa_tau.is_null() {
            return Err(null("kappa_tau"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if len == 0 {
            return Err((PbStatus::InvalidArgument, "empty grid".into()));
        }
        let grid = unsafe { std::slice::from_raw_parts(kappa_tau, len) };
        let kappa = e.inner.params().kappa;
        if kappa.is_nan() || kappa <= 0.0 {
            return Err((PbStatus::InvalidArgument, "kappa must be > 0".into()));
        }
        let tau: Vec<f64> = grid.iter().map(|k| k / kappa).collect();
        let series = e.inner.correlator(correlator(which)?, &tau).map_err(dynamics)?;
        let out = unsafe { std::slice::from_raw_parts_mut(out, len) };
        out.copy_from_slice(&series.values);
        Ok(())
    })
}

/// Rotating-wave validity ratio at the default threshold.
///
/// # Safety
/// `params` must be a valid pointer or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn pb_check_rwa(params: *const PbModelParams, out: *mut PbRwaReport) -> PbStatus {
    guard(|| {
        let params = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let r = check_rwa(&to_model(params)?).map_err(|e| (PbStatus::InvalidArgument, e.to_string()))?;
        *out = PbRwaReport { ratio: r.ratio, worst_ratio: r.worst_ratio, threshold: r.threshold, passed: r.passed };
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in bytes,
/// excluding the terminator, so a caller can size a buffer with a null `buf`.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pb_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
