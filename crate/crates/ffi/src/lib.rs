//! C ABI over the `resum` engine.
//!
//! Every function returns a `ResumStatus`; on failure a message is kept per
//! thread and can be read with `resum_last_error_message`. Models are opaque
//! handles created by one of the `resum_model_*` constructors and released
//! with `resum_model_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use resum::complexfn::Side;
use resum::models::{self, CoefficientModel, ModelKind};
use resum::reconstruct::{borel_sum, reconstruct_entire, reconstruct_finite_radius, Lateral};
use resum::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResumStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad argument value, including strings that are not UTF-8.
    InvalidArgument = 2,
    /// Malformed or inconsistent model.
    Model = 3,
    /// Quadrature, convergence or tolerance failure.
    Numeric = 4,
    Io = 5,
    Unsupported = 6,
    /// The point needs an explicit side, or is a branch point.
    Branch = 7,
    /// Internal panic; the engine state is unaffected.
    Panic = 8,
}

pub const RESUM_SIDE_OFF: i32 = 0;
pub const RESUM_SIDE_UPPER: i32 = 1;
pub const RESUM_SIDE_LOWER: i32 = 2;

pub const RESUM_LATERAL_DIRECT: i32 = 0;
pub const RESUM_LATERAL_UPPER: i32 = 1;
pub const RESUM_LATERAL_LOWER: i32 = 2;
pub const RESUM_LATERAL_MEDIAN: i32 = 3;

pub const RESUM_KIND_FINITE_RADIUS: i32 = 0;
pub const RESUM_KIND_ENTIRE: i32 = 1;
pub const RESUM_KIND_BOREL: i32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResumComplex {
    pub re: f64,
    pub im: f64,
}

/// A computed value with its absolute error estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResumValue {
    pub value: ResumComplex,
    pub error_estimate: f64,
}

/// Opaque model handle.
pub struct ResumModel {
    inner: CoefficientModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ResumStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::InvalidParameter(_) => ResumStatus::InvalidArgument,
        Error::BranchPoint(_) | Error::SideRequired(_) => ResumStatus::Branch,
        Error::Model(_) => ResumStatus::Model,
        Error::Io(_) => ResumStatus::Io,
        Error::Unsupported(_) => ResumStatus::Unsupported,
        _ if e.is_numeric() => ResumStatus::Numeric,
        _ => ResumStatus::InvalidArgument,
    }
}

struct Fail(ResumStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ResumStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ResumStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ResumStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ResumStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ResumStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn model_ref<'a>(m: *const ResumModel) -> Result<&'a CoefficientModel, Fail> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn store_model(out: *mut *mut ResumModel, model: CoefficientModel) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(ResumModel { inner: model }));
    Ok(())
}

unsafe fn store_value(out: *mut ResumValue, v: Complex64, err: f64) -> Result<(), Fail> {
    let out = out.as_mut().ok_or_else(|| null("out"))?;
    *out = ResumValue { value: ResumComplex { re: v.re, im: v.im }, error_estimate: err };
    Ok(())
}

fn side_of(side: i32) -> Result<Side, Fail> {
    match side {
        RESUM_SIDE_OFF => Ok(Side::Off),
        RESUM_SIDE_UPPER => Ok(Side::Upper),
        RESUM_SIDE_LOWER => Ok(Side::Lower),
        _ => Err(Fail(ResumStatus::InvalidArgument, format!("unknown side {side}"))),
    }
}

fn lateral_of(lateral: i32) -> Result<Lateral, Fail> {
    match lateral {
        RESUM_LATERAL_DIRECT => Ok(Lateral::Direct),
        RESUM_LATERAL_UPPER => Ok(Lateral::Upper),
        RESUM_LATERAL_LOWER => Ok(Lateral::Lower),
        RESUM_LATERAL_MEDIAN => Ok(Lateral::Median),
        _ => Err(Fail(ResumStatus::InvalidArgument, format!("unknown lateral choice {lateral}"))),
    }
}

/// Message describing the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn resum_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn resum_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a handle for one of the bundled models ("f1", "f2", "f3-stirling", "borel-sqrt").
///
/// # Safety
/// `name` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn resum_model_bundled(name: *const c_char, out: *mut *mut ResumModel) -> ResumStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        store_model(out, models::bundled(name)?)
    })
}

/// Loads a model file.
///
/// # Safety
/// As `resum_model_bundled`.
#[no_mangle]
pub unsafe extern "C" fn resum_model_load(path: *const c_char, out: *mut *mut ResumModel) -> ResumStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        store_model(out, models::load_model(path)?)
    })
}

/// Parses a model from its JSON text.
///
/// # Safety
/// As `resum_model_bundled`.
#[no_mangle]
pub unsafe extern "C" fn resum_model_from_json(json: *const c_char, out: *mut *mut ResumModel) -> ResumStatus {
    guard(|| {
        let json = read_str(json, "json")?;
        store_model(out, CoefficientModel::from_json_str(json)?)
    })
}

/// Releases a handle. Null is accepted.
///
/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn resum_model_free(model: *mut ResumModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Writes one of the `RESUM_KIND_*` constants.
///
/// # Safety
/// `model` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn resum_model_kind(model: *const ResumModel, out: *mut i32) -> ResumStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match m.kind {
            ModelKind::FiniteRadius => RESUM_KIND_FINITE_RADIUS,
            ModelKind::Entire => RESUM_KIND_ENTIRE,
            ModelKind::Borel => RESUM_KIND_BOREL,
        };
        Ok(())
    })
}

/// Coefficient f_k, k >= 1.
///
/// # Safety
/// `model` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn resum_model_coefficient(model: *const ResumModel, k: u32, out: *mut ResumValue) -> ResumStatus {
    guard(|| {
        let m = model_ref(model)?;
        let r = m.coefficient(k)?;
        store_value(out, r.value, r.error_estimate)
    })
}

/// Value of the function the model describes at z: the analytic continuation
/// for finite-radius models, the entire function, or the Borel sum. `side`
/// applies to points on a cut of a finite-radius model, `lateral` to Borel
/// sums along a singular direction; each is ignored otherwise.
///
/// # Safety
/// `model` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn resum_eval(
    model: *const ResumModel,
    z: ResumComplex,
    side: i32,
    lateral: i32,
    out: *mut ResumValue,
) -> ResumStatus {
    guard(|| {
        let m = model_ref(model)?;
        let side = side_of(side)?;
        let lateral = lateral_of(lateral)?;
        let z = Complex64::new(z.re, z.im);
        let r = match m.kind {
            ModelKind::FiniteRadius => reconstruct_finite_radius(m, z, side)?,
            ModelKind::Entire => reconstruct_entire(m, z)?,
            ModelKind::Borel => borel_sum(m, z, lateral)?,
        };
        store_value(out, r.value, r.error_estimate)
    })
}

/// Borel sum of a `RESUM_KIND_BOREL` model at z.
///
/// # Safety
/// As `resum_eval`.
#[no_mangle]
pub unsafe extern "C" fn resum_borel_sum(
    model: *const ResumModel,
    z: ResumComplex,
    lateral: i32,
    out: *mut ResumValue,
) -> ResumStatus {
    guard(|| {
        let m = model_ref(model)?;
        if m.kind != ModelKind::Borel {
            return Err(Fail(ResumStatus::InvalidArgument, "model is not a Borel model".into()));
        }
        let r = borel_sum(m, Complex64::new(z.re, z.im), lateral_of(lateral)?)?;
        store_value(out, r.value, r.error_estimate)
    })
}
