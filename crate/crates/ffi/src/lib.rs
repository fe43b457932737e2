//! C ABI for the logpot library.
//!
//! Every fallible function returns an [`LpStatus`]; on failure the message is
//! available from [`lp_last_error`] on the same thread. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`
//! function. Strings returned through `char **` are released with
//! [`lp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use logpot::cli::{parse_shape, run_experiment, ExperimentName};
use logpot::disc_spectrum::{neg_eig, top3};
use logpot::geom2d::io::{mask_from_text, mask_to_text};
use logpot::geom2d::{polarize_set, schwarz_set, GridNormal, PixelMask, Polarizer};
use logpot::solver::{solve, KernelSpec, SpectralResult};
use logpot::tdiam::tdiam_estimate;
use logpot::{Error, ErrorKind};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad input: shape, spacing, kernel, config, index.
    Validation = 3,
    /// An iterative method did not converge.
    Numerical = 4,
    Io = 5,
    /// The caller's buffer is shorter than the data.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Lattice-compatible half-plane normals.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpGridNormal {
    PosX = 0,
    NegX = 1,
    PosY = 2,
    NegY = 3,
    PosDiag = 4,
    NegDiag = 5,
    PosAnti = 6,
    NegAnti = 7,
}

fn normal_arg(n: i32) -> Result<GridNormal, Fail> {
    usize::try_from(n)
        .ok()
        .and_then(|i| GridNormal::ALL.get(i).copied())
        .ok_or_else(|| Fail::Status(LpStatus::Validation, format!("grid normal {n} is not an LpGridNormal value")))
}

/// Opaque pixel mask.
pub struct LpMask(Arc<PixelMask>);

/// Opaque extreme spectrum of a mask.
pub struct LpSpectrum(SpectralResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LpStatus {
    match e.kind() {
        ErrorKind::Validation => LpStatus::Validation,
        ErrorKind::Numerical => LpStatus::Numerical,
        ErrorKind::Io => LpStatus::Io,
    }
}

enum Fail {
    Status(LpStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Run `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LpStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside logpot".into());
            LpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(LpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(LpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn mask_arg<'a>(p: *const LpMask) -> Result<&'a LpMask, Fail> {
    p.as_ref().ok_or_else(|| null("mask"))
}

unsafe fn spectrum_arg<'a>(p: *const LpSpectrum) -> Result<&'a LpSpectrum, Fail> {
    p.as_ref().ok_or_else(|| null("spectrum"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Status(LpStatus::Validation, "string holds a NUL byte".into()))?;
    put(out, c.into_raw())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Rasterize a shape given as JSON or shorthand (`"disc:1"`) at spacing `h`.
///
/// # Safety
/// `shape` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_from_shape(shape: *const c_char, h: f64, out: *mut *mut LpMask) -> LpStatus {
    guard(|| {
        let s = parse_shape(str_arg(shape, "shape")?)?;
        let m = PixelMask::rasterize(&s, h)?;
        put(out, Box::into_raw(Box::new(LpMask(Arc::new(m)))))
    })
}

/// Parse the mask text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_from_text(text: *const c_char, out: *mut *mut LpMask) -> LpStatus {
    guard(|| {
        let m = mask_from_text(str_arg(text, "text")?)?;
        put(out, Box::into_raw(Box::new(LpMask(Arc::new(m)))))
    })
}

/// # Safety
/// `mask` must be a live handle; `out` receives a string for [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_mask_to_text(mask: *const LpMask, out: *mut *mut c_char) -> LpStatus {
    guard(|| put_string(out, mask_to_text(&mask_arg(mask)?.0)))
}

/// Number of active cells, 0 for a null handle.
///
/// # Safety
/// `mask` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_cell_count(mask: *const LpMask) -> usize {
    mask.as_ref().map_or(0, |m| m.0.active_count())
}

/// Grid spacing, NaN for a null handle.
///
/// # Safety
/// `mask` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_h(mask: *const LpMask) -> f64 {
    mask.as_ref().map_or(f64::NAN, |m| m.0.h())
}

/// Polarize across the lattice line `x . a = k q`, where `q` is `h/2` for
/// axis normals and `h/sqrt 2` for diagonal ones. `normal` is an
/// [`LpGridNormal`] value; it travels as an int so that an out-of-range value
/// is an error rather than undefined behaviour.
///
/// # Safety
/// `mask` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_polarize(
    mask: *const LpMask,
    normal: i32,
    k: i64,
    out: *mut *mut LpMask,
) -> LpStatus {
    guard(|| {
        let m = &mask_arg(mask)?.0;
        let p = polarize_set(m, &Polarizer::grid(normal_arg(normal)?, k, m.h()))?;
        put(out, Box::into_raw(Box::new(LpMask(Arc::new(p)))))
    })
}

/// Discrete Schwarz symmetrization.
///
/// # Safety
/// `mask` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_schwarz(mask: *const LpMask, out: *mut *mut LpMask) -> LpStatus {
    guard(|| {
        let s = schwarz_set(&mask_arg(mask)?.0)?;
        put(out, Box::into_raw(Box::new(LpMask(Arc::new(s)))))
    })
}

/// # Safety
/// `mask` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lp_mask_free(mask: *mut LpMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// The `topk` largest eigenvalues and the smallest one. `kernel` is `"log"`
/// or `"riesz:<alpha>"`.
///
/// # Safety
/// `mask` must be a live handle, `kernel` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_solve(
    mask: *const LpMask,
    kernel: *const c_char,
    topk: usize,
    out: *mut *mut LpSpectrum,
) -> LpStatus {
    guard(|| {
        let k: KernelSpec = str_arg(kernel, "kernel")?.parse()?;
        let r = solve(&mask_arg(mask)?.0, &k, topk)?;
        put(out, Box::into_raw(Box::new(LpSpectrum(r))))
    })
}

/// Number of top eigenvalues held, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_top_count(s: *const LpSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.top.len())
}

/// The `i`-th largest eigenvalue and its residual (`residual` may be null).
///
/// # Safety
/// `s` must be a live handle; `tau` writable; `residual` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_top(s: *const LpSpectrum, i: usize, tau: *mut f64, residual: *mut f64) -> LpStatus {
    guard(|| {
        let p = spectrum_arg(s)?
            .0
            .top
            .get(i)
            .ok_or_else(|| Fail::Status(LpStatus::Validation, format!("index {i} out of range")))?;
        put(tau, p.tau)?;
        if !residual.is_null() {
            residual.write(p.residual);
        }
        Ok(())
    })
}

/// The smallest eigenvalue and its residual (`residual` may be null).
///
/// # Safety
/// `s` must be a live handle; `tau` writable; `residual` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_bottom(s: *const LpSpectrum, tau: *mut f64, residual: *mut f64) -> LpStatus {
    guard(|| {
        let p = &spectrum_arg(s)?.0.bottom;
        put(tau, p.tau)?;
        if !residual.is_null() {
            residual.write(p.residual);
        }
        Ok(())
    })
}

/// Copy eigenvector `i` into `buf` (cell order of the mask, normalized so
/// `h^2 sum v^2 = 1`). Index `top_count` selects the bottom eigenvector.
/// `len` must be at least the cell count; `written` (nullable) receives it.
///
/// # Safety
/// `s` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_vector(
    s: *const LpSpectrum,
    i: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> LpStatus {
    guard(|| {
        let r = &spectrum_arg(s)?.0;
        let p = if i < r.top.len() {
            &r.top[i]
        } else if i == r.top.len() {
            &r.bottom
        } else {
            return Err(Fail::Status(LpStatus::Validation, format!("index {i} out of range")));
        };
        let v = p.vector.values();
        if !written.is_null() {
            written.write(v.len());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < v.len() {
            return Err(Fail::Status(
                LpStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", v.len()),
            ));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// JSON summary of the spectrum, without vectors.
///
/// # Safety
/// `s` must be a live handle; `out` receives a string for [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_to_json(s: *const LpSpectrum, out: *mut *mut c_char) -> LpStatus {
    guard(|| {
        let j = serde_json::to_string(&spectrum_arg(s)?.0.summary()).map_err(Error::from)?;
        put_string(out, j)
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_free(s: *mut LpSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The three largest eigenvalues of the disc of radius `radius`, closed form.
///
/// # Safety
/// `out` must be valid for three doubles.
#[no_mangle]
pub unsafe extern "C" fn lp_disc_top3(radius: f64, out: *mut f64) -> LpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        for (k, e) in top3(radius)?.iter().enumerate() {
            out.add(k).write(e.tau);
        }
        Ok(())
    })
}

/// The negative eigenvalue of the disc; validation error for `radius <= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_disc_negative(radius: f64, out: *mut f64) -> LpStatus {
    guard(|| put(out, neg_eig(radius)?.tau))
}

/// Transfinite diameter of a shape (JSON or shorthand).
///
/// # Safety
/// `shape` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_tdiam(shape: *const c_char, out: *mut f64) -> LpStatus {
    guard(|| {
        let s = parse_shape(str_arg(shape, "shape")?)?;
        put(out, tdiam_estimate(&s)?)
    })
}

/// Run a named experiment (`"two_ball_sweep"`, ...) with a JSON config
/// (null or empty for defaults). `report` receives the JSON report.
///
/// # Safety
/// `name` must be a NUL-terminated string, `config` null or one, `report` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_experiment_run(
    name: *const c_char,
    config: *const c_char,
    seed: u64,
    report: *mut *mut c_char,
) -> LpStatus {
    guard(|| {
        let name: ExperimentName = str_arg(name, "name")?.parse()?;
        let cfg = if config.is_null() { "" } else { str_arg(config, "config")? };
        let rep = run_experiment(name, cfg, seed)?;
        put_string(report, serde_json::to_string(&rep).map_err(Error::from)?)
    })
}
