//! C ABI over `spherelab`.
//!
//! Every fallible function returns an [`SlStatus`]; on failure the message is
//! kept per thread and read with [`sl_last_error`]. Objects are opaque heap
//! handles released with their `_free` function. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spherelab::control::{gcc_classical, gcc_flow, Region, Verdict};
use spherelab::geom::UnitVector3;
use spherelab::harmonics::HarmonicExpansion;
use spherelab::observability::cluster_min_mass;
use spherelab::operator::{assemble, diagonalize, region_projector, SpectralDecomposition};
use spherelab::radon::radon;
use spherelab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    Numerical = 4,
    Cluster = 5,
    Parse = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlVerdict {
    Empty = 0,
    Nonempty = 1,
    Undecided = 2,
}

/// Real spherical-harmonic expansion.
pub struct SlExpansion(HarmonicExpansion);

/// Eigendecomposition of `−Δ/2 + V`.
pub struct SlSpectrum(SpectralDecomposition);

/// Region of the sphere built from caps.
pub struct SlRegion(Region);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::BudgetExceeded { .. } => SlStatus::BudgetExceeded,
        Error::NumericalBreakdown(_)
        | Error::EigenNonConvergence { .. }
        | Error::UnderResolved { .. }
        | Error::FlowStepRejected { .. } => SlStatus::Numerical,
        Error::ClusterOverlap { .. } | Error::ClusterCount { .. } | Error::ClusterNotRetained { .. } => {
            SlStatus::Cluster
        }
        Error::RegionParse { .. } | Error::Json { .. } => SlStatus::Parse,
        Error::Io { .. } => SlStatus::Io,
        _ => SlStatus::InvalidArgument,
    }
}

enum Failure {
    Status(SlStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(SlStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, message))) => {
            set_error(message);
            s
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {message}"));
            SlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn unit(x: f64, y: f64, z: f64) -> Result<UnitVector3, Failure> {
    UnitVector3::try_new([x, y, z].into()).map_err(|e| Failure::Status(SlStatus::InvalidArgument, e.to_string()))
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an expansion from `n` terms `coef[i]·Y_{l[i], m[i]}`.
///
/// # Safety
/// The three arrays must hold `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_expansion_from_terms(
    l: *const usize,
    m: *const i64,
    coef: *const f64,
    n: usize,
    out: *mut *mut SlExpansion,
) -> SlStatus {
    guard(|| {
        let (l, m, coef) = (slice(l, n, "l")?, slice(m, n, "m")?, slice(coef, n, "coef")?);
        let v = if n == 0 {
            HarmonicExpansion::zeros(0)
        } else {
            HarmonicExpansion::from_terms((0..n).map(|i| (l[i], m[i], coef[i])))?
        };
        write_out(out, Box::into_raw(Box::new(SlExpansion(v))), "out")
    })
}

/// # Safety
/// `v` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_expansion_free(v: *mut SlExpansion) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `v` must be a live expansion and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_expansion_evaluate(v: *const SlExpansion, x: f64, y: f64, z: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let v = deref(v, "expansion")?;
        let p = unit(x, y, z)?;
        write_out(out, v.0.evaluate(&p), "out")
    })
}

/// Great-circle average of `v` over the circle with normal `(x, y, z)`.
///
/// # Safety
/// `v` must be a live expansion and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_radon(v: *const SlExpansion, x: f64, y: f64, z: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let v = deref(v, "expansion")?;
        let n = unit(x, y, z)?;
        write_out(out, radon(&v.0).evaluate(&n), "out")
    })
}

/// Assembles and diagonalizes `−Δ/2 + V` on degrees `≤ l_max`.
///
/// # Safety
/// `v` must be a live expansion and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_compute(v: *const SlExpansion, l_max: usize, out: *mut *mut SlSpectrum) -> SlStatus {
    guard(|| {
        let v = deref(v, "expansion")?;
        let s = diagonalize(&assemble(&v.0, l_max)?)?;
        write_out(out, Box::into_raw(Box::new(SlSpectrum(s))), "out")
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_free(s: *mut SlSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of eigenvalues, or 0 for a null handle.
///
/// # Safety
/// `s` must be a live spectrum or null.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_len(s: *const SlSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the ascending eigenvalues into `buf` of capacity `cap`.
///
/// # Safety
/// `s` must be a live spectrum and `buf` hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_eigenvalues(s: *const SlSpectrum, buf: *mut f64, cap: usize) -> SlStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let n = s.0.len();
        if cap < n {
            return Err(Failure::Status(
                SlStatus::BufferTooSmall,
                format!("need {n} slots, got {cap}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(s.0.eigenvalues.as_ptr(), buf, n);
        Ok(())
    })
}

/// Index range `[start, end)` of retained cluster `k`.
///
/// # Safety
/// `s` must be a live spectrum; `start` and `end` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_cluster(s: *const SlSpectrum, k: usize, start: *mut usize, end: *mut usize) -> SlStatus {
    guard(|| {
        let c = deref(s, "spectrum")?.0.cluster(k)?;
        write_out(start, c.range.start, "start")?;
        write_out(end, c.range.end, "end")
    })
}

/// Parses `cap(cx,cy,cz,alpha)`, `union(...)`, `inter(...)`, `compl(...)`,
/// `full` or `empty`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_region_parse(text: *const c_char, out: *mut *mut SlRegion) -> SlStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure::Status(SlStatus::Parse, format!("region text is not UTF-8: {e}")))?;
        let r = Region::parse(s)?;
        write_out(out, Box::into_raw(Box::new(SlRegion(r))), "out")
    })
}

/// # Safety
/// `r` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_region_free(r: *mut SlRegion) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live region and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_region_contains(r: *const SlRegion, x: f64, y: f64, z: f64, out: *mut bool) -> SlStatus {
    guard(|| {
        let r = deref(r, "region")?;
        let p = unit(x, y, z)?;
        write_out(out, r.0.contains(&p), "out")
    })
}

/// Smallest eigenfunction mass in the region per retained cluster. Writes up
/// to `cap` pairs into `ks`/`masses` and the cluster count into `count`.
///
/// # Safety
/// Handles must be live; `ks` and `masses` hold `cap` elements; `count` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_cluster_min_mass(
    s: *const SlSpectrum,
    r: *const SlRegion,
    ks: *mut usize,
    masses: *mut f64,
    cap: usize,
    count: *mut usize,
) -> SlStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        let r = deref(r, "region")?;
        let curve = cluster_min_mass(&s.0, &region_projector(&r.0, s.0.l_max)?)?;
        let n = curve.records.len();
        write_out(count, n, "count")?;
        if cap < n {
            return Err(Failure::Status(
                SlStatus::BufferTooSmall,
                format!("need {n} slots, got {cap}"),
            ));
        }
        if n > 0 && (ks.is_null() || masses.is_null()) {
            return Err(null("output buffer"));
        }
        for (i, rec) in curve.records.iter().enumerate() {
            ks.add(i).write(rec.k);
            masses.add(i).write(rec.min_mass);
        }
        Ok(())
    })
}

fn verdict(v: Verdict) -> SlVerdict {
    match v {
        Verdict::Empty => SlVerdict::Empty,
        Verdict::Nonempty => SlVerdict::Nonempty,
        Verdict::Undecided => SlVerdict::Undecided,
    }
}

/// Whether some great circle on a `grid`-point sweep misses the region.
///
/// # Safety
/// `r` must be a live region and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_gcc_classical(r: *const SlRegion, grid: usize, out: *mut SlVerdict) -> SlStatus {
    guard(|| {
        let r = deref(r, "region")?;
        write_out(out, verdict(gcc_classical(&r.0, grid).verdict), "out")
    })
}

/// Control condition along the flow of the great-circle average of `v` on `[−T, T]`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_gcc_flow(
    r: *const SlRegion,
    v: *const SlExpansion,
    horizon: f64,
    grid: usize,
    out: *mut SlVerdict,
) -> SlStatus {
    guard(|| {
        let r = deref(r, "region")?;
        let v = deref(v, "expansion")?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Failure::Status(
                SlStatus::InvalidArgument,
                format!("horizon {horizon} must be positive"),
            ));
        }
        write_out(out, verdict(gcc_flow(&r.0, &radon(&v.0), horizon, grid).verdict), "out")
    })
}
