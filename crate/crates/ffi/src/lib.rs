//! C ABI over `weil_lab`.
//!
//! Every function returns a [`WlStatus`]. On failure a message is kept per
//! thread and can be copied out with [`wl_last_error_message`]. Handles are
//! opaque and must be released with the matching `_free` function.
//! Complex arrays are interleaved `re, im` doubles; matrices are row-major.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use weil_lab::arith::ArithError;
use weil_lab::groups::{classify_prime, SymplecticVector};
use weil_lab::harness::PrimeContext;
use weil_lab::hecke::{eigenfunction, hecke_spectrum, HeckeSpectrum};
use weil_lab::{
    CatMap, EnhancedLagrangian, Error, Frame, GroupError, HarnessError, HeckeError, ModelError, SympMatrix, TorusKind,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    Ramified = 4,
    NonRegular = 5,
    BufferTooSmall = 6,
    NoEigenfunction = 7,
    Degenerate = 8,
    Indeterminate = 9,
    Internal = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlTorusKind {
    Split = 0,
    Inert = 1,
    Ramified = 2,
}

impl From<TorusKind> for WlTorusKind {
    fn from(k: TorusKind) -> Self {
        match k {
            TorusKind::Split => WlTorusKind::Split,
            TorusKind::Inert => WlTorusKind::Inert,
            TorusKind::Ramified => WlTorusKind::Ramified,
        }
    }
}

/// One prime, one cat map, with the canonical intertwiners and the Hecke
/// torus already built.
pub struct WlLab {
    ctx: PrimeContext,
}

/// Character decomposition of one realization.
pub struct WlSpectrum {
    spectrum: HeckeSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn group_status(e: &GroupError) -> WlStatus {
    match e {
        GroupError::Arith(ArithError::NotOddPrime(_)) => WlStatus::NotPrime,
        GroupError::Ramified(_) => WlStatus::Ramified,
        GroupError::NonRegular(_) => WlStatus::NonRegular,
        GroupError::Arith(_) | GroupError::TorusOrder { .. } | GroupError::NoGenerator(_) => WlStatus::Internal,
        _ => WlStatus::InvalidArgument,
    }
}

fn model_status(e: &ModelError) -> WlStatus {
    match e {
        ModelError::Arith(ArithError::NotOddPrime(_)) => WlStatus::NotPrime,
        ModelError::Group(g) => group_status(g),
        ModelError::Dimension { .. } | ModelError::FieldMismatch(..) | ModelError::BadComplement { .. } => {
            WlStatus::InvalidArgument
        }
        _ => WlStatus::Internal,
    }
}

fn status_of(e: &Error) -> WlStatus {
    match e {
        Error::Arith(ArithError::NotOddPrime(_)) => WlStatus::NotPrime,
        Error::Arith(_) => WlStatus::InvalidArgument,
        Error::Group(g) | Error::Harness(HarnessError::Group(g)) => group_status(g),
        Error::Model(m) | Error::Harness(HarnessError::Model(m)) | Error::Hecke(HeckeError::Model(m)) => {
            model_status(m)
        }
        Error::Hecke(h) | Error::Harness(HarnessError::Hecke(h)) => match h {
            HeckeError::Model(m) => model_status(m),
            HeckeError::Empty(_) => WlStatus::NoEigenfunction,
            HeckeError::Degenerate { .. } => WlStatus::Degenerate,
            HeckeError::Indeterminate(_) => WlStatus::Indeterminate,
            _ => WlStatus::InvalidArgument,
        },
        Error::Harness(_) => WlStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (WlStatus, String)>) -> WlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside weil-lab".into());
            WlStatus::Panic
        }
    }
}

fn fail<E: Into<Error>>(e: E) -> (WlStatus, String) {
    let e = e.into();
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WlStatus, String) {
    (WlStatus::NullPointer, format!("{what} is null"))
}

fn cat_map(a: i64, b: i64, c: i64, d: i64) -> Result<CatMap, (WlStatus, String)> {
    CatMap::new(a, b, c, d).map_err(fail)
}

fn write_complex(
    values: impl ExactSizeIterator<Item = Complex64>,
    out: *mut f64,
    len: usize,
) -> Result<(), (WlStatus, String)> {
    let need = 2 * values.len();
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < need {
        return Err((
            WlStatus::BufferTooSmall,
            format!("buffer holds {len} doubles, need {need}"),
        ));
    }
    // SAFETY: caller guarantees `out` points to `len` writable doubles.
    let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
    for (i, z) in values.enumerate() {
        buf[2 * i] = z.re;
        buf[2 * i + 1] = z.im;
    }
    Ok(())
}

/// Copies the last error message of this thread, NUL-terminated and
/// truncated to `len`. Returns the full length including the terminator, so
/// a call with `len = 0` sizes the buffer.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Splitting type of `p` for the cat map [[a, b], [c, d]].
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_classify(a: i64, b: i64, c: i64, d: i64, p: u32, out: *mut WlTorusKind) -> WlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = classify_prime(&cat_map(a, b, c, d)?, p).map_err(fail)?;
        *out = kind.into();
        Ok(())
    })
}

/// Builds the laboratory for the cat map [[a, b], [c, d]] at a non-ramified
/// odd prime `p`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_lab_new(a: i64, b: i64, c: i64, d: i64, p: u32, out: *mut *mut WlLab) -> WlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ctx = PrimeContext::new(&cat_map(a, b, c, d)?, p).map_err(fail)?;
        *out = Box::into_raw(Box::new(WlLab { ctx }));
        Ok(())
    })
}

/// # Safety
/// `lab` must be null or a handle from [`wl_lab_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wl_lab_free(lab: *mut WlLab) {
    if !lab.is_null() {
        drop(Box::from_raw(lab));
    }
}

/// # Safety
/// `lab` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_lab_prime(lab: *const WlLab, out: *mut u32) -> WlStatus {
    guard(|| {
        let lab = lab.as_ref().ok_or_else(|| null("lab"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lab.ctx.system.modulus();
        Ok(())
    })
}

/// # Safety
/// `lab` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_lab_kind(lab: *const WlLab, out: *mut WlTorusKind) -> WlStatus {
    guard(|| {
        let lab = lab.as_ref().ok_or_else(|| null("lab"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lab.ctx.torus.kind().into();
        Ok(())
    })
}

/// Order of the Hecke torus, which is the number of characters.
///
/// # Safety
/// `lab` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_lab_torus_order(lab: *const WlLab, out: *mut usize) -> WlStatus {
    guard(|| {
        let lab = lab.as_ref().ok_or_else(|| null("lab"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lab.ctx.torus.order();
        Ok(())
    })
}

fn frame_for(lab: &WlLab, x: i64, y: i64) -> Result<Frame, (WlStatus, String)> {
    let p = lab.ctx.system.modulus();
    let l = EnhancedLagrangian::new(SymplecticVector::from_ints(x, y, p)).map_err(fail)?;
    Ok(Frame::standard(l))
}

/// Writes the p×p Weil operator of g = [[a, b], [c, d]] (mod p, det 1) in the
/// realization σ = (sigma_x, sigma_y). `out` needs 2·p² doubles.
///
/// # Safety
/// `lab` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_weil_operator(
    lab: *const WlLab,
    sigma_x: i64,
    sigma_y: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    out: *mut f64,
    len: usize,
) -> WlStatus {
    guard(|| {
        let lab = lab.as_ref().ok_or_else(|| null("lab"))?;
        let p = lab.ctx.system.modulus();
        let frame = frame_for(lab, sigma_x, sigma_y)?;
        let g = SympMatrix::from_ints(a, b, c, d, p).map_err(fail)?;
        let m = lab.ctx.system.weil_op(&frame, &g).matrix;
        let n = p as usize;
        write_complex((0..n * n).map(|i| m[(i / n, i % n)]), out, len)
    })
}

/// Decomposes the realization σ = (sigma_x, sigma_y) into Hecke character
/// spaces.
///
/// # Safety
/// `lab` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_spectrum_new(
    lab: *const WlLab,
    sigma_x: i64,
    sigma_y: i64,
    out: *mut *mut WlSpectrum,
) -> WlStatus {
    guard(|| {
        let lab = lab.as_ref().ok_or_else(|| null("lab"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let frame = frame_for(lab, sigma_x, sigma_y)?;
        let spectrum = hecke_spectrum(&lab.ctx.system, &lab.ctx.torus, &frame).map_err(fail)?;
        *out = Box::into_raw(Box::new(WlSpectrum { spectrum }));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be null or a handle from [`wl_spectrum_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wl_spectrum_free(spectrum: *mut WlSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Multiplicity of character `k`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wl_spectrum_multiplicity(spectrum: *const WlSpectrum, k: usize, out: *mut usize) -> WlStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let space = s.spectrum.spaces.get(k).ok_or_else(|| {
            (
                WlStatus::InvalidArgument,
                format!("character {k} out of range 0..{}", s.spectrum.spaces.len()),
            )
        })?;
        if space.indeterminate {
            return Err((WlStatus::Indeterminate, format!("character {k} has ambiguous rank")));
        }
        *out = space.multiplicity;
        Ok(())
    })
}

/// Eigenfunction of a multiplicity-one character, normalized to ‖Ψ‖² = p
/// with the first nonzero amplitude real positive. `out` needs 2·p doubles.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_spectrum_eigenfunction(
    spectrum: *const WlSpectrum,
    k: usize,
    out: *mut f64,
    len: usize,
) -> WlStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if k >= s.spectrum.spaces.len() {
            return Err((
                WlStatus::InvalidArgument,
                format!("character {k} out of range 0..{}", s.spectrum.spaces.len()),
            ));
        }
        let psi = eigenfunction(&s.spectrum, k).map_err(fail)?;
        write_complex(psi.amplitudes().iter().copied(), out, len)
    })
}
