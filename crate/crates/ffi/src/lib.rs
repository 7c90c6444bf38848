//! C ABI over `skinfx`.
//!
//! Chains and spectra are opaque handles created by `skinfx_*_new`/`solve`
//! functions and released with the matching `_free`. Every fallible call
//! returns a [`SkinfxStatus`]; the message of the last failure on the
//! calling thread is available through [`skinfx_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use skinfx::bands::{critical_gamma, vorticity, DimerParams};
use skinfx::capmat::{chain_spectrum_auto, SpectralResult};
use skinfx::geometry::{chain_from_config, interface_chain, ChainSpec};
use skinfx::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkinfxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    NumericalFailure = 4,
    NoExceptionalPoint = 5,
    Panic = 6,
}

/// Opaque resonator chain.
pub struct SkinfxChain {
    inner: ChainSpec,
}

/// Opaque spectrum of one chain.
pub struct SkinfxSpectrum {
    inner: SpectralResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> SkinfxStatus {
    match err {
        Error::NoExceptionalPoint(_) => SkinfxStatus::NoExceptionalPoint,
        e if e.is_validation() => SkinfxStatus::InvalidArgument,
        _ => SkinfxStatus::NumericalFailure,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SkinfxStatus, String)>) -> SkinfxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SkinfxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside skinfx".into());
            SkinfxStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SkinfxStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SkinfxStatus, String) {
    (SkinfxStatus::NullPointer, format!("{what} is null"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn skinfx_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skinfx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a JSON chain configuration.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_chain_from_json(json: *const c_char, out: *mut *mut SkinfxChain) -> SkinfxStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (SkinfxStatus::InvalidArgument, e.to_string()))?;
        let chain = chain_from_config(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SkinfxChain { inner: chain }));
        Ok(())
    })
}

/// Uniform chain of `n` resonators.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_chain_uniform(
    n: usize,
    length: f64,
    spacing: f64,
    gamma: f64,
    delta: f64,
    v_b: f64,
    out: *mut *mut SkinfxChain,
) -> SkinfxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let chain = ChainSpec::uniform(n, length, spacing, gamma, delta, v_b).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SkinfxChain { inner: chain }));
        Ok(())
    })
}

/// Chain of `2n+1` resonators with `-gamma` on sites `1..n` and `+gamma`
/// on the rest.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_chain_interface(
    n: usize,
    gamma: f64,
    length: f64,
    spacing: f64,
    delta: f64,
    v_b: f64,
    out: *mut *mut SkinfxChain,
) -> SkinfxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let chain = interface_chain(n, gamma, length, spacing, delta, v_b).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SkinfxChain { inner: chain }));
        Ok(())
    })
}

/// Number of resonators, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skinfx_chain_len(chain: *const SkinfxChain) -> usize {
    chain.as_ref().map_or(0, |c| c.inner.len())
}

/// # Safety
/// `chain` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn skinfx_chain_free(chain: *mut SkinfxChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Eigenvalues, frequencies and eigenvectors of a chain.
///
/// # Safety
/// `chain` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_solve(chain: *const SkinfxChain, out: *mut *mut SkinfxSpectrum) -> SkinfxStatus {
    guard(|| {
        let chain = chain.as_ref().ok_or_else(|| null("chain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = chain_spectrum_auto(&chain.inner).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SkinfxSpectrum { inner: s }));
        Ok(())
    })
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_len(spec: *const SkinfxSpectrum) -> usize {
    spec.as_ref().map_or(0, |s| s.inner.len())
}

/// Eigenvalue `k` (sorted by real then imaginary part).
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_eigenvalue(spec: *const SkinfxSpectrum, k: usize, re: *mut f64, im: *mut f64) -> SkinfxStatus {
    mode_value(spec, k, re, im, |s, k| s.eigenvalues[k])
}

/// Frequency `ω_k = v_b √(δ λ_k)`.
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_omega(spec: *const SkinfxSpectrum, k: usize, re: *mut f64, im: *mut f64) -> SkinfxStatus {
    mode_value(spec, k, re, im, |s, k| s.omegas[k])
}

unsafe fn mode_value(
    spec: *const SkinfxSpectrum,
    k: usize,
    re: *mut f64,
    im: *mut f64,
    pick: impl FnOnce(&SpectralResult, usize) -> skinfx::C64,
) -> SkinfxStatus {
    guard(|| {
        let s = spec.as_ref().ok_or_else(|| null("spectrum"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        if k >= s.inner.len() {
            return Err((SkinfxStatus::OutOfRange, format!("mode {k} of {}", s.inner.len())));
        }
        let z = pick(&s.inner, k);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// `‖v_k‖∞ / ‖v_k‖₂` of mode `k`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_localization(spec: *const SkinfxSpectrum, k: usize, out: *mut f64) -> SkinfxStatus {
    guard(|| {
        let s = spec.as_ref().ok_or_else(|| null("spectrum"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = *s
            .inner
            .localization
            .get(k)
            .ok_or_else(|| (SkinfxStatus::OutOfRange, format!("mode {k} of {}", s.inner.len())))?;
        Ok(())
    })
}

/// Copies eigenvector `k` into `re[0..len]`, `im[0..len]`; `len` must equal
/// the number of resonators.
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_eigenvector(
    spec: *const SkinfxSpectrum,
    k: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SkinfxStatus {
    guard(|| {
        let s = spec.as_ref().ok_or_else(|| null("spectrum"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let n = s.inner.len();
        if k >= n || len != n {
            return Err((SkinfxStatus::OutOfRange, format!("mode {k}, buffer {len}, size {n}")));
        }
        for i in 0..n {
            let z = s.inner.eigenvectors[[i, k]];
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn skinfx_spectrum_free(spec: *mut SkinfxSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Critical gauge `γ_c(s1, s2)` of a periodic dimer.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_critical_gamma(s1: f64, s2: f64, out: *mut f64) -> SkinfxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = critical_gamma(s1, s2).map_err(lib_err)?;
        Ok(())
    })
}

/// Vorticity of a periodic dimer with unit lengths.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skinfx_vorticity(s1: f64, s2: f64, gamma: f64, samples: usize, out: *mut f64) -> SkinfxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = DimerParams::new(s1, s2, gamma).map_err(lib_err)?;
        *out = vorticity(&p, samples).map_err(lib_err)?.nu;
        Ok(())
    })
}
