//! C ABI for the collatz-slots library.
//!
//! Conventions:
//!
//! * Every fallible call returns a [`CzStatus`]; results come back
//!   through out-pointers, which are written only on `CZ_STATUS_OK`.
//! * Big integers and exact rationals cross the boundary as
//!   NUL-terminated decimal strings. Strings returned by the library
//!   are owned by the caller and must be released with
//!   [`cz_string_free`]; `cz_version` returns a static string that
//!   must not be freed.
//! * `CzOrbit` and `CzLevelSet` are opaque handles released with their
//!   matching `*_free` function. Passing NULL to a `*_free` is a no-op;
//!   passing NULL anywhere else yields `CZ_STATUS_NULL_POINTER`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use num_bigint::BigUint;

use collatz_slots::orbit::{trajectory, OrbitRecord};
use collatz_slots::scan::{scan_min_sigma, ScanDomain, ScanMode};
use collatz_slots::slots::slot_bounds;
use collatz_slots::steadiness::{identity_with, sigma_literal, sigma_telescoping};
use collatz_slots::{levels, Error, ExactRatio, LevelSet};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CzStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument failed to parse or violated a documented precondition.
    InvalidInput = 2,
    /// The orbit did not reach 1 within the step cap.
    CapExceeded = 3,
    /// An index was past the end of the collection.
    OutOfRange = 4,
    /// An unexpected internal failure; the out-pointers are untouched.
    Internal = 5,
}

/// Steadiness variant selector.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CzSigmaMode {
    /// Product over orbit-set elements congruent to 4 mod 6.
    Literal = 0,
    /// Product over images of odd steps only.
    Telescoping = 1,
}

/// Opaque handle to a computed orbit.
pub struct CzOrbit {
    record: OrbitRecord,
}

/// Opaque handle to a level set.
pub struct CzLevelSet {
    level: LevelSet,
}

fn status_of(err: &Error) -> CzStatus {
    match err {
        Error::OrbitCapExceeded { .. } => CzStatus::CapExceeded,
        Error::InvalidInput(_) => CzStatus::InvalidInput,
        _ => CzStatus::Internal,
    }
}

fn guarded(f: impl FnOnce() -> CzStatus) -> CzStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(CzStatus::Internal)
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated string.
unsafe fn parse_c_str<T: FromStr>(ptr: *const c_char) -> Result<T, CzStatus> {
    if ptr.is_null() {
        return Err(CzStatus::NullPointer);
    }
    let text = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| CzStatus::InvalidInput)?;
    T::from_str(text).map_err(|_| CzStatus::InvalidInput)
}

fn export_string(s: String, out: *mut *mut c_char) -> CzStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CzStatus::Ok
        }
        Err(_) => CzStatus::Internal,
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn cz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned through an
/// out-parameter of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes the orbit of `n` (decimal string, >= 1) down to 1, stopping
/// with `CZ_STATUS_CAP_EXCEEDED` after `cap` steps.
///
/// # Safety
/// `n` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_compute(
    n: *const c_char,
    cap: u64,
    out: *mut *mut CzOrbit,
) -> CzStatus {
    if out.is_null() {
        return CzStatus::NullPointer;
    }
    let n: BigUint = match parse_c_str(n) {
        Ok(v) => v,
        Err(s) => return s,
    };
    guarded(|| match trajectory(&n, cap) {
        Ok(record) => {
            *out = Box::into_raw(Box::new(CzOrbit { record }));
            CzStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// # Safety
/// `orbit` must be a live handle from `cz_orbit_compute`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_nu(orbit: *const CzOrbit, out: *mut u64) -> CzStatus {
    if orbit.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    *out = (*orbit).record.nu;
    CzStatus::Ok
}

/// # Safety
/// `orbit` must be a live handle from `cz_orbit_compute`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_kappa(orbit: *const CzOrbit, out: *mut u64) -> CzStatus {
    if orbit.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    *out = (*orbit).record.kappa;
    CzStatus::Ok
}

/// Exact steadiness of the orbit in the chosen variant, returned as two
/// decimal strings (numerator, denominator) of the reduced fraction.
///
/// # Safety
/// `orbit` must be a live handle; `out_num` and `out_den` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_sigma(
    orbit: *const CzOrbit,
    mode: CzSigmaMode,
    out_num: *mut *mut c_char,
    out_den: *mut *mut c_char,
) -> CzStatus {
    if orbit.is_null() || out_num.is_null() || out_den.is_null() {
        return CzStatus::NullPointer;
    }
    guarded(|| {
        let value = match mode {
            CzSigmaMode::Literal => sigma_literal(&(*orbit).record),
            CzSigmaMode::Telescoping => sigma_telescoping(&(*orbit).record),
        };
        let status = export_string(value.exact.num().to_string(), out_num);
        if status != CzStatus::Ok {
            return status;
        }
        let status = export_string(value.exact.den().to_string(), out_den);
        if status != CzStatus::Ok {
            cz_string_free(*out_num);
        }
        status
    })
}

/// Writes 1 to `out` when `n = (2^nu / 6^kappa) * sigma` holds exactly
/// for the chosen variant, 0 otherwise. The telescoping variant always
/// holds; the literal variant need not.
///
/// # Safety
/// `orbit` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_identity_holds(
    orbit: *const CzOrbit,
    mode: CzSigmaMode,
    out: *mut u8,
) -> CzStatus {
    if orbit.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    guarded(|| {
        let record = &(*orbit).record;
        let value = match mode {
            CzSigmaMode::Literal => sigma_literal(record),
            CzSigmaMode::Telescoping => sigma_telescoping(record),
        };
        *out = identity_with(record, &value.exact).holds() as u8;
        CzStatus::Ok
    })
}

/// # Safety
/// `orbit` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cz_orbit_free(orbit: *mut CzOrbit) {
    if !orbit.is_null() {
        drop(Box::from_raw(orbit));
    }
}

/// Generates the level set L_nu.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_levelset_compute(nu: u32, out: *mut *mut CzLevelSet) -> CzStatus {
    if out.is_null() {
        return CzStatus::NullPointer;
    }
    guarded(|| {
        let level = levels::level(nu);
        *out = Box::into_raw(Box::new(CzLevelSet { level }));
        CzStatus::Ok
    })
}

/// # Safety
/// `levelset` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_levelset_nu(levelset: *const CzLevelSet, out: *mut u32) -> CzStatus {
    if levelset.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    *out = (*levelset).level.nu;
    CzStatus::Ok
}

/// # Safety
/// `levelset` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_levelset_len(levelset: *const CzLevelSet, out: *mut usize) -> CzStatus {
    if levelset.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    *out = (*levelset).level.len();
    CzStatus::Ok
}

/// Element at `index` (ascending order) as a decimal string.
///
/// # Safety
/// `levelset` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cz_levelset_element(
    levelset: *const CzLevelSet,
    index: usize,
    out: *mut *mut c_char,
) -> CzStatus {
    if levelset.is_null() || out.is_null() {
        return CzStatus::NullPointer;
    }
    match (&(*levelset).level.elements).get(index) {
        Some(e) => export_string(e.to_string(), out),
        None => CzStatus::OutOfRange,
    }
}

/// # Safety
/// `levelset` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cz_levelset_free(levelset: *mut CzLevelSet) {
    if !levelset.is_null() {
        drop(Box::from_raw(levelset));
    }
}

/// Running-minimum steadiness scan over the integers in [lo, hi].
/// Writes the reduced minimum as decimal numerator/denominator strings
/// and its smallest attaining argument.
///
/// # Safety
/// The three out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cz_scan_min(
    lo: u64,
    hi: u64,
    mode: CzSigmaMode,
    cap: u64,
    out_num: *mut *mut c_char,
    out_den: *mut *mut c_char,
    out_argmin: *mut *mut c_char,
) -> CzStatus {
    if out_num.is_null() || out_den.is_null() || out_argmin.is_null() {
        return CzStatus::NullPointer;
    }
    if lo == 0 || hi < lo {
        return CzStatus::InvalidInput;
    }
    guarded(|| {
        let scan_mode = match mode {
            CzSigmaMode::Literal => ScanMode::Literal,
            CzSigmaMode::Telescoping => ScanMode::Telescoping,
        };
        let cp = match scan_min_sigma(&ScanDomain::integers(lo, hi), scan_mode, cap, None, 1) {
            Ok(cp) => cp,
            Err(e) => return status_of(&e),
        };
        let entry = match mode {
            CzSigmaMode::Literal => cp.min_literal,
            CzSigmaMode::Telescoping => cp.min_telescoping,
        };
        let entry = match entry {
            Some(e) => e,
            // Every input exceeded the cap, so no minimum exists.
            None => return CzStatus::CapExceeded,
        };
        let status = export_string(entry.value.num().to_string(), out_num);
        if status != CzStatus::Ok {
            return status;
        }
        let status = export_string(entry.value.den().to_string(), out_den);
        if status != CzStatus::Ok {
            cz_string_free(*out_num);
            return status;
        }
        let status = export_string(entry.argmin.to_string(), out_argmin);
        if status != CzStatus::Ok {
            cz_string_free(*out_num);
            cz_string_free(*out_den);
        }
        status
    })
}

/// Slot bounds [sigma0 * 2^nu / 6^kappa, 2^nu / 6^kappa] for the exact
/// `sigma0` given as "<num>/<den>". Both bounds come back in the same
/// "<num>/<den>" form.
///
/// # Safety
/// `sigma0` must be a valid NUL-terminated string; the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn cz_slot_bounds(
    nu: u32,
    kappa: u32,
    sigma0: *const c_char,
    out_lower: *mut *mut c_char,
    out_upper: *mut *mut c_char,
) -> CzStatus {
    if out_lower.is_null() || out_upper.is_null() {
        return CzStatus::NullPointer;
    }
    let sigma0: ExactRatio = match parse_c_str(sigma0) {
        Ok(v) => v,
        Err(s) => return s,
    };
    guarded(|| {
        let slot = match slot_bounds(nu, kappa, &sigma0) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let status = export_string(slot.lower.to_string(), out_lower);
        if status != CzStatus::Ok {
            return status;
        }
        let status = export_string(slot.upper.to_string(), out_upper);
        if status != CzStatus::Ok {
            cz_string_free(*out_lower);
        }
        status
    })
}
