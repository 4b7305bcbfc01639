//! C ABI for the charvar engine.
//!
//! Conventions:
//! - Every function returns an `int32_t` status code (`CHARVAR_OK` = 0 on
//!   success); output values are written through out-pointers.
//! - The fitted operator data is held behind the opaque handle
//!   `charvar_data`; free it with `charvar_data_free`.
//! - Strings returned through out-pointers are NUL-terminated, owned by the
//!   caller and must be released with `charvar_string_free`.
//! - On failure, `charvar_last_error_message` returns a thread-local,
//!   NUL-terminated description valid until the next charvar call on the
//!   same thread.
//!
//! The companion header is `include/charvar.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use charvar::eigen::EigenClass;
use charvar::ffcount::{GroupData, PunctureKind};
use charvar::formulas::char_class_closed;
use charvar::operators::{assemble_representation_class, OperatorData, SurfaceSpec};

pub const CHARVAR_OK: i32 = 0;
pub const CHARVAR_ERR_NULL_ARGUMENT: i32 = 1;
pub const CHARVAR_ERR_UTF8: i32 = 2;
pub const CHARVAR_ERR_PARSE: i32 = 3;
pub const CHARVAR_ERR_INVALID_SURFACE: i32 = 4;
pub const CHARVAR_ERR_OUT_OF_SCOPE: i32 = 5;
pub const CHARVAR_ERR_DATA: i32 = 6;
pub const CHARVAR_ERR_COUNT: i32 = 7;
pub const CHARVAR_ERR_INTERNAL: i32 = 8;

/// Opaque handle around the fitted operator data.
pub struct CharvarData {
    data: OperatorData,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn fail(code: i32, message: &str) -> i32 {
    set_error(message);
    code
}

fn guarded(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(CHARVAR_ERR_INTERNAL, "internal panic"),
    }
}

/// Last error message of the current thread; empty string if none. The
/// pointer stays valid until the next charvar call on this thread.
#[no_mangle]
pub extern "C" fn charvar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through a charvar out-pointer
/// (or null, in which case this is a no-op).
#[no_mangle]
pub unsafe extern "C" fn charvar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load the fitted operator data. `path` may be null to use the built-in
/// copy of data/operators.json.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn charvar_data_load(path: *const c_char, out: *mut *mut CharvarData) -> i32 {
    if out.is_null() {
        return fail(CHARVAR_ERR_NULL_ARGUMENT, "out pointer is null");
    }
    let path_buf = if path.is_null() {
        None
    } else {
        match CStr::from_ptr(path).to_str() {
            Ok(s) => Some(s.to_owned()),
            Err(_) => return fail(CHARVAR_ERR_UTF8, "path is not valid UTF-8"),
        }
    };
    guarded(
        || match OperatorData::load(path_buf.as_deref().map(Path::new)) {
            Ok(data) => {
                *out = Box::into_raw(Box::new(CharvarData { data }));
                CHARVAR_OK
            }
            Err(e) => fail(CHARVAR_ERR_DATA, &e.to_string()),
        },
    )
}

/// Release a data handle.
///
/// # Safety
/// `data` must come from `charvar_data_load` (or be null, a no-op).
#[no_mangle]
pub unsafe extern "C" fn charvar_data_free(data: *mut CharvarData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

unsafe fn parse_surface(
    genus: u32,
    jordan_plus: u32,
    jordan_minus: u32,
    minus_id: u32,
    eigenvalues: *const *const c_char,
    n_eigenvalues: usize,
) -> Result<SurfaceSpec, (i32, String)> {
    if n_eigenvalues > 0 && eigenvalues.is_null() {
        return Err((CHARVAR_ERR_NULL_ARGUMENT, "eigenvalue array is null".into()));
    }
    let mut items = Vec::with_capacity(n_eigenvalues);
    for i in 0..n_eigenvalues {
        let p = *eigenvalues.add(i);
        if p.is_null() {
            return Err((
                CHARVAR_ERR_NULL_ARGUMENT,
                format!("eigenvalue #{} is null", i + 1),
            ));
        }
        match CStr::from_ptr(p).to_str() {
            Ok(s) => items.push(s.to_owned()),
            Err(_) => {
                return Err((
                    CHARVAR_ERR_UTF8,
                    format!("eigenvalue #{} is not valid UTF-8", i + 1),
                ))
            }
        }
    }
    let semisimple =
        EigenClass::parse_list(&items).map_err(|e| (CHARVAR_ERR_PARSE, e.to_string()))?;
    Ok(SurfaceSpec {
        genus,
        r_plus: jordan_plus,
        r_minus: jordan_minus,
        minus_id,
        semisimple,
    })
}

unsafe fn emit_string(out: *mut *mut c_char, text: String) -> i32 {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            CHARVAR_OK
        }
        Err(_) => fail(CHARVAR_ERR_INTERNAL, "result contains a NUL byte"),
    }
}

/// Compute the virtual class of the representation variety; writes the
/// polynomial in q as a text string (for example "q^2 + 4q + 1").
///
/// # Safety
/// `data` must come from `charvar_data_load`; `eigenvalues` must point to
/// `n_eigenvalues` NUL-terminated strings; `out_class` must be valid.
#[no_mangle]
pub unsafe extern "C" fn charvar_compute_rep(
    data: *const CharvarData,
    genus: u32,
    jordan_plus: u32,
    jordan_minus: u32,
    minus_id: u32,
    eigenvalues: *const *const c_char,
    n_eigenvalues: usize,
    out_class: *mut *mut c_char,
) -> i32 {
    if data.is_null() || out_class.is_null() {
        return fail(CHARVAR_ERR_NULL_ARGUMENT, "data or out pointer is null");
    }
    let spec = match parse_surface(
        genus,
        jordan_plus,
        jordan_minus,
        minus_id,
        eigenvalues,
        n_eigenvalues,
    ) {
        Ok(s) => s,
        Err((code, msg)) => return fail(code, &msg),
    };
    guarded(|| {
        use charvar::operators::OperatorError as E;
        match assemble_representation_class(&spec, &(*data).data) {
            Ok(class) => emit_string(out_class, class.to_string()),
            Err(e @ E::OutOfScopeTwisted) => fail(CHARVAR_ERR_OUT_OF_SCOPE, &e.to_string()),
            Err(e @ E::InvalidSurface(_)) => fail(CHARVAR_ERR_INVALID_SURFACE, &e.to_string()),
            Err(e) => fail(CHARVAR_ERR_INTERNAL, &e.to_string()),
        }
    })
}

/// Compute the virtual class of the character variety via the closed
/// formulas (no operator data needed); writes the polynomial in q as a
/// text string.
///
/// # Safety
/// `eigenvalues` must point to `n_eigenvalues` NUL-terminated strings;
/// `out_class` must be valid.
#[no_mangle]
pub unsafe extern "C" fn charvar_compute_char(
    genus: u32,
    jordan_plus: u32,
    jordan_minus: u32,
    minus_id: u32,
    eigenvalues: *const *const c_char,
    n_eigenvalues: usize,
    out_class: *mut *mut c_char,
) -> i32 {
    if out_class.is_null() {
        return fail(CHARVAR_ERR_NULL_ARGUMENT, "out pointer is null");
    }
    let spec = match parse_surface(
        genus,
        jordan_plus,
        jordan_minus,
        minus_id,
        eigenvalues,
        n_eigenvalues,
    ) {
        Ok(s) => s,
        Err((code, msg)) => return fail(code, &msg),
    };
    guarded(|| {
        use charvar::formulas::FormulaError as E;
        match char_class_closed(&spec) {
            Ok(class) => emit_string(out_class, class.to_string()),
            Err(e @ E::OutOfScopeTwisted) => fail(CHARVAR_ERR_OUT_OF_SCOPE, &e.to_string()),
            Err(e @ (E::InvalidSurface(_) | E::TooManyPunctures(_) | E::BackendMismatch)) => {
                fail(CHARVAR_ERR_INVALID_SURFACE, &e.to_string())
            }
            Err(e) => fail(CHARVAR_ERR_INTERNAL, &e.to_string()),
        }
    })
}

/// Count points of the representation variety over the prime field F_p by
/// brute-force enumeration; writes the count as a decimal string.
/// Semisimple punctures are given by trace values mod p.
///
/// # Safety
/// `traces` must point to `n_traces` values (or be null when `n_traces` is
/// 0); `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn charvar_oracle_count(
    prime: u64,
    genus: u32,
    jordan_plus: u32,
    jordan_minus: u32,
    minus_id: u32,
    traces: *const u64,
    n_traces: usize,
    work_limit: u64,
    out_count: *mut *mut c_char,
) -> i32 {
    if out_count.is_null() || (n_traces > 0 && traces.is_null()) {
        return fail(CHARVAR_ERR_NULL_ARGUMENT, "out or trace pointer is null");
    }
    let mut punctures = Vec::new();
    punctures.extend(std::iter::repeat_n(
        PunctureKind::JordanPlus,
        jordan_plus as usize,
    ));
    punctures.extend(std::iter::repeat_n(
        PunctureKind::JordanMinus,
        jordan_minus as usize,
    ));
    punctures.extend(std::iter::repeat_n(
        PunctureKind::MinusId,
        minus_id as usize,
    ));
    for i in 0..n_traces {
        punctures.push(PunctureKind::Semisimple(*traces.add(i)));
    }
    guarded(|| {
        let group = match GroupData::new(prime) {
            Ok(g) => g,
            Err(e) => return fail(CHARVAR_ERR_COUNT, &e.to_string()),
        };
        match group.count_representation_points(genus, &punctures, work_limit) {
            Ok(count) => emit_string(out_count, count.to_string()),
            Err(e) => fail(CHARVAR_ERR_COUNT, &e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstrs(items: &[&str]) -> (Vec<CString>, Vec<*const c_char>) {
        let owned: Vec<CString> = items.iter().map(|s| CString::new(*s).unwrap()).collect();
        let ptrs: Vec<*const c_char> = owned.iter().map(|c| c.as_ptr()).collect();
        (owned, ptrs)
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
        charvar_string_free(p);
        s
    }

    #[test]
    fn compute_char_round_trip() {
        unsafe {
            let (_own, ptrs) = cstrs(&["sym:x1"]);
            let mut out: *mut c_char = ptr::null_mut();
            let code = charvar_compute_char(1, 0, 0, 0, ptrs.as_ptr(), 1, &mut out);
            assert_eq!(code, CHARVAR_OK);
            assert_eq!(take_string(out), "q^2 + 4q + 1");
        }
    }

    #[test]
    fn compute_rep_with_data_handle() {
        unsafe {
            let mut data: *mut CharvarData = ptr::null_mut();
            assert_eq!(charvar_data_load(ptr::null(), &mut data), CHARVAR_OK);
            let (_own, ptrs) = cstrs(&["sym:x1"]);
            let mut out: *mut c_char = ptr::null_mut();
            let code = charvar_compute_rep(data, 1, 0, 0, 0, ptrs.as_ptr(), 1, &mut out);
            assert_eq!(code, CHARVAR_OK);
            // q (q^2-1) (q^2+4q+1)
            assert_eq!(take_string(out), "q^5 + 4q^4 - 4q^2 - q");
            charvar_data_free(data);
        }
    }

    #[test]
    fn error_paths_set_messages() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            // sigma = -1 with no semisimple puncture is out of scope
            let code = charvar_compute_char(1, 0, 0, 1, ptr::null(), 0, &mut out);
            assert_eq!(code, CHARVAR_ERR_OUT_OF_SCOPE);
            let msg = CStr::from_ptr(charvar_last_error_message())
                .to_str()
                .unwrap();
            assert!(!msg.is_empty());

            let (_own, ptrs) = cstrs(&["garbage"]);
            let code = charvar_compute_char(1, 0, 0, 0, ptrs.as_ptr(), 1, &mut out);
            assert_eq!(code, CHARVAR_ERR_PARSE);

            let code = charvar_compute_char(1, 0, 0, 0, ptr::null(), 0, &mut out);
            assert_eq!(code, CHARVAR_ERR_OUT_OF_SCOPE);

            assert_eq!(
                charvar_compute_char(1, 0, 0, 0, ptr::null(), 0, ptr::null_mut()),
                CHARVAR_ERR_NULL_ARGUMENT
            );
        }
    }

    #[test]
    fn oracle_count_matches_known_value() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            let code = charvar_oracle_count(3, 1, 0, 0, 0, ptr::null(), 0, 1_000_000, &mut out);
            assert_eq!(code, CHARVAR_OK);
            // commuting pairs in SL(2, F_3): |G| = 24, count = 168
            assert_eq!(take_string(out), "168");

            let code = charvar_oracle_count(4, 1, 0, 0, 0, ptr::null(), 0, 1_000_000, &mut out);
            assert_eq!(code, CHARVAR_ERR_COUNT);
        }
    }
}
