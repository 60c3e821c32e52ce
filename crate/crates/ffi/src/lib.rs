//! C interface to `csg_core`.
//!
//! Instances and solutions are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns a
//! [`CsgStatus`]; the message of the most recent failure on the calling thread is
//! available from [`csg_last_error`]. Strings returned by the library are freed
//! with [`csg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use csg_core::dispatch::{solve_dispatch, DispatchConfig, SolveMode};
use csg_core::error::CsgError;
use csg_core::instance::{instance_from_str, instance_to_string, is_csg, solution_to_string, Edge, Instance, Solution};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or a document that does not describe a valid instance.
    InvalidInput = 3,
    InvalidArgument = 4,
    /// A solver declined the input because it exceeds a search limit.
    LimitExceeded = 5,
    /// The chosen mode does not apply to the instance.
    NotApplicable = 6,
    /// Buffer too small for the requested output.
    BufferTooSmall = 7,
    /// A solver produced an output that failed validation.
    Invariant = 8,
    Panic = 9,
}

/// Solver selection, mirroring the command line `--mode` values.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsgMode {
    Auto = 0,
    Exact2 = 1,
    A1 = 2,
    A2 = 3,
    Pairing = 4,
    Dp = 5,
    Oracle = 6,
}

impl From<CsgMode> for SolveMode {
    fn from(m: CsgMode) -> Self {
        match m {
            CsgMode::Auto => SolveMode::Auto,
            CsgMode::Exact2 => SolveMode::Exact2,
            CsgMode::A1 => SolveMode::A1,
            CsgMode::A2 => SolveMode::A2,
            CsgMode::Pairing => SolveMode::Pairing,
            CsgMode::Dp => SolveMode::Dp,
            CsgMode::Oracle => SolveMode::Oracle,
        }
    }
}

/// Opaque point set.
pub struct CsgInstance(Instance);

/// Opaque solver output.
pub struct CsgSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &CsgError) -> CsgStatus {
    match e {
        CsgError::LimitExceeded { .. } => CsgStatus::LimitExceeded,
        CsgError::NotApplicable(_) => CsgStatus::NotApplicable,
        CsgError::InvalidArgument(_) => CsgStatus::InvalidArgument,
        CsgError::Invariant(_) => CsgStatus::Invariant,
        _ => CsgStatus::InvalidInput,
    }
}

fn guard<F: FnOnce() -> Result<(), (CsgStatus, String)>>(f: F) -> CsgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside csg");
            CsgStatus::Panic
        }
    }
}

fn fail(e: CsgError) -> (CsgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (CsgStatus, String) {
    (CsgStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (CsgStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (CsgStatus::InvalidUtf8, "string is not UTF-8".into()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread. Valid until the next failing
/// call on the same thread; empty if nothing has failed.
#[no_mangle]
pub extern "C" fn csg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an instance document (`{"k": .., "points": [{"x", "y", "colors"}]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn csg_instance_from_json(json: *const c_char, out: *mut *mut CsgInstance) -> CsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let inst = instance_from_str(read_str(json)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(CsgInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from [`csg_instance_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn csg_instance_free(inst: *mut CsgInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn csg_instance_point_count(inst: *const CsgInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n())
}

/// Number of colors `k`, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn csg_instance_color_count(inst: *const CsgInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.k())
}

/// Serializes the instance; free the result with [`csg_string_free`].
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn csg_instance_to_json(inst: *const CsgInstance) -> *mut c_char {
    match inst.as_ref() {
        Some(i) => into_c_string(instance_to_string(&i.0)),
        None => ptr::null_mut(),
    }
}

/// Runs a solver with default limits. The result has been validated.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn csg_solve(inst: *const CsgInstance, mode: CsgMode, out: *mut *mut CsgSolution) -> CsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let inst = inst.as_ref().ok_or_else(null)?;
        let sol = solve_dispatch(&inst.0, mode.into(), &DispatchConfig::default()).map_err(fail)?;
        *out = Box::into_raw(Box::new(CsgSolution(sol)));
        Ok(())
    })
}

/// # Safety
/// `sol` must come from [`csg_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_free(sol: *mut CsgSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Total edge length, NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_cost(sol: *const CsgSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.cost)
}

/// Certified approximation ratio, NaN when the algorithm has none.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_ratio_bound(sol: *const CsgSolution) -> f64 {
    sol.as_ref().and_then(|s| s.0.ratio_bound).unwrap_or(f64::NAN)
}

/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_edge_count(sol: *const CsgSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.edges.len())
}

/// Copies the edges as index pairs `a0, b0, a1, b1, ...` into `buf`, which must
/// hold `2 * csg_solution_edge_count(sol)` entries.
///
/// # Safety
/// `sol` must be a live solution handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_edges(sol: *const CsgSolution, buf: *mut usize, cap: usize) -> CsgStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(null)?;
        let need = 2 * sol.0.edges.len();
        if need == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null());
        }
        if cap < need {
            return Err((CsgStatus::BufferTooSmall, format!("need {need} entries, got {cap}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (i, e) in sol.0.edges.iter().enumerate() {
            out[2 * i] = e.a;
            out[2 * i + 1] = e.b;
        }
        Ok(())
    })
}

/// Serializes the solution; free the result with [`csg_string_free`].
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn csg_solution_to_json(sol: *const CsgSolution) -> *mut c_char {
    match sol.as_ref() {
        Some(s) => into_c_string(solution_to_string(&s.0)),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn csg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether the `count` edges in `pairs` (`a0, b0, ...`) connect every color
/// class: 1 if so, 0 if not, -1 on a bad argument.
///
/// # Safety
/// `inst` must be a live instance handle and `pairs` valid for `2 * count` reads.
#[no_mangle]
pub unsafe extern "C" fn csg_is_csg(inst: *const CsgInstance, pairs: *const usize, count: usize) -> c_int {
    let mut answer = -1;
    let status = guard(|| {
        let inst = inst.as_ref().ok_or_else(null)?;
        if count > 0 && pairs.is_null() {
            return Err(null());
        }
        let raw = if count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(pairs, 2 * count)
        };
        let n = inst.0.n();
        let mut edges = Vec::with_capacity(count);
        for p in raw.chunks_exact(2) {
            if p[0] >= n || p[1] >= n || p[0] == p[1] {
                return Err((CsgStatus::InvalidArgument, format!("bad edge ({}, {})", p[0], p[1])));
            }
            edges.push(Edge::new(p[0], p[1]));
        }
        answer = is_csg(&inst.0, &edges) as c_int;
        Ok(())
    });
    if status == CsgStatus::Ok {
        answer
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{"k":2,"points":[
        {"x":0,"y":0,"colors":[1,2]},{"x":1,"y":0,"colors":[1]},{"x":0,"y":1,"colors":[2]}]}"#;

    fn load(json: &str) -> (CsgStatus, *mut CsgInstance) {
        let c = CString::new(json).unwrap();
        let mut h = ptr::null_mut();
        let st = unsafe { csg_instance_from_json(c.as_ptr(), &mut h) };
        (st, h)
    }

    #[test]
    fn round_trip() {
        let (st, inst) = load(TRIANGLE);
        assert_eq!(st, CsgStatus::Ok);
        unsafe {
            assert_eq!(csg_instance_point_count(inst), 3);
            assert_eq!(csg_instance_color_count(inst), 2);
            let mut sol = ptr::null_mut();
            assert_eq!(csg_solve(inst, CsgMode::Auto, &mut sol), CsgStatus::Ok);
            assert!((csg_solution_cost(sol) - 2.0).abs() < 1e-12);
            assert_eq!(csg_solution_ratio_bound(sol), 1.0);
            let m = csg_solution_edge_count(sol);
            let mut buf = vec![0usize; 2 * m];
            assert_eq!(csg_solution_edges(sol, buf.as_mut_ptr(), 1), CsgStatus::BufferTooSmall);
            assert_eq!(csg_solution_edges(sol, buf.as_mut_ptr(), buf.len()), CsgStatus::Ok);
            assert_eq!(buf, vec![0, 1, 0, 2]);
            assert_eq!(csg_is_csg(inst, buf.as_ptr(), m), 1);
            assert_eq!(csg_is_csg(inst, buf.as_ptr(), 1), 0);
            let bad = [0usize, 7];
            assert_eq!(csg_is_csg(inst, bad.as_ptr(), 1), -1);
            let js = csg_solution_to_json(sol);
            assert!(CStr::from_ptr(js).to_str().unwrap().contains("exact2"));
            csg_string_free(js);
            csg_solution_free(sol);
            csg_instance_free(inst);
        }
    }

    #[test]
    fn errors() {
        let (st, h) = load("{not json");
        assert_eq!(st, CsgStatus::InvalidInput);
        assert!(h.is_null());
        let msg = unsafe { CStr::from_ptr(csg_last_error()) }.to_str().unwrap();
        assert!(msg.contains("malformed"));
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { csg_instance_from_json(ptr::null(), &mut out) },
            CsgStatus::NullPointer
        );

        let (_, inst) = load(TRIANGLE);
        let mut sol = ptr::null_mut();
        assert_eq!(
            unsafe { csg_solve(inst, CsgMode::Dp, &mut sol) },
            CsgStatus::NotApplicable
        );
        assert!(sol.is_null());
        unsafe { csg_instance_free(inst) };
        assert!(unsafe { csg_solution_cost(ptr::null()) }.is_nan());
    }
}
