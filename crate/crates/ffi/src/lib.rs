//! C interface to the fault-tolerant path solvers.
//!
//! Instances and solutions are opaque heap handles released with their
//! `_free` function. Every fallible call returns an [`FtpStatus`]; on
//! failure `ftp_last_error` describes the problem until the next call on the
//! same thread. Strings handed out by the library are released with
//! `ftp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ftp_core::cli::{solve_with, Algorithm, Caps, Outcome};
use ftp_core::document::{self, Format};
use ftp_core::frac::{gap_family, gap_report, solve_frac};
use ftp_core::{Error, Instance, Solution, Status};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpStatus {
    Ok = 0,
    Infeasible = 1,
    /// Malformed input or an instance that fails validation.
    InvalidInput = 2,
    /// The instance is outside the class the algorithm handles.
    NotApplicable = 3,
    CapsExceeded = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpAlgorithm {
    Auto = 0,
    Bipath = 1,
    Dag = 2,
    Srp = 3,
    ApproxK = 4,
    ApproxK1 = 5,
    Oracle = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtpFormat {
    Native = 0,
    Dimacs = 1,
}

pub struct FtpInstance(Instance);

pub struct FtpSolution {
    solution: Solution,
    solver: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(error: &Error) -> FtpStatus {
    match error {
        Error::Infeasible | Error::FlowInfeasible { .. } => FtpStatus::Infeasible,
        Error::WrongBudget { .. } | Error::RequiresDirected | Error::RequiresUndirected | Error::NotADag(_) | Error::NotSeriesParallel(_) => {
            FtpStatus::NotApplicable
        }
        e if e.is_cap_exceeded() => FtpStatus::CapsExceeded,
        _ => FtpStatus::InvalidInput,
    }
}

// Clears the last error, runs `f`, and turns errors and panics into codes.
fn guard(f: impl FnOnce() -> Result<(), FtpStatus>) -> FtpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtpStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            FtpStatus::Panic
        }
    }
}

fn fail(error: Error) -> FtpStatus {
    set_error(error.to_string());
    status_of(&error)
}

fn null(what: &str) -> FtpStatus {
    set_error(format!("{what} is null"));
    FtpStatus::NullPointer
}

unsafe fn instance_ref<'a>(p: *const FtpInstance) -> Result<&'a Instance, FtpStatus> {
    p.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ftp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ftp_instance_new(directed: bool, vertex_count: usize, s: usize, t: usize, k: usize) -> *mut FtpInstance {
    Box::into_raw(Box::new(FtpInstance(Instance::new(directed, vertex_count, s, t, k))))
}

/// Appends an edge; its id is written to `out_id` when non-null.
///
/// # Safety
/// `instance` must come from this library and not be freed.
#[no_mangle]
pub unsafe extern "C" fn ftp_instance_add_edge(instance: *mut FtpInstance, u: usize, v: usize, w: i64, faulty: bool, out_id: *mut usize) -> FtpStatus {
    guard(|| {
        let inst = &mut instance.as_mut().ok_or_else(|| null("instance"))?.0;
        if u >= inst.vertex_count || v >= inst.vertex_count {
            return Err(fail(Error::BadEndpoint { edge: inst.edge_count(), vertex: u.max(v) }));
        }
        if w < 0 {
            return Err(fail(Error::NegativeWeight(inst.edge_count())));
        }
        let id = inst.add_edge(u, v, w, faulty);
        if !out_id.is_null() {
            *out_id = id;
        }
        Ok(())
    })
}

/// Parses a NUL-terminated document into a new instance.
///
/// # Safety
/// `text` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ftp_instance_parse(text: *const c_char, format: FtpFormat, out: *mut *mut FtpInstance) -> FtpStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|_| fail(Error::parse(1, "document is not UTF-8")))?;
        let format = match format {
            FtpFormat::Native => Format::Native,
            FtpFormat::Dimacs => Format::Dimacs,
        };
        let inst = document::parse(text, format).map_err(fail)?;
        *out = Box::into_raw(Box::new(FtpInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ftp_instance_edge_count(instance: *const FtpInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.edge_count())
}

/// # Safety
/// `instance` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ftp_instance_free(instance: *mut FtpInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Solves with the chosen algorithm and default caps.
///
/// # Safety
/// `instance` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ftp_solve(instance: *const FtpInstance, algorithm: FtpAlgorithm, out: *mut *mut FtpSolution) -> FtpStatus {
    guard(|| {
        let inst = instance_ref(instance)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let algorithm = match algorithm {
            FtpAlgorithm::Auto => Algorithm::Auto,
            FtpAlgorithm::Bipath => Algorithm::Bipath,
            FtpAlgorithm::Dag => Algorithm::Dag,
            FtpAlgorithm::Srp => Algorithm::Srp,
            FtpAlgorithm::ApproxK => Algorithm::ApproxK,
            FtpAlgorithm::ApproxK1 => Algorithm::ApproxK1,
            FtpAlgorithm::Oracle => Algorithm::Oracle,
        };
        match solve_with(inst, algorithm, Caps::default(), None).map_err(fail)? {
            Outcome::Integral { solver, solution, .. } => {
                let solver = CString::new(solver).expect("solver names have no NUL");
                *out = Box::into_raw(Box::new(FtpSolution { solution, solver }));
                Ok(())
            }
            Outcome::Fractional(_) => unreachable!("fractional solver not exposed here"),
        }
    })
}

/// # Safety
/// `solution` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_cost(solution: *const FtpSolution) -> i64 {
    solution.as_ref().map_or(0, |s| s.solution.cost)
}

/// # Safety
/// `solution` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_edge_count(solution: *const FtpSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.solution.edges.len())
}

/// Sorted edge ids, valid while the solution lives.
///
/// # Safety
/// `solution` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_edges(solution: *const FtpSolution) -> *const usize {
    solution.as_ref().map_or(ptr::null(), |s| s.solution.edges.as_ptr())
}

/// Name of the algorithm that produced the solution.
///
/// # Safety
/// `solution` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_solver(solution: *const FtpSolution) -> *const c_char {
    solution.as_ref().map_or(ptr::null(), |s| s.solver.as_ptr())
}

/// True for a proven optimum. Otherwise the guaranteed ratio is written to
/// `numerator`/`denominator` when the solution carries one (0/0 if not).
///
/// # Safety
/// `solution` must come from this library; the out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_is_optimal(solution: *const FtpSolution, numerator: *mut u64, denominator: *mut u64) -> bool {
    let Some(s) = solution.as_ref() else { return false };
    let (n, d) = match s.solution.status {
        Status::Optimal => (1, 1),
        Status::RatioBounded { numerator, denominator } => (numerator, denominator),
        Status::Heuristic => (0, 0),
    };
    if !numerator.is_null() {
        *numerator = n;
    }
    if !denominator.is_null() {
        *denominator = d;
    }
    s.solution.status == Status::Optimal
}

/// # Safety
/// `solution` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ftp_solution_free(solution: *mut FtpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Whether the edge ids survive every failure scenario.
///
/// # Safety
/// `edges` must point to `len` ids (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn ftp_is_feasible(instance: *const FtpInstance, edges: *const usize, len: usize, out: *mut bool) -> FtpStatus {
    guard(|| {
        let inst = instance_ref(instance)?;
        if out.is_null() || (edges.is_null() && len > 0) {
            return Err(null("argument"));
        }
        let ids = if len == 0 { &[][..] } else { std::slice::from_raw_parts(edges, len) };
        *out = ftp_core::is_feasible(inst, ids).map_err(fail)?;
        Ok(())
    })
}

fn give(s: String) -> *mut c_char {
    CString::new(s).expect("rationals have no NUL").into_raw()
}

/// Optimal value of the fractional relaxation as an exact rational string
/// such as `"4/3"`.
///
/// # Safety
/// `instance` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ftp_frac_value(instance: *const FtpInstance, out: *mut *mut c_char) -> FtpStatus {
    guard(|| {
        let inst = instance_ref(instance)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = give(solve_frac(inst).map_err(fail)?.value.to_string());
        Ok(())
    })
}

/// Integral and fractional optimum of `d` parallel faulty unit edges with
/// budget `k`, and their ratio.
///
/// # Safety
/// Out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftp_gap(d: usize, k: usize, integral: *mut i64, fractional: *mut *mut c_char, ratio: *mut *mut c_char) -> FtpStatus {
    guard(|| {
        if integral.is_null() || fractional.is_null() || ratio.is_null() {
            return Err(null("argument"));
        }
        let report = gap_report(&gap_family(d, k).map_err(fail)?).map_err(fail)?;
        *integral = report.integral_opt;
        *fractional = give(report.fractional_opt.to_string());
        *ratio = give(report.ratio.to_string());
        Ok(())
    })
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ftp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
