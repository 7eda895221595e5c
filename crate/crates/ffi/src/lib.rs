//! C ABI over `dynrmat`.
//!
//! Every function returns a [`DynrmatStatus`]; results come back through out-pointers.
//! On failure the message is kept per thread and read with [`dynrmat_last_error`].
//! Handles are opaque and owned by the caller until passed to the matching `_free`.
//! Strings returned by the library are released with [`dynrmat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dynrmat::cli::{from_json, load_algebra, run_args, RMatrixFile, TwistFile};
use dynrmat::dynr::{cdybe_residual, construct_r, equivariance_residual, BaseStructure, DynamicalR};
use dynrmat::exact::{ZeroTest, DEFAULT_TERM_BUDGET, DEFAULT_TRIALS};
use dynrmat::liealg::Decomposition;
use dynrmat::qdybe::{DynTensor, TensorAlgebra};
use dynrmat::Error;

/// Outcome of a call. `DYNRMAT_STATUS_OK` is zero; library errors map one to one.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynrmatStatus {
    Ok = 0,
    NullArgument,
    InvalidUtf8,
    Usage,
    DivisionByZero,
    ExpansionTooLarge,
    PointDimension,
    UnknownName,
    InvalidArgument,
    DegenerateEverywhere,
    ComplementTooLarge,
    NondegeneracyUndefined,
    NotInBaseSubalgebra,
    InterpolationInconsistent,
    NotUnital,
    SlotOutOfRange,
    SlotNotFree,
    ArityMismatch,
    DegreeBudgetExceeded,
    Infeasible,
    Syntax,
    Format,
    Panic,
}

impl From<&Error> for DynrmatStatus {
    fn from(e: &Error) -> Self {
        use DynrmatStatus as S;
        match e {
            Error::DivisionByZero(_) => S::DivisionByZero,
            Error::ExpansionTooLarge { .. } => S::ExpansionTooLarge,
            Error::PointDimension { .. } => S::PointDimension,
            Error::UnknownName(_) => S::UnknownName,
            Error::InvalidArgument(_) => S::InvalidArgument,
            Error::DegenerateEverywhere => S::DegenerateEverywhere,
            Error::ComplementTooLarge(_) => S::ComplementTooLarge,
            Error::NondegeneracyUndefined => S::NondegeneracyUndefined,
            Error::NotInBaseSubalgebra(_) => S::NotInBaseSubalgebra,
            Error::InterpolationInconsistent { .. } => S::InterpolationInconsistent,
            Error::NotUnital => S::NotUnital,
            Error::SlotOutOfRange { .. } => S::SlotOutOfRange,
            Error::SlotNotFree(_) => S::SlotNotFree,
            Error::ArityMismatch(..) => S::ArityMismatch,
            Error::DegreeBudgetExceeded { .. } => S::DegreeBudgetExceeded,
            Error::Infeasible { .. } => S::Infeasible,
            Error::Syntax { .. } => S::Syntax,
            Error::Format(_) => S::Format,
        }
    }
}

/// How residual coefficients are tested for zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynrmatZeroTest {
    Exact = 0,
    Sampled,
    /// Exact, falling back to sampling past the term budget.
    Auto,
}

fn strategy(mode: DynrmatZeroTest, seed: u64) -> ZeroTest {
    match mode {
        DynrmatZeroTest::Exact => ZeroTest::exact(),
        DynrmatZeroTest::Sampled => ZeroTest::sampled(seed),
        DynrmatZeroTest::Auto => ZeroTest::Auto { budget: DEFAULT_TERM_BUDGET, seed, trials: DEFAULT_TRIALS },
    }
}

/// A Lie algebra with its reductive decomposition.
pub struct DynrmatAlgebra {
    dec: Decomposition,
}

/// A classical dynamical r-matrix over an algebra.
pub struct DynrmatRMatrix {
    r: DynamicalR,
}

/// A two-leg twist truncated at a fixed ℏ-order, with its tensor context.
pub struct DynrmatTwist {
    ctx: TensorAlgebra,
    f: DynTensor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(DynrmatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DynrmatStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DynrmatStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            set_error(format!("internal panic: {}", msg.unwrap_or_default()));
            DynrmatStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DynrmatStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(DynrmatStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn dynrmat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dynrmat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads `builtin:NAME` (e.g. `builtin:heisenberg(1,1)`) or an algebra JSON file.
///
/// # Safety
/// `source` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_algebra_load(source: *const c_char, out: *mut *mut DynrmatAlgebra) -> DynrmatStatus {
    guard(|| {
        let (dec, _) = load_algebra(text(source, "source")?)?;
        put(out, Box::into_raw(Box::new(DynrmatAlgebra { dec })), "out")
    })
}

/// Dimension of the algebra and rank of its base (number of λ coordinates).
///
/// # Safety
/// `alg` must be a live handle; `dim` and `rank` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_algebra_shape(alg: *const DynrmatAlgebra, dim: *mut usize, rank: *mut usize) -> DynrmatStatus {
    guard(|| {
        let a = handle(alg, "alg")?;
        put(dim, a.dec.algebra().dim(), "dim")?;
        put(rank, a.dec.rank(), "rank")
    })
}

/// # Safety
/// `alg` must come from [`dynrmat_algebra_load`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_algebra_free(alg: *mut DynrmatAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Builds the r-matrix of a fat reductive decomposition.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_rmatrix_construct(alg: *const DynrmatAlgebra, out: *mut *mut DynrmatRMatrix) -> DynrmatStatus {
    guard(|| {
        let r = construct_r(&handle(alg, "alg")?.dec)?;
        put(out, Box::into_raw(Box::new(DynrmatRMatrix { r })), "out")
    })
}

/// Reads an r-matrix from JSON text (`{"terms": [{"i", "j", "coeff"}]}`).
///
/// # Safety
/// `alg` must be a live handle, `json` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_rmatrix_from_json(
    alg: *const DynrmatAlgebra,
    json: *const c_char,
    out: *mut *mut DynrmatRMatrix,
) -> DynrmatStatus {
    guard(|| {
        let dec = &handle(alg, "alg")?.dec;
        let file: RMatrixFile = from_json(text(json, "json")?, "rmatrix")?;
        let r = DynamicalR::new(dec.clone(), file.to_multivector(dec)?)?;
        put(out, Box::into_raw(Box::new(DynrmatRMatrix { r })), "out")
    })
}

/// Writes `passed = 1` when the CDYBE residual and every equivariance residual vanish.
///
/// # Safety
/// `r` must be a live handle and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_rmatrix_check(
    r: *const DynrmatRMatrix,
    mode: DynrmatZeroTest,
    seed: u64,
    passed: *mut bool,
) -> DynrmatStatus {
    guard(|| {
        let r = &handle(r, "r")?.r;
        let z = strategy(mode, seed);
        let base = BaseStructure::new(r.decomposition());
        let mut ok = cdybe_residual(r).verdicts(z).iter().all(|(_, v)| v.zero);
        for i in 0..r.decomposition().rank() {
            ok &= equivariance_residual(r, &base, i)?.verdicts(z).iter().all(|(_, v)| v.zero);
        }
        put(passed, ok, "passed")
    })
}

/// The r-matrix as JSON in the same format [`dynrmat_rmatrix_from_json`] reads.
///
/// # Safety
/// `r` must be a live handle and `out` writable; free the string with [`dynrmat_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dynrmat_rmatrix_to_json(r: *const DynrmatRMatrix, out: *mut *mut c_char) -> DynrmatStatus {
    guard(|| {
        let r = &handle(r, "r")?.r;
        let file = RMatrixFile::from_multivector(r.bivector(), r.decomposition().algebra().labels());
        let json = serde_json::to_string_pretty(&file).map_err(|e| Failure(DynrmatStatus::Format, e.to_string()))?;
        put(out, owned_string(json), "out")
    })
}

/// # Safety
/// `r` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_rmatrix_free(r: *mut DynrmatRMatrix) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Reads a two-leg twist from JSON text, truncated at `order`. The file's own
/// `algebra` field is ignored in favour of `alg`.
///
/// # Safety
/// `alg` must be a live handle, `json` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_from_json(
    alg: *const DynrmatAlgebra,
    json: *const c_char,
    order: usize,
    out: *mut *mut DynrmatTwist,
) -> DynrmatStatus {
    guard(|| {
        let dec = &handle(alg, "alg")?.dec;
        let file: TwistFile = from_json(text(json, "json")?, "twist")?;
        if file.arity != 2 {
            return Err(Error::ArityMismatch(file.arity, 2).into());
        }
        let ctx = TensorAlgebra::new(dec.clone(), order);
        let f = file.to_tensor(&ctx)?;
        let ctx = ctx.with_order(f.order());
        put(out, Box::into_raw(Box::new(DynrmatTwist { ctx, f })), "out")
    })
}

/// Truncation order actually used (the smaller of the file's and the requested one).
///
/// # Safety
/// `twist` must be a live handle and `order` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_order(twist: *const DynrmatTwist, order: *mut usize) -> DynrmatStatus {
    guard(|| put(order, handle(twist, "twist")?.f.order(), "order"))
}

fn tensor_passes(t: &DynTensor, z: ZeroTest) -> bool {
    t.verdicts(z).iter().all(|(_, _, v)| v.zero)
}

/// Twisted cocycle and counit conditions.
///
/// # Safety
/// `twist` must be a live handle and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_check_cocycle(
    twist: *const DynrmatTwist,
    mode: DynrmatZeroTest,
    seed: u64,
    passed: *mut bool,
) -> DynrmatStatus {
    guard(|| {
        let t = handle(twist, "twist")?;
        let z = strategy(mode, seed);
        let (left, right) = t.ctx.counit_check(&t.f)?;
        let ok = tensor_passes(&t.ctx.cocycle_residual(&t.f)?, z) && tensor_passes(&left, z) && tensor_passes(&right, z);
        put(passed, ok, "passed")
    })
}

/// QDYBE for `R = F21^{-1} ★ F12`.
///
/// # Safety
/// `twist` must be a live handle and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_check_qdybe(
    twist: *const DynrmatTwist,
    mode: DynrmatZeroTest,
    seed: u64,
    passed: *mut bool,
) -> DynrmatStatus {
    guard(|| {
        let t = handle(twist, "twist")?;
        let r = t.ctx.r_from_twist(&t.f)?;
        put(passed, tensor_passes(&t.ctx.qdybe_residual(&r)?, strategy(mode, seed)), "passed")
    })
}

/// `R = F21^{-1} ★ F12` as twist-format JSON (without an `algebra` field).
///
/// # Safety
/// `twist` must be a live handle and `out` writable; free the string with [`dynrmat_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_derive_r(twist: *const DynrmatTwist, out: *mut *mut c_char) -> DynrmatStatus {
    guard(|| {
        let t = handle(twist, "twist")?;
        let r = t.ctx.r_from_twist(&t.f)?;
        let file = TwistFile::from_tensor(&r, t.ctx.labels(), None);
        let json = serde_json::to_string_pretty(&file).map_err(|e| Failure(DynrmatStatus::Format, e.to_string()))?;
        put(out, owned_string(json), "out")
    })
}

/// # Safety
/// `twist` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_twist_free(twist: *mut DynrmatTwist) {
    if !twist.is_null() {
        drop(Box::from_raw(twist));
    }
}

/// Runs a command-line invocation (`argv[0]` is the program name) and returns
/// the JSON report and the exit code the binary would use. Argument errors give
/// `DYNRMAT_STATUS_USAGE` with the usage text as the error message.
///
/// # Safety
/// `argv` must point to `argc` valid C strings; `exit_code` and `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dynrmat_run(
    argc: usize,
    argv: *const *const c_char,
    exit_code: *mut i32,
    report: *mut *mut c_char,
) -> DynrmatStatus {
    guard(|| {
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            args.push(text(*argv.add(i), "argv[i]")?.to_string());
        }
        let (code, file) = run_args(args).map_err(|msg| Failure(DynrmatStatus::Usage, msg))?;
        put(exit_code, code, "exit_code")?;
        put(report, owned_string(file.to_json()), "report")
    })
}
