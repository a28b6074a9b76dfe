//! C ABI for geored.
//!
//! Every fallible function returns a [`GeoredStatus`] and writes results
//! through out-pointers. On failure a message is kept per thread and can be
//! read with [`geored_last_error`]. Handles are opaque and must be released
//! with their `_free` function; strings returned by the library are
//! released with [`geored_string_free`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;
use std::sync::Arc;

use geored::cli::{analyze_manifest, dof_entry, report_json, AnalyzeOptions, CliError};
use geored::expr::{parse, Chart, Expr, ZeroTest, DEFAULT_SEED};
use geored::frames::{in_subgroup, same_orbit, Frame, SubgroupSpec};
use libc::size_t;
use nalgebra::DMatrix;

/// Result codes. The first four match the exit codes of the `geored` binary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeoredStatus {
    Ok = 0,
    CheckFailed = 1,
    InvalidInput = 2,
    Expression = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// A coordinate chart with its sampling box.
pub struct GeoredChart {
    chart: Arc<Chart>,
}

/// An expression bound to the chart it was parsed against.
pub struct GeoredExpr {
    expr: Expr,
    chart: Arc<Chart>,
}

/// Dimension ledger of a reduction `GL(n) -> H`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GeoredDof {
    pub dim_h: size_t,
    pub dim_quotient: size_t,
    pub connections: size_t,
    pub preserving: size_t,
    pub symmetric: size_t,
    pub symmetric_preserving: size_t,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: GeoredStatus,
    message: String,
}

impl Failure {
    fn new(status: GeoredStatus, message: impl Into<String>) -> Failure {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Failure {
        let status = match e.exit_code() {
            3 => GeoredStatus::Expression,
            _ => GeoredStatus::InvalidInput,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<GeoredStatus, Failure>) -> GeoredStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(failure)) => {
            set_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_error("internal panic");
            GeoredStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(GeoredStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(GeoredStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(GeoredStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(GeoredStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn out<T>(p: *mut T) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure::new(GeoredStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(p)
    }
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(GeoredStatus::InvalidUtf8, "string contains NUL"))
}

fn invalid(e: impl ToString) -> Failure {
    Failure::new(GeoredStatus::InvalidInput, e.to_string())
}

/// Message describing the most recent failure on this thread, or NULL.
/// Valid until the next geored call on the same thread.
#[no_mangle]
pub extern "C" fn geored_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geored_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a chart with coordinates `names[i]` sampled on `(lo[i], hi[i])`.
///
/// # Safety
/// `names`, `lo` and `hi` must each point to `n` valid elements and every
/// name must be a NUL-terminated string. `out_chart` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geored_chart_new(
    names: *const *const c_char,
    lo: *const f64,
    hi: *const f64,
    n: size_t,
    out_chart: *mut *mut GeoredChart,
) -> GeoredStatus {
    guard(|| {
        let out_chart = out(out_chart)?;
        let names = slice(names, n, "names")?
            .iter()
            .map(|&p| text(p, "coordinate name"))
            .collect::<Result<Vec<&str>, _>>()?;
        let lo = slice(lo, n, "lo")?;
        let hi = slice(hi, n, "hi")?;
        let domain: Vec<(f64, f64)> = lo.iter().copied().zip(hi.iter().copied()).collect();
        let chart = Chart::new(&names, &domain).map_err(invalid)?;
        *out_chart = Box::into_raw(Box::new(GeoredChart { chart: Arc::new(chart) }));
        Ok(GeoredStatus::Ok)
    })
}

/// Declares a named numeric constant on the chart.
///
/// # Safety
/// `chart` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn geored_chart_set_constant(
    chart: *mut GeoredChart,
    name: *const c_char,
    value: f64,
) -> GeoredStatus {
    guard(|| {
        let chart = chart
            .as_mut()
            .ok_or_else(|| Failure::new(GeoredStatus::NullPointer, "chart is null"))?;
        let name = text(name, "name")?;
        let updated = (*chart.chart).clone().with_constant(name, value).map_err(invalid)?;
        chart.chart = Arc::new(updated);
        Ok(GeoredStatus::Ok)
    })
}

/// # Safety
/// `chart` must be NULL or a handle from [`geored_chart_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geored_chart_free(chart: *mut GeoredChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Parses `source` against the coordinates and constants of `chart`.
///
/// # Safety
/// `chart` must be a live handle, `source` a NUL-terminated string and
/// `out_expr` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_parse(
    chart: *const GeoredChart,
    source: *const c_char,
    out_expr: *mut *mut GeoredExpr,
) -> GeoredStatus {
    guard(|| {
        let out_expr = out(out_expr)?;
        let chart = handle(chart, "chart")?;
        let source = text(source, "source")?;
        let expr = parse(source, &chart.chart).map_err(|e| Failure::new(GeoredStatus::Expression, e.to_string()))?;
        *out_expr = Box::into_raw(Box::new(GeoredExpr {
            expr,
            chart: chart.chart.clone(),
        }));
        Ok(GeoredStatus::Ok)
    })
}

/// Derivative with respect to the coordinate `var`.
///
/// # Safety
/// `expr` must be a live handle, `var` a NUL-terminated string and
/// `out_expr` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_differentiate(
    expr: *const GeoredExpr,
    var: *const c_char,
    out_expr: *mut *mut GeoredExpr,
) -> GeoredStatus {
    guard(|| {
        let out_expr = out(out_expr)?;
        let e = handle(expr, "expr")?;
        let var = text(var, "var")?;
        if !e.chart.coords().iter().any(|c| &**c == var) {
            return Err(invalid(format!("`{var}` is not a coordinate of the chart")));
        }
        *out_expr = Box::into_raw(Box::new(GeoredExpr {
            expr: e.expr.differentiate(var),
            chart: e.chart.clone(),
        }));
        Ok(GeoredStatus::Ok)
    })
}

/// Evaluates at the point whose coordinates are `point[0..n]`, in chart order.
///
/// # Safety
/// `expr` must be a live handle, `point` must hold `n` values and `value`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_eval(
    expr: *const GeoredExpr,
    point: *const f64,
    n: size_t,
    value: *mut f64,
) -> GeoredStatus {
    guard(|| {
        let value = out(value)?;
        let e = handle(expr, "expr")?;
        let coords = slice(point, n, "point")?;
        if coords.len() != e.chart.dim() {
            return Err(invalid(format!("expected {} coordinates, got {n}", e.chart.dim())));
        }
        *value = e
            .expr
            .eval(&e.chart.point(coords))
            .map_err(|err| Failure::new(GeoredStatus::Expression, err.to_string()))?;
        Ok(GeoredStatus::Ok)
    })
}

/// Probabilistic zero test on the chart's box with the default seed.
///
/// # Safety
/// `expr` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_is_zero(
    expr: *const GeoredExpr,
    samples: size_t,
    tol: f64,
    result: *mut bool,
) -> GeoredStatus {
    guard(|| {
        let result = out(result)?;
        let e = handle(expr, "expr")?;
        if samples == 0 || !(tol > 0.0) {
            return Err(invalid("samples must be positive and tol > 0"));
        }
        *result = ZeroTest::new(samples, tol)
            .is_zero(&e.expr, &e.chart)
            .map_err(|err| Failure::new(GeoredStatus::Expression, err.to_string()))?;
        Ok(GeoredStatus::Ok)
    })
}

/// Canonical text of the expression; free with [`geored_string_free`].
///
/// # Safety
/// `expr` must be a live handle and `text` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_to_string(expr: *const GeoredExpr, text: *mut *mut c_char) -> GeoredStatus {
    guard(|| {
        let text = out(text)?;
        *text = owned_string(handle(expr, "expr")?.expr.to_string())?;
        Ok(GeoredStatus::Ok)
    })
}

/// # Safety
/// `expr` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geored_expr_free(expr: *mut GeoredExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Dimension ledger for a tag such as `O(1,3)`, `W`, `SL`, `Id`,
/// `Unimodular` or `TimeGauge`.
///
/// # Safety
/// `tag` must be a NUL-terminated string and `dof` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_dof_table(tag: *const c_char, n: size_t, dof: *mut GeoredDof) -> GeoredStatus {
    guard(|| {
        let dof = out(dof)?;
        let entry = dof_entry(text(tag, "tag")?, n)?;
        *dof = GeoredDof {
            dim_h: entry.table.dim_h,
            dim_quotient: entry.table.dim_quotient,
            connections: entry.connections.all,
            preserving: entry.connections.preserving,
            symmetric: entry.connections.symmetric,
            symmetric_preserving: entry.connections.symmetric_preserving,
        };
        Ok(GeoredStatus::Ok)
    })
}

unsafe fn subgroup(tag: *const c_char) -> Result<SubgroupSpec, Failure> {
    SubgroupSpec::from_str(text(tag, "tag")?).map_err(invalid)
}

unsafe fn frame(values: *const f64, n: usize, what: &str) -> Result<Frame, Failure> {
    let values = slice(values, n * n, what)?;
    Frame::from_row_major(n, values).map_err(|e| Failure::from(CliError::from(e)))
}

/// Whether the row-major `n`×`n` matrix `h` lies in the subgroup `tag`.
///
/// # Safety
/// `h` must hold `n*n` values, `tag` must be NUL-terminated and `result`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn geored_in_subgroup(
    h: *const f64,
    n: size_t,
    tag: *const c_char,
    result: *mut bool,
) -> GeoredStatus {
    guard(|| {
        let result = out(result)?;
        let spec = subgroup(tag)?;
        let h = DMatrix::from_row_slice(n, n, slice(h, n * n, "h")?);
        *result = in_subgroup(&h, &spec).map_err(|e| Failure::from(CliError::from(e)))?;
        Ok(GeoredStatus::Ok)
    })
}

/// Whether two row-major bases lie in one orbit of the subgroup `tag`.
///
/// # Safety
/// `b1` and `b2` must each hold `n*n` values, `tag` must be NUL-terminated
/// and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_same_orbit(
    b1: *const f64,
    b2: *const f64,
    n: size_t,
    tag: *const c_char,
    result: *mut bool,
) -> GeoredStatus {
    guard(|| {
        let result = out(result)?;
        let spec = subgroup(tag)?;
        let b1 = frame(b1, n, "b1")?;
        let b2 = frame(b2, n, "b2")?;
        *result = same_orbit(&b1, &b2, &spec).map_err(|e| Failure::from(CliError::from(e)))?;
        Ok(GeoredStatus::Ok)
    })
}

/// Runs every applicable check on a JSON scene manifest and writes the JSON
/// report to `report`. Returns `CheckFailed` when the report was produced
/// but some check failed; `report` is set in that case too.
///
/// # Safety
/// `manifest` must be a NUL-terminated string and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn geored_analyze_manifest(
    manifest: *const c_char,
    seed: u64,
    report: *mut *mut c_char,
) -> GeoredStatus {
    guard(|| {
        let report = out(report)?;
        let options = AnalyzeOptions {
            seed,
            ..AnalyzeOptions::default()
        };
        let result = analyze_manifest(text(manifest, "manifest")?, &options)?;
        *report = owned_string(report_json(&result))?;
        Ok(if result.all_pass {
            GeoredStatus::Ok
        } else {
            GeoredStatus::CheckFailed
        })
    })
}

/// The sampling seed the CLI uses when none is given.
#[no_mangle]
pub extern "C" fn geored_default_seed() -> u64 {
    DEFAULT_SEED
}
