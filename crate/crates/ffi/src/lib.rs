//! C interface to the infops toolkit.
//!
//! Every fallible function returns an [`InfopsStatus`]. On failure the
//! message is kept per thread and can be read with
//! [`infops_last_error_message`]. Objects that outlive a call are handed out
//! as opaque pointers and must be released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use infops_core::causal::{
    discover_parents, estimate_effects, stl, threshold_links, CausalEffectMatrix, CoverageRule, DiscoveryConfig,
    StdErrMethod, StlConfig, ThresholdConfig, ThresholdResult,
};
use infops_core::degstats::{ks_two_sample_with, KsMethod};
use infops_core::pipeline::{run_pipeline, PipelineConfig, Stage};
use infops_core::Error;

/// Outcome of a call. Values 2 to 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfopsStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrEncoding = 1,
    /// Bad argument or input that failed validation.
    Invalid = 2,
    Io = 3,
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfopsKsMethod {
    /// Exact when n·m is small enough, asymptotic otherwise.
    Auto = 0,
    Exact = 1,
    Asymptotic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfopsCoverageRule {
    SquaredShareNearest = 0,
    MinimalPrefix = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InfopsKsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// 1 when the null of equal distributions is rejected.
    pub reject: i32,
    /// 1 when the exact distribution was used.
    pub exact: i32,
}

/// Opaque effect matrix.
pub struct InfopsEffectMatrix(CausalEffectMatrix);

/// Opaque list of selected links.
pub struct InfopsLinks(ThresholdResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: InfopsStatus, msg: impl Into<String>) -> InfopsStatus {
    set_last_error(msg.into());
    status
}

fn from_error(e: Error) -> InfopsStatus {
    let mut msg = e.to_string();
    let mut source = std::error::Error::source(&e);
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    let status = match e.exit_code() {
        3 => InfopsStatus::Io,
        4 => InfopsStatus::Numerical,
        _ => InfopsStatus::Invalid,
    };
    fail(status, msg)
}

/// Runs `f` with panics converted to [`InfopsStatus::Internal`].
fn guard(f: impl FnOnce() -> Result<(), InfopsStatus>) -> InfopsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InfopsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(InfopsStatus::Internal, format!("panic: {msg}"))
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], InfopsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(InfopsStatus::NullOrEncoding, format!("`{name}` is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], InfopsStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(InfopsStatus::NullOrEncoding, format!("`{name}` is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, InfopsStatus> {
    p.as_mut()
        .ok_or_else(|| fail(InfopsStatus::NullOrEncoding, format!("`{name}` is null")))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, InfopsStatus> {
    if p.is_null() {
        return Err(fail(InfopsStatus::NullOrEncoding, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(InfopsStatus::NullOrEncoding, format!("`{name}` is not UTF-8")))
}

/// Splits a row-major `rows × cols` buffer into rows.
fn rows(data: &[f64], rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|r| data[r * cols..(r + 1) * cols].to_vec()).collect()
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next infops call on the same thread.
#[no_mangle]
pub extern "C" fn infops_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn infops_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// # Safety
/// `x` and `y` must point to `nx` and `ny` readable doubles; `result` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn infops_ks_two_sample(
    x: *const f64,
    nx: usize,
    y: *const f64,
    ny: usize,
    alpha: f64,
    method: InfopsKsMethod,
    result: *mut InfopsKsResult,
) -> InfopsStatus {
    guard(|| {
        let x = slice(x, nx, "x")?;
        let y = slice(y, ny, "y")?;
        let result = out(result, "result")?;
        let method = match method {
            InfopsKsMethod::Auto => None,
            InfopsKsMethod::Exact => Some(KsMethod::Exact),
            InfopsKsMethod::Asymptotic => Some(KsMethod::Asymptotic),
        };
        let r = ks_two_sample_with(x, y, alpha, method).map_err(from_error)?;
        *result = InfopsKsResult {
            statistic: r.statistic,
            p_value: r.p_value,
            reject: r.reject as i32,
            exact: (r.method == KsMethod::Exact) as i32,
        };
        Ok(())
    })
}

/// Periodic STL decomposition of `y` with default smoother spans.
///
/// # Safety
/// `y` must hold `n` doubles; each output buffer must have room for `n`.
#[no_mangle]
pub unsafe extern "C" fn infops_stl(
    y: *const f64,
    n: usize,
    period: usize,
    trend: *mut f64,
    seasonal: *mut f64,
    remainder: *mut f64,
) -> InfopsStatus {
    guard(|| {
        let y = slice(y, n, "y")?;
        let trend = slice_mut(trend, n, "trend")?;
        let seasonal = slice_mut(seasonal, n, "seasonal")?;
        let remainder = slice_mut(remainder, n, "remainder")?;
        let cfg = StlConfig {
            period,
            ..StlConfig::default()
        };
        let d = stl(y, &cfg).map_err(from_error)?;
        trend.copy_from_slice(&d.trend);
        seasonal.copy_from_slice(&d.seasonal);
        remainder.copy_from_slice(&d.remainder);
        Ok(())
    })
}

/// Discovers lagged parents of `k` series of length `n` (row-major, one
/// series per row) and estimates standardized effects with OLS errors.
///
/// # Safety
/// `series` must hold `k * n` doubles; `matrix` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infops_causal_effects(
    series: *const f64,
    k: usize,
    n: usize,
    tau_max: usize,
    alpha: f64,
    max_conds: usize,
    matrix: *mut *mut InfopsEffectMatrix,
) -> InfopsStatus {
    guard(|| {
        let len = k
            .checked_mul(n)
            .ok_or_else(|| fail(InfopsStatus::Invalid, "k * n overflows"))?;
        let data = slice(series, len, "series")?;
        let matrix = out(matrix, "matrix")?;
        let series = rows(data, k, n);
        let cfg = DiscoveryConfig {
            tau_max,
            alpha,
            max_conds,
        };
        let parents = discover_parents(&series, &cfg).map_err(from_error)?;
        let m = estimate_effects(&series, &parents, tau_max, StdErrMethod::Ols).map_err(from_error)?;
        *matrix = Box::into_raw(Box::new(InfopsEffectMatrix(m)));
        Ok(())
    })
}

/// Wraps a `k × k` row-major matrix indexed `[source][target]`.
///
/// # Safety
/// `values` must hold `k * k` doubles; `matrix` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infops_effects_from_values(
    values: *const f64,
    k: usize,
    matrix: *mut *mut InfopsEffectMatrix,
) -> InfopsStatus {
    guard(|| {
        let len = k
            .checked_mul(k)
            .ok_or_else(|| fail(InfopsStatus::Invalid, "k * k overflows"))?;
        let data = slice(values, len, "values")?;
        let matrix = out(matrix, "matrix")?;
        let mut m = CausalEffectMatrix::zeros(k);
        m.value = rows(data, k, k);
        *matrix = Box::into_raw(Box::new(InfopsEffectMatrix(m)));
        Ok(())
    })
}

/// Number of series covered by the matrix; 0 for null.
///
/// # Safety
/// `matrix` must be null or come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_effects_size(matrix: *const InfopsEffectMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.len())
}

/// Effect of `source` on `target` and its standard error.
///
/// `lag` receives the lag of the strongest term, or 0 when there is no link.
/// Any of the output pointers may be null.
///
/// # Safety
/// `matrix` must come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_effects_get(
    matrix: *const InfopsEffectMatrix,
    source: usize,
    target: usize,
    value: *mut f64,
    stderr: *mut f64,
    lag: *mut usize,
) -> InfopsStatus {
    guard(|| {
        let m = &matrix
            .as_ref()
            .ok_or_else(|| fail(InfopsStatus::NullOrEncoding, "`matrix` is null"))?
            .0;
        if source >= m.len() || target >= m.len() {
            return Err(fail(
                InfopsStatus::Invalid,
                format!("index ({source}, {target}) outside a {0}×{0} matrix", m.len()),
            ));
        }
        if let Some(v) = value.as_mut() {
            *v = m.value[source][target];
        }
        if let Some(s) = stderr.as_mut() {
            *s = m.stderr[source][target];
        }
        if let Some(l) = lag.as_mut() {
            *l = m.lag[source][target].unwrap_or(0);
        }
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_effects_free(matrix: *mut InfopsEffectMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Keeps the strongest off-diagonal links covering `coverage` of the
/// total effect.
///
/// # Safety
/// `matrix` must come from this library and not yet be freed; `links` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn infops_threshold_links(
    matrix: *const InfopsEffectMatrix,
    coverage: f64,
    rule: InfopsCoverageRule,
    include_auto: bool,
    links: *mut *mut InfopsLinks,
) -> InfopsStatus {
    guard(|| {
        let m = &matrix
            .as_ref()
            .ok_or_else(|| fail(InfopsStatus::NullOrEncoding, "`matrix` is null"))?
            .0;
        let links = out(links, "links")?;
        let cfg = ThresholdConfig {
            coverage,
            rule: match rule {
                InfopsCoverageRule::SquaredShareNearest => CoverageRule::SquaredShareNearest,
                InfopsCoverageRule::MinimalPrefix => CoverageRule::MinimalPrefix,
            },
            include_auto,
        };
        let r = threshold_links(m, &cfg).map_err(from_error)?;
        *links = Box::into_raw(Box::new(InfopsLinks(r)));
        Ok(())
    })
}

/// Effect level at which links were cut; NaN for null.
///
/// # Safety
/// `links` must be null or come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_links_threshold(links: *const InfopsLinks) -> f64 {
    links.as_ref().map_or(f64::NAN, |l| l.0.threshold)
}

/// # Safety
/// `links` must be null or come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_links_count(links: *const InfopsLinks) -> usize {
    links.as_ref().map_or(0, |l| l.0.links.len())
}

/// The `index`-th selected link, strongest first.
///
/// # Safety
/// `links` must come from this library and not yet be freed; `source` and
/// `target` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infops_links_get(
    links: *const InfopsLinks,
    index: usize,
    source: *mut usize,
    target: *mut usize,
) -> InfopsStatus {
    guard(|| {
        let l = &links
            .as_ref()
            .ok_or_else(|| fail(InfopsStatus::NullOrEncoding, "`links` is null"))?
            .0;
        let source = out(source, "source")?;
        let target = out(target, "target")?;
        let &(s, t) = l
            .links
            .get(index)
            .ok_or_else(|| fail(InfopsStatus::Invalid, format!("link {index} of {}", l.links.len())))?;
        *source = s;
        *target = t;
        Ok(())
    })
}

/// # Safety
/// `links` must be null or come from this library and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn infops_links_free(links: *mut InfopsLinks) {
    if !links.is_null() {
        drop(Box::from_raw(links));
    }
}

/// Runs pipeline stages from a TOML configuration into `out_dir`.
///
/// `stages` is a comma-separated list of stage names (`ingest`,
/// `netbuild`, ...) or null for every stage. Prerequisites run too.
///
/// # Safety
/// String arguments must be NUL-terminated or, for `stages`, null.
#[no_mangle]
pub unsafe extern "C" fn infops_run_pipeline(
    config_path: *const c_char,
    out_dir: *const c_char,
    stages: *const c_char,
) -> InfopsStatus {
    guard(|| {
        let config_path = string(config_path, "config_path")?;
        let out_dir = string(out_dir, "out_dir")?;
        let targets: Vec<Stage> = if stages.is_null() {
            Stage::ALL.to_vec()
        } else {
            string(stages, "stages")?
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|name| {
                    Stage::ALL
                        .into_iter()
                        .find(|s| s.as_str() == name)
                        .ok_or_else(|| fail(InfopsStatus::Invalid, format!("unknown stage `{name}`")))
                })
                .collect::<Result<_, _>>()?
        };
        let cfg = PipelineConfig::load(Path::new(config_path)).map_err(from_error)?;
        run_pipeline(&cfg, &targets, Path::new(out_dir)).map_err(from_error)?;
        Ok(())
    })
}
