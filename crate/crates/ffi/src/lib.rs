//! C ABI over `reopen_game`.
//!
//! Objects cross the boundary as opaque handles: scenarios come from
//! `rg_scenario_from_*`, sweeps from `rg_scenario_sweep`, and each is released
//! by the matching `*_free`. Every fallible call
//! returns an [`RgStatus`]; the message of the last failure on the calling
//! thread is available through [`rg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::fs::File;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use reopen_game::experiment::{
    run_scenario, run_sweep, run_verify, suggest_region, write_sweep_csv, Config, ConfigFormat, Scenario,
    SeverityMode, SigmaGrid, SweepRow, SweepPlan, VerifyConfig, DEFAULT_TARGET,
};
use reopen_game::numerics::{cdf, std_normal_quantile};
use reopen_game::{Error, Probability};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Validation = 4,
    Integration = 5,
    Solver = 6,
    Shape = 7,
    Singularity = 8,
    Config = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for RgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => RgStatus::Domain,
            Error::Validation(_) => RgStatus::Validation,
            Error::Integration { .. } => RgStatus::Integration,
            Error::Solver { .. } => RgStatus::Solver,
            Error::Shape(_) => RgStatus::Shape,
            Error::Singularity(_) => RgStatus::Singularity,
            Error::Config(_) => RgStatus::Config,
            Error::Io(_) => RgStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgSeverityMode {
    Marginal = 0,
    Expected = 1,
}

impl From<RgSeverityMode> for SeverityMode {
    fn from(m: RgSeverityMode) -> Self {
        match m {
            RgSeverityMode::Marginal => SeverityMode::Marginal,
            RgSeverityMode::Expected => SeverityMode::Expected,
        }
    }
}

/// Validated scenario with its optional sweep settings.
pub struct RgScenario {
    scenario: Scenario,
    sweep: Option<SweepPlan>,
    verify: VerifyConfig,
}

/// Rows of a completed sweep.
pub struct RgSweep {
    rows: Vec<SweepRow>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgEquilibrium {
    pub theta_star: f64,
    pub reopen_prob: f64,
    pub coverage: f64,
    pub residual: f64,
    pub unique: bool,
    pub num_roots: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgSweepRow {
    pub sigma: f64,
    pub theta_star: f64,
    pub reopen_prob: f64,
    pub coverage: f64,
    pub disease_free: bool,
    pub severity: f64,
    /// Set when the solver failed at this σ; numeric fields are NaN.
    pub failed: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgVerifyReport {
    pub premise_holds: bool,
    pub complementarity_holds: bool,
    pub substitutes_restricted_holds: bool,
    pub substitutes_reopened_holds: bool,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Status(RgStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            RgStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            let status = RgStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside reopen_game".into());
            RgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(RgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::Status(RgStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns its full length in bytes, excluding NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Standard normal cdf.
#[no_mangle]
pub extern "C" fn rg_normal_cdf(z: f64) -> f64 {
    cdf(z)
}

/// Standard normal quantile; `p` must lie in (0, 1).
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rg_normal_quantile(p: f64, out: *mut f64) -> RgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = std_normal_quantile(p)?;
        Ok(())
    })
}

fn scenario_from_config(config: Config) -> Result<Box<RgScenario>, Failure> {
    let scenario = config.scenario()?;
    let sweep = match config.sweep {
        Some(_) => Some(config.sweep_plan()?),
        None => None,
    };
    Ok(Box::new(RgScenario {
        scenario,
        sweep,
        verify: config.verify,
    }))
}

/// Parses a configuration from a NUL-terminated string, TOML or JSON.
///
/// # Safety
/// `text` must be a valid C string; `out` must be valid for one write. On
/// success `*out` owns a handle to release with [`rg_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_from_str(text: *const c_char, is_json: bool, out: *mut *mut RgScenario) -> RgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let format = if is_json { ConfigFormat::Json } else { ConfigFormat::Toml };
        *out = Box::into_raw(scenario_from_config(Config::parse(text, format)?)?);
        Ok(())
    })
}

/// Loads a configuration file; `.json` files are read as JSON, others as TOML.
///
/// # Safety
/// As for [`rg_scenario_from_str`], with `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_from_file(path: *const c_char, out: *mut *mut RgScenario) -> RgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let path = read_str(path, "path")?;
        *out = Box::into_raw(scenario_from_config(Config::load(Path::new(path))?)?);
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_free(scenario: *mut RgScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of information types, the length `rg_scenario_solve` expects for
/// its critical-signal buffer. Returns 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_num_types(scenario: *const RgScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.scenario.model.num_types())
}

/// Solves the equilibrium. Critical signals are written to `x_star` when it
/// is non-null, which then needs room for `rg_scenario_num_types` values.
///
/// # Safety
/// `scenario` must be a live handle, `out` valid for one write and `x_star`
/// null or valid for `x_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_solve(
    scenario: *const RgScenario,
    out: *mut RgEquilibrium,
    x_star: *mut f64,
    x_len: usize,
) -> RgStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = s.scenario.model.num_types();
        if !x_star.is_null() && x_len < k {
            return Err(Error::Shape(format!("x_star holds {x_len} values, {k} needed")).into());
        }
        let report = run_scenario(&s.scenario)?;
        let eq = &report.equilibrium;
        if !x_star.is_null() {
            ptr::copy_nonoverlapping(eq.x_star.as_ptr(), x_star, k);
        }
        *out = RgEquilibrium {
            theta_star: eq.theta_star,
            reopen_prob: report.reopen_prob,
            coverage: report.coverage,
            residual: eq.residual,
            unique: eq.unique,
            num_roots: eq.roots_found.len(),
        };
        Ok(())
    })
}

/// Runs the complement and substitute checks.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_verify(scenario: *const RgScenario, out: *mut RgVerifyReport) -> RgStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = run_verify(&s.scenario, &s.verify)?;
        *out = RgVerifyReport {
            premise_holds: r.complementarity.premise_holds,
            complementarity_holds: r.complementarity.complementarity_holds,
            substitutes_restricted_holds: r.substitutes[0].holds,
            substitutes_reopened_holds: r.substitutes[1].holds,
            passed: r.passed(),
        };
        Ok(())
    })
}

/// Sweeps the public precision over `sigmas`, or over the configured grid when
/// `sigmas` is null.
///
/// # Safety
/// `scenario` must be a live handle, `sigmas` null or valid for `n` reads and
/// `out` valid for one write. On success `*out` owns a handle to release with
/// [`rg_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn rg_scenario_sweep(
    scenario: *const RgScenario,
    sigmas: *const f64,
    n: usize,
    mode: RgSeverityMode,
    out: *mut *mut RgSweep,
) -> RgStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let plan = if sigmas.is_null() {
            let mut plan = s
                .sweep
                .clone()
                .ok_or_else(|| Error::Config("no sigmas given and no [sweep] section".into()))?;
            plan.severity_mode = mode.into();
            plan
        } else {
            let grid = std::slice::from_raw_parts(sigmas, n).to_vec();
            let values = SigmaGrid::List(grid).values()?;
            SweepPlan {
                sigmas: values,
                target: Probability::new(DEFAULT_TARGET)?,
                severity_mode: mode.into(),
            }
        };
        *out = Box::into_raw(Box::new(RgSweep {
            rows: run_sweep(&s.scenario, &plan),
        }));
        Ok(())
    })
}

/// # Safety
/// `sweep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_sweep_free(sweep: *mut RgSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_sweep_len(sweep: *const RgSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.rows.len())
}

/// # Safety
/// `sweep` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rg_sweep_row(sweep: *const RgSweep, index: usize, out: *mut RgSweepRow) -> RgStatus {
    guard(|| {
        let s = deref(sweep, "sweep")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = s
            .rows
            .get(index)
            .ok_or_else(|| Error::Shape(format!("row {index} of {}", s.rows.len())))?;
        *out = RgSweepRow {
            sigma: r.sigma,
            theta_star: r.theta_star,
            reopen_prob: r.reopen_prob,
            coverage: r.coverage,
            disease_free: r.disease_free,
            severity: r.severity,
            failed: !r.is_ok(),
        };
        Ok(())
    })
}

/// Writes the sweep CSV to `path`.
///
/// # Safety
/// `sweep` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn rg_sweep_write_csv(sweep: *const RgSweep, path: *const c_char) -> RgStatus {
    guard(|| {
        let s = deref(sweep, "sweep")?;
        let path = read_str(path, "path")?;
        let file = File::create(path).map_err(Error::from)?;
        write_sweep_csv(&s.rows, file)?;
        Ok(())
    })
}

/// Suggested precision interval for a reopening target. `*found` is false
/// when the interval is empty, in which case `lo` and `hi` are untouched.
///
/// # Safety
/// `sweep` must be a live handle; `lo`, `hi`, `found` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rg_sweep_suggest(
    sweep: *const RgSweep,
    target: f64,
    lo: *mut f64,
    hi: *mut f64,
    found: *mut bool,
) -> RgStatus {
    guard(|| {
        let s = deref(sweep, "sweep")?;
        let (lo, hi, found) = match (lo.as_mut(), hi.as_mut(), found.as_mut()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(null("output pointer")),
        };
        let target = Probability::new(target)?;
        *found = false;
        if let Some((a, b)) = suggest_region(&s.rows, target) {
            *lo = a;
            *hi = b;
            *found = true;
        }
        Ok(())
    })
}
