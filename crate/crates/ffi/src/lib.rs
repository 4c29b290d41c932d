//! C interface to the optfprl learner.
//!
//! Every function returns an [`OptfprlStatus`]. On failure the message is
//! kept per thread and can be read with [`optfprl_last_error_message`].
//! Learners are opaque handles owned by the caller and released with
//! [`optfprl_learner_free`]. A handle must not be used from two threads at
//! the same time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::slice;

use optfprl::harness::{export_csv, run_experiment, RunOptions};
use optfprl::{Error, FeasibleSet, Learner, Oracle, PruneRule, StrategyConfig, StrategyKind};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptfprlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    SolverFailure = 4,
    InvariantViolation = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptfprlStrategy {
    Agnostic = 0,
    KnownPath = 1,
    ObservedPath = 2,
    Recursive = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptfprlSetKind {
    /// Centered Euclidean ball; `extent` points to one radius.
    Ball = 0,
    /// Centered axis-aligned box; `extent` points to `dim` half-widths.
    Box = 1,
}

/// Scalars reported after each step.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OptfprlStepInfo {
    /// Slot that was just completed.
    pub slot: usize,
    pub epsilon: f64,
    pub sigma_cum: f64,
    pub state_norm: f64,
    /// Negative when the strategy does not track deltas.
    pub delta: f64,
    pub pruned: bool,
}

/// Opaque learner handle.
pub struct OptfprlLearner {
    inner: Learner,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> OptfprlStatus {
    match e {
        Error::DimensionMismatch { .. } => OptfprlStatus::DimensionMismatch,
        Error::NonConvergence { .. } => OptfprlStatus::SolverFailure,
        Error::InvariantViolation { .. } => OptfprlStatus::InvariantViolation,
        Error::Io(_) => OptfprlStatus::Io,
        _ => OptfprlStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OptfprlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OptfprlStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            OptfprlStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            OptfprlStatus::Internal
        }
    }
}

unsafe fn vec_from<'a>(ptr: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn str_from<'a>(ptr: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure::Core(Error::InvalidParameter(format!("{what} is not valid UTF-8"))))
}

/// Creates a learner over a centered ball or box with linear predictions.
///
/// `extent` holds the radius (ball) or `dim` half-widths (box).
/// `first_prediction` holds `dim` coefficients. `path_budget` is read only
/// for the known-path strategy. `cadence` must be at least 1.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn optfprl_learner_new(
    set_kind: OptfprlSetKind,
    dim: usize,
    extent: *const f64,
    strategy: OptfprlStrategy,
    path_budget: f64,
    cadence: usize,
    first_prediction: *const f64,
    out: *mut *mut OptfprlLearner,
) -> OptfprlStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = std::ptr::null_mut();
        let set = match set_kind {
            OptfprlSetKind::Ball => FeasibleSet::ball(dim, *vec_from(extent, 1, "extent")?.first().unwrap_or(&0.0))?,
            OptfprlSetKind::Box => FeasibleSet::axis_box(vec_from(extent, dim, "extent")?.to_vec())?,
        };
        let kind = match strategy {
            OptfprlStrategy::Agnostic => StrategyKind::Agnostic,
            OptfprlStrategy::KnownPath => StrategyKind::KnownPath { path_budget },
            OptfprlStrategy::ObservedPath => StrategyKind::ObservedPath,
            OptfprlStrategy::Recursive => StrategyKind::Recursive,
        };
        let cfg = StrategyConfig::new(kind, set.radius())?;
        let first = vec_from(first_prediction, dim, "first_prediction")?.to_vec();
        let inner = Learner::new(set, Oracle::linear(first), cfg, PruneRule::new(cadence)?)?;
        *out = Box::into_raw(Box::new(OptfprlLearner { inner }));
        Ok(())
    })
}

/// Feeds the linear cost of the current slot and the prediction for the
/// next one. `comparator` may be null except for the observed-path
/// strategy. The next iterate is written to `x_next` (`dim` values) and the
/// slot summary to `info`; either may be null.
///
/// # Safety
/// `learner` must come from [`optfprl_learner_new`]; vector pointers must be
/// valid for `dim` values.
#[no_mangle]
pub unsafe extern "C" fn optfprl_learner_step(
    learner: *mut OptfprlLearner,
    dim: usize,
    cost: *const f64,
    next_prediction: *const f64,
    comparator: *const f64,
    x_next: *mut f64,
    info: *mut OptfprlStepInfo,
) -> OptfprlStatus {
    guard(|| {
        let l = learner.as_mut().ok_or(Failure::Null("learner"))?;
        let d = l.inner.set().dim();
        if dim != d {
            return Err(Error::DimensionMismatch { expected: d, got: dim }.into());
        }
        let cost = Oracle::linear(vec_from(cost, dim, "cost")?.to_vec());
        let next = Oracle::linear(vec_from(next_prediction, dim, "next_prediction")?.to_vec());
        let comparator = if comparator.is_null() {
            None
        } else {
            Some(slice::from_raw_parts(comparator, dim))
        };
        let step = l.inner.observe_and_step(&cost, next, comparator)?;
        if !x_next.is_null() {
            slice::from_raw_parts_mut(x_next, dim).copy_from_slice(&step.x_next);
        }
        if let Some(info) = info.as_mut() {
            *info = OptfprlStepInfo {
                slot: step.slot,
                epsilon: step.epsilon,
                sigma_cum: step.sigma_cum,
                state_norm: step.state_norm,
                delta: step.delta_t.unwrap_or(-1.0),
                pruned: step.pruned,
            };
        }
        Ok(())
    })
}

/// Copies the iterate to be played next into `x` (`dim` values).
///
/// # Safety
/// `learner` must be a live handle and `x` valid for `dim` writes.
#[no_mangle]
pub unsafe extern "C" fn optfprl_learner_iterate(
    learner: *const OptfprlLearner,
    dim: usize,
    x: *mut f64,
) -> OptfprlStatus {
    guard(|| {
        let l = learner.as_ref().ok_or(Failure::Null("learner"))?;
        if x.is_null() {
            return Err(Failure::Null("x"));
        }
        let it = l.inner.iterate();
        if dim != it.len() {
            return Err(Error::DimensionMismatch { expected: it.len(), got: dim }.into());
        }
        slice::from_raw_parts_mut(x, dim).copy_from_slice(it);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `learner` must come from [`optfprl_learner_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn optfprl_learner_free(learner: *mut OptfprlLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// Runs one experiment described by `config` (the `key=value` run-file
/// format of the command-line tool) and writes its CSV trace to `out_path`.
///
/// # Safety
/// Both arguments must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn optfprl_run_to_csv(
    config: *const c_char,
    out_path: *const c_char,
) -> OptfprlStatus {
    guard(|| {
        let opts = RunOptions::from_config_str(str_from(config, "config")?)?;
        let out = str_from(out_path, "out_path")?;
        let (trace, report) = run_experiment(&opts.to_run_config()?)?;
        export_csv(&trace, Some(&report), Path::new(out))?;
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf`, truncated and
/// NUL-terminated. Returns the full message length without the terminator.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn optfprl_last_error_message(buf: *mut c_char, len: usize) -> usize {
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
