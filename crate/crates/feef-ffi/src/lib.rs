//! C ABI over the feef library: opaque environment handles, status codes,
//! a thread-local last-error message, and whole-experiment entry points.
//! The matching header is generated into `include/feef.h` at build time.
//!
//! Conventions: every function returns a [`FeefStatus`]; outputs go through
//! pointers that are written only on `Ok`; handles are created and released
//! exclusively by `feef_*_new` / `feef_*_free`. All pointers must be valid
//! for the call; slices are passed as (pointer, length) pairs and lengths
//! are checked against the handle's dimensions.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use feef::envs::{make_env, Env};
use feef::harness::{run_experiment, ExperimentConfig};
use feef::objective::bound_check_cases;

/// Result of every ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeefStatus {
    /// Success; output pointers are filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Arguments were structurally invalid (unknown name, wrong length,
    /// malformed config, bad UTF-8). Details via `feef_last_error`.
    InvalidArgument = 2,
    /// The operation itself failed. Details via `feef_last_error`.
    RuntimeFailure = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: FeefStatus, message: impl std::fmt::Display) -> FeefStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    status
}

fn guard(body: impl FnOnce() -> FeefStatus) -> FeefStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FeefStatus::RuntimeFailure, "internal panic"),
    }
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap` bytes) and return the full message length in bytes,
/// excluding the NUL. `buf` may be null to query the length alone.
///
/// # Safety
/// `buf` must point to `cap` writable bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn feef_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn feef_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque environment handle.
pub struct FeefEnv {
    inner: Box<dyn Env>,
}

/// Fixed-size environment description.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FeefEnvSpec {
    pub state_dim: usize,
    pub action_dim: usize,
    pub max_steps: usize,
    /// True per-step maximum reward (centers the preferred prior).
    pub r_max: f64,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, FeefStatus> {
    if ptr.is_null() {
        return Err(FeefStatus::NullArgument);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| fail(FeefStatus::InvalidArgument, format!("invalid UTF-8: {e}")))
}

/// Create an environment by registry name ("mountain_car", "pendulum",
/// "point_maze"). On success `*out` owns the handle; release it with
/// [`feef_env_free`].
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feef_env_new(name: *const c_char, out: *mut *mut FeefEnv) -> FeefStatus {
    guard(|| {
        if out.is_null() {
            return FeefStatus::NullArgument;
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match make_env(name) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FeefEnv { inner }));
                FeefStatus::Ok
            }
            Err(e) => fail(FeefStatus::InvalidArgument, e),
        }
    })
}

/// Release an environment handle. Null is a no-op; freeing the same handle
/// twice is undefined behaviour, as in C.
///
/// # Safety
/// `env` must be null or a handle returned by [`feef_env_new`].
#[no_mangle]
pub unsafe extern "C" fn feef_env_free(env: *mut FeefEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Fill `*out` with the environment's dimensions and reward ceiling.
///
/// # Safety
/// `env` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feef_env_spec(env: *const FeefEnv, out: *mut FeefEnvSpec) -> FeefStatus {
    guard(|| {
        if env.is_null() || out.is_null() {
            return FeefStatus::NullArgument;
        }
        let spec = (*env).inner.spec();
        *out = FeefEnvSpec {
            state_dim: spec.state_dim,
            action_dim: spec.action_dim,
            max_steps: spec.max_steps,
            r_max: spec.r_max,
        };
        FeefStatus::Ok
    })
}

/// Per-dimension action bounds.
///
/// # Safety
/// `env` must be a live handle; `low` and `high` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn feef_env_action_bounds(
    env: *const FeefEnv,
    dim: usize,
    low: *mut f64,
    high: *mut f64,
) -> FeefStatus {
    guard(|| {
        if env.is_null() || low.is_null() || high.is_null() {
            return FeefStatus::NullArgument;
        }
        let spec = (*env).inner.spec();
        match spec.action_bounds.get(dim) {
            Some(&(lo, hi)) => {
                *low = lo;
                *high = hi;
                FeefStatus::Ok
            }
            None => fail(
                FeefStatus::InvalidArgument,
                format!("action dim {dim} out of range (action_dim {})", spec.action_dim),
            ),
        }
    })
}

/// Write the seeded initial state into `state` (`state_len` must equal
/// `state_dim`).
///
/// # Safety
/// `env` must be a live handle; `state` must point to `state_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn feef_env_reset(
    env: *const FeefEnv,
    seed: u64,
    state: *mut f64,
    state_len: usize,
) -> FeefStatus {
    guard(|| {
        if env.is_null() || state.is_null() {
            return FeefStatus::NullArgument;
        }
        let spec_dim = (*env).inner.spec().state_dim;
        if state_len != spec_dim {
            return fail(
                FeefStatus::InvalidArgument,
                format!("state_len {state_len} != state_dim {spec_dim}"),
            );
        }
        let s0 = (*env).inner.reset(seed);
        std::ptr::copy_nonoverlapping(s0.as_ptr(), state, spec_dim);
        FeefStatus::Ok
    })
}

/// Advance one step: reads (`state`, `action`), writes the successor state,
/// reward, and terminal-success flag. Actions outside bounds are clamped.
///
/// # Safety
/// `env` must be a live handle; all buffers must match the declared
/// lengths, and `reward`/`done` must be valid pointers.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn feef_env_step(
    env: *const FeefEnv,
    state: *const f64,
    state_len: usize,
    action: *const f64,
    action_len: usize,
    next_state: *mut f64,
    reward: *mut f64,
    done: *mut bool,
) -> FeefStatus {
    guard(|| {
        if env.is_null()
            || state.is_null()
            || action.is_null()
            || next_state.is_null()
            || reward.is_null()
            || done.is_null()
        {
            return FeefStatus::NullArgument;
        }
        let spec = (*env).inner.spec();
        if state_len != spec.state_dim || action_len != spec.action_dim {
            return fail(
                FeefStatus::InvalidArgument,
                format!(
                    "expected state_len {} and action_len {}, got {state_len} and {action_len}",
                    spec.state_dim, spec.action_dim
                ),
            );
        }
        let s = std::slice::from_raw_parts(state, state_len);
        let a = std::slice::from_raw_parts(action, action_len);
        let (next, r, terminal) = (*env).inner.step(s, a);
        std::ptr::copy_nonoverlapping(next.as_ptr(), next_state, next.len());
        *reward = r;
        *done = terminal;
        FeefStatus::Ok
    })
}

/// Run a full experiment from config text in the key=value format used by
/// config files; metrics land in the config's `out_dir`.
///
/// # Safety
/// `config_text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn feef_run_experiment(config_text: *const c_char) -> FeefStatus {
    guard(|| {
        let text = match read_str(config_text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config = match ExperimentConfig::from_text(text) {
            Ok(c) => c,
            Err(e) => return fail(FeefStatus::InvalidArgument, e),
        };
        match run_experiment(&config) {
            Ok(_) => FeefStatus::Ok,
            Err(e) => fail(FeefStatus::RuntimeFailure, e),
        }
    })
}

/// Evaluate the exact-enumeration bound and decomposition on `toys` seeded
/// random tabular worlds; `*all_hold` reports whether every case passed.
///
/// # Safety
/// `all_hold` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feef_bound_check(
    toys: usize,
    seed: u64,
    all_hold: *mut bool,
) -> FeefStatus {
    guard(|| {
        if all_hold.is_null() {
            return FeefStatus::NullArgument;
        }
        match bound_check_cases(toys, seed) {
            Ok(cases) => {
                *all_hold = cases.iter().all(|c| c.holds());
                FeefStatus::Ok
            }
            Err(e) => fail(FeefStatus::RuntimeFailure, e),
        }
    })
}
