//! C interface to the two-atom blockade simulator.
//!
//! Every fallible function returns a [`BlockadeStatus`] and writes results
//! through out pointers, which are touched only on success. Objects are
//! opaque handles released by their matching `_free` function; a null
//! handle is rejected, never dereferenced. Matrix entries are reported in
//! the Dicke basis (ee, s, a, gg). The most recent error message of the
//! calling thread is available from [`blockade_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blockade::{
    blockade_ratio_analytic, concurrence, dicke_populations, double_excitation_probability,
    entanglement_window, evolve, excitation_probability, g2, g2_zero_analytic, pure_state,
    stationarity_defect, steady_state_analytic, steady_state_numeric, Basis, DensityMatrix,
    DetectorGeometry, Error, IntegratorConfig, SystemParams, Trajectory, DIM,
};

/// Outcome of a call. Anything but `Ok` leaves a message for
/// [`blockade_last_error`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockadeStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    NumericalFailure = 3,
}

pub struct BlockadeParams(SystemParams);
pub struct BlockadeRho(DensityMatrix);
pub struct BlockadeTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn fail(err: &Error) -> BlockadeStatus {
    set_error(&err.to_string());
    match err.exit_code() {
        2 => BlockadeStatus::InvalidInput,
        _ => BlockadeStatus::NumericalFailure,
    }
}

fn guard(work: impl FnOnce() -> blockade::Result<()>) -> BlockadeStatus {
    match catch_unwind(AssertUnwindSafe(work)) {
        Ok(Ok(())) => BlockadeStatus::Ok,
        Ok(Err(err)) => fail(&err),
        Err(_) => {
            set_error("internal panic");
            BlockadeStatus::NumericalFailure
        }
    }
}

macro_rules! require {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!(stringify!($ptr), " is null"));
            return BlockadeStatus::NullArgument;
        }
    };
}

/// Message describing the calling thread's most recent failure. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn blockade_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a parameter set from dimensionless ratios: drive `omega` and
/// shift `delta` in units of the total decay rate, and the radiative share
/// `gamma_s_frac` in [0, 1].
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn blockade_params_new(
    omega: c_double,
    delta: c_double,
    gamma_s_frac: c_double,
    out: *mut *mut BlockadeParams,
) -> BlockadeStatus {
    require!(out);
    *out = ptr::null_mut();
    guard(|| {
        let params = SystemParams::dimensionless(omega, delta, gamma_s_frac)?;
        *out = Box::into_raw(Box::new(BlockadeParams(params)));
        Ok(())
    })
}

/// Releases a parameter handle. A null pointer is a no-op.
///
/// # Safety
/// `params` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn blockade_params_free(params: *mut BlockadeParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Creates the projector onto a pure basis state. Labels: `ee`, `s`, `a`,
/// `gg` (Dicke) or `eg`, `ge` (product).
///
/// # Safety
/// `label` must be a NUL-terminated string; `out` as in
/// [`blockade_params_new`].
#[no_mangle]
pub unsafe extern "C" fn blockade_rho_pure(
    label: *const c_char,
    out: *mut *mut BlockadeRho,
) -> BlockadeStatus {
    require!(label);
    require!(out);
    *out = ptr::null_mut();
    guard(|| {
        let text = CStr::from_ptr(label)
            .to_str()
            .map_err(|_| Error::InvalidParams("label is not valid UTF-8".into()))?;
        let state = pure_state(text, Basis::Dicke)
            .or_else(|_| Ok::<_, Error>(pure_state(text, Basis::Product)?.to_basis(Basis::Dicke)))?;
        *out = Box::into_raw(Box::new(BlockadeRho(state)));
        Ok(())
    })
}

/// Releases a state handle. A null pointer is a no-op.
///
/// # Safety
/// `rho` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn blockade_rho_free(rho: *mut BlockadeRho) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Reads one Dicke-basis matrix entry.
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_rho_entry(
    rho: *const BlockadeRho,
    row: usize,
    col: usize,
    re: *mut c_double,
    im: *mut c_double,
) -> BlockadeStatus {
    require!(rho);
    require!(re);
    require!(im);
    if row >= DIM || col >= DIM {
        set_error("row and col must be below 4");
        return BlockadeStatus::InvalidInput;
    }
    let value = (*rho).0.to_basis(Basis::Dicke).entry(row, col);
    *re = value.re;
    *im = value.im;
    BlockadeStatus::Ok
}

/// Writes the four Dicke populations (ee, s, a, gg) to `out`.
///
/// # Safety
/// `rho` must be a live handle; `out` must have room for four doubles.
#[no_mangle]
pub unsafe extern "C" fn blockade_rho_populations(
    rho: *const BlockadeRho,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(rho);
    require!(out);
    let pops = dicke_populations(&(*rho).0);
    std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&pops);
    BlockadeStatus::Ok
}

/// Excited-state probability of either atom.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_excitation_probability(
    rho: *const BlockadeRho,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(rho);
    require!(out);
    guard(|| {
        *out = excitation_probability(&(*rho).0)?;
        Ok(())
    })
}

/// Probability of finding both atoms excited.
///
/// # Safety
/// As [`blockade_excitation_probability`].
#[no_mangle]
pub unsafe extern "C" fn blockade_double_excitation_probability(
    rho: *const BlockadeRho,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(rho);
    require!(out);
    *out = double_excitation_probability(&(*rho).0);
    BlockadeStatus::Ok
}

/// Wootters concurrence of the two-atom state.
///
/// # Safety
/// As [`blockade_excitation_probability`].
#[no_mangle]
pub unsafe extern "C" fn blockade_concurrence(
    rho: *const BlockadeRho,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(rho);
    require!(out);
    guard(|| {
        *out = concurrence(&(*rho).0)?;
        Ok(())
    })
}

/// Closed-form steady state.
///
/// # Safety
/// `params` must be a live handle; `out` as in [`blockade_params_new`].
#[no_mangle]
pub unsafe extern "C" fn blockade_steady_state_analytic(
    params: *const BlockadeParams,
    out: *mut *mut BlockadeRho,
) -> BlockadeStatus {
    require!(params);
    require!(out);
    *out = ptr::null_mut();
    guard(|| {
        *out = Box::into_raw(Box::new(BlockadeRho(steady_state_analytic(&(*params).0))));
        Ok(())
    })
}

/// Steady state from the generator's kernel.
///
/// # Safety
/// As [`blockade_steady_state_analytic`].
#[no_mangle]
pub unsafe extern "C" fn blockade_steady_state_numeric(
    params: *const BlockadeParams,
    out: *mut *mut BlockadeRho,
) -> BlockadeStatus {
    require!(params);
    require!(out);
    *out = ptr::null_mut();
    guard(|| {
        *out = Box::into_raw(Box::new(BlockadeRho(steady_state_numeric(&(*params).0)?)));
        Ok(())
    })
}

/// Largest entry magnitude of the state's time derivative; zero for a
/// steady state.
///
/// # Safety
/// `params` and `rho` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_stationarity_defect(
    params: *const BlockadeParams,
    rho: *const BlockadeRho,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(params);
    require!(rho);
    require!(out);
    *out = stationarity_defect(&(*params).0, &(*rho).0);
    BlockadeStatus::Ok
}

/// Steady-state ratio `P_ee / P_e^2` in closed form.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_ratio(
    params: *const BlockadeParams,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(params);
    require!(out);
    guard(|| {
        *out = blockade_ratio_analytic(&(*params).0)?;
        Ok(())
    })
}

/// Largest drive (in units of gamma) below which the steady state stays
/// entangled; zero when the shift admits no window.
#[no_mangle]
pub extern "C" fn blockade_entanglement_window(delta: c_double, gamma: c_double) -> c_double {
    entanglement_window(delta, gamma)
}

/// Zero-delay photon-photon cross correlation for detector phases `phi1`,
/// `phi2`, in closed form.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_g2_zero(
    params: *const BlockadeParams,
    phi1: c_double,
    phi2: c_double,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(params);
    require!(out);
    guard(|| {
        let geometry = DetectorGeometry::new(phi1, phi2)?;
        *out = g2_zero_analytic(&(*params).0, &geometry)?;
        Ok(())
    })
}

/// Delayed photon-photon cross correlation at `len` delays (units of
/// 1/gamma, finite and nonnegative, any order). Writes `len` values.
///
/// # Safety
/// `params` must be a live handle; `taus` must hold `len` readable doubles
/// and `out` room for `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn blockade_g2(
    params: *const BlockadeParams,
    phi1: c_double,
    phi2: c_double,
    taus: *const c_double,
    len: usize,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(params);
    if len == 0 {
        return BlockadeStatus::Ok;
    }
    require!(taus);
    require!(out);
    guard(|| {
        let geometry = DetectorGeometry::new(phi1, phi2)?;
        let delays = std::slice::from_raw_parts(taus, len);
        let values = g2(&(*params).0, &geometry, delays, &IntegratorConfig::default())?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&values);
        Ok(())
    })
}

/// Integrates the master equation from `rho0`, sampling at `len` strictly
/// increasing times within `[0, t_end]` (units of 1/gamma).
///
/// # Safety
/// `params` and `rho0` must be live handles; `times` must hold `len`
/// readable doubles; `out` as in [`blockade_params_new`].
#[no_mangle]
pub unsafe extern "C" fn blockade_evolve(
    params: *const BlockadeParams,
    rho0: *const BlockadeRho,
    t_end: c_double,
    times: *const c_double,
    len: usize,
    out: *mut *mut BlockadeTrajectory,
) -> BlockadeStatus {
    require!(params);
    require!(rho0);
    require!(out);
    if len > 0 {
        require!(times);
    }
    *out = ptr::null_mut();
    guard(|| {
        let grid =
            if len == 0 { &[][..] } else { std::slice::from_raw_parts(times, len) };
        let traj =
            evolve(&(*params).0, &(*rho0).0, t_end, grid, &IntegratorConfig::default())?;
        *out = Box::into_raw(Box::new(BlockadeTrajectory(traj)));
        Ok(())
    })
}

/// Number of samples held by a trajectory; zero for a null handle.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn blockade_trajectory_len(traj: *const BlockadeTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).0.len()
}

/// Sample time at `index`.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blockade_trajectory_time(
    traj: *const BlockadeTrajectory,
    index: usize,
    out: *mut c_double,
) -> BlockadeStatus {
    require!(traj);
    require!(out);
    let times = (*traj).0.times();
    if index >= times.len() {
        set_error("sample index out of range");
        return BlockadeStatus::InvalidInput;
    }
    *out = times[index];
    BlockadeStatus::Ok
}

/// Copies the sampled state at `index` into a fresh handle.
///
/// # Safety
/// `traj` must be a live handle; `out` as in [`blockade_params_new`].
#[no_mangle]
pub unsafe extern "C" fn blockade_trajectory_state(
    traj: *const BlockadeTrajectory,
    index: usize,
    out: *mut *mut BlockadeRho,
) -> BlockadeStatus {
    require!(traj);
    require!(out);
    *out = ptr::null_mut();
    let states = (*traj).0.states();
    if index >= states.len() {
        set_error("sample index out of range");
        return BlockadeStatus::InvalidInput;
    }
    let state = states[index].to_basis(Basis::Dicke);
    *out = Box::into_raw(Box::new(BlockadeRho(state)));
    BlockadeStatus::Ok
}

/// Releases a trajectory handle. A null pointer is a no-op.
///
/// # Safety
/// `traj` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn blockade_trajectory_free(traj: *mut BlockadeTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
