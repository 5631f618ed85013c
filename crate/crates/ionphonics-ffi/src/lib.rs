//! C ABI for the ionphonics simulator.
//!
//! Objects cross the boundary as opaque handles created and destroyed here;
//! every fallible call returns an [`IpnStatus`] and leaves a human-readable
//! message retrievable with [`ipn_last_error_message`] on failure. Buffers
//! are always caller-allocated.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ionphonics::chain::{ChainConfig, ChainModel};
use ionphonics::compiler::{synth_beam_splitter, LadderPlan};
use ionphonics::dynamics::{evolve_through, Frame};
use ionphonics::entanglement::{log_negativity, Bipartition};
use ionphonics::gaussian::{ground_state, GaussianState};
use ionphonics::Schedule;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum IpnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NumericalError = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &ionphonics::Error) -> IpnStatus {
    match err.exit_code() {
        2 => IpnStatus::InvalidArgument,
        _ => IpnStatus::NumericalError,
    }
}

fn guard(body: impl FnOnce() -> IpnStatus) -> IpnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            IpnStatus::Panic
        }
    }
}

/// Last error message of the current thread (empty when no error occurred).
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn ipn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Solved chain model: geometry, effective frequencies, couplings.
pub struct IpnChain {
    model: ChainModel,
}

/// Gaussian state handle.
pub struct IpnState {
    state: GaussianState,
}

/// Trapping-frequency schedule handle.
pub struct IpnSchedule {
    schedule: Schedule,
}

/// Build a chain of `n` ions with the given bare radial frequencies
/// (units of the longitudinal frequency).
#[no_mangle]
pub extern "C" fn ipn_chain_new(
    bare_frequencies: *const f64,
    n: usize,
    out: *mut *mut IpnChain,
) -> IpnStatus {
    guard(|| {
        if bare_frequencies.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let bare = unsafe { std::slice::from_raw_parts(bare_frequencies, n) }.to_vec();
        let config = match ChainConfig::new(bare) {
            Ok(c) => c,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match ChainModel::build(config) {
            Ok(model) => {
                unsafe { *out = Box::into_raw(Box::new(IpnChain { model })) };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

#[no_mangle]
pub extern "C" fn ipn_chain_free(chain: *mut IpnChain) {
    if !chain.is_null() {
        drop(unsafe { Box::from_raw(chain) });
    }
}

#[no_mangle]
pub extern "C" fn ipn_chain_ions(chain: *const IpnChain) -> usize {
    if chain.is_null() {
        return 0;
    }
    unsafe { &*chain }.model.n()
}

/// Effective radial frequencies; `len` must be at least the ion count.
#[no_mangle]
pub extern "C" fn ipn_chain_effective_frequencies(
    chain: *const IpnChain,
    out: *mut f64,
    len: usize,
) -> IpnStatus {
    guard(|| {
        if chain.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let model = &unsafe { &*chain }.model;
        if len < model.n() {
            set_error("output buffer too small");
            return IpnStatus::BufferTooSmall;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, model.n()) };
        slice.copy_from_slice(&model.effective);
        IpnStatus::Ok
    })
}

/// Ground state of the chain Hamiltonian.
#[no_mangle]
pub extern "C" fn ipn_chain_ground_state(
    chain: *const IpnChain,
    out: *mut *mut IpnState,
) -> IpnStatus {
    guard(|| {
        if chain.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        match ground_state(&unsafe { &*chain }.model) {
            Ok(state) => {
                unsafe { *out = Box::into_raw(Box::new(IpnState { state })) };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

#[no_mangle]
pub extern "C" fn ipn_state_free(state: *mut IpnState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

#[no_mangle]
pub extern "C" fn ipn_state_modes(state: *const IpnState) -> usize {
    if state.is_null() {
        return 0;
    }
    unsafe { &*state }.state.n_modes()
}

/// Copy the 2n x 2n covariance matrix (row major, xxpp ordering).
#[no_mangle]
pub extern "C" fn ipn_state_covariance(
    state: *const IpnState,
    out: *mut f64,
    len: usize,
) -> IpnStatus {
    guard(|| {
        if state.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let cm = unsafe { &*state }.state.cm();
        let d = cm.nrows();
        if len < d * d {
            set_error("output buffer too small");
            return IpnStatus::BufferTooSmall;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, d * d) };
        for r in 0..d {
            for c in 0..d {
                slice[r * d + c] = cm[(r, c)];
            }
        }
        IpnStatus::Ok
    })
}

/// Logarithmic negativity across the bipartition whose party A is the given
/// list of 0-based mode indices.
#[no_mangle]
pub extern "C" fn ipn_state_log_negativity(
    state: *const IpnState,
    party_a: *const usize,
    party_len: usize,
    out: *mut f64,
) -> IpnStatus {
    guard(|| {
        if state.is_null() || party_a.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let st = &unsafe { &*state }.state;
        let party = unsafe { std::slice::from_raw_parts(party_a, party_len) };
        let partition = match Bipartition::new(party.iter().copied(), st.n_modes()) {
            Ok(p) => p,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match log_negativity(st, &partition) {
            Ok(v) => {
                unsafe { *out = v };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Parse a schedule from its line-oriented text format.
#[no_mangle]
pub extern "C" fn ipn_schedule_parse(
    text: *const c_char,
    out: *mut *mut IpnSchedule,
) -> IpnStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let text = match unsafe { std::ffi::CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("schedule text is not valid UTF-8");
                return IpnStatus::InvalidArgument;
            }
        };
        match Schedule::parse(text) {
            Ok(schedule) => {
                unsafe { *out = Box::into_raw(Box::new(IpnSchedule { schedule })) };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

#[no_mangle]
pub extern "C" fn ipn_schedule_free(schedule: *mut IpnSchedule) {
    if !schedule.is_null() {
        drop(unsafe { Box::from_raw(schedule) });
    }
}

#[no_mangle]
pub extern "C" fn ipn_schedule_instructions(schedule: *const IpnSchedule) -> usize {
    if schedule.is_null() {
        return 0;
    }
    unsafe { &*schedule }.schedule.instructions.len()
}

/// Print the schedule into a caller-provided buffer (NUL terminated).
/// `written` receives the text length excluding the terminator.
#[no_mangle]
pub extern "C" fn ipn_schedule_print(
    schedule: *const IpnSchedule,
    buf: *mut c_char,
    capacity: usize,
    written: *mut usize,
) -> IpnStatus {
    guard(|| {
        if schedule.is_null() || buf.is_null() || written.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let text = unsafe { &*schedule }.schedule.print();
        let bytes = text.as_bytes();
        if capacity < bytes.len() + 1 {
            unsafe { *written = bytes.len() + 1 };
            set_error("output buffer too small");
            return IpnStatus::BufferTooSmall;
        }
        unsafe {
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
            *buf.add(bytes.len()) = 0;
            *written = bytes.len();
        }
        IpnStatus::Ok
    })
}

/// Evolve a state through a schedule (closed dynamics, schedule frame).
#[no_mangle]
pub extern "C" fn ipn_schedule_evolve(
    schedule: *const IpnSchedule,
    state: *const IpnState,
    out: *mut *mut IpnState,
) -> IpnStatus {
    guard(|| {
        if schedule.is_null() || state.is_null() || out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let sched = &unsafe { &*schedule }.schedule;
        let st = &unsafe { &*state }.state;
        let frame = match Frame::for_schedule(sched) {
            Ok(f) => f,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match evolve_through(&frame, sched, st, None) {
            Ok(next) => {
                unsafe { *out = Box::into_raw(Box::new(IpnState { state: next })) };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Synthesize a two-mode rotation (beam splitter) between two 0-based ions
/// on a ladder of `n_ions` with the given effective-frequency step.
#[no_mangle]
pub extern "C" fn ipn_compile_beam_splitter(
    n_ions: usize,
    ion_a: usize,
    ion_b: usize,
    theta: f64,
    ladder_step: f64,
    out: *mut *mut IpnSchedule,
) -> IpnStatus {
    guard(|| {
        if out.is_null() {
            set_error("null argument");
            return IpnStatus::NullArgument;
        }
        let plan = match LadderPlan::new(n_ions, ladder_step) {
            Ok(p) => p,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match synth_beam_splitter(&plan, ion_a, ion_b, theta) {
            Ok(schedule) => {
                unsafe { *out = Box::into_raw(Box::new(IpnSchedule { schedule })) };
                IpnStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
