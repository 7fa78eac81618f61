//! C ABI over `qlocal`. Objects cross the boundary as opaque handles that the
//! caller frees with the matching `*_free`; every fallible call returns a
//! `QlStatus` and leaves a message for `ql_last_error`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::ptr;

use qlocal::circuit::AdaptiveCircuit;
use qlocal::ftarch::{bus_condition_holds, ft_total_qubits, FtMode};
use qlocal::grid::Vertex;
use qlocal::localize::{locality_check, localize_ideal, LocalizeError, LocalizedCircuit, Mode};
use qlocal::routing::{route_2d, route_3d, route_3d_subset, Pairing, RoutePath};
use qlocal::stabsim::{run_symbolic, symbolic_equivalent, Equivalence};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Precondition = 4,
    Internal = 5,
    BufferTooSmall = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlMode {
    TwoD = 0,
    ThreeD = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlFtMode {
    ThreeD = 0,
    Quasi2d = 1,
}

pub struct QlCircuit {
    inner: AdaptiveCircuit,
}

pub struct QlLocalized {
    inner: LocalizedCircuit,
}

pub struct QlRouting {
    paths: Vec<RoutePath>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: QlStatus, msg: impl ToString) -> QlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
    status
}

fn ok() -> QlStatus {
    LAST_ERROR.with(|e| e.borrow_mut().clear());
    QlStatus::Ok
}

fn localize_status(e: &LocalizeError) -> QlStatus {
    match e {
        LocalizeError::Circuit(qlocal::circuit::CircuitError::Json(_)) => QlStatus::Parse,
        _ => QlStatus::Precondition,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, QlStatus> {
    if s.is_null() {
        return Err(fail(QlStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(QlStatus::InvalidUtf8, e))
}

/// Copies `s` plus a NUL into `buf`. `needed` always receives the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> QlStatus {
    let want = s.len() + 1;
    if !needed.is_null() {
        *needed = want;
    }
    if buf.is_null() || len < want {
        return fail(QlStatus::BufferTooSmall, format!("need {want} bytes"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    ok()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ql_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread ("" after a success).
#[no_mangle]
pub unsafe extern "C" fn ql_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> QlStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    let want = msg.len() + 1;
    if !needed.is_null() {
        *needed = want;
    }
    if buf.is_null() || len < want {
        return QlStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, msg.len());
    *buf.add(msg.len()) = 0;
    QlStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn ql_circuit_from_json(json: *const c_char, out: *mut *mut QlCircuit) -> QlStatus {
    if out.is_null() {
        return fail(QlStatus::NullPointer, "null output handle");
    }
    *out = ptr::null_mut();
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match AdaptiveCircuit::from_json_checked(text) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(QlCircuit { inner: c }));
            ok()
        }
        Err(e @ qlocal::circuit::CircuitError::Json(_)) => fail(QlStatus::Parse, e),
        Err(e) => fail(QlStatus::Precondition, e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_circuit_free(c: *mut QlCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_circuit_num_qubits(c: *const QlCircuit, out: *mut usize) -> QlStatus {
    match (c.as_ref(), out.is_null()) {
        (Some(c), false) => {
            *out = c.inner.n;
            ok()
        }
        _ => fail(QlStatus::NullPointer, "null argument"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_circuit_depth(c: *const QlCircuit, out: *mut usize) -> QlStatus {
    match (c.as_ref(), out.is_null()) {
        (Some(c), false) => {
            *out = c.inner.depth();
            ok()
        }
        _ => fail(QlStatus::NullPointer, "null argument"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_localize(c: *const QlCircuit, mode: QlMode, out: *mut *mut QlLocalized) -> QlStatus {
    if out.is_null() {
        return fail(QlStatus::NullPointer, "null output handle");
    }
    *out = ptr::null_mut();
    let Some(c) = c.as_ref() else {
        return fail(QlStatus::NullPointer, "null circuit");
    };
    let mode = match mode {
        QlMode::TwoD => Mode::TwoD,
        QlMode::ThreeD => Mode::ThreeD,
    };
    match localize_ideal(&c.inner, mode) {
        Ok(lc) => {
            *out = Box::into_raw(Box::new(QlLocalized { inner: lc }));
            ok()
        }
        Err(e) => fail(localize_status(&e), e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_localized_from_json(json: *const c_char, out: *mut *mut QlLocalized) -> QlStatus {
    if out.is_null() {
        return fail(QlStatus::NullPointer, "null output handle");
    }
    *out = ptr::null_mut();
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match LocalizedCircuit::from_json(text) {
        Ok(lc) => {
            *out = Box::into_raw(Box::new(QlLocalized { inner: lc }));
            ok()
        }
        Err(e) => fail(localize_status(&e), e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_localized_free(lc: *mut QlLocalized) {
    if !lc.is_null() {
        drop(Box::from_raw(lc));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_localized_num_qubits(lc: *const QlLocalized, out: *mut usize) -> QlStatus {
    match (lc.as_ref(), out.is_null()) {
        (Some(lc), false) => {
            *out = lc.inner.layout.num_qubits();
            ok()
        }
        _ => fail(QlStatus::NullPointer, "null argument"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_localized_depth(lc: *const QlLocalized, out: *mut usize) -> QlStatus {
    match (lc.as_ref(), out.is_null()) {
        (Some(lc), false) => {
            *out = lc.inner.circuit.depth();
            ok()
        }
        _ => fail(QlStatus::NullPointer, "null argument"),
    }
}

/// Writes the localized document as JSON. Call with a null buffer to learn the size.
#[no_mangle]
pub unsafe extern "C" fn ql_localized_to_json(
    lc: *const QlLocalized,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> QlStatus {
    match lc.as_ref() {
        Some(lc) => write_str(&lc.inner.to_json(), buf, len, needed),
        None => fail(QlStatus::NullPointer, "null localized circuit"),
    }
}

/// Sets `*equivalent` when the localized circuit is local and reproduces the
/// source's outcome law and logical output state exactly.
#[no_mangle]
pub unsafe extern "C" fn ql_verify(src: *const QlCircuit, lc: *const QlLocalized, equivalent: *mut bool) -> QlStatus {
    let (Some(src), Some(lc)) = (src.as_ref(), lc.as_ref()) else {
        return fail(QlStatus::NullPointer, "null handle");
    };
    if equivalent.is_null() {
        return fail(QlStatus::NullPointer, "null output");
    }
    let src = &src.inner;
    if lc.inner.circuit.n < src.n {
        return fail(QlStatus::Precondition, "localized circuit has fewer qubits than the source");
    }
    let keep: Vec<usize> = (0..src.n).collect();
    let result = run_symbolic(src, None).and_then(|a| {
        let b = run_symbolic(&lc.inner.circuit, None)?;
        symbolic_equivalent(&a, &b, &src.outcome_ids(), &keep, &keep)
    });
    match result {
        Ok(eq) => {
            *equivalent = eq == Equivalence::Equal && locality_check(&lc.inner).is_empty();
            ok()
        }
        Err(qlocal::stabsim::StabError::UnknownOutcome(_)) => {
            *equivalent = false;
            ok()
        }
        Err(e) => fail(QlStatus::Precondition, e),
    }
}

/// Routes `npairs` pairs given as `coords[6*i .. 6*i+6] = x0 y0 z0 x1 y1 z1`.
#[no_mangle]
pub unsafe extern "C" fn ql_route(
    mode: QlMode,
    l: u32,
    coords: *const u32,
    npairs: usize,
    out: *mut *mut QlRouting,
) -> QlStatus {
    if out.is_null() || (coords.is_null() && npairs > 0) {
        return fail(QlStatus::NullPointer, "null argument");
    }
    *out = ptr::null_mut();
    let c: &[u32] = if npairs == 0 { &[] } else { std::slice::from_raw_parts(coords, 6 * npairs) };
    let pairs = c.chunks_exact(6).map(|w| (Vertex::new(w[0], w[1], w[2]), Vertex::new(w[3], w[4], w[5]))).collect();
    let pairing = Pairing::new(pairs);
    let paths = match mode {
        QlMode::TwoD => route_2d(l, &pairing),
        QlMode::ThreeD => {
            let full = 2 * npairs == (l as usize) * (l as usize);
            let r = if full { route_3d(l, &pairing) } else { route_3d_subset(l, &pairing) };
            r.map(|ps| ps.iter().map(|p| p.path()).collect())
        }
    };
    match paths {
        Ok(paths) => {
            *out = Box::into_raw(Box::new(QlRouting { paths }));
            ok()
        }
        Err(e) => fail(QlStatus::Precondition, e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_routing_free(r: *mut QlRouting) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_routing_num_paths(r: *const QlRouting) -> usize {
    r.as_ref().map_or(0, |r| r.paths.len())
}

/// Number of edges on path `i`, or 0 if out of range.
#[no_mangle]
pub unsafe extern "C" fn ql_routing_path_length(r: *const QlRouting, i: usize) -> usize {
    r.as_ref().and_then(|r| r.paths.get(i)).map_or(0, |p| p.len())
}

#[no_mangle]
pub unsafe extern "C" fn ql_routing_max_length(r: *const QlRouting) -> usize {
    r.as_ref().and_then(|r| r.paths.iter().map(|p| p.len()).max()).unwrap_or(0)
}

#[no_mangle]
pub extern "C" fn ql_bus_condition_holds(delta: u64, r: u64) -> bool {
    bus_condition_holds(delta, r)
}

/// Closed-form fault-tolerant qubit total for n data qubits, side l, bus width m.
#[no_mangle]
pub unsafe extern "C" fn ql_ft_total_qubits(mode: QlFtMode, n: u64, l: u64, m: u64, out: *mut u64) -> QlStatus {
    if out.is_null() {
        return fail(QlStatus::NullPointer, "null output");
    }
    let mode = match mode {
        QlFtMode::ThreeD => FtMode::ThreeD,
        QlFtMode::Quasi2d => FtMode::Quasi2D,
    };
    *out = ft_total_qubits(mode, n, l, m);
    ok()
}
