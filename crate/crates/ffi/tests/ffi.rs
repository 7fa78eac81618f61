use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qlocal_ffi::*;

const BELL: &str = r#"{"version":1,"n":2,"layers":[
 {"ops":[{"kind":"clifford1","targets":[0],"params":["H"]}]},
 {"ops":[{"kind":"clifford2","targets":[0,1],"params":["CNOT"]}]},
 {"ops":[{"kind":"measure_z","targets":[0],"outcome_id":0},{"kind":"measure_z","targets":[1],"outcome_id":1}]}]}"#;

fn last_error() -> String {
    let mut need = 0usize;
    unsafe {
        ql_last_error(ptr::null_mut(), 0, &mut need);
        let mut buf = vec![0 as std::ffi::c_char; need];
        assert_eq!(ql_last_error(buf.as_mut_ptr(), need, &mut need), QlStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn load(json: &str) -> *mut QlCircuit {
    let s = CString::new(json).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ql_circuit_from_json(s.as_ptr(), &mut c) }, QlStatus::Ok);
    c
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(ql_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn localize_and_verify_round_trip() {
    unsafe {
        let c = load(BELL);
        let (mut n, mut d) = (0, 0);
        assert_eq!(ql_circuit_num_qubits(c, &mut n), QlStatus::Ok);
        assert_eq!(ql_circuit_depth(c, &mut d), QlStatus::Ok);
        assert_eq!((n, d), (2, 3));
        for mode in [QlMode::TwoD, QlMode::ThreeD] {
            let mut lc = ptr::null_mut();
            assert_eq!(ql_localize(c, mode, &mut lc), QlStatus::Ok);
            let mut total = 0;
            ql_localized_num_qubits(lc, &mut total);
            // n = 2: 2n registers plus two per directed edge of the host grid
            let want = if mode == QlMode::TwoD { 4 + 2 * 4 } else { 4 + 2 * (12 * 8 - 9 * 4) };
            assert_eq!(total, want);
            let mut eq = false;
            assert_eq!(ql_verify(c, lc, &mut eq), QlStatus::Ok);
            assert!(eq);

            let mut need = 0;
            assert_eq!(ql_localized_to_json(lc, ptr::null_mut(), 0, &mut need), QlStatus::BufferTooSmall);
            let mut buf = vec![0 as std::ffi::c_char; need];
            assert_eq!(ql_localized_to_json(lc, buf.as_mut_ptr(), need, &mut need), QlStatus::Ok);
            let mut back = ptr::null_mut();
            assert_eq!(ql_localized_from_json(buf.as_ptr(), &mut back), QlStatus::Ok);
            let mut eq2 = false;
            ql_verify(c, back, &mut eq2);
            assert!(eq2);
            ql_localized_free(back);
            ql_localized_free(lc);
        }
        ql_circuit_free(c);
    }
}

#[test]
fn verify_rejects_a_different_circuit() {
    unsafe {
        let c = load(BELL);
        let other = load(&BELL.replace("\"H\"", "\"S\""));
        let mut lc = ptr::null_mut();
        assert_eq!(ql_localize(other, QlMode::TwoD, &mut lc), QlStatus::Ok);
        let mut eq = true;
        assert_eq!(ql_verify(c, lc, &mut eq), QlStatus::Ok);
        assert!(!eq);
        ql_localized_free(lc);
        ql_circuit_free(other);
        ql_circuit_free(c);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let bad = CString::new("{\"version\":1,").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(ql_circuit_from_json(bad.as_ptr(), &mut c), QlStatus::Parse);
        assert!(c.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ql_circuit_from_json(ptr::null(), &mut c), QlStatus::NullPointer);
        let mut n = 0;
        assert_eq!(ql_circuit_num_qubits(ptr::null(), &mut n), QlStatus::NullPointer);
        let bad_qubit = CString::new(BELL.replace("\"targets\":[1],", "\"targets\":[7],")).unwrap();
        assert_eq!(ql_circuit_from_json(bad_qubit.as_ptr(), &mut c), QlStatus::Precondition);
        let good = load(BELL);
        assert!(last_error().is_empty());
        ql_circuit_free(good);
        ql_circuit_free(ptr::null_mut());
    }
}

#[test]
fn routing_handles() {
    unsafe {
        // L = 4 3D full pairing of the bottom plane in row-major order
        let mut coords = Vec::new();
        for k in 0..8u32 {
            let (a, b) = (2 * k, 2 * k + 1);
            coords.extend([a / 4, a % 4, 0, b / 4, b % 4, 0]);
        }
        let mut r = ptr::null_mut();
        assert_eq!(ql_route(QlMode::ThreeD, 4, coords.as_ptr(), 8, &mut r), QlStatus::Ok);
        assert_eq!(ql_routing_num_paths(r), 8);
        assert!(ql_routing_max_length(r) <= 40);
        assert_eq!(ql_routing_path_length(r, 99), 0);
        ql_routing_free(r);
        let repeated = [0u32, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0];
        assert_eq!(ql_route(QlMode::ThreeD, 4, repeated.as_ptr(), 2, &mut r), QlStatus::Precondition);
        assert!(r.is_null());
        assert!(last_error().contains("more than one pair"));

        let diag = [0u32, 0, 0, 3, 3, 0, 1, 1, 0, 2, 2, 0];
        assert_eq!(ql_route(QlMode::TwoD, 4, diag.as_ptr(), 2, &mut r), QlStatus::Ok);
        assert_eq!(ql_routing_path_length(r, 0), 6);
        assert_eq!(ql_routing_path_length(r, 1), 2);
        ql_routing_free(r);
    }
}

#[test]
fn arithmetic_helpers() {
    assert!(ql_bus_condition_holds(16, 4));
    assert!(!ql_bus_condition_holds(15, 4));
    let mut t = 0;
    unsafe {
        assert_eq!(ql_ft_total_qubits(QlFtMode::ThreeD, 4, 2, 82, &mut t), QlStatus::Ok);
        assert_eq!(t, 8 + 12 * 164u64.pow(3));
        ql_ft_total_qubits(QlFtMode::Quasi2d, 4, 4, 82, &mut t);
        assert_eq!(t, 8 + 2 * 16 * 82u64.pow(3));
    }
}

#[test]
fn header_is_generated_and_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/qlocal.h")).unwrap();
    for name in ["QlStatus", "QlCircuit", "ql_localize", "ql_verify", "ql_route", "ql_last_error"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use_header.c");
    std::fs::write(
        &src,
        "#include \"qlocal.h\"\nint main(void) { QlCircuit *c = 0; QlStatus s = ql_circuit_from_json(\"{}\", &c); \
         ql_circuit_free(c); return s == QL_STATUS_OK; }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .output()
        .expect("a C compiler is needed to check the header");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
