use std::ffi::{c_char, CStr, CString};
use std::ptr;

use quadlat_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { ql_string_free(p) };
    s
}

fn last_error() -> String {
    let p = ql_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn racah() -> *mut QlBochner {
    let mut h = ptr::null_mut();
    let (a, b, g, d) = (c("2"), c("3"), c("1"), c("1/2"));
    let code = unsafe { ql_bochner_racah(a.as_ptr(), b.as_ptr(), g.as_ptr(), d.as_ptr(), &mut h) };
    assert_eq!(code, QL_OK);
    h
}

#[test]
fn racah_lambda_and_ttrr() {
    let h = racah();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ql_bochner_lambda(h, 2, &mut s) }, QL_OK);
    assert_eq!(take_string(s), "-16");
    assert_eq!(unsafe { ql_bochner_ttrr_json(h, 2, &mut s) }, QL_OK);
    let v: Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["beta"][0], "-27/7");
    assert_eq!(v["gamma"][1], "675/196");
    assert!(ql_last_error().is_null());
    unsafe { ql_bochner_free(h) };
}

#[test]
fn solve_matches_known_leading_coefficients() {
    let h = racah();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ql_bochner_solve_json(h, 3, &mut s) }, QL_OK);
    let v: Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["theta"].as_array().unwrap().len(), 4);
    assert_eq!(v["theta"][3], "1");
    assert_eq!(v["mu"][3], "1");
    unsafe { ql_bochner_free(h) };
}

#[test]
fn verify_reports_pass_flag() {
    let h = racah();
    let mut s = ptr::null_mut();
    let mut pass = -1;
    let checks = c("hahn,bochner");
    assert_eq!(unsafe { ql_bochner_verify_json(h, checks.as_ptr(), 8, &mut s, &mut pass) }, QL_OK);
    assert_eq!(pass, 1);
    let v: Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["kind"], "hahn");
    unsafe { ql_bochner_free(h) };
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    let bad = c("1/0");
    let one = c("1");
    let code = unsafe { ql_bochner_racah(bad.as_ptr(), one.as_ptr(), one.as_ptr(), one.as_ptr(), &mut h) };
    assert_eq!(code, QL_ERR_PARSE);
    assert!(h.is_null());
    assert!(last_error().contains("parse"));

    let code = unsafe { ql_bochner_racah(ptr::null(), one.as_ptr(), one.as_ptr(), one.as_ptr(), &mut h) };
    assert_eq!(code, QL_ERR_NULL_ARG);

    // a0 = 1, b0 = -4 makes lambda_3 = lambda_0.
    let (z, a0, b0) = (c("0"), c("1"), c("-4"));
    let code = unsafe {
        ql_bochner_new(z.as_ptr(), z.as_ptr(), a0.as_ptr(), z.as_ptr(), z.as_ptr(), b0.as_ptr(), z.as_ptr(), &mut h)
    };
    assert_eq!(code, QL_OK);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ql_bochner_solve_json(h, 4, &mut s) }, QL_ERR_DEGENERATE);
    assert!(s.is_null());
    assert!(last_error().contains("degenerate"));
    assert_eq!(unsafe { ql_bochner_lambda(ptr::null(), 1, &mut s) }, QL_ERR_NULL_ARG);
    unsafe { ql_bochner_free(h) };
}

#[test]
fn json_documents() {
    let mut h = ptr::null_mut();
    let doc = c(r#"{"racah":{"alpha":"2","beta":"3","gamma":"1","delta":"1/2"}}"#);
    assert_eq!(unsafe { ql_bochner_from_json(doc.as_ptr(), &mut h) }, QL_OK);
    unsafe { ql_bochner_free(h) };
    let fam = c(r#"{"lattice":{"c2":"0","c3":"0"},"family":[["1"]]}"#);
    h = ptr::null_mut();
    assert_eq!(unsafe { ql_bochner_from_json(fam.as_ptr(), &mut h) }, QL_ERR_INVALID_INPUT);
    assert!(h.is_null());
}

#[test]
fn free_accepts_null_and_version_is_static() {
    unsafe {
        ql_bochner_free(ptr::null_mut());
        ql_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(ql_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
