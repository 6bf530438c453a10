use std::ffi::{c_char, CStr, CString};
use std::ptr;

use cyclic_qgr_ffi::*;

struct Handle(*mut CqgrInstance);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { cqgr_instance_free(self.0) }
    }
}

fn open(spec: &str) -> Result<Handle, CqgrStatus> {
    let spec = CString::new(spec).unwrap();
    let mut h = ptr::null_mut();
    match unsafe { cqgr_instance_new(spec.as_ptr(), 0, &mut h) } {
        CqgrStatus::Ok => Ok(Handle(h)),
        status => {
            assert!(h.is_null());
            Err(status)
        }
    }
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { cqgr_string_free(s) };
    owned
}

#[test]
fn counts_and_labels() {
    let h = open("n=3;blocks=3").unwrap();
    let mut count = 0usize;
    assert_eq!(unsafe { cqgr_point_count(h.0, &mut count) }, CqgrStatus::Ok);
    assert_eq!(count, 7);
    let mut edges = 0usize;
    assert_eq!(unsafe { cqgr_edge_count(h.0, &mut edges) }, CqgrStatus::Ok);
    assert_eq!(edges, 9);

    let mut dims = Vec::new();
    for k in 0..count {
        let mut label = ptr::null_mut();
        assert_eq!(unsafe { cqgr_point_label(h.0, k, &mut label) }, CqgrStatus::Ok);
        let label = take(label);
        let c = CString::new(label.clone()).unwrap();
        let mut back = usize::MAX;
        assert_eq!(
            unsafe { cqgr_point_index(h.0, c.as_ptr(), &mut back) },
            CqgrStatus::Ok
        );
        assert_eq!(back, k, "{label}");
        let mut d = 0u32;
        assert_eq!(unsafe { cqgr_cell_dim(h.0, k, &mut d) }, CqgrStatus::Ok);
        dims.push(d);
    }
    dims.sort();
    assert_eq!(dims, [0, 1, 1, 1, 2, 2, 2]);
}

#[test]
fn poincare_buffer_protocol() {
    let h = open("n=3;blocks=3").unwrap();
    let mut len = 0usize;
    let status = unsafe { cqgr_poincare(h.0, ptr::null_mut(), 0, &mut len) };
    assert_eq!(status, CqgrStatus::BufferTooSmall);
    assert_eq!(len, 3);
    let mut buf = vec![0u64; len];
    assert_eq!(
        unsafe { cqgr_poincare(h.0, buf.as_mut_ptr(), buf.len(), &mut len) },
        CqgrStatus::Ok
    );
    assert_eq!(buf, [1, 3, 3]);
}

#[test]
fn edges_and_graph_json() {
    let h = open("n=3;blocks=3").unwrap();
    let (mut src, mut dst, mut label) = (0usize, 0usize, ptr::null_mut());
    assert_eq!(
        unsafe { cqgr_edge(h.0, 0, &mut src, &mut dst, &mut label) },
        CqgrStatus::Ok
    );
    assert_ne!(src, dst);
    assert!(take(label).contains("t0"));
    assert_eq!(
        unsafe { cqgr_edge(h.0, 0, &mut src, &mut dst, ptr::null_mut()) },
        CqgrStatus::Ok
    );
    assert_eq!(
        unsafe { cqgr_edge(h.0, 9, &mut src, &mut dst, ptr::null_mut()) },
        CqgrStatus::OutOfRange
    );

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cqgr_graph_json(h.0, &mut json) }, CqgrStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(doc["edges"].as_array().unwrap().len(), 9);
}

#[test]
fn basis_and_structure_constants() {
    let h = open("n=3;blocks=3").unwrap();
    let index = |s: &str| {
        let c = CString::new(s).unwrap();
        let mut k = 0usize;
        assert_eq!(
            unsafe { cqgr_point_index(h.0, c.as_ptr(), &mut k) },
            CqgrStatus::Ok
        );
        k
    };
    let (x, y, z) = (index("I={0,1}"), index("I={0,2}"), index("I={0}"));

    // the class of the point cell is 1; p^x vanishes off the closure of its cell
    let point = index("I={0,1,2}");
    let mut value = ptr::null_mut();
    assert_eq!(
        unsafe { cqgr_basis_restriction(h.0, point, z, &mut value) },
        CqgrStatus::Ok
    );
    assert_eq!(take(value), "1");
    assert_eq!(
        unsafe { cqgr_basis_restriction(h.0, x, y, &mut value) },
        CqgrStatus::Ok
    );
    assert_eq!(take(value), "0");

    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { cqgr_structure_constants_json(h.0, x, y, &mut json) },
        CqgrStatus::Ok
    );
    let rows: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    let row = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["z"] == z)
        .expect("c at {0} is nonzero");
    assert_eq!(row["c"], "1");
    assert_eq!(row["label"], "I={0}");
}

#[test]
fn verification_suites() {
    let h = open("n=3;blocks=3,2").unwrap();
    for suite in [
        CqgrSuite::Fixpoints,
        CqgrSuite::Edges,
        CqgrSuite::Graph,
        CqgrSuite::All,
    ] {
        let mut report = ptr::null_mut();
        assert_eq!(
            unsafe { cqgr_verify(h.0, suite as i32, 1_000_000, &mut report) },
            CqgrStatus::Ok
        );
        let doc: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(doc["passed"], true);
    }
    assert_eq!(
        unsafe { cqgr_verify(h.0, 17, 0, ptr::null_mut()) },
        CqgrStatus::OutOfRange
    );
    // the fixed-point oracle enumerates N^n candidates, 125 here
    assert_eq!(
        unsafe { cqgr_verify(h.0, CqgrSuite::Fixpoints as i32, 10, ptr::null_mut()) },
        CqgrStatus::BudgetExceeded
    );
}

#[test]
fn error_codes() {
    assert_eq!(open("n=3;blocks=").err(), Some(CqgrStatus::InvalidInstance));
    assert_eq!(open("n=0;blocks=3").err(), Some(CqgrStatus::InvalidInstance));

    let spec = CString::new("n=4;blocks=1,1,1,1,1").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { cqgr_instance_new(spec.as_ptr(), 10, &mut h) },
        CqgrStatus::BudgetExceeded
    );
    assert!(h.is_null());

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { cqgr_instance_new(bad.as_ptr().cast(), 0, &mut h) },
        CqgrStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { cqgr_instance_new(ptr::null(), 0, &mut h) },
        CqgrStatus::NullPointer
    );
    assert_eq!(
        unsafe { cqgr_instance_new(spec.as_ptr(), 0, ptr::null_mut()) },
        CqgrStatus::NullPointer
    );

    let mut count = 0usize;
    assert_eq!(
        unsafe { cqgr_point_count(ptr::null(), &mut count) },
        CqgrStatus::NullPointer
    );

    let h = open("n=3;blocks=3").unwrap();
    let mut d = 0u32;
    assert_eq!(unsafe { cqgr_cell_dim(h.0, 7, &mut d) }, CqgrStatus::OutOfRange);
    let not_a_point = CString::new("I={1,2,0,5}").unwrap();
    let mut k = 0usize;
    assert_eq!(
        unsafe { cqgr_point_index(h.0, not_a_point.as_ptr(), &mut k) },
        CqgrStatus::InvalidPoint
    );

    // null frees are no-ops
    unsafe {
        cqgr_instance_free(ptr::null_mut());
        cqgr_string_free(ptr::null_mut());
    }
}

#[test]
fn status_messages() {
    for code in -1..=11 {
        let msg = unsafe { CStr::from_ptr(cqgr_status_message(code)) }
            .to_str()
            .unwrap();
        assert!(!msg.is_empty());
    }
    let ok = unsafe { CStr::from_ptr(cqgr_status_message(CqgrStatus::Ok as i32)) };
    assert_eq!(ok.to_str().unwrap(), "ok");
}
