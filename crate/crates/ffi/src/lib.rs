//! C ABI over `cyclic-qgr`.
//!
//! An instance is opened into an opaque `CqgrInstance` handle, which owns the
//! fixed points, cell poset and GKM graph and computes the dual basis on
//! first use. Every function returns a `CqgrStatus`; results come back
//! through out-pointers. Strings returned to the caller are NUL-terminated,
//! UTF-8, and must be released with `cqgr_string_free`. Handles are released
//! with `cqgr_instance_free`. A handle may be shared between threads for
//! reading.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use cyclic_qgr::cohomology::DualBasis;
use cyclic_qgr::fixpoints::count_fixed_points;
use cyclic_qgr::gkm::GkmGraph;
use cyclic_qgr::model::Instance;
use cyclic_qgr::verify::{run_suite, Suite};

/// Outcome of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqgrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInstance = 3,
    InvalidPoint = 4,
    OutOfRange = 5,
    BudgetExceeded = 6,
    /// A computation failed its own exactness checks.
    ComputationFailed = 7,
    /// A verification suite found mismatches; the report is still returned.
    Mismatch = 8,
    /// The output buffer is too small; the needed length is reported.
    BufferTooSmall = 9,
    Panic = 10,
}

/// Which oracle suite `cqgr_verify` runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqgrSuite {
    Fixpoints = 0,
    Edges = 1,
    Abbv = 2,
    Graph = 3,
    All = 4,
}

impl CqgrSuite {
    fn from_raw(v: i32) -> Option<Self> {
        Some(match v {
            0 => CqgrSuite::Fixpoints,
            1 => CqgrSuite::Edges,
            2 => CqgrSuite::Abbv,
            3 => CqgrSuite::Graph,
            4 => CqgrSuite::All,
            _ => return None,
        })
    }
}

impl From<CqgrSuite> for Suite {
    fn from(s: CqgrSuite) -> Suite {
        match s {
            CqgrSuite::Fixpoints => Suite::Fixpoints,
            CqgrSuite::Edges => Suite::Edges,
            CqgrSuite::Abbv => Suite::Abbv,
            CqgrSuite::Graph => Suite::Graph,
            CqgrSuite::All => Suite::All,
        }
    }
}

/// Opaque handle to one instance.
pub struct CqgrInstance {
    graph: GkmGraph,
    basis: OnceLock<Result<DualBasis, String>>,
}

impl CqgrInstance {
    fn basis(&self) -> Result<&DualBasis, CqgrStatus> {
        self.basis
            .get_or_init(|| DualBasis::compute(&self.graph).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|_| CqgrStatus::ComputationFailed)
    }

    fn point(&self, k: usize) -> Result<usize, CqgrStatus> {
        if k < self.graph.points().len() {
            Ok(k)
        } else {
            Err(CqgrStatus::OutOfRange)
        }
    }
}

/// Runs `f`, turning early returns and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CqgrStatus>) -> CqgrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CqgrStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => CqgrStatus::Panic,
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, CqgrStatus> {
    p.as_ref().ok_or(CqgrStatus::NullPointer)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, CqgrStatus> {
    p.as_mut().ok_or(CqgrStatus::NullPointer)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, CqgrStatus> {
    if p.is_null() {
        return Err(CqgrStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| CqgrStatus::InvalidUtf8)
}

fn give_string(s: String, dst: &mut *mut c_char) -> Result<(), CqgrStatus> {
    // interior NULs cannot occur in our output; map them defensively
    let c = CString::new(s).map_err(|_| CqgrStatus::InvalidUtf8)?;
    *dst = c.into_raw();
    Ok(())
}

/// Opens an instance from `n=<int>;blocks=<int>[,<int>…]` or its JSON form.
/// Refuses instances with more than `budget` fixed points (0 means no cap).
///
/// # Safety
/// `instance` must be a NUL-terminated string; `handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_instance_new(
    instance: *const c_char,
    budget: u64,
    handle: *mut *mut CqgrInstance,
) -> CqgrStatus {
    guard(|| {
        let handle = out(handle)?;
        *handle = ptr::null_mut();
        let inst: Instance = text(instance)?.parse().map_err(|_| CqgrStatus::InvalidInstance)?;
        if budget != 0 && count_fixed_points(&inst) > budget {
            return Err(CqgrStatus::BudgetExceeded);
        }
        *handle = Box::into_raw(Box::new(CqgrInstance {
            graph: GkmGraph::new(&inst),
            basis: OnceLock::new(),
        }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `handle` must come from `cqgr_instance_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cqgr_instance_free(handle: *mut CqgrInstance) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cqgr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A static, human-readable description of a status code. Takes the raw
/// integer so that any value a caller holds is safe to pass.
#[no_mangle]
pub extern "C" fn cqgr_status_message(status: i32) -> *const c_char {
    let msg: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"string is not valid UTF-8",
        3 => c"malformed instance",
        4 => c"not a fixed point of this instance",
        5 => c"index out of range",
        6 => c"instance exceeds the budget",
        7 => c"computation failed its exactness checks",
        8 => c"verification found mismatches",
        9 => c"output buffer too small",
        10 => c"internal error",
        _ => c"unknown status",
    };
    msg.as_ptr()
}

/// Number of torus fixed points.
///
/// # Safety
/// `handle` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_point_count(handle: *const CqgrInstance, count: *mut usize) -> CqgrStatus {
    guard(|| {
        *out(count)? = borrow(handle)?.graph.points().len();
        Ok(())
    })
}

/// Name of the fixed point at `index` in canonical order (`I={…}` for a
/// single block, a box list otherwise).
///
/// # Safety
/// `handle` must be a live handle; `label` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_point_label(
    handle: *const CqgrInstance,
    index: usize,
    label: *mut *mut c_char,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        let label = out(label)?;
        give_string(h.graph.points().label(h.point(index)?), label)
    })
}

/// Canonical index of a fixed point given as `I={…}` or a JSON box list.
///
/// # Safety
/// `handle` must be a live handle, `point` NUL-terminated, `index` writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_point_index(
    handle: *const CqgrInstance,
    point: *const c_char,
    index: *mut usize,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        let k = h
            .graph
            .points()
            .parse_point(text(point)?)
            .map_err(|_| CqgrStatus::InvalidPoint)?;
        *out(index)? = k;
        Ok(())
    })
}

/// Dimension of the cell of the point at `index`.
///
/// # Safety
/// `handle` must be a live handle; `dim` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_cell_dim(
    handle: *const CqgrInstance,
    index: usize,
    dim: *mut u32,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        *out(dim)? = h.graph.poset().dim(h.point(index)?);
        Ok(())
    })
}

/// Cell counts by dimension into `coeffs[0..capacity]`; `len` receives the
/// number of coefficients, also when the buffer is too small.
///
/// # Safety
/// `handle` must be a live handle; `coeffs` must hold `capacity` values
/// (or be null when `capacity` is 0); `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_poincare(
    handle: *const CqgrInstance,
    coeffs: *mut u64,
    capacity: usize,
    len: *mut usize,
) -> CqgrStatus {
    guard(|| {
        let poly = borrow(handle)?.graph.poset().poincare_polynomial();
        *out(len)? = poly.len();
        if poly.len() > capacity {
            return Err(CqgrStatus::BufferTooSmall);
        }
        if coeffs.is_null() {
            return Err(CqgrStatus::NullPointer);
        }
        std::slice::from_raw_parts_mut(coeffs, poly.len()).copy_from_slice(&poly);
        Ok(())
    })
}

/// Number of GKM edges.
///
/// # Safety
/// `handle` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_edge_count(handle: *const CqgrInstance, count: *mut usize) -> CqgrStatus {
    guard(|| {
        *out(count)? = borrow(handle)?.graph.edges().len();
        Ok(())
    })
}

/// Endpoints and label of edge `k`. `label` may be null if not wanted.
///
/// # Safety
/// `handle` must be a live handle; `src` and `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_edge(
    handle: *const CqgrInstance,
    k: usize,
    src: *mut usize,
    dst: *mut usize,
    label: *mut *mut c_char,
) -> CqgrStatus {
    guard(|| {
        let e = borrow(handle)?
            .graph
            .edges()
            .get(k)
            .ok_or(CqgrStatus::OutOfRange)?;
        *out(src)? = e.src;
        *out(dst)? = e.dst;
        if let Some(label) = label.as_mut() {
            give_string(e.label.to_string(), label)?;
        }
        Ok(())
    })
}

/// The GKM graph as a JSON document.
///
/// # Safety
/// `handle` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_graph_json(handle: *const CqgrInstance, json: *mut *mut c_char) -> CqgrStatus {
    guard(|| {
        let doc = serde_json::to_string(&borrow(handle)?.graph.to_json()).expect("serializable");
        give_string(doc, out(json)?)
    })
}

/// `p^x|_y` as an expanded polynomial, e.g. `t0 - t[0][1] + t[2][1]`.
///
/// # Safety
/// `handle` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_basis_restriction(
    handle: *const CqgrInstance,
    x: usize,
    y: usize,
    value: *mut *mut c_char,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        let (x, y) = (h.point(x)?, h.point(y)?);
        let value = out(value)?;
        give_string(h.basis()?.class(x).polynomial(y).to_string(), value)
    })
}

/// The nonzero structure constants of `p^x · p^y` as a JSON array of
/// `{"z": index, "label": name, "c": polynomial}`, ascending by `z`.
///
/// # Safety
/// `handle` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_structure_constants_json(
    handle: *const CqgrInstance,
    x: usize,
    y: usize,
    json: *mut *mut c_char,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        let (x, y) = (h.point(x)?, h.point(y)?);
        let json = out(json)?;
        let constants = h
            .basis()?
            .structure_constants(&h.graph, x, y)
            .map_err(|_| CqgrStatus::ComputationFailed)?;
        let rows: Vec<serde_json::Value> = constants
            .into_iter()
            .map(|(z, c)| serde_json::json!({ "z": z, "label": h.graph.points().label(z), "c": c.to_string() }))
            .collect();
        give_string(serde_json::Value::Array(rows).to_string(), json)
    })
}

/// Runs an oracle suite (a `CqgrSuite` value) with the given candidate budget. Writes the JSON
/// report to `report` (if not null) and returns `Mismatch` when it failed.
///
/// # Safety
/// `handle` must be a live handle; `report` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cqgr_verify(
    handle: *const CqgrInstance,
    suite: i32,
    budget: u64,
    report: *mut *mut c_char,
) -> CqgrStatus {
    guard(|| {
        let h = borrow(handle)?;
        let suite = CqgrSuite::from_raw(suite).ok_or(CqgrStatus::OutOfRange)?;
        let result = run_suite(&h.graph, suite.into(), budget).map_err(|_| CqgrStatus::BudgetExceeded)?;
        if let Some(report) = report.as_mut() {
            give_string(serde_json::to_string(&result).expect("serializable"), report)?;
        }
        if result.passed {
            Ok(())
        } else {
            Err(CqgrStatus::Mismatch)
        }
    })
}
