//! C ABI over `rdlab`. Digraphs cross the boundary as opaque handles owned
//! by the caller and released with `rdlab_digraph_free`. Every fallible call
//! returns an `RdlabStatus`; on failure a message is kept per thread and can
//! be read with `rdlab_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rdlab::ensembles::{sample_bernoulli, sample_regular};
use rdlab::factor::find_regular_factor;
use rdlab::sampler::enumerate_row_masks;
use rdlab::spectral::eigenvalue_list;
use rdlab::{Error, RegularDigraph, RngStream};

/// Largest n accepted by `rdlab_count_regular`; the count is by enumeration.
const COUNT_MAX_N: usize = 6;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Exhausted = 4,
    Numerical = 5,
    Panic = 6,
}

/// Opaque d-regular digraph.
pub struct RdlabDigraph {
    inner: RegularDigraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut buf = e.borrow_mut();
        buf.clear();
        buf.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn status_of(err: &Error) -> RdlabStatus {
    match err {
        Error::Exhausted { .. } => RdlabStatus::Exhausted,
        Error::NumericalFailure(_) | Error::IllConditioned { .. } => RdlabStatus::Numerical,
        _ => RdlabStatus::InvalidArgument,
    }
}

fn fail(status: RdlabStatus, msg: &str) -> RdlabStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RdlabStatus>) -> RdlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdlabStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RdlabStatus::Panic, &format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: rdlab::Result<T>) -> Result<T, RdlabStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RdlabStatus> {
    if p.is_null() {
        Err(fail(RdlabStatus::NullPointer, &format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `g` must be null or a live handle from this library.
unsafe fn handle<'a>(g: *const RdlabDigraph) -> Result<&'a RegularDigraph, RdlabStatus> {
    non_null(g, "digraph")?;
    Ok(&(*g).inner)
}

fn check_vertex(g: &RegularDigraph, v: usize) -> Result<(), RdlabStatus> {
    if v < g.n() {
        Ok(())
    } else {
        Err(fail(
            RdlabStatus::InvalidArgument,
            &format!("vertex {v} out of range for n={}", g.n()),
        ))
    }
}

fn boxed(g: RegularDigraph) -> *mut RdlabDigraph {
    Box::into_raw(Box::new(RdlabDigraph { inner: g }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdlab_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Length in bytes of the last error message on this thread, without the
/// terminating NUL.
#[no_mangle]
pub extern "C" fn rdlab_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` as a NUL-terminated string.
/// Needs `len > rdlab_last_error_length()`.
///
/// # Safety
/// `buf` must be valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn rdlab_last_error_message(buf: *mut c_char, len: usize) -> RdlabStatus {
    if buf.is_null() {
        return RdlabStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if len <= msg.len() {
            return RdlabStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
        *buf.add(msg.len()) = 0;
        RdlabStatus::Ok
    })
}

/// Samples an (approximately) uniform d-regular digraph on n vertices from
/// the stream (seed, stream).
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_sample(
    n: usize,
    d: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut RdlabDigraph,
) -> RdlabStatus {
    guard(|| {
        non_null(out, "out")?;
        let g = lift(sample_regular(n, d, RngStream::new(seed, stream)))?;
        *out = boxed(g);
        Ok(())
    })
}

/// Builds a digraph from `n * d` out-neighbour indices, row by row.
///
/// # Safety
/// `out_adj` must be valid for `n * d` reads and `out` for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_from_out_adj(
    n: usize,
    d: usize,
    out_adj: *const usize,
    out: *mut *mut RdlabDigraph,
) -> RdlabStatus {
    guard(|| {
        non_null(out, "out")?;
        let len = n
            .checked_mul(d)
            .ok_or_else(|| fail(RdlabStatus::InvalidArgument, "n * d overflows"))?;
        let flat: &[usize] = if len == 0 {
            &[]
        } else {
            non_null(out_adj, "out_adj")?;
            std::slice::from_raw_parts(out_adj, len)
        };
        let rows = if d == 0 { vec![Vec::new(); n] } else { flat.chunks(d).map(<[usize]>::to_vec).collect() };
        let g = lift(RegularDigraph::from_out_adj(n, d, rows))?;
        *out = boxed(g);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_free(g: *mut RdlabDigraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_n(g: *const RdlabDigraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.n())
}

/// Degree, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_d(g: *const RdlabDigraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.d())
}

/// Writes whether the edge i -> j is present.
///
/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_has_edge(
    g: *const RdlabDigraph,
    i: usize,
    j: usize,
    out: *mut bool,
) -> RdlabStatus {
    guard(|| {
        let g = handle(g)?;
        non_null(out, "out")?;
        check_vertex(g, i)?;
        check_vertex(g, j)?;
        *out = g.has_edge(i, j);
        Ok(())
    })
}

/// Copies the d sorted out-neighbours of vertex i into `buf`.
///
/// # Safety
/// `g` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_out_neighbors(
    g: *const RdlabDigraph,
    i: usize,
    buf: *mut usize,
    len: usize,
) -> RdlabStatus {
    guard(|| {
        let g = handle(g)?;
        check_vertex(g, i)?;
        let row = g.out_neighbors(i);
        if len < row.len() {
            return Err(fail(
                RdlabStatus::BufferTooSmall,
                &format!("need {} slots, got {len}", row.len()),
            ));
        }
        if !row.is_empty() {
            non_null(buf, "buf")?;
            ptr::copy_nonoverlapping(row.as_ptr(), buf, row.len());
        }
        Ok(())
    })
}

/// Number of common out-neighbours of two distinct vertices.
///
/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_codegree(
    g: *const RdlabDigraph,
    i1: usize,
    i2: usize,
    out: *mut usize,
) -> RdlabStatus {
    guard(|| {
        let g = handle(g)?;
        non_null(out, "out")?;
        *out = lift(g.codegree(i1, i2))?;
        Ok(())
    })
}

/// Eigenvalues of the adjacency matrix, or of A / sqrt(d) when `normalized`,
/// written as n real and n imaginary parts in LAPACK order.
///
/// # Safety
/// `g` must be a live handle; `re` and `im` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rdlab_digraph_eigenvalues(
    g: *const RdlabDigraph,
    normalized: bool,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> RdlabStatus {
    guard(|| {
        let g = handle(g)?;
        if len < g.n() {
            return Err(fail(
                RdlabStatus::BufferTooSmall,
                &format!("need {} slots, got {len}", g.n()),
            ));
        }
        let m = if normalized { lift(g.normalized())? } else { g.to_dense() };
        let vals = lift(eigenvalue_list(&m))?;
        if !vals.is_empty() {
            non_null(re, "re")?;
            non_null(im, "im")?;
            for (k, z) in vals.iter().enumerate() {
                *re.add(k) = z.re;
                *im.add(k) = z.im;
            }
        }
        Ok(())
    })
}

/// Exact number of d-regular digraphs on n labelled vertices, n <= 6.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_count_regular(n: usize, d: usize, out: *mut u64) -> RdlabStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(enumerate_row_masks(n, d, COUNT_MAX_N))?.len() as u64;
        Ok(())
    })
}

/// Samples an n x n Bernoulli(p) matrix from (seed, stream) and reports
/// whether it contains a d-regular factor.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rdlab_bernoulli_has_factor(
    n: usize,
    p: f64,
    d: usize,
    seed: u64,
    stream: u64,
    out: *mut bool,
) -> RdlabStatus {
    guard(|| {
        non_null(out, "out")?;
        if !(p > 0.0 && p < 1.0) {
            return Err(fail(RdlabStatus::InvalidArgument, &Error::BadP(p).to_string()));
        }
        let b = sample_bernoulli(n, p, RngStream::new(seed, stream));
        *out = lift(find_regular_factor(&b, d))?.exists;
        Ok(())
    })
}
