//! C ABI for the `qvakit` toolkit.
//!
//! Conventions:
//! - every fallible function returns a [`QvaStatus`] and writes results
//!   through out-pointers;
//! - graphs and ansätze are opaque handles created by `*_new`-style
//!   constructors and released with the matching `*_free`;
//! - after a non-`Ok` status, [`qva_last_error_message`] describes the
//!   failure (thread-local, valid until the next failing call on the same
//!   thread);
//! - panics never cross the boundary; they are reported as
//!   [`QvaStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qvakit::cli::load_instance;
use qvakit::combinatorics::{rank_in_multiset, unrank_in_multiset_usize};
use qvakit::graphs::{FingerprintParams, GraphSpec, SparseGraph};
use qvakit::metrics::{convergence_potential, hamming_coefficient, DenseModel};
use qvakit::problems::InstanceFile;
use qvakit::qva::{expectation, Algorithm, Ansatz};
use qvakit::QvaError;

// ============================================================================
// Status codes and error reporting
// ============================================================================

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QvaStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument or configuration was invalid.
    InvalidArgument = 2,
    /// A numerical routine failed or a size limit was exceeded.
    Numerical = 3,
    /// An output buffer was too small.
    BufferTooSmall = 4,
    /// An internal panic was caught.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn from_error(err: QvaError) -> QvaStatus {
    let status = match err {
        QvaError::Numerical(_) | QvaError::TooLarge { .. } => QvaStatus::Numerical,
        _ => QvaStatus::InvalidArgument,
    };
    set_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> Result<(), QvaStatus>) -> QvaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QvaStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            QvaStatus::Panic
        }
    }
}

fn check<T>(r: qvakit::Result<T>) -> Result<T, QvaStatus> {
    r.map_err(from_error)
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), QvaStatus> {
    if p.is_null() {
        set_error(format!("null pointer: {name}"));
        Err(QvaStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, QvaStatus> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        QvaStatus::InvalidArgument
    })
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], QvaStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message describing the last failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn qva_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Toolkit version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qva_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ============================================================================
// Closed forms and combinatorics
// ============================================================================

/// Closed-form walk coefficient of the Hamming graph `H(n, m)` at distance
/// `d` and time `t`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_hamming_coefficient(
    n: usize,
    m: usize,
    d: usize,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> QvaStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        if d > n || m == 0 {
            set_error(format!("need 0 <= d <= n and m >= 1 (n={n}, m={m}, d={d})"));
            return Err(QvaStatus::InvalidArgument);
        }
        let w = hamming_coefficient(n, m, d, t);
        *re = w.re;
        *im = w.im;
        Ok(())
    })
}

/// Lexicographic rank of the sequence `s[0..len]` among the distinct
/// permutations of its multiset.
///
/// # Safety
/// `s` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_rank_in_multiset(s: *const usize, len: usize, out: *mut u64) -> QvaStatus {
    guard(|| {
        let s = slice(s, len, "s")?;
        non_null(out, "out")?;
        let r = rank_in_multiset(s);
        *out = u64::try_from(&r).map_err(|_| {
            set_error("rank exceeds 64 bits");
            QvaStatus::Numerical
        })?;
        Ok(())
    })
}

/// Inverse of [`qva_rank_in_multiset`]: write the permutation of rank
/// `rank` of the multiset with multiplicities `counts[0..m]` into
/// `out[0..out_len]` (`out_len` must equal the multiset size).
///
/// # Safety
/// `counts` must point to `m` readable values and `out` to `out_len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn qva_unrank_in_multiset(
    rank: u64,
    counts: *const usize,
    m: usize,
    out: *mut usize,
    out_len: usize,
) -> QvaStatus {
    guard(|| {
        let counts = slice(counts, m, "counts")?;
        let s = check(unrank_in_multiset_usize(rank as usize, counts))?;
        if out_len < s.len() {
            set_error(format!("output needs {} entries", s.len()));
            return Err(QvaStatus::BufferTooSmall);
        }
        non_null(out, "out")?;
        std::slice::from_raw_parts_mut(out, s.len()).copy_from_slice(&s);
        Ok(())
    })
}

// ============================================================================
// Graph handles
// ============================================================================

/// Opaque mixer graph.
pub struct QvaGraph {
    graph: SparseGraph,
}

fn make_graph(spec: GraphSpec, out: *mut *mut QvaGraph) -> Result<(), QvaStatus> {
    non_null(out, "out")?;
    check(spec.validate())?;
    let graph = check(spec.build())?;
    unsafe { *out = Box::into_raw(Box::new(QvaGraph { graph })) };
    Ok(())
}

/// Create the Hamming graph `H(n, m)`.
///
/// # Safety
/// `out` must be valid for writes; release the handle with
/// [`qva_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn qva_graph_hamming(n: usize, m: usize, out: *mut *mut QvaGraph) -> QvaStatus {
    guard(|| make_graph(GraphSpec::Hamming { n, m }, out))
}

/// Create the complete graph `K_n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_complete(n: usize, out: *mut *mut QvaGraph) -> QvaStatus {
    guard(|| make_graph(GraphSpec::Complete { n }, out))
}

/// Create the constrained permutation graph of the multiset with
/// multiplicities `counts[0..m]`.
///
/// # Safety
/// `counts` must point to `m` readable values; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_constrained_permutation(
    counts: *const usize,
    m: usize,
    out: *mut *mut QvaGraph,
) -> QvaStatus {
    guard(|| {
        let counts = slice(counts, m, "counts")?.to_vec();
        make_graph(GraphSpec::ConstrainedPermutation { counts }, out)
    })
}

/// Create a complete K-partite graph with parts of `sizes[0..k]`.
///
/// # Safety
/// `sizes` must point to `k` readable values; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_kpartite(sizes: *const usize, k: usize, out: *mut *mut QvaGraph) -> QvaStatus {
    guard(|| {
        let sizes = slice(sizes, k, "sizes")?.to_vec();
        make_graph(GraphSpec::KPartite { sizes }, out)
    })
}

/// Release a graph handle (null is ignored).
///
/// # Safety
/// `g` must be null or a handle from a `qva_graph_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_free(g: *mut QvaGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, maximum degree and diameter of a graph.
///
/// # Safety
/// `g` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_stats(
    g: *const QvaGraph,
    vertices: *mut usize,
    degree: *mut usize,
    diameter: *mut usize,
) -> QvaStatus {
    guard(|| {
        non_null(g, "graph")?;
        non_null(vertices, "vertices")?;
        non_null(degree, "degree")?;
        non_null(diameter, "diameter")?;
        let g = &(*g).graph;
        *vertices = g.num_vertices();
        *degree = g.max_degree();
        *diameter = check(g.diameter_bfs())?;
        Ok(())
    })
}

/// Optimal walk time, convergence potential and subshell count of a graph
/// (within the dense size limit) relative to `reference`.
///
/// # Safety
/// `g` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_graph_convergence_potential(
    g: *const QvaGraph,
    reference: usize,
    t_star: *mut f64,
    prob_star: *mut f64,
    subshells: *mut usize,
) -> QvaStatus {
    guard(|| {
        non_null(g, "graph")?;
        non_null(t_star, "t_star")?;
        non_null(prob_star, "prob_star")?;
        non_null(subshells, "subshells")?;
        let model = check(DenseModel::new(&(*g).graph, reference, &FingerprintParams::default()))?;
        let cp = convergence_potential(&model);
        *t_star = cp.t_star;
        *prob_star = cp.prob;
        *subshells = model.partition().subshell_count();
        Ok(())
    })
}

// ============================================================================
// Ansatz handles
// ============================================================================

/// Opaque assembled ansatz.
pub struct QvaAnsatz {
    ansatz: Ansatz,
}

/// Build an ansatz. `instance` is a builtin name (`schedule_a`,
/// `schedule_b`), `synthetic:n:A:seed`, or a path to a JSON instance file;
/// `algorithm` is a lowercase algorithm name such as `qmoa` or `qwoa_cs`.
///
/// # Safety
/// `instance` and `algorithm` must be NUL-terminated strings; `out` must be
/// valid for writes. Release the handle with [`qva_ansatz_free`].
#[no_mangle]
pub unsafe extern "C" fn qva_ansatz_new(
    instance: *const c_char,
    algorithm: *const c_char,
    p: usize,
    out: *mut *mut QvaAnsatz,
) -> QvaStatus {
    guard(|| {
        let instance = c_str(instance, "instance")?;
        let algorithm: Algorithm = check(c_str(algorithm, "algorithm")?.parse())?;
        non_null(out, "out")?;
        let ansatz = match check(load_instance(instance))? {
            InstanceFile::Pms(i) => check(Ansatz::pms(&i, algorithm, p, false))?,
            InstanceFile::Portfolio(i) => check(Ansatz::portfolio(&i, algorithm, p))?,
        };
        *out = Box::into_raw(Box::new(QvaAnsatz { ansatz }));
        Ok(())
    })
}

/// Release an ansatz handle (null is ignored).
///
/// # Safety
/// `a` must be null or a live handle from [`qva_ansatz_new`].
#[no_mangle]
pub unsafe extern "C" fn qva_ansatz_free(a: *mut QvaAnsatz) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Statevector dimension and parameter-vector length of an ansatz.
///
/// # Safety
/// `a` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_ansatz_shape(a: *const QvaAnsatz, dim: *mut usize, num_params: *mut usize) -> QvaStatus {
    guard(|| {
        non_null(a, "ansatz")?;
        non_null(dim, "dim")?;
        non_null(num_params, "num_params")?;
        *dim = (*a).ansatz.dim();
        *num_params = (*a).ansatz.num_params();
        Ok(())
    })
}

/// Evolve with parameters `theta[0..len]` and report the expectation value
/// and approximation ratio.
///
/// # Safety
/// `a` must be a live handle, `theta` must point to `len` readable values,
/// and the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qva_ansatz_evaluate(
    a: *const QvaAnsatz,
    theta: *const f64,
    len: usize,
    expectation_out: *mut f64,
    ratio_out: *mut f64,
) -> QvaStatus {
    guard(|| {
        non_null(a, "ansatz")?;
        non_null(expectation_out, "expectation")?;
        non_null(ratio_out, "ratio")?;
        let theta = slice(theta, len, "theta")?;
        let ansatz = &(*a).ansatz;
        let state = check(ansatz.evolve(theta))?;
        let e = check(expectation(&state, ansatz.costs()))?;
        *expectation_out = e;
        *ratio_out = check(ansatz.ratio(e))?;
        Ok(())
    })
}

/// Evolve with parameters `theta[0..len]` and write the statevector's real
/// and imaginary parts into `re[0..dim]` and `im[0..dim]`.
///
/// # Safety
/// `a` must be a live handle; `theta` must point to `len` readable values;
/// `re` and `im` must each point to `dim` writable values.
#[no_mangle]
pub unsafe extern "C" fn qva_ansatz_evolve(
    a: *const QvaAnsatz,
    theta: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
    dim: usize,
) -> QvaStatus {
    guard(|| {
        non_null(a, "ansatz")?;
        let theta = slice(theta, len, "theta")?;
        let ansatz = &(*a).ansatz;
        if dim < ansatz.dim() {
            set_error(format!("output needs {} entries", ansatz.dim()));
            return Err(QvaStatus::BufferTooSmall);
        }
        non_null(re, "re")?;
        non_null(im, "im")?;
        let state = check(ansatz.evolve(theta))?;
        let re = std::slice::from_raw_parts_mut(re, state.len());
        let im = std::slice::from_raw_parts_mut(im, state.len());
        for ((r, i), z) in re.iter_mut().zip(im.iter_mut()).zip(&state) {
            *r = z.re;
            *i = z.im;
        }
        Ok(())
    })
}
