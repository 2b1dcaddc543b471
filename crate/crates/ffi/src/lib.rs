//! C ABI for the tomography library: opaque handles, status codes, and a
//! thread-local error message. The header is generated into
//! `include/tomokit.h` by the build script.
//!
//! Complex data crosses the boundary as interleaved doubles
//! `[re0, im0, re1, im1, ...]`, matrices in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use tomokit::{
    gram_schmidt, hs_inner, identity_check, is_minimal_tomographic_set, pauli_counterexample,
    projector_from_vector, random_density_matrix, reconstruct, spin_half_kernel, tomogram,
    wigner_3j, GramKernel, GridSpec, HalfInteger, OperatorMatrix, RankOneProjector,
    SphereDirection, Tomogram, TomographicSet,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TomoStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or malformed.
    InvalidArgument = 2,
    /// Operand dimensions do not match.
    DimensionMismatch = 3,
    /// The projector family does not span the operator space.
    RankDeficient = 4,
    /// A numeric guard tripped (overflow, branch point, misalignment).
    Numeric = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &tomokit::TomoError) -> TomoStatus {
    use tomokit::TomoError::*;
    match err {
        DimensionMismatch { .. } | NotSquare { .. } | LengthMismatch { .. } => {
            TomoStatus::DimensionMismatch
        }
        RankDeficient { .. } | WrongProjectorCount { .. } => TomoStatus::RankDeficient,
        PrefactorOverflow { .. }
        | BranchAmbiguity { .. }
        | NuMisaligned { .. }
        | NuZero
        | ChirpUnderResolved { .. }
        | SqueezeUnreachable { .. } => TomoStatus::Numeric,
        _ => TomoStatus::InvalidArgument,
    }
}

fn fail(err: tomokit::TomoError) -> TomoStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Opaque dense complex matrix handle.
pub struct TomoMatrix {
    inner: OperatorMatrix,
}

/// Opaque projector-family handle, built vector by vector.
pub struct TomoSet {
    dim: usize,
    projectors: Vec<RankOneProjector>,
}

/// Opaque dual-kernel handle produced by Gram-Schmidt orthonormalization.
pub struct TomoKernel {
    set: Arc<TomographicSet>,
    kernel: GramKernel,
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn tomo_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent error on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tomo_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a dim x dim matrix from row-major interleaved complex entries
/// (2 * dim * dim doubles).
///
/// # Safety
/// `entries` must point to 2 * dim * dim readable doubles and `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn tomo_matrix_new(
    dim: usize,
    entries: *const f64,
    out: *mut *mut TomoMatrix,
) -> TomoStatus {
    if entries.is_null() || out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    if dim == 0 {
        set_error("dimension must be positive");
        return TomoStatus::InvalidArgument;
    }
    let data = std::slice::from_raw_parts(entries, 2 * dim * dim);
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        Complex64::new(data[k], data[k + 1])
    });
    match OperatorMatrix::from_matrix(m) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TomoMatrix { inner }));
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Seeded random density matrix (Hermitian, positive, unit trace).
///
/// # Safety
/// `out` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn tomo_matrix_random_density(
    dim: usize,
    seed: u64,
    out: *mut *mut TomoMatrix,
) -> TomoStatus {
    if out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    match random_density_matrix(dim, seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TomoMatrix { inner }));
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a matrix handle; null is ignored.
///
/// # Safety
/// `m` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tomo_matrix_free(m: *mut TomoMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix dimension, or 0 for a null handle.
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tomo_matrix_dim(m: *const TomoMatrix) -> usize {
    if m.is_null() {
        return 0;
    }
    (*m).inner.dim()
}

/// Copies the matrix into a caller buffer of 2 * dim * dim doubles,
/// row-major interleaved.
///
/// # Safety
/// `buffer` must have room for 2 * dim * dim doubles.
#[no_mangle]
pub unsafe extern "C" fn tomo_matrix_copy(m: *const TomoMatrix, buffer: *mut f64) -> TomoStatus {
    if m.is_null() || buffer.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let inner = &(*m).inner;
    let n = inner.dim();
    let out = std::slice::from_raw_parts_mut(buffer, 2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let z = inner.get(i, j);
            out[2 * (i * n + j)] = z.re;
            out[2 * (i * n + j) + 1] = z.im;
        }
    }
    TomoStatus::Ok
}

/// Trace scalar product Tr(A† B).
///
/// # Safety
/// All pointers must be live handles / writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tomo_hs_inner(
    a: *const TomoMatrix,
    b: *const TomoMatrix,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TomoStatus {
    if a.is_null() || b.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    match hs_inner(&(*a).inner, &(*b).inner) {
        Ok(z) => {
            *out_re = z.re;
            *out_im = z.im;
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// New empty projector family on a dim-dimensional space.
///
/// # Safety
/// `out` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn tomo_set_new(dim: usize, out: *mut *mut TomoSet) -> TomoStatus {
    if out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    if dim == 0 {
        set_error("dimension must be positive");
        return TomoStatus::InvalidArgument;
    }
    *out = Box::into_raw(Box::new(TomoSet {
        dim,
        projectors: Vec::new(),
    }));
    TomoStatus::Ok
}

/// Releases a set handle; null is ignored.
///
/// # Safety
/// `s` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tomo_set_free(s: *mut TomoSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Appends the rank-one projector of a state vector given as interleaved
/// complex amplitudes (2 * dim doubles); the vector is normalized.
///
/// # Safety
/// `vector` must point to 2 * dim readable doubles.
#[no_mangle]
pub unsafe extern "C" fn tomo_set_push_vector(s: *mut TomoSet, vector: *const f64) -> TomoStatus {
    if s.is_null() || vector.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let set = &mut *s;
    let data = std::slice::from_raw_parts(vector, 2 * set.dim);
    let v = DVector::from_fn(set.dim, |i, _| Complex64::new(data[2 * i], data[2 * i + 1]));
    match projector_from_vector(&v) {
        Ok(p) => {
            set.projectors.push(p);
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of projectors currently in the family.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tomo_set_len(s: *const TomoSet) -> usize {
    if s.is_null() {
        return 0;
    }
    (*s).projectors.len()
}

fn build_set(s: &TomoSet) -> Result<Arc<TomographicSet>, tomokit::TomoError> {
    Ok(Arc::new(TomographicSet::from_projectors(
        s.dim,
        s.projectors.clone(),
    )?))
}

/// Minimality diagnosis: writes rank, condition number, and 1/0 minimality.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tomo_set_minimality(
    s: *const TomoSet,
    out_minimal: *mut i32,
    out_rank: *mut usize,
    out_condition: *mut f64,
) -> TomoStatus {
    if s.is_null() || out_minimal.is_null() || out_rank.is_null() || out_condition.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let set = match build_set(&*s) {
        Ok(set) => set,
        Err(e) => return fail(e),
    };
    match is_minimal_tomographic_set(&set) {
        Ok(report) => {
            *out_minimal = report.minimal as i32;
            *out_rank = report.rank;
            *out_condition = report.condition_number;
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Gram-Schmidt dual kernel of a minimal family.
///
/// # Safety
/// `out` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn tomo_kernel_new(
    s: *const TomoSet,
    out: *mut *mut TomoKernel,
) -> TomoStatus {
    if s.is_null() || out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let set = match build_set(&*s) {
        Ok(set) => set,
        Err(e) => return fail(e),
    };
    match gram_schmidt(&set) {
        Ok(kernel) => {
            *out = Box::into_raw(Box::new(TomoKernel { set, kernel }));
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a kernel handle; null is ignored.
///
/// # Safety
/// `k` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tomo_kernel_free(k: *mut TomoKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Frobenius residual of the identity decomposition built from the kernel.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tomo_kernel_identity_residual(
    k: *const TomoKernel,
    out: *mut f64,
) -> TomoStatus {
    if k.is_null() || out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    match identity_check(&(*k).kernel, &(*k).set) {
        Ok(residual) => {
            *out = residual;
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Tomogram of a state against the family: writes one probability per
/// projector into `values`.
///
/// # Safety
/// `values` must have room for tomo_set_len(s) doubles.
#[no_mangle]
pub unsafe extern "C" fn tomo_tomogram(
    rho: *const TomoMatrix,
    s: *const TomoSet,
    values: *mut f64,
) -> TomoStatus {
    if rho.is_null() || s.is_null() || values.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let set = match build_set(&*s) {
        Ok(set) => set,
        Err(e) => return fail(e),
    };
    match tomogram(&(*rho).inner, &set) {
        Ok(tom) => {
            let out = std::slice::from_raw_parts_mut(values, tom.values().len());
            out.copy_from_slice(tom.values());
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Linear inversion of a tomogram through the dual kernel.
///
/// # Safety
/// `values` must hold `len` doubles; `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn tomo_reconstruct(
    k: *const TomoKernel,
    values: *const f64,
    len: usize,
    out: *mut *mut TomoMatrix,
) -> TomoStatus {
    if k.is_null() || values.is_null() || out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let handle = &*k;
    let vals = std::slice::from_raw_parts(values, len).to_vec();
    let tom = match Tomogram::new(Arc::clone(&handle.set), vals) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    match reconstruct(&tom, &handle.kernel) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TomoMatrix { inner: m }));
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// The explicit U(2) reconstruction kernel at a sphere direction, written as
/// 8 doubles (2x2 row-major interleaved).
///
/// # Safety
/// `buffer` must have room for 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn tomo_spin_half_kernel(
    theta: f64,
    phi: f64,
    buffer: *mut f64,
) -> TomoStatus {
    if buffer.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let dir = match SphereDirection::new(theta, phi) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let k = spin_half_kernel(&dir);
    let out = std::slice::from_raw_parts_mut(buffer, 8);
    for i in 0..2 {
        for j in 0..2 {
            let z = k.get(i, j);
            out[2 * (i * 2 + j)] = z.re;
            out[2 * (i * 2 + j) + 1] = z.im;
        }
    }
    TomoStatus::Ok
}

/// Wigner 3j symbol with all angular momenta passed as doubled integers.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tomo_wigner_3j(
    two_j1: i32,
    two_j2: i32,
    two_j3: i32,
    two_m1: i32,
    two_m2: i32,
    two_m3: i32,
    out: *mut f64,
) -> TomoStatus {
    if out.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    match wigner_3j(
        HalfInteger::from_twice(two_j1),
        HalfInteger::from_twice(two_j2),
        HalfInteger::from_twice(two_j3),
        HalfInteger::from_twice(two_m1),
        HalfInteger::from_twice(two_m2),
        HalfInteger::from_twice(two_m3),
    ) {
        Ok(v) => {
            *out = v;
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Two-Gaussian marginals demonstration: writes the position and momentum
/// marginal gaps and the overlap fidelity.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tomo_pauli_demo(
    alpha_re: f64,
    alpha_im: f64,
    beta: f64,
    out_gap_q: *mut f64,
    out_gap_p: *mut f64,
    out_fidelity: *mut f64,
) -> TomoStatus {
    if out_gap_q.is_null() || out_gap_p.is_null() || out_fidelity.is_null() {
        set_error("null pointer");
        return TomoStatus::NullPointer;
    }
    let grid = match GridSpec::new(-8.0, 8.0, 128) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    match pauli_counterexample(Complex64::new(alpha_re, alpha_im), beta, grid) {
        Ok(report) => {
            *out_gap_q = report.marginal_gap_q;
            *out_gap_p = report.marginal_gap_p;
            *out_fidelity = report.fidelity;
            TomoStatus::Ok
        }
        Err(e) => fail(e),
    }
}
