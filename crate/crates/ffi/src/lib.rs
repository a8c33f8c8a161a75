//! C ABI over `lindblad-esd`.
//!
//! Channels and states cross the boundary as opaque handles (`LeSuperop`,
//! `LeDensity`) that must be released with the matching `*_free` function.
//! Every fallible call returns an `LeStatus`; on failure a description is
//! available from `le_last_error_message` on the same thread. Matrices are
//! exchanged as separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use lindblad_esd::channels::{self, BathParams, Superoperator};
use lindblad_esd::entanglement;
use lindblad_esd::esd::{self, ChannelFamily, DephasingProfile};
use lindblad_esd::{ComplexMatrix, DensityMatrix, Error, C64};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    DimensionMismatch = 4,
    InvalidState = 5,
    NumericalFailure = 6,
    Panic = 7,
}

/// Bath parameters; `n_mean` is derived from `n_th` and `r`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LeBathParams {
    pub gamma: f64,
    pub n_th: f64,
    pub r: f64,
    pub phi: f64,
    pub omega: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeFamily {
    Thermal = 0,
    Squeezed = 1,
    /// QND with `g(t) = g_scale * t`.
    QndLinear = 2,
    /// QND with `g(t) = g_scale * t^2`.
    QndQuadratic = 3,
}

/// Outcome of `le_esd_time`. `never` is nonzero when no transition was found
/// up to the horizon, in which case the time fields are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LeEsdResult {
    pub never: i32,
    pub transition_time: f64,
    pub t_low: f64,
    pub t_high: f64,
    pub iterations: usize,
    pub single_crossing: i32,
}

/// Opaque qubit or qudit superoperator.
pub struct LeSuperop(Superoperator);

/// Opaque density matrix with subsystem dimensions.
pub struct LeDensity(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> LeStatus {
    match err {
        Error::InvalidParams(_) | Error::NegativeTime(_) => LeStatus::InvalidParams,
        Error::DimensionMismatch { .. } | Error::ShapeMismatch(_) | Error::NotSquare { .. } => {
            LeStatus::DimensionMismatch
        }
        Error::InvalidState(_) | Error::NotHermitian { .. } => LeStatus::InvalidState,
        Error::NoConvergence(_) => LeStatus::NumericalFailure,
        Error::InvalidSubsystem { .. } | Error::EmptySelection | Error::InvalidArgument(_) => {
            LeStatus::InvalidArgument
        }
    }
}

/// Runs `f`, recording errors and converting panics into `LeStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), (LeStatus, String)>) -> LeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LeStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LeStatus::Panic
        }
    }
}

fn lib(err: Error) -> (LeStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (LeStatus, String) {
    (LeStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (LeStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (LeStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn bath(p: &LeBathParams) -> Result<BathParams, (LeStatus, String)> {
    BathParams::squeezed(p.gamma, p.n_th, p.r, p.phi).map(|b| b.with_omega(p.omega)).map_err(lib)
}

unsafe fn copy_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64, len: usize) -> Result<(), (LeStatus, String)> {
    let n = m.rows() * m.cols();
    if len < n {
        return Err((LeStatus::InvalidArgument, format!("buffer length {len} is smaller than {n}")));
    }
    if re.is_null() || im.is_null() {
        return Err(null("output buffer"));
    }
    let re = slice::from_raw_parts_mut(re, n);
    let im = slice::from_raw_parts_mut(im, n);
    for (k, z) in m.as_slice().iter().enumerate() {
        re[k] = z.re;
        im[k] = z.im;
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn le_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn le_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Closed-form thermal propagator `V(t)` at decay rate `gamma` and occupation `n_mean`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn le_superop_thermal(gamma: f64, n_mean: f64, t: f64, out: *mut *mut LeSuperop) -> LeStatus {
    guard(|| {
        let p = BathParams::thermal(gamma, n_mean).map_err(lib)?;
        let v = channels::thermal_v_closed(&p, t).map_err(lib)?;
        write_out(out, LeSuperop(v))
    })
}

/// Closed-form squeezed-bath propagator.
///
/// # Safety
/// `params` must point to a valid `LeBathParams`; `out` as in `le_superop_thermal`.
#[no_mangle]
pub unsafe extern "C" fn le_superop_squeezed(
    params: *const LeBathParams,
    t: f64,
    out: *mut *mut LeSuperop,
) -> LeStatus {
    guard(|| {
        let p = bath(deref(params, "params")?)?;
        let v = channels::squeezed_v_closed(&p, t).map_err(lib)?;
        write_out(out, LeSuperop(v))
    })
}

/// QND dephasing channel with the exponent `g_t = g(t)` already evaluated.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn le_superop_qnd(omega: f64, g_t: f64, t: f64, out: *mut *mut LeSuperop) -> LeStatus {
    guard(|| {
        let v = channels::qnd_v_from_exponent(omega, g_t, t).map_err(lib)?;
        write_out(out, LeSuperop(v))
    })
}

/// Identity channel on dimension `dim`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn le_superop_identity(dim: usize, out: *mut *mut LeSuperop) -> LeStatus {
    guard(|| {
        if dim == 0 {
            return Err((LeStatus::InvalidArgument, "dimension must be positive".into()));
        }
        write_out(out, LeSuperop(Superoperator::identity(dim)))
    })
}

/// # Safety
/// `v` must be null or a handle returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn le_superop_free(v: *mut LeSuperop) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Hilbert-space dimension `d` of the channel (its matrix is `d^2 x d^2`); 0 for a null handle.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_superop_dim(v: *const LeSuperop) -> usize {
    v.as_ref().map_or(0, |v| v.0.dim())
}

/// Copies the `d^2 x d^2` superoperator matrix into `re`/`im` (row-major, `len >= d^4`).
///
/// # Safety
/// `v` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_superop_matrix(v: *const LeSuperop, re: *mut f64, im: *mut f64, len: usize) -> LeStatus {
    guard(|| copy_matrix(deref(v, "superop")?.0.matrix(), re, im, len))
}

/// Whether the qubit channel is entanglement breaking (its Choi state is PPT within `tol`).
///
/// # Safety
/// `v` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_superop_is_entanglement_breaking(v: *const LeSuperop, tol: f64, out: *mut i32) -> LeStatus {
    guard(|| {
        let eb = channels::is_entanglement_breaking(&deref(v, "superop")?.0, tol).map_err(lib)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = eb as i32;
        Ok(())
    })
}

/// Builds a validated density matrix from row-major `re`/`im` arrays of
/// length `D^2`, `D` being the product of the `n_dims` entries of `dims`.
///
/// # Safety
/// `dims` must hold `n_dims` entries; `re` and `im` must each hold `D^2` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_density_new(
    dims: *const usize,
    n_dims: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut LeDensity,
) -> LeStatus {
    guard(|| {
        if dims.is_null() || re.is_null() || im.is_null() {
            return Err(null("input array"));
        }
        if n_dims == 0 {
            return Err((LeStatus::InvalidArgument, "no subsystem dimensions given".into()));
        }
        let dims = slice::from_raw_parts(dims, n_dims).to_vec();
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t > 0 && t <= 1 << 12)
            .ok_or((LeStatus::InvalidArgument, "unsupported total dimension".to_string()))?;
        let n = total * total;
        let re = slice::from_raw_parts(re, n);
        let im = slice::from_raw_parts(im, n);
        let data: Vec<C64> = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let mat = ComplexMatrix::from_vec(total, total, data).map_err(lib)?;
        write_out(out, LeDensity(DensityMatrix::new(dims, mat).map_err(lib)?))
    })
}

/// # Safety
/// `rho` must be null or a handle returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn le_density_free(rho: *mut LeDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Total dimension of the state; 0 for a null handle.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_density_dim(rho: *const LeDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Copies the density matrix into `re`/`im` (row-major, `len >= D^2`).
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_density_matrix(rho: *const LeDensity, re: *mut f64, im: *mut f64, len: usize) -> LeStatus {
    guard(|| copy_matrix(deref(rho, "density")?.0.matrix(), re, im, len))
}

/// Unit-trace Choi state of the channel.
///
/// # Safety
/// `v` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_choi(v: *const LeSuperop, out: *mut *mut LeDensity) -> LeStatus {
    guard(|| write_out(out, LeDensity(channels::choi(&deref(v, "superop")?.0))))
}

/// Applies the channel to tensor factor `which` of `rho`.
///
/// # Safety
/// `v` and `rho` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_apply_to_subsystem(
    v: *const LeSuperop,
    rho: *const LeDensity,
    which: usize,
    out: *mut *mut LeDensity,
) -> LeStatus {
    guard(|| {
        let res = channels::apply_to_subsystem(&deref(v, "superop")?.0, &deref(rho, "density")?.0, which).map_err(lib)?;
        write_out(out, LeDensity(res))
    })
}

/// Two-qubit concurrence.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_concurrence(rho: *const LeDensity, out: *mut f64) -> LeStatus {
    guard(|| {
        let c = entanglement::concurrence(&deref(rho, "density")?.0).map_err(lib)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = c.value();
        Ok(())
    })
}

/// Negativity across tensor factor `cut`.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_negativity(rho: *const LeDensity, cut: usize, out: *mut f64) -> LeStatus {
    guard(|| {
        let n = entanglement::negativity(&deref(rho, "density")?.0, cut).map_err(lib)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = n;
        Ok(())
    })
}

/// Choi separability transition time of a channel family. `params` is
/// ignored for the QND families, which use `omega` from it only when non-null.
///
/// # Safety
/// `params` must be null (QND only) or point to a valid `LeBathParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_esd_time(
    family: LeFamily,
    params: *const LeBathParams,
    g_scale: f64,
    horizon: f64,
    precision: f64,
    out: *mut LeEsdResult,
) -> LeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let omega = params.as_ref().map_or(0.0, |p| p.omega);
        let fam = match family {
            LeFamily::Thermal => {
                let p = deref(params, "params")?;
                if p.r != 0.0 {
                    return Err((LeStatus::InvalidParams, "thermal family requires r = 0".into()));
                }
                ChannelFamily::Thermal(bath(p)?)
            }
            LeFamily::Squeezed => ChannelFamily::Squeezed(bath(deref(params, "params")?)?),
            LeFamily::QndLinear => ChannelFamily::Qnd { omega, profile: DephasingProfile::Linear { scale: g_scale } },
            LeFamily::QndQuadratic => {
                ChannelFamily::Qnd { omega, profile: DephasingProfile::Quadratic { scale: g_scale } }
            }
        };
        let report = esd::choi_ppt_time(&fam, horizon, precision).map_err(lib)?;
        let (t_low, t_high) = report.bracket.map_or((f64::NAN, f64::NAN), |b| (b.t_low, b.t_high));
        *out = LeEsdResult {
            never: report.is_never() as i32,
            transition_time: report.transition_time.unwrap_or(f64::NAN),
            t_low,
            t_high,
            iterations: report.iterations,
            single_crossing: report.single_crossing as i32,
        };
        Ok(())
    })
}
