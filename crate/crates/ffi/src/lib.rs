//! C ABI for `csqpt`.
//!
//! Objects are opaque handles created by `csqpt_*` constructors and released
//! with the matching `*_free`. Every fallible call returns a [`CsqptStatus`];
//! on failure [`csqpt_last_error`] describes the error for the calling thread.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use csqpt::bounds;
use csqpt::fock::{self, CoherentAmplitude, DensityMatrix, FockCutoff};
use csqpt::io::{self, NoiseSpec, ProbeDataset};
use csqpt::processes::{analytic_tensor, ProcessParams, ProcessTensor};
use csqpt::tomography::{self, EstimateOptions};
use csqpt::Error;
use num_complex::Complex64;

/// Process tensor handle.
pub struct CsqptTensor(ProcessTensor);

/// Density matrix handle.
pub struct CsqptState(DensityMatrix);

/// Probe dataset handle.
pub struct CsqptDataset(ProbeDataset);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsqptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Mismatch = 4,
    Underdetermined = 5,
    RankDeficient = 6,
    Io = 7,
    Format = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsqptEstimateMode {
    PhaseInvariant = 0,
    General = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let message = CString::new(bytes).expect("interior nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> CsqptStatus {
    match err {
        Error::InvalidInput(_)
        | Error::NotHermitian(_)
        | Error::DegenerateInput(_)
        | Error::InvariantViolation { .. } => CsqptStatus::InvalidArgument,
        Error::ParameterOutOfRange(_)
        | Error::Pole { .. }
        | Error::Saturation(_)
        | Error::Overflow { .. }
        | Error::MemoryGuard { .. }
        | Error::TruncationLoss { .. } => CsqptStatus::OutOfRange,
        Error::DimensionMismatch { .. } | Error::CutoffMismatch(_) | Error::ModeMismatch { .. } => {
            CsqptStatus::Mismatch
        }
        Error::Underdetermined { .. } => CsqptStatus::Underdetermined,
        Error::RankDeficient(_) => CsqptStatus::RankDeficient,
        Error::Malformed { .. } | Error::VersionMismatch { .. } => CsqptStatus::Format,
        Error::Io { .. } => CsqptStatus::Io,
    }
}

struct Failure(CsqptStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CsqptStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CsqptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsqptStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CsqptStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CsqptStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    str_arg(p, "path").map(PathBuf::from)
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn cutoff_arg(n_max: usize, modes: usize) -> Result<FockCutoff, Failure> {
    Ok(FockCutoff::new(n_max, modes)?)
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn csqpt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Closed-form tensor of a named process. `params` may be NULL or empty;
/// `modes == 0` picks the process's own mode count.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_analytic(
    process: *const c_char,
    params: *const c_char,
    n_max: usize,
    modes: usize,
    out: *mut *mut CsqptTensor,
) -> CsqptStatus {
    guard(|| {
        let name = str_arg(process, "process")?;
        let params = if params.is_null() {
            ""
        } else {
            str_arg(params, "params")?
        };
        let p = ProcessParams::parse(name, params)?;
        let modes = if modes == 0 { p.modes() } else { modes };
        let t = analytic_tensor(p, cutoff_arg(n_max, modes)?)?;
        put(out, Box::into_raw(Box::new(CsqptTensor(t))))
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_free(t: *mut CsqptTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_read(path: *const c_char, out: *mut *mut CsqptTensor) -> CsqptStatus {
    guard(|| {
        let file = io::read_tensor(&path_arg(path)?)?;
        put(out, Box::into_raw(Box::new(CsqptTensor(file.tensor))))
    })
}

/// # Safety
/// `t` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_write(t: *const CsqptTensor, path: *const c_char) -> CsqptStatus {
    guard(|| {
        let t = handle(t, "tensor")?;
        Ok(io::write_tensor(&t.0, &path_arg(path)?)?)
    })
}

/// Per-mode cutoff N, or 0 for NULL.
///
/// # Safety
/// `t` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_n_max(t: *const CsqptTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.cutoff().n_max())
}

/// Number of modes, or 0 for NULL.
///
/// # Safety
/// `t` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_modes(t: *const CsqptTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.cutoff().modes())
}

/// Hilbert-space dimension D, or 0 for NULL.
///
/// # Safety
/// `t` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_dim(t: *const CsqptTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.dim())
}

/// Entry `E[m][n][j][k]` over flat indices `< D`.
///
/// # Safety
/// `t` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_get(
    t: *const CsqptTensor,
    m: usize,
    n: usize,
    j: usize,
    k: usize,
    re: *mut f64,
    im: *mut f64,
) -> CsqptStatus {
    guard(|| {
        let t = handle(t, "tensor")?;
        let d = t.0.dim();
        if [m, n, j, k].iter().any(|&i| i >= d) {
            return Err(Failure(CsqptStatus::OutOfRange, format!("index outside 0..{d}")));
        }
        let v = t.0.get(m, n, j, k);
        put(re, v.re)?;
        put(im, v.im)
    })
}

/// Largest elementwise modulus of `a - b`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_max_abs_diff(
    a: *const CsqptTensor,
    b: *const CsqptTensor,
    out: *mut f64,
) -> CsqptStatus {
    guard(|| {
        let d = handle(a, "a")?.0.max_abs_diff(&handle(b, "b")?.0)?;
        put(out, d)
    })
}

/// Smallest eigenvalue of the Choi matrix.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_choi_min_eigenvalue(t: *const CsqptTensor, out: *mut f64) -> CsqptStatus {
    guard(|| put(out, handle(t, "tensor")?.0.choi_min_eigenvalue()))
}

/// Output of the tensor on `rho`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_tensor_apply(
    t: *const CsqptTensor,
    rho: *const CsqptState,
    out: *mut *mut CsqptState,
) -> CsqptStatus {
    guard(|| {
        let output = handle(t, "tensor")?.0.apply(&handle(rho, "state")?.0)?;
        put(out, Box::into_raw(Box::new(CsqptState(output))))
    })
}

/// Truncated, unrenormalized coherent state. `re` and `im` hold one value
/// per mode.
///
/// # Safety
/// `re` and `im` must point to `modes` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_coherent(
    re: *const f64,
    im: *const f64,
    modes: usize,
    n_max: usize,
    out: *mut *mut CsqptState,
) -> CsqptStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("amplitude array"));
        }
        let values = (0..modes).map(|i| Complex64::new(*re.add(i), *im.add(i))).collect();
        let alpha = CoherentAmplitude::new(values)?;
        let rho = fock::coherent_density(&alpha, cutoff_arg(n_max, modes)?)?;
        put(out, Box::into_raw(Box::new(CsqptState(rho))))
    })
}

/// Fock state with `photons[i]` photons in mode `i`.
///
/// # Safety
/// `photons` must point to `modes` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_fock(
    photons: *const usize,
    modes: usize,
    n_max: usize,
    out: *mut *mut CsqptState,
) -> CsqptStatus {
    guard(|| {
        if photons.is_null() {
            return Err(null("photons"));
        }
        let n = std::slice::from_raw_parts(photons, modes);
        let rho = DensityMatrix::fock(cutoff_arg(n_max, modes)?, n)?;
        put(out, Box::into_raw(Box::new(CsqptState(rho))))
    })
}

/// # Safety
/// `rho` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_free(rho: *mut CsqptState) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_read(path: *const c_char, out: *mut *mut CsqptState) -> CsqptStatus {
    guard(|| {
        let rho = io::read_state(&path_arg(path)?)?;
        put(out, Box::into_raw(Box::new(CsqptState(rho))))
    })
}

/// # Safety
/// `rho` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_write(rho: *const CsqptState, path: *const c_char) -> CsqptStatus {
    guard(|| Ok(io::write_state(&handle(rho, "state")?.0, &path_arg(path)?)?))
}

/// Matrix dimension, or 0 for NULL.
///
/// # Safety
/// `rho` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_dim(rho: *const CsqptState) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_trace(rho: *const CsqptState, out: *mut f64) -> CsqptStatus {
    guard(|| put(out, handle(rho, "state")?.0.trace()))
}

/// Element `<j|rho|k>`.
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_state_get(
    rho: *const CsqptState,
    j: usize,
    k: usize,
    re: *mut f64,
    im: *mut f64,
) -> CsqptStatus {
    guard(|| {
        let rho = handle(rho, "state")?;
        let d = rho.0.dim();
        if j >= d || k >= d {
            return Err(Failure(CsqptStatus::OutOfRange, format!("index outside 0..{d}")));
        }
        let v = rho.0.get(j, k);
        put(re, v.re)?;
        put(im, v.im)
    })
}

/// Synthetic probe data. Amplitudes are `count * modes` values, probe-major.
///
/// # Safety
/// Strings must be NUL-terminated (`params` may be NULL); `re` and `im` must
/// point to `count * modes` doubles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn csqpt_dataset_synthesize(
    process: *const c_char,
    params: *const c_char,
    n_max: usize,
    modes: usize,
    re: *const f64,
    im: *const f64,
    count: usize,
    noise_sigma: f64,
    seed: u64,
    out: *mut *mut CsqptDataset,
) -> CsqptStatus {
    guard(|| {
        let name = str_arg(process, "process")?;
        let params = if params.is_null() {
            ""
        } else {
            str_arg(params, "params")?
        };
        let p = ProcessParams::parse(name, params)?;
        let modes = if modes == 0 { p.modes() } else { modes };
        if re.is_null() || im.is_null() {
            return Err(null("amplitude array"));
        }
        let amplitudes = (0..count)
            .map(|i| {
                let values = (0..modes)
                    .map(|m| Complex64::new(*re.add(i * modes + m), *im.add(i * modes + m)))
                    .collect();
                CoherentAmplitude::new(values)
            })
            .collect::<csqpt::Result<Vec<_>>>()?;
        let noise = NoiseSpec {
            sigma: noise_sigma,
            seed,
        };
        let ds = io::generate_synthetic(p, cutoff_arg(n_max, modes)?, &amplitudes, noise)?;
        put(out, Box::into_raw(Box::new(CsqptDataset(ds))))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_dataset_read(path: *const c_char, out: *mut *mut CsqptDataset) -> CsqptStatus {
    guard(|| {
        let ds = io::read_dataset(&path_arg(path)?)?;
        put(out, Box::into_raw(Box::new(CsqptDataset(ds))))
    })
}

/// # Safety
/// `ds` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn csqpt_dataset_write(ds: *const CsqptDataset, path: *const c_char) -> CsqptStatus {
    guard(|| Ok(io::write_dataset(&handle(ds, "dataset")?.0, &path_arg(path)?)?))
}

/// Number of probe records, or 0 for NULL.
///
/// # Safety
/// `ds` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn csqpt_dataset_len(ds: *const CsqptDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.records().len())
}

/// # Safety
/// `ds` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn csqpt_dataset_free(ds: *mut CsqptDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Estimates a tensor from a dataset. `condition_number` may be NULL.
/// Two-mode datasets require `General`.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_estimate(
    ds: *const CsqptDataset,
    mode: CsqptEstimateMode,
    threads: usize,
    out: *mut *mut CsqptTensor,
    condition_number: *mut f64,
) -> CsqptStatus {
    guard(|| {
        let ds = &handle(ds, "dataset")?.0;
        let cutoff = ds.cutoff();
        let options = EstimateOptions {
            threads: threads.max(1),
        };
        let estimate = match (mode, cutoff.modes()) {
            (CsqptEstimateMode::PhaseInvariant, _) => {
                tomography::estimate_phase_invariant(ds.records(), cutoff, options).map(|(e, _)| e)?
            }
            (CsqptEstimateMode::General, 1) => tomography::estimate_general(ds.records(), cutoff, options)?,
            (CsqptEstimateMode::General, _) => tomography::estimate_general_two_mode(ds.records(), cutoff, options)?,
        };
        if !condition_number.is_null() {
            condition_number.write(estimate.report.condition_number);
        }
        put(out, Box::into_raw(Box::new(CsqptTensor(estimate.tensor))))
    })
}

/// `epsilon = 2 sqrt(gamma) + gamma / (1 - gamma)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_epsilon_from_gamma(gamma: f64, out: *mut f64) -> CsqptStatus {
    guard(|| put(out, bounds::epsilon_from_gamma(gamma)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_gamma_from_epsilon(epsilon: f64, out: *mut f64) -> CsqptStatus {
    guard(|| put(out, bounds::gamma_from_epsilon(epsilon)?))
}

/// Smallest cutoff N with `energy / ((N + 3/2) omega) <= gamma`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csqpt_required_cutoff(energy: f64, omega: f64, gamma: f64, out: *mut u64) -> CsqptStatus {
    guard(|| put(out, bounds::required_cutoff(energy, omega, gamma)?))
}
