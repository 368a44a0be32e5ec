//! C interface to `detjump`.
//!
//! Every function returns a [`DjStatus`]; results are written through out
//! pointers. On failure a description of the most recent error on the calling
//! thread is available from [`dj_last_error_message`]. Drives are opaque
//! handles created with [`dj_drive_new`] and released with [`dj_drive_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use detjump::integrator::IntegrationSpec;
use detjump::linalg::StateVector;
use detjump::{stepwise, su2_chain, two_level};
use detjump::{CayleyKlein, DetuningProfile, DriveProfile, Error, PulseShape, ShapeKind, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IntegrationFailed = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DjShape {
    Gaussian = 0,
    Sech = 1,
    Lorentzian = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DjComplex {
    pub re: f64,
    pub im: f64,
}

/// Integration window and tolerance. `initial_step` seeds the adaptive step size.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DjIntegration {
    pub t_start: f64,
    pub t_end: f64,
    pub initial_step: f64,
    pub tolerance: f64,
}

/// Opaque drive handle.
pub struct DjDrive {
    inner: DriveProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DjStatus {
    match e {
        Error::StepUnderflow { .. }
        | Error::NotHermitian { .. }
        | Error::NotNormalized { .. }
        | Error::QuadratureFailed { .. }
        | Error::NonFinite { .. } => DjStatus::IntegrationFailed,
        _ => DjStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DjStatus, String)>) -> DjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DjStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside detjump".into());
            DjStatus::Panic
        }
    }
}

fn lift<T>(r: detjump::Result<T>) -> Result<T, (DjStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), (DjStatus, String)> {
    if p.is_null() {
        Err((DjStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn spec_of(s: &DjIntegration) -> Result<IntegrationSpec, (DjStatus, String)> {
    let spec = IntegrationSpec {
        t_start: s.t_start,
        t_end: s.t_end,
        step: s.initial_step,
        tolerance: s.tolerance,
        ..IntegrationSpec::default()
    };
    lift(spec.validate())?;
    Ok(spec)
}

unsafe fn drive_ref<'a>(drive: *const DjDrive) -> Result<&'a DriveProfile, (DjStatus, String)> {
    non_null(drive, "drive")?;
    Ok(&(*drive).inner)
}

fn to_c(z: C64) -> DjComplex {
    DjComplex { re: z.re, im: z.im }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn dj_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Default integration settings: window [-20, 20], tolerance 1e-10.
#[no_mangle]
pub extern "C" fn dj_integration_default() -> DjIntegration {
    let s = IntegrationSpec::default();
    DjIntegration { t_start: s.t_start, t_end: s.t_end, initial_step: s.step, tolerance: s.tolerance }
}

/// Creates a drive with coupling `omega0 * f(t / width)` and detuning
/// `+delta0` before / `-delta0` after `t = 0` (a tanh ramp of time `tau_jump`
/// when `tau_jump > 0`).
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dj_drive_new(
    shape: DjShape,
    width: f64,
    omega0: f64,
    delta0: f64,
    tau_jump: f64,
    out: *mut *mut DjDrive,
) -> DjStatus {
    guard(|| {
        non_null(out, "out")?;
        let kind = match shape {
            DjShape::Gaussian => ShapeKind::Gaussian,
            DjShape::Sech => ShapeKind::Sech,
            DjShape::Lorentzian => ShapeKind::Lorentzian,
        };
        let pulse = lift(PulseShape::new(kind, width))?;
        let detuning = lift(DetuningProfile::new(delta0, tau_jump))?;
        let inner = lift(DriveProfile::new(pulse, omega0, detuning))?;
        *out = Box::into_raw(Box::new(DjDrive { inner }));
        Ok(())
    })
}

/// Releases a drive. Null is ignored.
///
/// # Safety
/// `drive` must come from [`dj_drive_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dj_drive_free(drive: *mut DjDrive) {
    if !drive.is_null() {
        drop(Box::from_raw(drive));
    }
}

/// Final populations `[p1, p2]` starting from basis state `initial` (1 or 2).
///
/// # Safety
/// `drive` and `spec` must be valid; `out` must hold 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn dj_simulate_two_level(
    drive: *const DjDrive,
    spec: *const DjIntegration,
    initial: u32,
    out: *mut f64,
) -> DjStatus {
    guard(|| {
        let drive = drive_ref(drive)?;
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        let spec = spec_of(&*spec)?;
        let psi0 = lift(StateVector::<2>::basis(initial as usize))?;
        let o = lift(two_level::simulate_final_populations(drive, &spec, &psi0))?;
        *out = o.p1;
        *out.add(1) = o.p2;
        Ok(())
    })
}

/// Final populations `[p1, p2, p3]` of the three-state chain starting from
/// basis state `initial` (1 to 3).
///
/// # Safety
/// `drive` and `spec` must be valid; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn dj_simulate_three_level(
    drive: *const DjDrive,
    spec: *const DjIntegration,
    initial: u32,
    out: *mut f64,
) -> DjStatus {
    guard(|| {
        let drive = drive_ref(drive)?;
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        let spec = spec_of(&*spec)?;
        let o = lift(su2_chain::simulate_three_level(drive, &spec, initial as usize))?;
        ptr::copy_nonoverlapping(o.populations.as_ptr(), out, 3);
        Ok(())
    })
}

/// `Omega0^2 / (Omega0^2 + Delta0^2)`.
///
/// # Safety
/// `out` must be valid for one double.
#[no_mangle]
pub unsafe extern "C" fn dj_analytic_p2(omega0: f64, delta0: f64, out: *mut f64) -> DjStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(stepwise::analytic_p2(omega0, delta0))?;
        Ok(())
    })
}

/// Closed-form three-state table, row-major: `out[3*(i-1) + (j-1)] = P(i -> j)`.
///
/// # Safety
/// `out` must hold 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn dj_analytic_table(omega0: f64, delta0: f64, out: *mut f64) -> DjStatus {
    guard(|| {
        non_null(out, "out")?;
        let table = lift(su2_chain::analytic_transition_table(omega0, delta0))?;
        for (i, row) in table.probabilities.iter().enumerate() {
            ptr::copy_nonoverlapping(row.as_ptr(), out.add(3 * i), 3);
        }
        Ok(())
    })
}

/// Cayley–Klein pair `(a, b)` of the integrated two-level propagator,
/// written to `out[0] = a`, `out[1] = b`.
///
/// # Safety
/// `drive` and `spec` must be valid; `out` must hold 2 complex values.
#[no_mangle]
pub unsafe extern "C" fn dj_numeric_cayley_klein(
    drive: *const DjDrive,
    spec: *const DjIntegration,
    out: *mut DjComplex,
) -> DjStatus {
    guard(|| {
        let drive = drive_ref(drive)?;
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        let ck = lift(su2_chain::numeric_cayley_klein(drive, &spec_of(&*spec)?))?;
        *out = to_c(ck.a);
        *out.add(1) = to_c(ck.b);
        Ok(())
    })
}

/// Three-state propagator built from `(a, b)`, row-major into 9 complex values.
///
/// # Safety
/// `out` must hold 9 complex values.
#[no_mangle]
pub unsafe extern "C" fn dj_majorana_u3(a: DjComplex, b: DjComplex, out: *mut DjComplex) -> DjStatus {
    guard(|| {
        non_null(out, "out")?;
        let ck = lift(CayleyKlein::new(C64::new(a.re, a.im), C64::new(b.re, b.im)))?;
        let u3 = lift(su2_chain::majorana_u3(&ck))?;
        for (i, row) in u3.matrix.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                *out.add(3 * i + j) = to_c(*z);
            }
        }
        Ok(())
    })
}

/// Largest elementwise distance between the integrated three-state propagator
/// and the lift of the integrated two-level one.
///
/// # Safety
/// `drive` and `spec` must be valid; `out` must be valid for one double.
#[no_mangle]
pub unsafe extern "C" fn dj_majorana_residual(
    drive: *const DjDrive,
    spec: *const DjIntegration,
    out: *mut f64,
) -> DjStatus {
    guard(|| {
        let drive = drive_ref(drive)?;
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        *out = lift(su2_chain::majorana_residual(drive, &spec_of(&*spec)?))?;
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
