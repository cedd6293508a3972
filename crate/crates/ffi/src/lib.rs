//! C ABI over `jpa_core`. Devices are opaque handles; every fallible call
//! returns a [`JpaStatus`] and leaves a message for [`jpa_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jpa_core::calibration::{fit_added_noise, thermal_occupancy, FitSettings, NoiseSample};
use jpa_core::distortion::{deamp_ratio, half_photon_probe};
use jpa_core::gain::{direct_gain, lmg_point, OperatingPoint, SearchSettings};
use jpa_core::model::{critical_params, steady_output_with_state, DeviceParams, Phasor};
use jpa_core::squeezing::{squeezing_vs_theta, AmpModel, LossChannel, MonteCarlo};
use jpa_core::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JpaStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Bistable = 3,
    Numerical = 4,
    Infeasible = 5,
    Panic = 6,
}

/// Opaque device handle.
pub struct JpaDevice {
    inner: DeviceParams,
}

/// Critical point of a device.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JpaCritical {
    /// Critical detuning, rad/s.
    pub delta_c: f64,
    /// Critical input amplitude, sqrt(photons/s).
    pub b_c: f64,
    /// Intracavity photon number at the critical point.
    pub n_c: f64,
    /// Critical pump frequency, Hz.
    pub f_c: f64,
    /// Critical pump power, W.
    pub p_c: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JpaFit {
    pub n_add: f64,
    pub lambda: f64,
    pub chain_gain_db: f64,
    pub sigma_n_add: f64,
    pub sigma_lambda: f64,
    pub sigma_chain_gain_db: f64,
    pub residual_rms: f64,
    pub condition_number: f64,
    /// Non-zero when the fit is poorly determined.
    pub ill_conditioned: i32,
    /// Non-zero when λ or N_add sits on a bound.
    pub at_bound: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> JpaStatus {
    match e {
        Error::Domain(_) => JpaStatus::Domain,
        Error::Bistable(_) => JpaStatus::Bistable,
        Error::Numerical { .. } => JpaStatus::Numerical,
        Error::Infeasible(_) => JpaStatus::Infeasible,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> JpaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            JpaStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            JpaStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument");
            return JpaStatus::NullPointer;
        }
    };
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn jpa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jpa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn store(out: *mut *mut JpaDevice, dev: DeviceParams) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(JpaDevice { inner: dev })) };
}

/// Creates a device from angular frequencies (rad/s). Free with
/// `jpa_device_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn jpa_device_new(omega0: f64, gamma: f64, kerr: f64, out: *mut *mut JpaDevice) -> JpaStatus {
    non_null!(out);
    guard(|| {
        store(out, DeviceParams::new(omega0, gamma, kerr)?);
        Ok(())
    })
}

/// Creates the typical device (γ = 2π·54.5 MHz, K/γ = −8.3e-4, Q = 65).
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn jpa_device_typical(out: *mut *mut JpaDevice) -> JpaStatus {
    non_null!(out);
    guard(|| {
        store(out, DeviceParams::typical());
        Ok(())
    })
}

/// Releases a device. Null is ignored.
///
/// # Safety
/// `dev` must come from a `jpa_device_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn jpa_device_free(dev: *mut JpaDevice) {
    if !dev.is_null() {
        drop(Box::from_raw(dev));
    }
}

/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_critical_params(dev: *const JpaDevice, out: *mut JpaCritical) -> JpaStatus {
    non_null!(dev, out);
    let d = &(*dev).inner;
    guard(|| {
        let c = critical_params(d);
        *out = JpaCritical {
            delta_c: c.delta_c,
            b_c: c.b_c,
            n_c: c.n_c,
            f_c: c.f_c,
            p_c: c.p_c,
        };
        Ok(())
    })
}

/// Steady-state output phasor for input `(in_re, in_im)` at detuning
/// `delta` (rad/s). `photons` receives the intracavity photon number and
/// `bistable` is set non-zero when the low branch of a bistable solution
/// was selected.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_steady_output(
    dev: *const JpaDevice,
    delta: f64,
    in_re: f64,
    in_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    photons: *mut f64,
    bistable: *mut i32,
) -> JpaStatus {
    non_null!(dev, out_re, out_im, photons, bistable);
    let d = &(*dev).inner;
    guard(|| {
        let (b, s) = steady_output_with_state(Phasor::new(in_re, in_im), delta, d)?;
        *out_re = b.re;
        *out_im = b.im;
        *photons = s.n;
        *bistable = i32::from(s.is_bistable());
        Ok(())
    })
}

/// Half a photon over the bandwidth γ/π, as a probe amplitude.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_half_photon_probe(dev: *const JpaDevice, out: *mut f64) -> JpaStatus {
    non_null!(dev, out);
    let d = &(*dev).inner;
    guard(|| {
        *out = half_photon_probe(d, None);
        Ok(())
    })
}

/// Direct gain (dB) at pump frequency `f_ratio`·f_c and power `p_db` re P_c.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_direct_gain(
    dev: *const JpaDevice,
    f_ratio: f64,
    p_db: f64,
    probe_amp: f64,
    n_theta: usize,
    gain_db: *mut f64,
) -> JpaStatus {
    non_null!(dev, gain_db);
    let d = &(*dev).inner;
    guard(|| {
        *gain_db = direct_gain(&OperatingPoint::from_normalized(d, f_ratio, p_db), d, probe_amp, n_theta)?;
        Ok(())
    })
}

/// Deamplification ratio σ²_out/σ²_in (dB) and the matching direct gain.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_deamp_ratio(
    dev: *const JpaDevice,
    f_ratio: f64,
    p_db: f64,
    probe_amp: f64,
    n_theta: usize,
    ratio_db: *mut f64,
    gain_db: *mut f64,
) -> JpaStatus {
    non_null!(dev, ratio_db, gain_db);
    let d = &(*dev).inner;
    guard(|| {
        let r = deamp_ratio(&OperatingPoint::from_normalized(d, f_ratio, p_db), d, probe_amp, n_theta)?;
        *ratio_db = r.ratio_db;
        *gain_db = r.gain_db;
        Ok(())
    })
}

/// Pump power (dB re P_c) of maximum gain at `f_ratio`, with that gain.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_lmg_point(dev: *const JpaDevice, f_ratio: f64, p_db: *mut f64, gain_db: *mut f64) -> JpaStatus {
    non_null!(dev, p_db, gain_db);
    let d = &(*dev).inner;
    guard(|| {
        let p = lmg_point(d, f_ratio, &SearchSettings::default_for(d))?;
        *p_db = p.op.normalized.p_db;
        *gain_db = p.gain_db;
        Ok(())
    })
}

/// Minimum of S(θ) (dB) for the JPA squeezer at (`f_ratio`, `p_db`), loss
/// `loss_db` and an ideal AMP of gain `amp_gain_db`.
///
/// # Safety
/// Pointers must be valid; `dev` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn jpa_squeezing_min(
    dev: *const JpaDevice,
    f_ratio: f64,
    p_db: f64,
    loss_db: f64,
    amp_gain_db: f64,
    n_samples: usize,
    n_theta: usize,
    seed: u64,
    min_s_db: *mut f64,
    stderr_db: *mut f64,
) -> JpaStatus {
    non_null!(dev, min_s_db, stderr_db);
    let d = &(*dev).inner;
    guard(|| {
        let r = squeezing_vs_theta(
            &OperatingPoint::from_normalized(d, f_ratio, p_db),
            d,
            &LossChannel::new(loss_db)?,
            &AmpModel::ideal(amp_gain_db),
            &MonteCarlo {
                n_samples,
                n_theta,
                seed,
            },
        )?;
        *min_s_db = r.min_s_db;
        *stderr_db = r.min_stderr_db;
        Ok(())
    })
}

/// Thermal noise 1/2 + 1/(exp(ħω/k_BT) − 1) in quanta.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jpa_thermal_occupancy(temperature: f64, omega: f64, out: *mut f64) -> JpaStatus {
    non_null!(out);
    guard(|| {
        *out = thermal_occupancy(temperature, omega)?;
        Ok(())
    })
}

/// Fits chain gain, λ and N_add to `n` noise samples given as parallel
/// arrays (K, K, quanta).
///
/// # Safety
/// The three arrays must hold `n` readable values each.
#[no_mangle]
pub unsafe extern "C" fn jpa_fit_added_noise(
    t_vts: *const f64,
    t_fridge: *const f64,
    psd_out: *const f64,
    n: usize,
    omega: f64,
    out: *mut JpaFit,
) -> JpaStatus {
    non_null!(t_vts, t_fridge, psd_out, out);
    let (tv, tf, ps) = (
        std::slice::from_raw_parts(t_vts, n),
        std::slice::from_raw_parts(t_fridge, n),
        std::slice::from_raw_parts(psd_out, n),
    );
    guard(|| {
        let data = (0..n)
            .map(|i| NoiseSample::new(tv[i], tf[i], ps[i]))
            .collect::<Result<Vec<_>, _>>()?;
        let f = fit_added_noise(&data, omega, None, &FitSettings::default())?;
        *out = JpaFit {
            n_add: f.n_add,
            lambda: f.lambda,
            chain_gain_db: f.chain_gain_db,
            sigma_n_add: f.sigma_n_add,
            sigma_lambda: f.sigma_lambda,
            sigma_chain_gain_db: f.sigma_chain_gain_db,
            residual_rms: f.residual_rms,
            condition_number: f.condition_number,
            ill_conditioned: i32::from(f.ill_conditioned),
            at_bound: i32::from(f.at_bound),
        };
        Ok(())
    })
}
