//! C ABI for the curvature-functional verification library.
//!
//! Conventions: every function returns an [`SvlStatus`] code and writes its
//! results through out-pointers; metric objects are opaque handles created
//! by the `svl_metric_*` constructors and released with `svl_metric_free`.
//! Handles are immutable and safe to share across threads.

use std::ffi::c_char;
use symvar_lab::canonical::kasner::{kasner_exponents, kasner_metric};
use symvar_lab::canonical::schwarzschild::{schwarzschild_profile, schwarzschild_tau, t_of_r};
use symvar_lab::error::Error;
use symvar_lab::functionals::{functional_report, smoothing_phi, volume};
use symvar_lab::profile::RadialProfile;
use symvar_lab::SymmetricMetric;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SvlStatus {
    Ok = 0,
    /// evaluation point outside the metric domain
    DomainError = 1,
    /// warping function degenerate at the requested point
    DegenerateError = 2,
    /// invalid argument (null pointer, parameter out of range)
    InputError = 3,
    /// quadrature / solver failure
    NumericError = 4,
    /// internal panic caught at the boundary
    PanicError = 5,
}

fn status_of(e: &Error) -> SvlStatus {
    match e {
        Error::Domain { .. } => SvlStatus::DomainError,
        Error::Degeneracy { .. } => SvlStatus::DegenerateError,
        Error::Input(_) => SvlStatus::InputError,
        _ => SvlStatus::NumericError,
    }
}

/// Opaque metric handle.
#[repr(C)]
pub struct SvlMetric {
    _private: [u8; 0],
}

fn into_handle(m: SymmetricMetric) -> *mut SvlMetric {
    Box::into_raw(Box::new(m)) as *mut SvlMetric
}

/// Borrow the underlying metric.
///
/// # Safety
/// `h` must be a live handle from one of the constructors.
unsafe fn as_metric<'a>(h: *const SvlMetric) -> Option<&'a SymmetricMetric> {
    (h as *const SymmetricMetric).as_ref()
}

/// Pointwise curvature package in the orthonormal frame
/// (radial, fiber1, fiber2).
#[repr(C)]
#[derive(Clone, Copy, Default)]
pub struct SvlCurvature {
    pub k12: f64,
    pub k13: f64,
    pub k23: f64,
    pub ric1: f64,
    pub ric2: f64,
    pub ric3: f64,
    pub s: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub znorm2: f64,
    pub rnorm2: f64,
}

/// Scale-invariant functionals of one metric at a given eps.
#[repr(C)]
#[derive(Clone, Copy, Default)]
pub struct SvlReport {
    pub volume: f64,
    pub z2: f64,
    pub sminus2: f64,
    pub sigma: f64,
    pub i_eps_minus: f64,
    pub c_const: f64,
    pub eps: f64,
}

fn guarded<F: FnOnce() -> SvlStatus + std::panic::UnwindSafe>(f: F) -> SvlStatus {
    std::panic::catch_unwind(f).unwrap_or(SvlStatus::PanicError)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn svl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Schwarzschild exterior metric of mass `m` in arclength form, out to area
/// radius `r_max`.
///
/// # Safety
/// `out` must point to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn svl_metric_schwarzschild(
    m: f64,
    r_max: f64,
    out: *mut *mut SvlMetric,
) -> SvlStatus {
    guarded(|| {
        if out.is_null() {
            return SvlStatus::InputError;
        }
        if !(m > 0.0) || !(r_max > 2.0 * m) {
            return SvlStatus::InputError;
        }
        let m = SymmetricMetric::sphere(schwarzschild_profile(m, r_max));
        unsafe { *out = into_handle(m) };
        SvlStatus::Ok
    })
}

/// Kasner torus-warped metric with parameter `d` in (0,1) on the annulus
/// [t_min, t_max].
///
/// # Safety
/// `out` must point to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn svl_metric_kasner(
    d: f64,
    t_min: f64,
    t_max: f64,
    out: *mut *mut SvlMetric,
) -> SvlStatus {
    guarded(|| {
        if out.is_null() || !(t_min > 0.0) || !(t_max > t_min) {
            return SvlStatus::InputError;
        }
        match kasner_metric(d, t_min, t_max) {
            Ok(m) => {
                unsafe { *out = into_handle(m) };
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Sphere-warped metric from uniform samples of the warping function on
/// [t0, t1] (at least 5 samples; derivatives come from quartic stencils).
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn svl_metric_sphere_from_samples(
    values: *const f64,
    n: usize,
    t0: f64,
    t1: f64,
    out: *mut *mut SvlMetric,
) -> SvlStatus {
    guarded(|| {
        if out.is_null() || values.is_null() {
            return SvlStatus::InputError;
        }
        let vals = unsafe { std::slice::from_raw_parts(values, n) }.to_vec();
        match RadialProfile::from_grid(t0, t1, vals) {
            Ok(p) => {
                unsafe { *out = into_handle(SymmetricMetric::sphere(p)) };
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a metric handle (accepts null).
///
/// # Safety
/// `h` must be a handle from a constructor, released at most once.
#[no_mangle]
pub unsafe extern "C" fn svl_metric_free(h: *mut SvlMetric) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h as *mut SymmetricMetric) });
    }
}

/// Domain [t0, t1] of the metric's radial coordinate.
///
/// # Safety
/// `h` live handle; `t0`, `t1` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_metric_domain(
    h: *const SvlMetric,
    t0: *mut f64,
    t1: *mut f64,
) -> SvlStatus {
    guarded(|| {
        let Some(m) = (unsafe { as_metric(h) }) else {
            return SvlStatus::InputError;
        };
        if t0.is_null() || t1.is_null() {
            return SvlStatus::InputError;
        }
        let (a, b) = m.domain();
        unsafe {
            *t0 = a;
            *t1 = b;
        }
        SvlStatus::Ok
    })
}

/// Pointwise curvature at t (analytic/stencil profile derivatives).
///
/// # Safety
/// `h` live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_curvature_at(
    h: *const SvlMetric,
    t: f64,
    out: *mut SvlCurvature,
) -> SvlStatus {
    guarded(|| {
        let Some(m) = (unsafe { as_metric(h) }) else {
            return SvlStatus::InputError;
        };
        if out.is_null() {
            return SvlStatus::InputError;
        }
        match m.curvature_at(t) {
            Ok(c) => {
                unsafe {
                    *out = SvlCurvature {
                        k12: c.k12,
                        k13: c.k13,
                        k23: c.k23,
                        ric1: c.ric1,
                        ric2: c.ric2,
                        ric3: c.ric3,
                        s: c.s,
                        z1: c.z1,
                        z2: c.z2,
                        z3: c.z3,
                        znorm2: c.znorm2,
                        rnorm2: c.rnorm2,
                    };
                }
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Value-only 5-point-stencil curvature oracle with spacing `step`.
///
/// # Safety
/// `h` live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_curvature_oracle(
    h: *const SvlMetric,
    t: f64,
    step: f64,
    out: *mut SvlCurvature,
) -> SvlStatus {
    guarded(|| {
        let Some(m) = (unsafe { as_metric(h) }) else {
            return SvlStatus::InputError;
        };
        if out.is_null() || !(step > 0.0) {
            return SvlStatus::InputError;
        }
        match m.curvature_oracle(t, step) {
            Ok(c) => {
                unsafe {
                    (*out).k12 = c.k12;
                    (*out).k13 = c.k13;
                    (*out).k23 = c.k23;
                    (*out).ric1 = c.ric1;
                    (*out).ric2 = c.ric2;
                    (*out).ric3 = c.ric3;
                    (*out).s = c.s;
                    (*out).z1 = c.z1;
                    (*out).z2 = c.z2;
                    (*out).z3 = c.z3;
                    (*out).znorm2 = c.znorm2;
                    (*out).rnorm2 = c.rnorm2;
                }
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Volume of the metric over [a, b].
///
/// # Safety
/// `h` live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_volume(
    h: *const SvlMetric,
    a: f64,
    b: f64,
    out: *mut f64,
) -> SvlStatus {
    guarded(|| {
        let Some(m) = (unsafe { as_metric(h) }) else {
            return SvlStatus::InputError;
        };
        if out.is_null() {
            return SvlStatus::InputError;
        }
        match volume(m, (a, b)) {
            Ok(v) => {
                unsafe { *out = v };
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Scale-invariant functional report of the metric at `eps`.
///
/// # Safety
/// `h` live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_functional_report(
    h: *const SvlMetric,
    eps: f64,
    out: *mut SvlReport,
) -> SvlStatus {
    guarded(|| {
        let Some(m) = (unsafe { as_metric(h) }) else {
            return SvlStatus::InputError;
        };
        if out.is_null() {
            return SvlStatus::InputError;
        }
        match functional_report(m, eps) {
            Ok(r) => {
                unsafe {
                    *out = SvlReport {
                        volume: r.volume,
                        z2: r.z2,
                        sminus2: r.sminus2,
                        sigma: r.sigma,
                        i_eps_minus: r.i_eps_minus,
                        c_const: r.c_const,
                        eps: r.eps,
                    };
                }
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Value of the constrained-system potential of the Schwarzschild solution
/// at area radius r (equation-consistent normalization).
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_schwarzschild_tau(
    m: f64,
    alpha: f64,
    r: f64,
    out: *mut f64,
) -> SvlStatus {
    guarded(|| {
        if out.is_null() || !(m > 0.0) || !(alpha > 0.0) || !(r >= 2.0 * m) {
            return SvlStatus::InputError;
        }
        let tau = schwarzschild_tau(m, alpha, r.max(2.0 * m) + 1.0);
        unsafe { *out = tau.eval(t_of_r(r, m)) };
        SvlStatus::Ok
    })
}

/// Kasner exponents (a, b, c) for d in (0, 1).
///
/// # Safety
/// `a`, `b`, `c_exp` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_kasner_exponents(
    d: f64,
    a: *mut f64,
    b: *mut f64,
    c_exp: *mut f64,
) -> SvlStatus {
    guarded(|| {
        if a.is_null() || b.is_null() || c_exp.is_null() {
            return SvlStatus::InputError;
        }
        match kasner_exponents(d) {
            Ok((av, bv, cv)) => {
                unsafe {
                    *a = av;
                    *b = bv;
                    *c_exp = cv;
                }
                SvlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// The smoothing of min(s, 0) at parameter delta.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svl_smoothing_phi(delta: f64, s: f64, out: *mut f64) -> SvlStatus {
    guarded(|| {
        if out.is_null() || !(delta > 0.0) {
            return SvlStatus::InputError;
        }
        unsafe { *out = smoothing_phi(delta, s) };
        SvlStatus::Ok
    })
}
