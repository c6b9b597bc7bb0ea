//! Round-trip tests of the C ABI surface.

use std::ptr;
use symvar_lab_ffi::*;

#[test]
fn schwarzschild_handle_roundtrip() {
    unsafe {
        let mut h: *mut SvlMetric = ptr::null_mut();
        assert_eq!(svl_metric_schwarzschild(1.0, 40.0, &mut h), SvlStatus::Ok);
        assert!(!h.is_null());

        let (mut t0, mut t1) = (0.0f64, 0.0f64);
        assert_eq!(svl_metric_domain(h, &mut t0, &mut t1), SvlStatus::Ok);
        assert_eq!(t0, 0.0);
        assert!(t1 > 30.0);

        // curvature at the point with area radius 5: ric = (-2m/r^3, m/r^3, m/r^3)
        let t5 = symvar_lab::canonical::schwarzschild::t_of_r(5.0, 1.0);
        let mut c = SvlCurvature::default();
        assert_eq!(svl_curvature_at(h, t5, &mut c), SvlStatus::Ok);
        assert!((c.ric1 + 2.0 / 125.0).abs() < 1e-10);
        assert!((c.ric2 - 1.0 / 125.0).abs() < 1e-10);
        assert!(c.s.abs() < 1e-11);

        // oracle agrees with the analytic path
        let mut o = SvlCurvature::default();
        assert_eq!(svl_curvature_oracle(h, t5, 2e-3, &mut o), SvlStatus::Ok);
        assert!((o.ric1 - c.ric1).abs() < 1e-7);

        // domain error on out-of-range evaluation
        assert_eq!(
            svl_curvature_at(h, t1 + 1.0, &mut c),
            SvlStatus::DomainError
        );

        let mut v = 0.0f64;
        assert_eq!(svl_volume(h, 0.0, t5, &mut v), SvlStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(svl_volume(h, t5, 0.0, &mut v), SvlStatus::InputError);

        let mut rep = SvlReport::default();
        assert_eq!(svl_functional_report(h, 1e-3, &mut rep), SvlStatus::Ok);
        assert!(rep.sminus2.abs() < 1e-9); // scalar-flat: no negative part
        assert!(rep.z2 > 0.0);

        svl_metric_free(h);
        svl_metric_free(ptr::null_mut()); // null is a no-op
    }
}

#[test]
fn kasner_and_scalars() {
    unsafe {
        let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
        assert_eq!(
            svl_kasner_exponents(0.5, &mut a, &mut b, &mut c),
            SvlStatus::Ok
        );
        assert!((a + 1.0 / 3.0).abs() < 1e-14);
        assert!((b - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(
            svl_kasner_exponents(1.5, &mut a, &mut b, &mut c),
            SvlStatus::InputError
        );

        let mut h: *mut SvlMetric = ptr::null_mut();
        assert_eq!(svl_metric_kasner(0.5, 1.0, 2.0, &mut h), SvlStatus::Ok);
        let mut cur = SvlCurvature::default();
        assert_eq!(svl_curvature_at(h, 1.0, &mut cur), SvlStatus::Ok);
        assert!((cur.ric1 + 2.0 / 9.0).abs() < 1e-12);
        assert!((cur.ric3 - 4.0 / 9.0).abs() < 1e-12);
        svl_metric_free(h);

        let mut tau = 0.0f64;
        assert_eq!(svl_schwarzschild_tau(1.0, 1.0, 2.0, &mut tau), SvlStatus::Ok);
        assert!((tau + 0.0625).abs() < 1e-12);

        let mut phi = 0.0f64;
        assert_eq!(svl_smoothing_phi(0.1, -1.0, &mut phi), SvlStatus::Ok);
        assert_eq!(phi, -1.0);
        assert_eq!(
            svl_smoothing_phi(-0.1, 1.0, &mut phi),
            SvlStatus::InputError
        );

        assert_eq!(svl_curvature_at(ptr::null(), 1.0, &mut cur), SvlStatus::InputError);
        assert!(!svl_version().is_null());
    }
}

#[test]
fn sampled_metric_roundtrip() {
    unsafe {
        // sample sinh on a uniform grid and recover hyperbolic curvature
        let n = 2001usize;
        let (t0, t1) = (0.2f64, 2.2f64);
        let vals: Vec<f64> = (0..n)
            .map(|i| (t0 + (t1 - t0) * i as f64 / (n - 1) as f64).sinh())
            .collect();
        let mut h: *mut SvlMetric = ptr::null_mut();
        assert_eq!(
            svl_metric_sphere_from_samples(vals.as_ptr(), n, t0, t1, &mut h),
            SvlStatus::Ok
        );
        let mut c = SvlCurvature::default();
        assert_eq!(svl_curvature_at(h, 1.0, &mut c), SvlStatus::Ok);
        assert!((c.s + 6.0).abs() < 1e-5, "s = {}", c.s);
        svl_metric_free(h);

        // too few samples
        assert_eq!(
            svl_metric_sphere_from_samples(vals.as_ptr(), 3, t0, t1, &mut h),
            SvlStatus::InputError
        );
    }
}

#[test]
fn generated_header_exists_and_declares_surface() {
    let header = include_str!("../include/symvar_lab.h");
    for needle in [
        "SYMVAR_LAB_H",
        "SvlMetric",
        "SvlCurvature",
        "svl_curvature_at",
        "svl_metric_free",
        "SVL_STATUS_OK",
    ] {
        assert!(header.contains(needle), "header missing {needle}");
    }
}
