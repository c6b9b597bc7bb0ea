//! Symmetric 3-metrics of warped-product type and their pointwise curvature.
//!
//! Sphere-warped:  g = dt^2 + f(t)^2 ds^2_{S^2(1)}
//! Torus-warped :  g = dt^2 + f1(t)^2 dth1^2 + f2(t)^2 dth2^2,  th_i in [0, 2pi)
//!
//! Sign convention: the sectional curvature of the round unit sphere is +1
//! and Ricci eigenvalues are sums of sectional curvatures over planes
//! containing the direction.

use crate::error::{Error, Result};
use crate::profile::RadialProfile;

/// Relative degeneracy cutoff: points with f below this fraction of the
/// domain length are refused rather than extrapolated.
pub const DEGENERACY_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum SymmetricMetric {
    SphereWarped { f: RadialProfile },
    TorusWarped { f1: RadialProfile, f2: RadialProfile },
}

/// Pointwise curvature package in the orthonormal frame
/// (radial, fiber1, fiber2).
#[derive(Clone, Copy, Debug)]
pub struct CurvaturePoint {
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

impl CurvaturePoint {
    /// Assemble the full package from the three sectional curvatures; the
    /// remaining fields are the algebraic consequences.
    pub fn from_sectionals(k12: f64, k13: f64, k23: f64) -> Self {
        let ric1 = k12 + k13;
        let ric2 = k12 + k23;
        let ric3 = k13 + k23;
        let s = 2.0 * (k12 + k13 + k23);
        let z1 = ric1 - s / 3.0;
        let z2 = ric2 - s / 3.0;
        let z3 = ric3 - s / 3.0;
        CurvaturePoint {
            k12,
            k13,
            k23,
            ric1,
            ric2,
            ric3,
            s,
            z1,
            z2,
            z3,
            znorm2: z1 * z1 + z2 * z2 + z3 * z3,
            rnorm2: ric1 * ric1 + ric2 * ric2 + ric3 * ric3,
        }
    }

    /// |r|: pointwise curvature scale (the proxy for the inverse squared
    /// curvature radius used in the model diagnostics).
    pub fn rnorm(&self) -> f64 {
        self.rnorm2.sqrt()
    }
}

impl SymmetricMetric {
    pub fn sphere(f: RadialProfile) -> Self {
        SymmetricMetric::SphereWarped { f }
    }

    pub fn torus(f1: RadialProfile, f2: RadialProfile) -> Self {
        SymmetricMetric::TorusWarped { f1, f2 }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            SymmetricMetric::SphereWarped { f } => f.domain(),
            SymmetricMetric::TorusWarped { f1, f2 } => {
                let (a1, b1) = f1.domain();
                let (a2, b2) = f2.domain();
                (a1.max(a2), b1.min(b2))
            }
        }
    }

    pub fn domain_length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    fn check_point(&self, t: f64) -> Result<()> {
        let (t0, t1) = self.domain();
        if t < t0 || t > t1 {
            return Err(Error::Domain { t, t0, t1 });
        }
        let cutoff = DEGENERACY_CUTOFF * (t1 - t0);
        let wf = |f: &RadialProfile| -> Result<()> {
            let v = f.eval(t);
            if v <= cutoff {
                Err(Error::Degeneracy { t, f: v, cutoff })
            } else {
                Ok(())
            }
        };
        match self {
            SymmetricMetric::SphereWarped { f } => wf(f),
            SymmetricMetric::TorusWarped { f1, f2 } => {
                wf(f1)?;
                wf(f2)
            }
        }
    }

    /// Pointwise curvature from analytic (or stencil-backed) profile
    /// derivatives through order 2.
    pub fn curvature_at(&self, t: f64) -> Result<CurvaturePoint> {
        self.check_point(t)?;
        match self {
            SymmetricMetric::SphereWarped { f } => {
                let j = f.jet(t, 2);
                let (v, d1, d2) = (j.value(), j.deriv(1), j.deriv(2));
                let k12 = -d2 / v;
                let k23 = (1.0 - d1 * d1) / (v * v);
                Ok(CurvaturePoint::from_sectionals(k12, k12, k23))
            }
            SymmetricMetric::TorusWarped { f1, f2 } => {
                let j1 = f1.jet(t, 2);
                let j2 = f2.jet(t, 2);
                let k12 = -j1.deriv(2) / j1.value();
                let k13 = -j2.deriv(2) / j2.value();
                let k23 = -(j1.deriv(1) * j2.deriv(1)) / (j1.value() * j2.value());
                Ok(CurvaturePoint::from_sectionals(k12, k13, k23))
            }
        }
    }

    /// Independent curvature oracle: recomputes `curvature_at` using only
    /// profile *values* via 5-point centered stencils of spacing h.
    /// Agrees with the analytic path to O(h^4) on closed-form profiles.
    pub fn curvature_oracle(&self, t: f64, h: f64) -> Result<CurvaturePoint> {
        let (t0, t1) = self.domain();
        if t - 2.0 * h < t0 || t + 2.0 * h > t1 {
            return Err(Error::Domain {
                t: if t - 2.0 * h < t0 { t - 2.0 * h } else { t + 2.0 * h },
                t0,
                t1,
            });
        }
        self.check_point(t)?;
        let stencil = |f: &RadialProfile| -> (f64, f64, f64) {
            let fm2 = f.eval(t - 2.0 * h);
            let fm1 = f.eval(t - h);
            let f0 = f.eval(t);
            let fp1 = f.eval(t + h);
            let fp2 = f.eval(t + 2.0 * h);
            let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
            let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
            (f0, d1, d2)
        };
        match self {
            SymmetricMetric::SphereWarped { f } => {
                let (v, d1, d2) = stencil(f);
                let k12 = -d2 / v;
                let k23 = (1.0 - d1 * d1) / (v * v);
                Ok(CurvaturePoint::from_sectionals(k12, k12, k23))
            }
            SymmetricMetric::TorusWarped { f1, f2 } => {
                let (v1, d11, d21) = stencil(f1);
                let (v2, d12, d22) = stencil(f2);
                let k12 = -d21 / v1;
                let k13 = -d22 / v2;
                let k23 = -(d11 * d12) / (v1 * v2);
                Ok(CurvaturePoint::from_sectionals(k12, k13, k23))
            }
        }
    }
}

/// Homothety g -> lambda^2 g: profiles become lambda f(t/lambda) on the
/// scaled domain. Used by the scale-covariance checks.
pub fn scale_metric(metric: &SymmetricMetric, lambda: f64) -> SymmetricMetric {
    let scale_profile = |f: &RadialProfile| -> RadialProfile {
        let (t0, t1) = f.domain();
        let f = f.clone();
        RadialProfile::closed_form(lambda * t0, lambda * t1, move |t, ord| {
            let mut j = f.jet(t / lambda, ord);
            for k in 0..=j.ord {
                j.d[k] *= lambda.powi(1 - k as i32);
            }
            j
        })
    };
    match metric {
        SymmetricMetric::SphereWarped { f } => SymmetricMetric::sphere(scale_profile(f)),
        SymmetricMetric::TorusWarped { f1, f2 } => {
            SymmetricMetric::torus(scale_profile(f1), scale_profile(f2))
        }
    }
}

/// A metric in area-radius form g = A(r) dr^2 + r^2 ds^2_{S^2}.
pub struct AreaRadiusMetric {
    a: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub r0: f64,
    pub r1: f64,
}

impl AreaRadiusMetric {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(r0: f64, r1: f64, a: F) -> Self {
        AreaRadiusMetric {
            a: Box::new(a),
            r0,
            r1,
        }
    }

    pub fn a(&self, r: f64) -> f64 {
        (self.a)(r)
    }

    /// dt/dr = sqrt(A), the arclength density.
    pub fn dt_dr(&self, r: f64) -> f64 {
        self.a(r).sqrt()
    }
}

/// Convert g = A(r) dr^2 + r^2 S^2 to arclength form dt^2 + f^2 S^2 with
/// f(t(r)) = r and t(r0) = 0. An integrable endpoint singularity
/// A ~ C/(r - r0) is absorbed by the substitution xi = sqrt(r - r0).
pub fn arclength_form(metric: &AreaRadiusMetric) -> Result<SymmetricMetric> {
    let (r0, r1) = (metric.r0, metric.r1);
    if !(r1 > r0) {
        return Err(Error::Input(format!("r-range [{r0}, {r1}] not increasing")));
    }
    let span = r1 - r0;
    // g(xi) = 2 xi sqrt(A(r0 + xi^2)). Below xi_floor the computed
    // 1 - r0/(r0 + xi^2)-style differences inside A are pure cancellation
    // noise (xi^2 approaches the ulp of r0), so freeze the integrand there;
    // the bias is O(xi_floor^2), far below the conversion tolerance.
    let xi_floor = 3e-6 * span.sqrt();
    let g_at = |xi: f64| {
        let x = xi.max(xi_floor);
        2.0 * x * metric.a(r0 + x * x).sqrt()
    };
    // integrability probe (unclamped): for integrable endpoints g stays
    // bounded or grows slower than one decade per decade of xi
    let g_raw = |xi: f64| 2.0 * xi * metric.a(r0 + xi * xi).sqrt();
    let probes = [1e-2, 1e-3, 1e-4].map(|s| g_raw(s * span.sqrt()));
    if probes[2] > 5.0 * probes[1] && probes[1] > 5.0 * probes[0] {
        return Err(Error::Conversion(format!(
            "endpoint at r = {r0} looks non-integrable (A grows like 1/(r-r0)^2 or worse)"
        )));
    }

    // cumulative arclength on a fine xi-grid; the error is budgeted on the
    // total because panels near the (possibly singular) endpoint are
    // noise-limited by the cancellation inside A
    const PANELS: usize = 2048;
    let xi_max = span.sqrt();
    let dxi = xi_max / PANELS as f64;
    let mut ts = Vec::with_capacity(PANELS + 1);
    let mut rs = Vec::with_capacity(PANELS + 1);
    ts.push(0.0);
    rs.push(r0);
    let mut acc = 0.0;
    let mut err_acc = 0.0;
    for i in 0..PANELS {
        let a = i as f64 * dxi;
        let b = a + dxi;
        let (panel, err) = crate::quad::integrate_best_effort(
            g_at,
            a,
            b,
            crate::quad::QuadOpts {
                rel_tol: 1e-11,
                abs_tol: 1e-15,
                max_panels: 128,
            },
        );
        acc += panel;
        err_acc += err;
        ts.push(acc);
        rs.push(r0 + b * b);
    }
    let t_total = acc;
    if !t_total.is_finite() || err_acc > 1e-9 * t_total.abs() {
        return Err(Error::Conversion(format!(
            "arclength quadrature reached error {err_acc:e} on total {t_total:e}"
        )));
    }

    // resample r(t) on a uniform t-grid by local quartic interpolation of
    // the monotone (t_i, r_i) table
    const NODES: usize = 2049;
    let values: Vec<f64> = (0..NODES)
        .map(|j| {
            let t = t_total * j as f64 / (NODES - 1) as f64;
            interp_monotone(&ts, &rs, t)
        })
        .collect();
    let f = RadialProfile::from_grid(0.0, t_total, values)?;
    Ok(SymmetricMetric::sphere(f))
}

/// Local quartic Lagrange interpolation on a monotone table.
fn interp_monotone(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let idx = xs.partition_point(|&v| v < x).min(n - 1);
    let start = idx.saturating_sub(2).min(n - 5);
    let (xw, yw) = (&xs[start..start + 5], &ys[start..start + 5]);
    let mut acc = 0.0;
    for i in 0..5 {
        let mut li = yw[i];
        for j in 0..5 {
            if i != j {
                li *= (x - xw[j]) / (xw[i] - xw[j]);
            }
        }
        acc += li;
    }
    acc
}

/// Tolerance on |f'(0)| for a totally geodesic core.
pub const REFLECTION_SLOPE_TOL: f64 = 1e-8;

/// Even reflection of the metric through t = 0 ("doubling across the
/// horizon"). Requires f'(0) = 0 up to [`REFLECTION_SLOPE_TOL`].
pub fn double_across_horizon(metric: &SymmetricMetric) -> Result<SymmetricMetric> {
    let reflect = |f: &RadialProfile| -> Result<RadialProfile> {
        let (t0, _) = f.domain();
        if t0 != 0.0 {
            return Err(Error::Input(format!("doubling needs domain [0, T], got t0 = {t0}")));
        }
        let slope = f.deriv(0.0, 1);
        if slope.abs() > REFLECTION_SLOPE_TOL {
            return Err(Error::Reflection {
                slope,
                tol: REFLECTION_SLOPE_TOL,
            });
        }
        f.even_reflection()
    };
    match metric {
        SymmetricMetric::SphereWarped { f } => Ok(SymmetricMetric::sphere(reflect(f)?)),
        SymmetricMetric::TorusWarped { f1, f2 } => {
            Ok(SymmetricMetric::torus(reflect(f1)?, reflect(f2)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::schwarzschild::schwarzschild_profile;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn round_sphere_curvature() {
        let g = SymmetricMetric::sphere(RadialProfile::sin(0.0, std::f64::consts::PI));
        let c = g.curvature_at(std::f64::consts::FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(c.k12, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.k23, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.s, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.znorm2, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn hyperbolic_space_curvature() {
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.0, 3.0));
        let c = g.curvature_at(1.0).unwrap();
        assert_abs_diff_eq!(c.k12, -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.k23, -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.s, -6.0, epsilon = 1e-12);
    }

    #[test]
    fn schwarzschild_ricci_eigenvalues() {
        // at the point with area radius r: ric = (-2m/r^3, m/r^3, m/r^3),
        // s = 0, |z|^2 = 6 m^2/r^6
        let m = 1.0;
        let prof = schwarzschild_profile(m, 50.0);
        let g = SymmetricMetric::sphere(prof);
        let r = 5.0;
        let t = crate::canonical::schwarzschild::t_of_r(r, m);
        let c = g.curvature_at(t).unwrap();
        assert_relative_eq!(c.ric1, -2.0 * m / r.powi(3), max_relative = 1e-10);
        assert_relative_eq!(c.ric2, m / r.powi(3), max_relative = 1e-10);
        assert_relative_eq!(c.ric3, m / r.powi(3), max_relative = 1e-10);
        assert_abs_diff_eq!(c.s, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.znorm2, 6.0 * m * m / r.powi(6), max_relative = 1e-10);
        // cross-check against the value-only finite-difference oracle
        // (the profile evaluation itself is Newton-backed, so the stencil
        // noise floor sits near 1e-8 relative)
        let o = g.curvature_oracle(t, 2e-3).unwrap();
        assert_relative_eq!(o.ric1, c.ric1, max_relative = 1e-7);
        assert_relative_eq!(o.znorm2, c.znorm2, max_relative = 1e-6);
    }

    #[test]
    fn point_identities_hold() {
        let g = SymmetricMetric::torus(
            RadialProfile::power(1.0, 2.0, -1.0 / 3.0),
            RadialProfile::power(1.0, 2.0, 2.0 / 3.0),
        );
        let c = g.curvature_at(1.3).unwrap();
        assert_relative_eq!(c.s, 2.0 * (c.k12 + c.k13 + c.k23), max_relative = 1e-14);
        assert_abs_diff_eq!(c.z1 + c.z2 + c.z3, 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            c.rnorm2,
            c.ric1 * c.ric1 + c.ric2 * c.ric2 + c.ric3 * c.ric3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn oracle_trivial_cases() {
        let g = SymmetricMetric::sphere(RadialProfile::sin(0.0, 3.0));
        let c = g.curvature_oracle(1.0, 1e-3).unwrap();
        assert_abs_diff_eq!(c.k23, 1.0, epsilon = 1e-8);

        let flat = SymmetricMetric::sphere(RadialProfile::linear(0.0, 10.0, 1.0, 0.0));
        let c = flat.curvature_oracle(5.0, 1e-3).unwrap();
        assert_abs_diff_eq!(c.k12, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.k23, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.s, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn oracle_h_halving_gains_order() {
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.0, 3.0));
        let t = 1.1;
        let exact = g.curvature_at(t).unwrap();
        let err = |h: f64| {
            let o = g.curvature_oracle(t, h).unwrap();
            (o.k12 - exact.k12).abs() + (o.k23 - exact.k23).abs()
        };
        let e1 = err(2e-2);
        let e2 = err(1e-2);
        assert!(
            e1 / e2 >= 15.0,
            "expected >= 15x error reduction, got {}",
            e1 / e2
        );
    }

    #[test]
    fn domain_and_degeneracy_errors() {
        let g = SymmetricMetric::sphere(RadialProfile::sin(0.0, std::f64::consts::PI));
        assert!(matches!(g.curvature_at(4.0), Err(Error::Domain { .. })));
        assert!(matches!(
            g.curvature_at(std::f64::consts::PI),
            Err(Error::Degeneracy { .. })
        ));
        assert!(matches!(
            g.curvature_oracle(0.001, 1e-2),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn pole_smoothness_isotropic_limit() {
        // f(0)=0, f'(0)=1, f''(0)=0 families: curvature stays finite and
        // isotropic (K12 -> K23) as t -> 0
        for (prof, expect) in [
            (RadialProfile::sin(0.0, 3.0), 1.0),
            (RadialProfile::sinh(0.0, 3.0), -1.0),
            (
                RadialProfile::closed_form(0.0, 1.0, |t, ord| {
                    // t + t^4: satisfies the literal f'''(0)=0 hypothesis too
                    let mut d = [0.0; 5];
                    d[0] = t + t.powi(4);
                    d[1] = 1.0 + 4.0 * t.powi(3);
                    d[2] = 12.0 * t * t;
                    d[3] = 24.0 * t;
                    d[4] = 24.0;
                    crate::jet::Jet { d, ord }
                }),
                0.0,
            ),
        ] {
            let g = SymmetricMetric::sphere(prof);
            let t = 1e-4;
            let c = g.curvature_at(t).unwrap();
            assert!(c.k12.is_finite() && c.k23.is_finite());
            assert_abs_diff_eq!(c.k12, c.k23, epsilon = 1e-2);
            assert_abs_diff_eq!(c.k12, expect, epsilon = 1e-2);
        }
    }

    #[test]
    fn arclength_form_flat() {
        let m = AreaRadiusMetric::new(0.0, 5.0, |_| 1.0);
        let g = arclength_form(&m).unwrap();
        if let SymmetricMetric::SphereWarped { f } = &g {
            let (t0, t1) = f.domain();
            assert_abs_diff_eq!(t0, 0.0);
            assert_relative_eq!(t1, 5.0, max_relative = 1e-10);
            for &t in &[0.5, 2.0, 4.4] {
                assert_relative_eq!(f.eval(t), t, max_relative = 1e-9);
            }
        } else {
            panic!("expected sphere-warped");
        }
    }

    #[test]
    fn arclength_form_schwarzschild_boundary() {
        // m = 1/2: t(2m) = 0 by construction, dt/dr(2) = sqrt(2)
        let m = 0.5;
        let ar = AreaRadiusMetric::new(2.0 * m, 10.0, move |r| 1.0 / (1.0 - 2.0 * m / r));
        assert_relative_eq!(ar.dt_dr(2.0), 2.0f64.sqrt(), max_relative = 1e-14);
        let g = arclength_form(&ar).unwrap();
        // converted profile agrees with the closed-form arclength profile
        let exact = schwarzschild_profile(m, 11.0);
        if let SymmetricMetric::SphereWarped { f } = &g {
            assert_abs_diff_eq!(f.eval(0.0), 2.0 * m, epsilon = 1e-9);
            let (_, t1) = f.domain();
            let mut worst = 0.0f64;
            for i in 1..40 {
                let t = t1 * i as f64 / 40.0;
                worst = worst.max((f.eval(t) - exact.eval(t)).abs());
            }
            assert!(worst < 1e-7, "profile mismatch {worst}");
        } else {
            panic!("expected sphere-warped");
        }
    }

    #[test]
    fn arclength_form_rejects_non_integrable() {
        let ar = AreaRadiusMetric::new(1.0, 2.0, |r| 1.0 / (r - 1.0).powi(2));
        assert!(matches!(arclength_form(&ar), Err(Error::Conversion(_))));
    }

    #[test]
    fn doubling_cosh_and_errors() {
        let g = SymmetricMetric::sphere(RadialProfile::cosh(0.0, 2.0));
        let d = double_across_horizon(&g).unwrap();
        let (t0, t1) = d.domain();
        assert_abs_diff_eq!(t0, -2.0);
        assert_abs_diff_eq!(t1, 2.0);
        if let SymmetricMetric::SphereWarped { f } = &d {
            assert_relative_eq!(f.eval(-1.3), 1.3f64.cosh(), max_relative = 1e-14);
        }
        let bad = SymmetricMetric::sphere(RadialProfile::linear(0.0, 2.0, 1.0, 1.0));
        assert!(matches!(
            double_across_horizon(&bad),
            Err(Error::Reflection { .. })
        ));
    }

    #[test]
    fn doubled_schwarzschild_symmetric_curvature() {
        let m = 1.0;
        let g = SymmetricMetric::sphere(schwarzschild_profile(m, 40.0));
        let d = double_across_horizon(&g).unwrap();
        if let SymmetricMetric::SphereWarped { f } = &d {
            assert_relative_eq!(f.eval(0.0), 2.0 * m, max_relative = 1e-12);
        }
        let t = 3.7;
        let cp = d.curvature_at(t).unwrap();
        let cm = d.curvature_at(-t).unwrap();
        assert_relative_eq!(cp.ric1, cm.ric1, max_relative = 1e-12);
        assert_relative_eq!(cp.znorm2, cm.znorm2, max_relative = 1e-12);
    }
}
