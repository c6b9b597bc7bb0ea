//! Property suites for the algebraic invariants.

use proptest::prelude::*;
use symvar_lab::functionals::{smoothing_phi, volume};
use symvar_lab::geometry::scale_metric;
use symvar_lab::jet::{jet_sinh, Jet};
use symvar_lab::profile::RadialProfile;
use symvar_lab::quad::{integrate, QuadOpts};
use symvar_lab::SymmetricMetric;

fn warped_metric(kind: u8, p1: f64, p2: f64) -> SymmetricMetric {
    match kind % 3 {
        0 => SymmetricMetric::sphere(RadialProfile::closed_form(0.2, 2.0, move |t, ord| {
            jet_sinh(p1 * t + 0.3, ord).scale(1.0 / p1)
        })),
        1 => SymmetricMetric::torus(
            RadialProfile::power(0.5, 2.5, -p1.abs() / 3.0),
            RadialProfile::power(0.5, 2.5, p2.abs() / 2.0 + 0.1),
        ),
        _ => SymmetricMetric::sphere(RadialProfile::linear(0.1, 3.0, 1.0, p2.abs() + 0.1)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// s = 2(K12 + K13 + K23), z traceless, |z|^2 and |r|^2 consistent.
    #[test]
    fn curvature_point_identities(
        kind in 0u8..3,
        p1 in 0.4f64..1.8,
        p2 in 0.2f64..1.5,
        frac in 0.05f64..0.95,
    ) {
        let g = warped_metric(kind, p1, p2);
        let (t0, t1) = g.domain();
        let t = t0 + frac * (t1 - t0);
        let c = g.curvature_at(t).unwrap();
        let scale = 1.0 + c.s.abs() + c.rnorm2;
        prop_assert!(((c.s - 2.0 * (c.k12 + c.k13 + c.k23)) / scale).abs() < 1e-12);
        prop_assert!(((c.z1 + c.z2 + c.z3) / scale).abs() < 1e-12);
        prop_assert!(((c.znorm2 - (c.z1 * c.z1 + c.z2 * c.z2 + c.z3 * c.z3)) / scale).abs() < 1e-12);
        prop_assert!(((c.ric1 - c.k12 - c.k13) / scale).abs() < 1e-12);
    }

    /// Under g -> lambda^2 g sectional curvatures scale as lambda^{-2}.
    #[test]
    fn homothety_scaling_of_curvature(
        kind in 0u8..3,
        p1 in 0.4f64..1.8,
        p2 in 0.2f64..1.5,
        frac in 0.05f64..0.95,
        lam in 0.4f64..2.5,
    ) {
        let g = warped_metric(kind, p1, p2);
        let gs = scale_metric(&g, lam);
        let (t0, t1) = g.domain();
        let t = t0 + frac * (t1 - t0);
        let c = g.curvature_at(t).unwrap();
        let cs = gs.curvature_at(lam * t).unwrap();
        prop_assert!((cs.s - c.s / (lam * lam)).abs() < 1e-9 * (1.0 + c.s.abs()));
        prop_assert!((cs.znorm2 - c.znorm2 / lam.powi(4)).abs() < 1e-9 * (1.0 + c.znorm2));
    }

    /// Volume is additive over disjoint subintervals.
    #[test]
    fn volume_additivity(
        kind in 0u8..3,
        p1 in 0.4f64..1.8,
        p2 in 0.2f64..1.5,
        cut in 0.1f64..0.9,
    ) {
        let g = warped_metric(kind, p1, p2);
        let (t0, t1) = g.domain();
        let mid = t0 + cut * (t1 - t0);
        let va = volume(&g, (t0, mid)).unwrap();
        let vb = volume(&g, (mid, t1)).unwrap();
        let v = volume(&g, (t0, t1)).unwrap();
        prop_assert!(((va + vb - v) / v).abs() < 1e-9);
    }

    /// phi_delta: branch contract, monotonicity, and the sup bound
    /// |phi_delta(s) - s^-| <= delta * max(|s|, delta).
    #[test]
    fn smoothing_properties(
        delta in 1e-4f64..0.5,
        s1 in -10.0f64..10.0,
        s2 in -10.0f64..10.0,
    ) {
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        prop_assert!(smoothing_phi(delta, lo) <= smoothing_phi(delta, hi) + 1e-15);
        for &s in &[lo, hi] {
            let phi = smoothing_phi(delta, s);
            if s <= 0.0 {
                prop_assert_eq!(phi, s);
            }
            if s >= delta {
                prop_assert!((phi - delta * s).abs() < 1e-15 * (1.0 + s.abs()));
            }
            prop_assert!((phi - s.min(0.0)).abs() <= delta * s.abs().max(delta) + 1e-15);
        }
    }

    /// The local quartic of grid profiles reproduces quartic polynomials
    /// and their derivatives exactly (the 5-point-stencil property).
    #[test]
    fn grid_profile_exact_on_quartics(
        c0 in -2.0f64..2.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        c3 in -1.0f64..1.0,
        c4 in -1.0f64..1.0,
        frac in 0.0f64..1.0,
    ) {
        let poly = move |t: f64| c0 + c1 * t + c2 * t * t + c3 * t.powi(3) + c4 * t.powi(4);
        let p = RadialProfile::grid_from_fn(0.0, 2.0, 64, poly).unwrap();
        let t = 2.0 * frac;
        let scale = 1.0 + c0.abs() + c1.abs() + c2.abs() + c3.abs() + c4.abs();
        prop_assert!((p.eval(t) - poly(t)).abs() < 1e-11 * scale);
        let d2 = 2.0 * c2 + 6.0 * c3 * t + 12.0 * c4 * t * t;
        prop_assert!((p.deriv(t, 2) - d2).abs() < 1e-8 * scale);
        let d4 = 24.0 * c4;
        prop_assert!((p.deriv(t, 4) - d4).abs() < 1e-5 * scale);
    }

    /// Quadrature integrates polynomials against their antiderivatives.
    #[test]
    fn quadrature_vs_antiderivative(
        c in -3.0f64..3.0,
        k in 1u32..7,
        a in -1.0f64..0.5,
        width in 0.1f64..3.0,
    ) {
        let b = a + width;
        let v = integrate(|x| c * x.powi(k as i32), a, b, QuadOpts::default()).unwrap();
        let exact = c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0);
        prop_assert!((v - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
    }

    /// Jet algebra: (f*g)/g == f and sqrt(f^2) == f through order 4.
    #[test]
    fn jet_algebra_roundtrips(
        v in 0.5f64..3.0,
        d1 in -2.0f64..2.0,
        d2 in -2.0f64..2.0,
        d3 in -2.0f64..2.0,
        w in 0.5f64..3.0,
        e1 in -2.0f64..2.0,
    ) {
        let f = Jet::from_derivs(&[v, d1, d2, d3, 0.7]);
        let g = Jet::from_derivs(&[w, e1, 0.3, -0.2, 0.1]);
        let back = f.mul(&g).div(&g);
        let sq = f.sq().sqrt();
        for k in 0..=4 {
            prop_assert!((back.deriv(k) - f.deriv(k)).abs() < 1e-10 * (1.0 + f.deriv(k).abs()));
            prop_assert!((sq.deriv(k) - f.deriv(k)).abs() < 1e-10 * (1.0 + f.deriv(k).abs()));
        }
    }
}
