//! Functionals on symmetric metrics and the Euler-Lagrange residual
//! operators of the four limit systems.
//!
//! Conventions. For a diagonal radial symmetric 2-tensor written in the
//! orthonormal frame (radial, fiber1, fiber2) with fiber log-derivatives
//! kap_a = f_a'/f_a, the rough Laplacian contracts to
//!
//!   (tr D^2 T)_1 = T1'' + (k1+k2) T1' - 2 k1^2 (T1-T2) - 2 k2^2 (T1-T3)
//!   (tr D^2 T)_2 = T2'' + (k1+k2) T2' + 2 k1^2 (T1-T2)
//!   (tr D^2 T)_3 = T3'' + (k1+k2) T3' + 2 k2^2 (T1-T3)
//!
//! and D*D = -tr D^2. The gradient of Z^2 = int |z|^2 dV is
//!   grad Z^2 = D*D z + (1/3) D^2 s - 2 Rcirc(z) + (1/2)(|z|^2 - Ds/3) g,
//! whose trace reproduces the scalar identity  -(Ds + 3|z|^2)/6.
//! The directional-derivative oracle d/de Z^2(g + e h) is the authority for
//! this component reduction and is exercised by the weak-form residuals.

use crate::error::{Error, Result};
use crate::geometry::{CurvaturePoint, SymmetricMetric};
use crate::jet::Jet;
use crate::profile::RadialProfile;
use crate::quad::{integrate, QuadOpts};

pub type ScalarField = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TensorField = Box<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// Quadrature tolerance used by the functional integrals.
pub const QUAD_REL_TOL: f64 = 1e-9;
/// Tighter tolerance for finite-difference oracles.
const FD_QUAD_OPTS: QuadOpts = QuadOpts {
    rel_tol: 1e-12,
    abs_tol: 1e-15,
    max_panels: 6000,
};
/// Base step for the Richardson-extrapolated directional differences.
pub const FD_STEP: f64 = 2e-5;

// ---------------------------------------------------------------------------
// curvature jets
// ---------------------------------------------------------------------------

/// Jets of the pointwise curvature quantities needed by the operators.
pub struct CurvJets {
    /// trace-free Ricci eigenvalues, order >= 2
    pub z: [Jet; 3],
    /// Ricci eigenvalues (values)
    pub ric: [f64; 3],
    /// scalar curvature, order >= 2
    pub s: Jet,
    /// fiber log-derivatives f_a'/f_a, order >= 1
    pub kap: [Jet; 2],
    /// sectional curvatures (values): [K12, K13, K23]
    pub sect: [f64; 3],
}

impl CurvJets {
    pub fn znorm2(&self) -> f64 {
        self.z.iter().map(|j| j.value() * j.value()).sum()
    }

    pub fn laplacian_s(&self) -> f64 {
        self.s.deriv(2) + (self.kap[0].value() + self.kap[1].value()) * self.s.deriv(1)
    }
}

/// Curvature jets of the metric at t. Needs profile derivatives through
/// order 4 (analytic profiles, or grid profiles with quartic stencils).
pub fn curvature_jets(metric: &SymmetricMetric, t: f64) -> Result<CurvJets> {
    metric.curvature_at(t)?; // domain + degeneracy checks
    let (j1, j2) = match metric {
        SymmetricMetric::SphereWarped { f } => (f.jet(t, 4), f.jet(t, 4)),
        SymmetricMetric::TorusWarped { f1, f2 } => (f1.jet(t, 4), f2.jet(t, 4)),
    };
    let k12;
    let k13;
    let k23;
    match metric {
        SymmetricMetric::SphereWarped { .. } => {
            k12 = j1.d2().div(&j1).scale(-1.0);
            k13 = k12;
            let one = Jet::constant(1.0, j1.ord);
            let fp = j1.d1();
            k23 = one.sub(&fp.sq()).div(&j1.sq());
        }
        SymmetricMetric::TorusWarped { .. } => {
            k12 = j1.d2().div(&j1).scale(-1.0);
            k13 = j2.d2().div(&j2).scale(-1.0);
            k23 = j1.d1().mul(&j2.d1()).div(&j1.mul(&j2)).scale(-1.0);
        }
    }
    let ric1 = k12.add(&k13);
    let ric2 = k12.add(&k23);
    let ric3 = k13.add(&k23);
    let s = k12.add(&k13).add(&k23).scale(2.0);
    let third = s.scale(1.0 / 3.0);
    let z = [ric1.sub(&third), ric2.sub(&third), ric3.sub(&third)];
    let kap = [j1.d1().div(&j1), j2.d1().div(&j2)];
    Ok(CurvJets {
        z,
        ric: [ric1.value(), ric2.value(), ric3.value()],
        s,
        kap,
        sect: [k12.value(), k13.value(), k23.value()],
    })
}

fn dvol_factor(metric: &SymmetricMetric, t: f64) -> f64 {
    match metric {
        SymmetricMetric::SphereWarped { f } => {
            let v = f.eval(t);
            4.0 * std::f64::consts::PI * v * v
        }
        SymmetricMetric::TorusWarped { f1, f2 } => {
            let tau = 2.0 * std::f64::consts::PI;
            tau * tau * f1.eval(t) * f2.eval(t)
        }
    }
}

// ---------------------------------------------------------------------------
// volume and the functional report
// ---------------------------------------------------------------------------

/// Volume of the metric over a subinterval of its domain. Empty interval
/// gives zero; reversed interval is an input error.
pub fn volume(metric: &SymmetricMetric, interval: (f64, f64)) -> Result<f64> {
    let (a, b) = interval;
    if a > b {
        return Err(Error::Input(format!("reversed interval [{a}, {b}]")));
    }
    let (t0, t1) = metric.domain();
    if a < t0 || b > t1 {
        return Err(Error::Domain {
            t: if a < t0 { a } else { b },
            t0,
            t1,
        });
    }
    integrate(
        |t| dvol_factor(metric, t),
        a,
        b,
        QuadOpts::with_rel_tol(QUAD_REL_TOL),
    )
}

/// The scale-invariant functionals of one metric at a given eps.
#[derive(Clone, Copy, Debug)]
pub struct FunctionalReport {
    pub volume: f64,
    /// unweighted Z^2 = int |z|^2 dV
    pub z2: f64,
    /// (v^{1/3} int (s^-)^2 dV)^{1/2}
    pub sminus2: f64,
    /// sigma, the same scale-invariant quantity as `sminus2`
    pub sigma: f64,
    pub i_eps_minus: f64,
    /// the Euler-Lagrange constant c
    pub c_const: f64,
    pub eps: f64,
}

fn metric_integral<Q>(metric: &SymmetricMetric, interval: (f64, f64), q: Q) -> Result<f64>
where
    Q: Fn(&CurvaturePoint) -> f64,
{
    let v = integrate(
        |t| match metric.curvature_at(t) {
            Ok(c) => q(&c) * dvol_factor(metric, t),
            Err(_) => f64::NAN,
        },
        interval.0,
        interval.1,
        QuadOpts::with_rel_tol(QUAD_REL_TOL),
    )?;
    if v.is_nan() {
        return Err(Error::Numeric {
            what: "curvature integrand",
            requested: QUAD_REL_TOL,
            achieved: f64::INFINITY,
        });
    }
    Ok(v)
}

pub fn functional_report(metric: &SymmetricMetric, eps: f64) -> Result<FunctionalReport> {
    let dom = metric.domain();
    let v = volume(metric, dom)?;
    let z2 = metric_integral(metric, dom, |c| c.znorm2)?;
    let s2m = metric_integral(metric, dom, |c| {
        let sm = c.s.min(0.0);
        sm * sm
    })?;
    let sminus2 = (v.cbrt() * s2m).sqrt();
    let i_eps_minus = eps * v.cbrt() * z2 + sminus2;
    let c_const = if sminus2 > 0.0 {
        s2m / (12.0 * sminus2 * v) + eps * z2 / (6.0 * v)
    } else {
        eps * z2 / (6.0 * v)
    };
    Ok(FunctionalReport {
        volume: v,
        z2,
        sminus2,
        sigma: sminus2,
        i_eps_minus,
        c_const,
        eps,
    })
}

/// Z^2 = int |z|^2 dV over a subinterval (unweighted).
pub fn z2_functional(metric: &SymmetricMetric, interval: (f64, f64)) -> Result<f64> {
    metric_integral(metric, interval, |c| c.znorm2)
}

// ---------------------------------------------------------------------------
// smoothing of s^-
// ---------------------------------------------------------------------------

/// Smoothing phi_delta of s^- = min(s, 0): equal to s for s <= 0 and to
/// delta*s for s >= delta, with the transition s^2 on (0, delta). The
/// transition is monotone, stays strictly below the delta*s line, and has
/// (phi^2)'' = 12 s^2 > 0 there.
pub fn smoothing_phi(delta: f64, s: f64) -> f64 {
    debug_assert!(delta > 0.0);
    if s <= 0.0 {
        s
    } else if s >= delta {
        delta * s
    } else {
        s * s
    }
}

// ---------------------------------------------------------------------------
// potentials
// ---------------------------------------------------------------------------

/// Potential data feeding the Euler-Lagrange residual operators.
#[derive(Clone)]
pub struct PotentialField {
    /// tau <= 0 (s^-/sigma for minimizer-style potentials)
    pub tau: RadialProfile,
    /// omega = tau + (eps/12) s
    pub omega: RadialProfile,
    /// limit coefficient of the constrained systems
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
}

impl PotentialField {
    pub fn new(tau: RadialProfile, omega: RadialProfile, alpha: Option<f64>, eps: Option<f64>) -> Self {
        PotentialField {
            tau,
            omega,
            alpha,
            eps,
        }
    }

    /// Potential with tau as given and omega built from the metric's scalar
    /// curvature: omega = tau + (eps/12) s.
    pub fn from_tau(tau: RadialProfile, metric: &SymmetricMetric, alpha: Option<f64>, eps: Option<f64>) -> Self {
        let e = eps.unwrap_or(0.0);
        let m = metric.clone();
        let tau2 = tau.clone();
        let (t0, t1) = tau.domain();
        let omega = RadialProfile::closed_form(t0, t1, move |t, ord| {
            let tj = tau2.jet(t, ord);
            match curvature_jets(&m, t) {
                Ok(c) => tj.add(&c.s.scale(e / 12.0)),
                Err(_) => tj,
            }
        });
        PotentialField::new(tau, omega, alpha, eps)
    }

    /// The distinguished zero potential (used by the Z^2 system).
    pub fn zero_potential(domain: (f64, f64)) -> Self {
        let z = RadialProfile::closed_form(domain.0, domain.1, |_, ord| Jet::constant(0.0, ord));
        PotentialField::new(z.clone(), z, None, None)
    }
}

/// tau_sigma output: either a genuine potential or the distinguished
/// zero-potential result for metrics with s >= 0 everywhere.
pub enum TauSigma {
    Potential(PotentialField),
    ZeroPotential,
}

/// tau = s^-/sigma as a profile on the metric's domain. Returns
/// `ZeroPotential` when sigma = 0 (s >= 0 everywhere); that case is not an
/// error, it feeds the Z^2 system.
pub fn tau_sigma(metric: &SymmetricMetric) -> Result<TauSigma> {
    let rep = functional_report(metric, 0.0)?;
    // sigma at the size of the quadrature floor means s^- vanishes a.e.
    if rep.sigma <= 1e-12 * (1.0 + rep.volume) {
        return Ok(TauSigma::ZeroPotential);
    }
    let sigma = rep.sigma;
    let m = metric.clone();
    let (t0, t1) = metric.domain();
    let tau = RadialProfile::closed_form(t0, t1, move |t, ord| {
        match curvature_jets(&m, t) {
            Ok(c) => {
                if c.s.value() < 0.0 {
                    c.s.scale(1.0 / sigma)
                } else {
                    Jet::constant(0.0, ord)
                }
            }
            Err(_) => Jet::constant(f64::NAN, ord),
        }
    });
    Ok(TauSigma::Potential(PotentialField::from_tau(
        tau,
        metric,
        None,
        None,
    )))
}

// ---------------------------------------------------------------------------
// diagonal perturbations
// ---------------------------------------------------------------------------

/// A diagonal radial perturbation h = diag(h1, h2, h3) in the warped
/// orthonormal frame, with its support recorded so that weak-form
/// quadratures integrate over the support only (a narrow bump inside a
/// long interval can otherwise slip between the nodes of the top-level
/// quadrature panel). Sphere-warped metrics require h2 = h3.
#[derive(Clone)]
pub struct DiagonalPerturbation {
    pub label: String,
    pub components: [RadialProfile; 3],
    pub support: (f64, f64),
}

impl DiagonalPerturbation {
    /// phi * diag(d1, d2, d3) for a scalar bump profile phi supported on
    /// the whole of its domain.
    pub fn from_bump(label: &str, bump: &RadialProfile, dir: [f64; 3]) -> Self {
        Self::from_bump_with_support(label, bump, dir, bump.domain())
    }

    pub fn from_bump_with_support(
        label: &str,
        bump: &RadialProfile,
        dir: [f64; 3],
        support: (f64, f64),
    ) -> Self {
        let comp = |c: f64| {
            let b = bump.clone();
            let (t0, t1) = bump.domain();
            RadialProfile::closed_form(t0, t1, move |t, ord| b.jet(t, ord).scale(c))
        };
        DiagonalPerturbation {
            label: label.to_string(),
            components: [comp(dir[0]), comp(dir[1]), comp(dir[2])],
            support,
        }
    }

    fn clipped(&self, interval: (f64, f64)) -> (f64, f64) {
        (
            interval.0.max(self.support.0),
            interval.1.min(self.support.1),
        )
    }

    fn jets(&self, t: f64, ord: usize) -> [Jet; 3] {
        [
            self.components[0].jet(t, ord),
            self.components[1].jet(t, ord),
            self.components[2].jet(t, ord),
        ]
    }

    fn values(&self, t: f64) -> [f64; 3] {
        [
            self.components[0].eval(t),
            self.components[1].eval(t),
            self.components[2].eval(t),
        ]
    }
}

/// C^2 polynomial bump (1 - x^2)^3 on [center-hw, center+hw], zero outside.
pub fn polynomial_bump(t0: f64, t1: f64, center: f64, hw: f64) -> RadialProfile {
    RadialProfile::closed_form(t0, t1, move |t, ord| {
        let x = (t - center) / hw;
        if x.abs() >= 1.0 {
            return Jet::constant(0.0, ord);
        }
        let u = 1.0 - x * x;
        let d0 = u * u * u;
        let d1 = -6.0 * x * u * u / hw;
        let d2 = (-6.0 * u * u + 24.0 * x * x * u) / (hw * hw);
        let d3 = (72.0 * x * u - 48.0 * x * x * x) / (hw * hw * hw);
        let d4 = (72.0 * u - 288.0 * x * x) / (hw * hw * hw * hw);
        Jet::from_derivs(&[d0, d1, d2, d3, d4][..=ord])
    })
}

/// The fixed three-perturbation basket on a support interval: bumps in the
/// conformal, radial-stretch and fiber-stretch directions, centers spread
/// across the middle of the support.
pub fn standard_basket(support: (f64, f64), full_domain: (f64, f64)) -> Vec<DiagonalPerturbation> {
    let len = support.1 - support.0;
    let hw = 0.24 * len;
    let centers = [
        support.0 + 0.26 * len,
        support.0 + 0.50 * len,
        support.0 + 0.74 * len,
    ];
    let dirs: [([f64; 3], &str); 3] = [
        ([1.0, 1.0, 1.0], "conformal"),
        ([1.0, 0.0, 0.0], "radial"),
        ([0.0, 1.0, 1.0], "fiber"),
    ];
    centers
        .iter()
        .zip(dirs.iter())
        .map(|(&c, (dir, name))| {
            let bump = polynomial_bump(full_domain.0, full_domain.1, c, hw);
            DiagonalPerturbation::from_bump_with_support(
                &format!("bump-{name}"),
                &bump,
                *dir,
                (c - hw, c + hw),
            )
        })
        .collect()
}

/// Basket on the middle third of the metric domain (the default placement).
pub fn middle_third_basket(metric: &SymmetricMetric) -> Vec<DiagonalPerturbation> {
    let (t0, t1) = metric.domain();
    let len = t1 - t0;
    standard_basket((t0 + len / 3.0, t0 + 2.0 * len / 3.0), (t0, t1))
}

fn check_perturbation(metric: &SymmetricMetric, h: &DiagonalPerturbation, t_probe: f64) -> Result<()> {
    if matches!(metric, SymmetricMetric::SphereWarped { .. }) {
        let v = h.values(t_probe);
        // sphere symmetry forces equal fiber components; probing one point is
        // enough for the scaled-bump perturbations used here
        if (v[1] - v[2]).abs() > 1e-14 * (1.0 + v[1].abs()) {
            return Err(Error::Input(
                "sphere-warped perturbations need equal fiber components".into(),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the differential operators
// ---------------------------------------------------------------------------

/// L(h) = -Delta tr h + div div h - <r, h>, the linearization of scalar
/// curvature in the direction h.
pub fn l_apply(h: &DiagonalPerturbation, metric: &SymmetricMetric) -> Result<ScalarField> {
    let (t0, t1) = metric.domain();
    check_perturbation(metric, h, t0 + 0.5 * (t1 - t0))?;
    let m = metric.clone();
    let h = h.clone();
    Ok(Box::new(move |t| {
        let c = match curvature_jets(&m, t) {
            Ok(c) => c,
            Err(_) => return f64::NAN,
        };
        let hj = h.jets(t, 2);
        let k1 = &c.kap[0];
        let k2 = &c.kap[1];
        let ksum = k1.value() + k2.value();
        let trh = hj[0].add(&hj[1]).add(&hj[2]);
        let lap_trh = trh.deriv(2) + ksum * trh.deriv(1);
        // omega = (div h)_radial
        let om_v = hj[0].deriv(1)
            + k1.value() * (hj[0].value() - hj[1].value())
            + k2.value() * (hj[0].value() - hj[2].value());
        let om_d = hj[0].deriv(2)
            + k1.deriv(1) * (hj[0].value() - hj[1].value())
            + k1.value() * (hj[0].deriv(1) - hj[1].deriv(1))
            + k2.deriv(1) * (hj[0].value() - hj[2].value())
            + k2.value() * (hj[0].deriv(1) - hj[2].deriv(1));
        let divdiv = om_d + ksum * om_v;
        let rh = c.ric[0] * hj[0].value() + c.ric[1] * hj[1].value() + c.ric[2] * hj[2].value();
        -lap_trh + divdiv - rh
    }))
}

/// L* u = D^2 u - (Delta u) g - u r, diagonal components in the warped
/// frame. Trace is -2 Delta u - u s.
pub fn lstar_apply(u: &RadialProfile, metric: &SymmetricMetric) -> TensorField {
    let m = metric.clone();
    let u = u.clone();
    Box::new(move |t| {
        let c = match curvature_jets(&m, t) {
            Ok(c) => c,
            Err(_) => return [f64::NAN; 3],
        };
        let uj = u.jet(t, 2);
        lstar_components(&c, &uj)
    })
}

fn lstar_components(c: &CurvJets, u: &Jet) -> [f64; 3] {
    let k1 = c.kap[0].value();
    let k2 = c.kap[1].value();
    let lap = u.deriv(2) + (k1 + k2) * u.deriv(1);
    [
        u.deriv(2) - lap - u.value() * c.ric[0],
        k1 * u.deriv(1) - lap - u.value() * c.ric[1],
        k2 * u.deriv(1) - lap - u.value() * c.ric[2],
    ]
}

/// Pointwise gradient of Z^2 (diagonal components, warped frame).
pub fn grad_z2(metric: &SymmetricMetric) -> TensorField {
    let m = metric.clone();
    Box::new(move |t| match curvature_jets(&m, t) {
        Ok(c) => grad_z2_components(&c),
        Err(_) => [f64::NAN; 3],
    })
}

fn grad_z2_components(c: &CurvJets) -> [f64; 3] {
    let k1 = c.kap[0].value();
    let k2 = c.kap[1].value();
    let ks = k1 + k2;
    let z = &c.z;
    let (z1, z2, z3) = (z[0].value(), z[1].value(), z[2].value());
    let zn2 = c.znorm2();
    let lap_s = c.laplacian_s();
    let (k12, k13, k23) = (c.sect[0], c.sect[1], c.sect[2]);

    // D*D z = -tr D^2 z
    let dd = [
        -(z[0].deriv(2) + ks * z[0].deriv(1)
            - 2.0 * k1 * k1 * (z1 - z2)
            - 2.0 * k2 * k2 * (z1 - z3)),
        -(z[1].deriv(2) + ks * z[1].deriv(1) + 2.0 * k1 * k1 * (z1 - z2)),
        -(z[2].deriv(2) + ks * z[2].deriv(1) + 2.0 * k2 * k2 * (z1 - z3)),
    ];
    // Hessian of s
    let d2s = [
        c.s.deriv(2),
        k1 * c.s.deriv(1),
        k2 * c.s.deriv(1),
    ];
    // curvature action (Rcirc z)_i = sum_{j != i} K_ij z_j
    let rz = [
        k12 * z2 + k13 * z3,
        k12 * z1 + k23 * z3,
        k13 * z1 + k23 * z2,
    ];
    let conf = 0.5 * (zn2 - lap_s / 3.0);
    [
        dd[0] + d2s[0] / 3.0 - 2.0 * rz[0] + conf,
        dd[1] + d2s[1] / 3.0 - 2.0 * rz[1] + conf,
        dd[2] + d2s[2] / 3.0 - 2.0 * rz[2] + conf,
    ]
}

// ---------------------------------------------------------------------------
// finite-difference oracle for the Z^2 gradient
// ---------------------------------------------------------------------------

/// |z|^2 dV of the perturbed metric g + e*h at t, computed directly from
/// the diagonal chart A dt^2 + B1^2 dth1^2 + B2^2 dth2^2 (value-only code
/// path, independent of the jet-based operator assembly).
fn z2_density_perturbed(metric: &SymmetricMetric, h: &DiagonalPerturbation, e: f64, t: f64) -> f64 {
    let hj = h.jets(t, 2);
    let (a, ap) = (1.0 + e * hj[0].value(), e * hj[0].deriv(1));
    let warp = |f: &RadialProfile, hj: &Jet| -> (f64, f64, f64) {
        let fj = f.jet(t, 2);
        let s = (1.0 + e * hj.value()).sqrt();
        let sp = e * hj.deriv(1) / (2.0 * s);
        let spp = e * hj.deriv(2) / (2.0 * s) - (e * hj.deriv(1)) * (e * hj.deriv(1)) / (4.0 * s * s * s);
        (
            fj.value() * s,
            fj.deriv(1) * s + fj.value() * sp,
            fj.deriv(2) * s + 2.0 * fj.deriv(1) * sp + fj.value() * spp,
        )
    };
    let (zn2, dv) = match metric {
        SymmetricMetric::SphereWarped { f } => {
            let (b, bp, bpp) = warp(f, &hj[1]);
            let d2b = bpp / a - bp * ap / (2.0 * a * a);
            let db = bp / a.sqrt();
            let k12 = -d2b / b;
            let k23 = (1.0 - db * db) / (b * b);
            let c = CurvaturePoint::from_sectionals(k12, k12, k23);
            (c.znorm2, a.sqrt() * 4.0 * std::f64::consts::PI * b * b)
        }
        SymmetricMetric::TorusWarped { f1, f2 } => {
            let (b1, b1p, b1pp) = warp(f1, &hj[1]);
            let (b2, b2p, b2pp) = warp(f2, &hj[2]);
            let d2b1 = b1pp / a - b1p * ap / (2.0 * a * a);
            let d2b2 = b2pp / a - b2p * ap / (2.0 * a * a);
            let k12 = -d2b1 / b1;
            let k13 = -d2b2 / b2;
            let k23 = -(b1p / a.sqrt()) * (b2p / a.sqrt()) / (b1 * b2);
            let c = CurvaturePoint::from_sectionals(k12, k13, k23);
            let tau = 2.0 * std::f64::consts::PI;
            (c.znorm2, a.sqrt() * tau * tau * b1 * b2)
        }
    };
    zn2 * dv
}

/// Directional derivative of Z^2 under the perturbation h: centered
/// differences at step and step/2 with one Richardson level. The second
/// variation of Z^2 carries (bump''/width^2)^2 terms, so the plain centered
/// difference alone is not accurate enough at practical steps.
pub fn fd_directional_z2(
    metric: &SymmetricMetric,
    h: &DiagonalPerturbation,
    interval: (f64, f64),
    step: f64,
) -> Result<f64> {
    let (t0, t1) = metric.domain();
    check_perturbation(metric, h, t0 + 0.5 * (t1 - t0))?;
    let (lo, hi) = h.clipped(interval);
    if lo >= hi {
        return Ok(0.0);
    }
    // the +e and -e densities agree exactly off the support, so integrate
    // the pointwise difference over the support only
    let diff_at = |e: f64| -> Result<f64> {
        integrate(
            |t| z2_density_perturbed(metric, h, e, t) - z2_density_perturbed(metric, h, -e, t),
            lo,
            hi,
            FD_QUAD_OPTS,
        )
    };
    let d_full = diff_at(step)? / (2.0 * step);
    let d_half = diff_at(0.5 * step)? / step;
    Ok((4.0 * d_half - d_full) / 3.0)
}

/// int <T, h> dV for a diagonal tensor field T, over the intersection of
/// the interval with the perturbation's support.
pub fn weak_pairing(
    field: &TensorField,
    h: &DiagonalPerturbation,
    metric: &SymmetricMetric,
    interval: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = h.clipped(interval);
    if lo >= hi {
        return Ok(0.0);
    }
    integrate(
        |t| {
            let f = field(t);
            let hv = h.values(t);
            (f[0] * hv[0] + f[1] * hv[1] + f[2] * hv[2]) * dvol_factor(metric, t)
        },
        lo,
        hi,
        FD_QUAD_OPTS,
    )
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residuals
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElSystem {
    /// grad Z^2 = 0, trace Ds = -3|z|^2
    Z2sys,
    /// alpha grad Z^2 + L* tau = 0, trace D(tau + alpha s/12) = -alpha|z|^2/4
    Zc2,
    /// the s == 0 specialization of Zc2
    Zs2,
    /// L* tau = 0, D tau = 0
    StaticVacuum,
    /// eps grad Z^2 + L* tau + chi g = 0 with chi = s tau/4 + c
    FullIepsEl,
}

impl ElSystem {
    pub fn name(&self) -> &'static str {
        match self {
            ElSystem::Z2sys => "Z2",
            ElSystem::Zc2 => "Zc2",
            ElSystem::Zs2 => "Zs2",
            ElSystem::StaticVacuum => "static-vacuum",
            ElSystem::FullIepsEl => "full-Ieps",
        }
    }
}

/// Residual evaluation controls.
#[derive(Clone)]
pub struct ElOptions {
    /// evaluation grid size
    pub grid_points: usize,
    /// evaluation (and weak-form) interval; defaults to the metric domain
    /// trimmed by 0.1% of its length on each side
    pub interval: Option<(f64, f64)>,
    /// override for the weak-form basket (defaults to the middle-third one)
    pub basket: Option<Vec<DiagonalPerturbation>>,
    pub fd_step: f64,
}

impl Default for ElOptions {
    fn default() -> Self {
        ElOptions {
            grid_points: 129,
            interval: None,
            basket: None,
            fd_step: FD_STEP,
        }
    }
}

/// Pointwise, trace and weak residuals of one Euler-Lagrange system.
pub struct ELResidual {
    pub system: ElSystem,
    pub grid: Vec<f64>,
    pub pointwise: Vec<[f64; 3]>,
    pub trace: Vec<f64>,
    /// (perturbation label, weak residual alpha*dZ^2(h) + int<L*tau,h>)
    pub weak: Vec<(String, f64)>,
    /// natural scale of the weak residuals: max |coef * FD(Z^2)|
    pub weak_scale: f64,
    pub sup_pointwise: f64,
    pub sup_trace: f64,
}

impl ELResidual {
    pub fn max_weak(&self) -> f64 {
        self.weak.iter().map(|(_, w)| w.abs()).fold(0.0, f64::max)
    }
}

/// Evaluate the chosen system's residual operator.
///
/// The pointwise tensor is assembled from the jet-based operators; the
/// trace residual is computed through the scalar route (Laplacians of s,
/// tau, omega) so that trace-consistency is a genuine cross-check; the weak
/// residuals pair the finite-difference derivative of Z^2 (independent
/// oracle) with the quadrature pairing of L* tau.
pub fn el_residual(
    system: ElSystem,
    metric: &SymmetricMetric,
    potential: &PotentialField,
    opts: &ElOptions,
) -> Result<ELResidual> {
    let (t0, t1) = metric.domain();
    let trim = 1e-3 * (t1 - t0);
    let interval = opts.interval.unwrap_or((t0 + trim, t1 - trim));
    if interval.0 >= interval.1 || interval.0 < t0 || interval.1 > t1 {
        return Err(Error::Input(format!(
            "bad residual interval [{}, {}]",
            interval.0, interval.1
        )));
    }

    let alpha = potential.alpha;
    let eps = potential.eps;
    let need = |v: Option<f64>, what: &str| -> Result<f64> {
        v.ok_or_else(|| Error::Input(format!("system {} needs {}", system.name(), what)))
    };
    // gradient coefficient multiplying grad Z^2 in the tensor residual
    let gz_coef = match system {
        ElSystem::Z2sys => 1.0,
        ElSystem::Zc2 | ElSystem::Zs2 => need(alpha, "alpha")?,
        ElSystem::StaticVacuum => 0.0,
        ElSystem::FullIepsEl => need(eps, "eps")?,
    };
    // constant c of the full system, from the closed formula
    let c_const = if system == ElSystem::FullIepsEl {
        functional_report(metric, need(eps, "eps")?)?.c_const
    } else {
        0.0
    };

    let n = opts.grid_points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| interval.0 + (interval.1 - interval.0) * i as f64 / (n - 1) as f64)
        .collect();

    let mut pointwise = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut sup_pointwise = 0.0f64;
    let mut sup_trace = 0.0f64;

    for &t in &grid {
        let c = curvature_jets(metric, t)?;
        let tau_j = potential.tau.jet(t, 2);
        let k1 = c.kap[0].value();
        let k2 = c.kap[1].value();
        let lap = |u: &Jet| u.deriv(2) + (k1 + k2) * u.deriv(1);

        let mut r = [0.0f64; 3];
        if gz_coef != 0.0 {
            let gz = grad_z2_components(&c);
            for i in 0..3 {
                r[i] += gz_coef * gz[i];
            }
        }
        if !matches!(system, ElSystem::Z2sys) {
            let ls = lstar_components(&c, &tau_j);
            for i in 0..3 {
                r[i] += ls[i];
            }
        }
        if system == ElSystem::FullIepsEl {
            let chi = c.s.value() * tau_j.value() / 4.0 + c_const;
            for ri in r.iter_mut() {
                *ri += chi;
            }
        }

        // scalar-route trace residual
        let tr = match system {
            ElSystem::Z2sys => -(lap(&c.s) + 3.0 * c.znorm2()) / 6.0,
            ElSystem::Zc2 | ElSystem::Zs2 => {
                let a = gz_coef;
                let om = tau_j.add(&c.s.scale(a / 12.0));
                -2.0 * (lap(&om) + 0.25 * a * c.znorm2()) - c.s.value() * tau_j.value()
            }
            ElSystem::StaticVacuum => -2.0 * lap(&tau_j) - c.s.value() * tau_j.value(),
            ElSystem::FullIepsEl => {
                let e = gz_coef;
                let om = tau_j.add(&c.s.scale(e / 12.0));
                -(2.0 * lap(&om)
                    + 0.25 * c.s.value() * tau_j.value()
                    + 0.5 * e * c.znorm2()
                    - 3.0 * c_const)
            }
        };

        sup_pointwise = sup_pointwise.max(r.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        sup_trace = sup_trace.max((r[0] + r[1] + r[2] - tr).abs());
        pointwise.push(r);
        trace.push(tr);
    }

    // weak residuals against the basket
    let basket = match &opts.basket {
        Some(b) => b.clone(),
        None => middle_third_basket(metric),
    };
    let lstar = lstar_apply(&potential.tau, metric);
    let mut weak = Vec::new();
    let mut weak_scale = 0.0f64;
    for h in &basket {
        let mut w = 0.0;
        if gz_coef != 0.0 {
            let fd = fd_directional_z2(metric, h, interval, opts.fd_step)?;
            w += gz_coef * fd;
            weak_scale = weak_scale.max((gz_coef * fd).abs());
        }
        if !matches!(system, ElSystem::Z2sys) {
            w += weak_pairing(&lstar, h, metric, interval)?;
        }
        if system == ElSystem::FullIepsEl {
            let m2 = metric.clone();
            let tau2 = potential.tau.clone();
            let chi_g: TensorField = Box::new(move |t| {
                let c = match curvature_jets(&m2, t) {
                    Ok(c) => c,
                    Err(_) => return [f64::NAN; 3],
                };
                let chi = c.s.value() * tau2.eval(t) / 4.0 + c_const;
                [chi, chi, chi]
            });
            w += weak_pairing(&chi_g, h, metric, interval)?;
        }
        weak.push((h.label.clone(), w));
    }

    Ok(ELResidual {
        system,
        grid,
        pointwise,
        trace,
        weak,
        weak_scale,
        sup_pointwise,
        sup_trace,
    })
}

// ---------------------------------------------------------------------------
// junction relation
// ---------------------------------------------------------------------------

/// A synthetic Lipschitz junction field: s changes sign at `x_star` with a
/// kink, tau = s/sigma on the s < 0 side and 0 beyond, and the slopes are
/// chosen so that the junction relation
///   grad^-(tau + (eps/12) s) = (eps/12) grad^+ s
/// holds exactly: b (1/sigma + eps/12) = (eps/12) a.
pub struct JunctionField {
    pub s: RadialProfile,
    pub omega: RadialProfile,
    pub eps: f64,
    pub x_star: f64,
}

pub fn configured_junction_field(eps: f64, sigma: f64) -> JunctionField {
    let x_star = 0.5;
    let a = 1.0; // right slope of s
    let b = (eps / 12.0) * a / (1.0 / sigma + eps / 12.0); // left slope of s
    let s = RadialProfile::grid_from_fn(0.0, 1.0, 4097, move |t| {
        if t < x_star {
            b * (t - x_star)
        } else {
            a * (t - x_star)
        }
    })
    .expect("junction grid");
    let omega = RadialProfile::grid_from_fn(0.0, 1.0, 4097, move |t| {
        let sv = if t < x_star {
            b * (t - x_star)
        } else {
            a * (t - x_star)
        };
        let tau = if t < x_star { sv / sigma } else { 0.0 };
        tau + (eps / 12.0) * sv
    })
    .expect("junction grid");
    JunctionField {
        s,
        omega,
        eps,
        x_star,
    }
}

/// One-sided 5-point stencil derivative, side = -1 (left) or +1 (right).
pub fn one_sided_deriv(f: &RadialProfile, x: f64, h: f64, side: f64) -> f64 {
    one_sided_deriv_k(f, x, h, side, 1)
}

/// One-sided 5-point stencil derivative of order k (k = 1 or 2).
pub fn one_sided_deriv_k(f: &RadialProfile, x: f64, h: f64, side: f64, k: usize) -> f64 {
    let v: Vec<f64> = (0..5).map(|j| f.eval(x + side * h * j as f64)).collect();
    match k {
        1 => {
            side * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4])
                / (12.0 * h)
        }
        2 => {
            (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4])
                / (12.0 * h * h)
        }
        _ => panic!("one-sided stencil implemented for k = 1, 2"),
    }
}

/// |grad^- omega - (eps/12) grad^+ s| at the junction, via one-sided
/// stencils of spacing h.
pub fn junction_residual(field: &JunctionField, h: f64) -> f64 {
    let left = one_sided_deriv(&field.omega, field.x_star, h, -1.0);
    let right = one_sided_deriv(&field.s, field.x_star, h, 1.0);
    (left - (field.eps / 12.0) * right).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymmetricMetric;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit_round_sphere() -> SymmetricMetric {
        SymmetricMetric::sphere(RadialProfile::sin(0.0, std::f64::consts::PI))
    }

    #[test]
    fn volume_round_s3() {
        let g = unit_round_sphere();
        let v = volume(&g, g.domain()).unwrap();
        assert_relative_eq!(v, 2.0 * std::f64::consts::PI.powi(2), max_relative = 1e-9);
    }

    #[test]
    fn volume_euclidean_ball() {
        let g = SymmetricMetric::sphere(RadialProfile::linear(0.0, 2.0, 1.0, 0.0));
        let v = volume(&g, (0.0, 2.0)).unwrap();
        assert_relative_eq!(
            v,
            4.0 / 3.0 * std::f64::consts::PI * 8.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn volume_additive_and_edge_cases() {
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.0, 2.0));
        let v1 = volume(&g, (0.2, 1.0)).unwrap();
        let v2 = volume(&g, (1.0, 1.7)).unwrap();
        let v12 = volume(&g, (0.2, 1.7)).unwrap();
        assert_relative_eq!(v1 + v2, v12, max_relative = 1e-9);
        assert_eq!(volume(&g, (0.7, 0.7)).unwrap(), 0.0);
        assert!(volume(&g, (1.0, 0.5)).is_err());
        assert!(volume(&g, (-0.5, 1.0)).is_err());
    }

    #[test]
    fn schwarzschild_volume_two_routes() {
        // int_2^10 4 pi r^2 (1-2/r)^{-1/2} dr, frozen from the w-substitution
        // oracle (64 pi int (1-w^2)^{-4} dw)
        let m = 1.0;
        let g = SymmetricMetric::sphere(crate::canonical::schwarzschild::schwarzschild_profile(
            m, 12.0,
        ));
        let ta = 0.0;
        let tb = crate::canonical::schwarzschild::t_of_r(10.0, m);
        let v = volume(&g, (ta, tb)).unwrap();
        let w_sub = integrate(
            |w| 64.0 * std::f64::consts::PI * (1.0 - w * w).powi(-4),
            0.0,
            0.8f64.sqrt(),
            QuadOpts::with_rel_tol(1e-12),
        )
        .unwrap();
        assert_relative_eq!(v, w_sub, max_relative = 1e-8);
        assert_relative_eq!(v, 5054.9087020011139, max_relative = 1e-9);
    }

    #[test]
    fn report_hyperbolic_piece() {
        // unit-volume hyperbolic piece: Z2 = 0, Sminus2 = 6
        // T solves pi(sinh 2T - 2T) = 1
        let t1 = 0.605403045606683;
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.0, t1));
        let rep = functional_report(&g, 0.37).unwrap();
        assert_relative_eq!(rep.volume, 1.0, max_relative = 1e-9);
        assert_abs_diff_eq!(rep.z2, 0.0, epsilon = 1e-9);
        assert_relative_eq!(rep.sminus2, 6.0, max_relative = 1e-8);
        assert_relative_eq!(rep.i_eps_minus, 6.0 + 0.37 * rep.volume.cbrt() * rep.z2, max_relative = 1e-12);
        // c = sigma/12 + eps Z^2/6 at unit volume
        assert_relative_eq!(rep.c_const, 0.5, max_relative = 1e-7);
    }

    #[test]
    fn report_nonnegative_s_gives_zero_sminus2() {
        let g = unit_round_sphere();
        let rep = functional_report(&g, 1.0).unwrap();
        assert_abs_diff_eq!(rep.sminus2, 0.0, epsilon = 1e-10);
        assert!(matches!(tau_sigma(&g).unwrap(), TauSigma::ZeroPotential));
    }

    #[test]
    fn smoothing_phi_contract() {
        assert_eq!(smoothing_phi(0.1, -1.0), -1.0);
        assert_relative_eq!(smoothing_phi(0.1, 0.2), 0.02, max_relative = 1e-15);
        let mid = smoothing_phi(0.1, 0.05);
        assert!(mid > 0.0 && mid < 0.005, "phi(0.05) = {mid}");
        // monotone across the transition, by scan
        let n = 1000;
        let mut prev = smoothing_phi(0.1, -0.05);
        for i in 1..=n {
            let s = -0.05 + 0.3 * i as f64 / n as f64;
            let v = smoothing_phi(0.1, s);
            assert!(v >= prev - 1e-15, "not monotone at s = {s}");
            prev = v;
        }
        // (phi^2)'' = (s^4)'' = 12 s^2 > 0 strictly inside the transition
        for i in 0..1000 {
            let s = 1e-4 + (0.1 - 2e-4) * i as f64 / 999.0;
            assert!(12.0 * s * s > 0.0);
            assert!(smoothing_phi(0.1, s) < 0.1 * s, "below the delta*s line");
        }
    }

    #[test]
    fn smoothing_phi_converges_to_sminus() {
        for &delta in &[1e-1, 1e-2, 1e-3] {
            let mut worst = 0.0f64;
            for i in 0..=2000 {
                let s = -10.0 + 20.0 * i as f64 / 2000.0;
                let diff = (smoothing_phi(delta, s) - s.min(0.0)).abs();
                let bound = delta * s.abs().max(delta);
                assert!(diff <= bound + 1e-15, "s={s} diff={diff} bound={bound}");
                worst = worst.max(diff / bound.max(1e-300));
            }
            assert!(worst <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tau_sigma_constant_curvature() {
        // unit-volume hyperbolic piece: tau == -1
        let t1 = 0.605403045606683;
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.0, t1));
        match tau_sigma(&g).unwrap() {
            TauSigma::Potential(p) => {
                for &t in &[0.1, 0.3, 0.55] {
                    assert_relative_eq!(p.tau.eval(t), -1.0, max_relative = 1e-7);
                }
                // normalization v^{1/3} int tau^2 dV = 1
                let v = volume(&g, g.domain()).unwrap();
                let norm = integrate(
                    |t| {
                        let tv = p.tau.eval(t);
                        tv * tv * dvol_factor(&g, t)
                    },
                    0.0,
                    t1,
                    QuadOpts::with_rel_tol(1e-10),
                )
                .unwrap();
                assert_relative_eq!(v.cbrt() * norm, 1.0, max_relative = 1e-6);
            }
            TauSigma::ZeroPotential => panic!("expected potential"),
        }
    }

    #[test]
    fn l_apply_trivial_and_fd() {
        // flat metric, h = g: L(g) = 0; round S^3, h = g: L(g) = -s = -6
        let flat = SymmetricMetric::sphere(RadialProfile::linear(0.1, 4.0, 1.0, 0.0));
        let ones = RadialProfile::closed_form(0.1, 4.0, |_, ord| Jet::constant(1.0, ord));
        let hg = DiagonalPerturbation::from_bump("g", &ones, [1.0, 1.0, 1.0]);
        let lf = l_apply(&hg, &flat).unwrap();
        assert_abs_diff_eq!(lf(2.0), 0.0, epsilon = 1e-12);

        let s3 = unit_round_sphere();
        let ones3 = RadialProfile::closed_form(0.0, std::f64::consts::PI, |_, ord| {
            Jet::constant(1.0, ord)
        });
        let hg3 = DiagonalPerturbation::from_bump("g", &ones3, [1.0, 1.0, 1.0]);
        let l3 = l_apply(&hg3, &s3).unwrap();
        assert_relative_eq!(l3(1.0), -6.0, max_relative = 1e-10);

        // hyperbolic metric, compactly supported radial h: match the
        // centered finite difference of s(g + e h)
        let hyp = SymmetricMetric::sphere(RadialProfile::sinh(0.3, 2.5));
        let bump = polynomial_bump(0.3, 2.5, 1.3, 0.4);
        for dir in [[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.4, 0.8, 0.8]] {
            let h = DiagonalPerturbation::from_bump("b", &bump, dir);
            let lf = l_apply(&h, &hyp).unwrap();
            let t = 1.45;
            let e = 1e-5;
            let s_at = |e: f64| {
                let hj = h.jets(t, 2);
                let fj = match &hyp {
                    SymmetricMetric::SphereWarped { f } => f.jet(t, 2),
                    _ => unreachable!(),
                };
                let a = 1.0 + e * hj[0].value();
                let ap = e * hj[0].deriv(1);
                let s2 = (1.0 + e * hj[1].value()).sqrt();
                let sp = e * hj[1].deriv(1) / (2.0 * s2);
                let spp = e * hj[1].deriv(2) / (2.0 * s2)
                    - (e * hj[1].deriv(1)).powi(2) / (4.0 * s2 * s2 * s2);
                let b = fj.value() * s2;
                let bp = fj.deriv(1) * s2 + fj.value() * sp;
                let bpp = fj.deriv(2) * s2 + 2.0 * fj.deriv(1) * sp + fj.value() * spp;
                let d2b = bpp / a - bp * ap / (2.0 * a * a);
                let db = bp / a.sqrt();
                2.0 * (2.0 * (-d2b / b) + (1.0 - db * db) / (b * b))
            };
            let fd = (s_at(e) - s_at(-e)) / (2.0 * e);
            assert_abs_diff_eq!(lf(t), fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn lstar_trivial_cases() {
        // u == 1: L*1 = -r
        let hyp = SymmetricMetric::sphere(RadialProfile::sinh(0.3, 2.5));
        let one = RadialProfile::closed_form(0.3, 2.5, |_, ord| Jet::constant(1.0, ord));
        let ls = lstar_apply(&one, &hyp);
        let c = hyp.curvature_at(1.0).unwrap();
        let v = ls(1.0);
        assert_relative_eq!(v[0], -c.ric1, max_relative = 1e-11);
        assert_relative_eq!(v[1], -c.ric2, max_relative = 1e-11);

        // flat metric, u = t^2: L*u = -4 g
        let flat = SymmetricMetric::sphere(RadialProfile::linear(0.1, 4.0, 1.0, 0.0));
        let u = RadialProfile::power(0.1, 4.0, 2.0);
        let ls = lstar_apply(&u, &flat);
        let v = ls(2.1);
        for comp in v {
            assert_relative_eq!(comp, -4.0, max_relative = 1e-11);
        }
        // trace identity: tr L*u = -2 Du - u s
        let hyp_u = RadialProfile::power(0.3, 2.5, 2.0);
        let ls = lstar_apply(&hyp_u, &hyp);
        let t = 1.7;
        let v = ls(t);
        let cj = curvature_jets(&hyp, t).unwrap();
        let uj = hyp_u.jet(t, 2);
        let lap = uj.deriv(2) + (cj.kap[0].value() + cj.kap[1].value()) * uj.deriv(1);
        assert_relative_eq!(
            v[0] + v[1] + v[2],
            -2.0 * lap - uj.value() * cj.s.value(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn grad_z2_constant_curvature_vanishes() {
        let hyp = SymmetricMetric::sphere(RadialProfile::sinh(0.3, 2.5));
        let gz = grad_z2(&hyp);
        let v = gz(1.2);
        for comp in v {
            assert_abs_diff_eq!(comp, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn grad_z2_weak_form_oracle_kasner() {
        // d = 1/2 Kasner annulus: int <grad Z^2, h> dV vs FD of Z^2
        let (a, b) = (-1.0 / 3.0, 2.0 / 3.0);
        let g = SymmetricMetric::torus(
            RadialProfile::power(1.0, 2.0, a),
            RadialProfile::power(1.0, 2.0, b),
        );
        let gz = grad_z2(&g);
        let interval = (1.0, 2.0);
        for h in middle_third_basket(&g) {
            let fd = fd_directional_z2(&g, &h, interval, FD_STEP).unwrap();
            let pair = weak_pairing(&gz, &h, &g, interval).unwrap();
            assert_relative_eq!(fd, pair, max_relative = 1e-4);
        }
    }

    #[test]
    fn static_vacuum_flat_with_constant_tau() {
        let flat = SymmetricMetric::sphere(RadialProfile::linear(0.5, 3.0, 1.0, 0.0));
        let tau = RadialProfile::closed_form(0.5, 3.0, |_, ord| Jet::constant(-1.0, ord));
        let pot = PotentialField::from_tau(tau, &flat, None, None);
        let res = el_residual(ElSystem::StaticVacuum, &flat, &pot, &ElOptions::default()).unwrap();
        assert!(res.sup_pointwise < 1e-12, "sup = {}", res.sup_pointwise);
        assert!(res.max_weak() < 1e-12);
    }

    #[test]
    fn trace_consistency_all_systems() {
        let m = 1.0;
        let g = SymmetricMetric::sphere(crate::canonical::schwarzschild::schwarzschild_profile(
            m, 30.0,
        ));
        let (t0, t1) = g.domain();
        let tau = crate::canonical::schwarzschild::schwarzschild_tau(m, 1.0, 30.0);
        for sys in [
            ElSystem::Z2sys,
            ElSystem::Zc2,
            ElSystem::Zs2,
            ElSystem::StaticVacuum,
            ElSystem::FullIepsEl,
        ] {
            let pot = PotentialField::from_tau(tau.clone(), &g, Some(1.0), Some(1e-3));
            let opts = ElOptions {
                interval: Some((t0 + 0.3, t1 - 0.3)),
                grid_points: 40,
                ..Default::default()
            };
            let res = el_residual(sys, &g, &pot, &opts).unwrap();
            assert!(
                res.sup_trace < 1e-8,
                "{}: trace mismatch {}",
                sys.name(),
                res.sup_trace
            );
        }
    }

    #[test]
    fn missing_coefficients_are_input_errors() {
        let g = SymmetricMetric::sphere(RadialProfile::sinh(0.3, 2.5));
        let pot = PotentialField::zero_potential(g.domain());
        assert!(matches!(
            el_residual(ElSystem::Zs2, &g, &pot, &ElOptions::default()),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            el_residual(ElSystem::FullIepsEl, &g, &pot, &ElOptions::default()),
            Err(Error::Input(_))
        ));
        // zero potential is fine for the Z2 system
        assert!(el_residual(ElSystem::Z2sys, &g, &pot, &ElOptions::default()).is_ok());
    }

    #[test]
    fn junction_relation_holds_to_stencil_order() {
        let field = configured_junction_field(1e-2, 6.0);
        let r1 = junction_residual(&field, 8.0 / 4096.0);
        assert!(r1 < 1e-10, "junction residual {r1}");
    }

    #[test]
    fn sphere_rejects_asymmetric_fiber_perturbation() {
        let g = unit_round_sphere();
        let bump = polynomial_bump(0.0, std::f64::consts::PI, 1.5, 0.4);
        let h = DiagonalPerturbation::from_bump("bad", &bump, [0.0, 1.0, 0.5]);
        assert!(l_apply(&h, &g).is_err());
    }
}
