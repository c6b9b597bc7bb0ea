//! The Kasner family g = dt^2 + t^{2a} dth1^2 + t^{2b} dth2^2: the only
//! non-flat static vacuum solutions with a free torus action, and the
//! family refuted as Zs2 solutions.
//!
//! Exponent parameterization (quotient reading, forced by a+b in (0,1) and
//! |a| = d b):
//!   a = (d-1)/(d + 1/d - 1),  b = (1/d - 1)/(d + 1/d - 1),  c = 1-(a+b).
//! The oracle-backed Ricci eigenvalues in the (radial, th1, th2) frame are
//! (ab, ac, bc)/t^2; the printed lambda annotations are kept only in the
//! audit, under both sign conventions and both readings of the ambiguous
//! parenthesization.

use crate::error::{Error, Result};
use crate::functionals::{
    el_residual, fd_directional_z2, lstar_apply, middle_third_basket, volume, weak_pairing,
    ElOptions, ELResidual, ElSystem, PotentialField,
};
use crate::geometry::SymmetricMetric;
use crate::jet::jet_pow;
use crate::profile::RadialProfile;

/// Kasner exponents (a, b, c_exp) for d in (0, 1).
pub fn kasner_exponents(d: f64) -> Result<(f64, f64, f64)> {
    if !(0.0 < d && d < 1.0) {
        return Err(Error::Input(format!("kasner parameter d = {d} outside (0,1)")));
    }
    let den = d + 1.0 / d - 1.0;
    let a = (d - 1.0) / den;
    let b = (1.0 / d - 1.0) / den;
    let c = 1.0 - (a + b);
    Ok((a, b, c))
}

/// The Kasner torus-warped metric on an annulus [t_min, t_max].
pub fn kasner_metric(d: f64, t_min: f64, t_max: f64) -> Result<SymmetricMetric> {
    let (a, b, _) = kasner_exponents(d)?;
    Ok(SymmetricMetric::torus(
        RadialProfile::power(t_min, t_max, a),
        RadialProfile::power(t_min, t_max, b),
    ))
}

/// Ricci data of the Kasner metric at t = 1.
pub struct KasnerRicci {
    /// eigenvalues (ab, ac, bc) in the geometry convention, at t = 1
    pub eigen: [f64; 3],
    /// lambda^2 = (ab)^2 + (ac)^2 + (bc)^2
    pub lambda_sq: f64,
    /// printed annotations lambda = (ab, a(a-1)+ab, b(b-1)+ab)
    pub printed: [f64; 3],
    /// global sign relating r_i = -lambda_i/t^2 to the geometry convention
    /// (after repairing the printed lambda_1): always -1 here, recorded
    /// rather than silently absorbed
    pub sign_flag: i32,
}

pub fn kasner_ricci(d: f64) -> Result<KasnerRicci> {
    let (a, b, c) = kasner_exponents(d)?;
    let eigen = [a * b, a * c, b * c];
    Ok(KasnerRicci {
        eigen,
        lambda_sq: eigen.iter().map(|x| x * x).sum(),
        printed: [a * b, a * (a - 1.0) + a * b, b * (b - 1.0) + a * b],
        sign_flag: -1,
    })
}

/// The trace-equation potential u of the printed family with coefficients
/// (c1, c2): u = lambda^2/(8(3-(a+b))) t^{-2} + c1 t^{1-(a+b)} + c2.
pub fn u_b5_profile(d: f64, c1: f64, c2: f64, t_min: f64, t_max: f64) -> Result<RadialProfile> {
    let (a, b, _) = kasner_exponents(d)?;
    let lam2 = kasner_ricci(d)?.lambda_sq;
    let a0 = lam2 / (8.0 * (3.0 - (a + b)));
    let harmonic_exp = 1.0 - (a + b);
    Ok(RadialProfile::closed_form(t_min, t_max, move |t, ord| {
        let mut j = jet_pow(t, -2.0, ord).scale(a0);
        if c1 != 0.0 {
            j = j.add(&jet_pow(t, harmonic_exp, ord).scale(c1));
        }
        if c2 != 0.0 {
            j = j.add(&crate::jet::Jet::constant(c2, ord));
        }
        j
    }))
}

/// Static-vacuum positive control: residual of (g_d, u = t^{c}) on the
/// annulus t in [1, 2].
pub fn kasner_static_check(d: f64) -> Result<ELResidual> {
    let (_, _, c) = kasner_exponents(d)?;
    let g = kasner_metric(d, 1.0, 2.0)?;
    // L* is linear, so the sign convention tau = -u is immaterial for the
    // residual magnitude; keep tau <= 0
    let tau = RadialProfile::power(1.0, 2.0, c);
    let neg_tau = RadialProfile::closed_form(1.0, 2.0, move |t, ord| tau.jet(t, ord).scale(-1.0));
    let pot = PotentialField::from_tau(neg_tau, &g, None, None);
    el_residual(ElSystem::StaticVacuum, &g, &pot, &ElOptions::default())
}

/// One row of the refutation scan.
#[derive(Clone, Copy, Debug)]
pub struct RefutationRow {
    pub d: f64,
    /// max over the basket of |FD(Z^2; h) - int <L* u, h> dV| / vol
    pub margin: f64,
    pub lambda_sq: f64,
    /// margin / lambda^2, the quantity gated at 1e-3
    pub ratio: f64,
    /// sup of the trace residual D u - |z|^2/4 over the annulus grid
    pub trace_sup: f64,
}

/// Weak-form Zs2 refutation over a d-grid: with (c1, c2) = (0, 0) forced by
/// the decay of the printed identity's left side, the residual of
/// grad Z^2 = L* u is bounded below by a positive margin for every d.
/// A vanishing margin would be a finding, not an error.
pub fn kasner_zs2_refutation(d_grid: &[f64]) -> Result<Vec<RefutationRow>> {
    d_grid.iter().map(|&d| refutation_row(d)).collect()
}

fn refutation_row(d: f64) -> Result<RefutationRow> {
    let (t_min, t_max) = (1.0, 2.0);
    let g = kasner_metric(d, t_min, t_max)?;
    let u = u_b5_profile(d, 0.0, 0.0, t_min, t_max)?;
    let lam2 = kasner_ricci(d)?.lambda_sq;
    let vol = volume(&g, (t_min, t_max))?;

    // alpha = 1, tau = -u: weak residual FD(Z^2; h) - int <L* u, h> dV
    let neg_u = {
        let u = u.clone();
        RadialProfile::closed_form(t_min, t_max, move |t, ord| u.jet(t, ord).scale(-1.0))
    };
    let lstar_tau = lstar_apply(&neg_u, &g);
    let mut margin = 0.0f64;
    for h in middle_third_basket(&g) {
        let fd = fd_directional_z2(&g, &h, (t_min, t_max), crate::functionals::FD_STEP)?;
        let pair = weak_pairing(&lstar_tau, &h, &g, (t_min, t_max))?;
        margin = margin.max((fd + pair).abs());
    }
    margin /= vol;

    // trace equation D u = |z|^2/4 holds by construction; verify
    let mut trace_sup = 0.0f64;
    let (a, b, _) = kasner_exponents(d)?;
    for i in 0..64 {
        let t = t_min + (t_max - t_min) * i as f64 / 63.0;
        let uj = u.jet(t, 2);
        let lap = uj.deriv(2) + (a + b) / t * uj.deriv(1);
        trace_sup = trace_sup.max((lap - lam2 / (4.0 * t.powi(4))).abs());
    }

    Ok(RefutationRow {
        d,
        margin,
        lambda_sq: lam2,
        ratio: margin / lam2,
        trace_sup,
    })
}

/// Audit of the printed identities: both sides of the (B.8)-style identity
/// under both lambda sign conventions and both parenthesization readings,
/// and both sides of the final inequality. No pass/fail assertion; the
/// refutation authority is the numeric residual in
/// [`kasner_zs2_refutation`].
#[derive(Clone, Copy, Debug)]
pub struct AuditRow {
    pub d: f64,
    /// lhs of (B.8) under [printed lambda1 = ab, repaired lambda1 = -ab]
    pub lhs_b8: [f64; 2],
    /// rhs of (B.8) under [reading 3/(d^2-d+1), reading 3/(d^2-d) + 1],
    /// printed-lambda normalization of lambda^2
    pub rhs_b8: [f64; 2],
    pub lhs_b9: f64,
    pub rhs_b9: f64,
    /// lhs < rhs (the inequality the refutation narrative needs to fail)
    pub b9_strictly_below: bool,
}

pub fn b8_b9_audit(d: f64) -> Result<AuditRow> {
    let (a, b, _) = kasner_exponents(d)?;
    let l2p = a * (a - 1.0) + a * b;
    let l3p = b * (b - 1.0) + a * b;
    let lhs8_of = |l1: f64| {
        2.0 * (a * a * (l2p - l1) * (l2p - l1) + b * b * (l3p - l1) * (l3p - l1))
    };
    let lhs_b8 = [lhs8_of(a * b), lhs8_of(-a * b)];
    let lam2_printed = (a * b) * (a * b) + l2p * l2p + l3p * l3p;
    let coef_read0 = 2.0 * d * d + 3.0 / (d * d - d + 1.0);
    let coef_read1 = 2.0 * d * d + 3.0 / (d * d - d) + 1.0;
    let rhs_b8 = [
        coef_read0 * lam2_printed * b * b,
        coef_read1 * lam2_printed * b * b,
    ];
    let (l1, l2, l3) = (a * b, l2p, l3p);
    let lhs_b9 = -6.0 + 2.0 * b * (1.0 - d) + b * b * coef_read0;
    let rhs_b9 = (1.0 / (8.0 * (3.0 - (a + b))))
        * (-lam2_printed + 6.0 * l1 - 2.0 * a * l2 - 2.0 * b * l3);
    Ok(AuditRow {
        d,
        lhs_b8,
        rhs_b8,
        lhs_b9,
        rhs_b9,
        b9_strictly_below: lhs_b9 < rhs_b9,
    })
}

/// Bundle of the per-d Kasner data.
pub struct KasnerSolution {
    pub d: f64,
    pub a: f64,
    pub b: f64,
    pub c_exp: f64,
    pub metric: SymmetricMetric,
    pub ricci: KasnerRicci,
    pub u_b5: RadialProfile,
}

impl KasnerSolution {
    pub fn new(d: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let (a, b, c_exp) = kasner_exponents(d)?;
        Ok(KasnerSolution {
            d,
            a,
            b,
            c_exp,
            metric: kasner_metric(d, t_min, t_max)?,
            ricci: kasner_ricci(d)?,
            u_b5: u_b5_profile(d, 0.0, 0.0, t_min, t_max)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn exponents_d_half_and_third() {
        let (a, b, c) = kasner_exponents(0.5).unwrap();
        assert_relative_eq!(a, -1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(b, 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(c, 2.0 / 3.0, max_relative = 1e-14);
        let (a, b, c) = kasner_exponents(1.0 / 3.0).unwrap();
        assert_relative_eq!(a, -2.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(b, 6.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(c, 3.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(a * a + b * b + c * c, 1.0, max_relative = 1e-14);
        assert!(kasner_exponents(0.0).is_err());
        assert!(kasner_exponents(1.0).is_err());
    }

    #[test]
    fn exponents_flat_limit() {
        let (a, b, _) = kasner_exponents(1.0 - 1e-9).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn exponent_invariants_over_grid() {
        for i in 1..=99 {
            let d = i as f64 / 100.0;
            let (a, b, c) = kasner_exponents(d).unwrap();
            assert!(a < 0.0 && b > 0.0);
            assert!(a + b > 0.0 && a + b < 1.0);
            assert_relative_eq!(-a, d * b, max_relative = 1e-12);
            assert_relative_eq!(a * a + b * b + c * c, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn ricci_matches_curvature_oracle() {
        // two independent code paths: exponent algebra vs the value-only
        // stencil oracle on the torus metric
        let d = 0.5;
        let kr = kasner_ricci(d).unwrap();
        assert_relative_eq!(kr.eigen[0], -2.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(kr.eigen[1], -2.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(kr.eigen[2], 4.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(kr.lambda_sq, 24.0 / 81.0, max_relative = 1e-14);
        let g = kasner_metric(d, 0.5, 2.0).unwrap();
        let c = g.curvature_oracle(1.0, 1e-3).unwrap();
        assert_relative_eq!(c.ric1, kr.eigen[0], max_relative = 1e-6);
        assert_relative_eq!(c.ric2, kr.eigen[1], max_relative = 1e-6);
        assert_relative_eq!(c.ric3, kr.eigen[2], max_relative = 1e-6);
        assert_abs_diff_eq!(c.ric1 + c.ric2 + c.ric3, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.s, 0.0, epsilon = 1e-8);
        // printed lambda_1 = ab breaks the sum rule; the repair restores it
        let printed_sum: f64 = kr.printed.iter().sum();
        assert!(printed_sum.abs() > 0.1);
        let repaired_sum = -kr.eigen[0] - kr.eigen[1] - kr.eigen[2];
        assert_abs_diff_eq!(repaired_sum, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn static_vacuum_identity_via_hessian() {
        // r = D^2 u / u with u = t^c gives the same eigenvalue triple
        let d = 0.5;
        let (a, b, c) = kasner_exponents(d).unwrap();
        let t: f64 = 1.0;
        let u = t.powf(c);
        let d2u = [
            c * (c - 1.0) * t.powf(c - 2.0),
            (a / t) * c * t.powf(c - 1.0),
            (b / t) * c * t.powf(c - 1.0),
        ];
        let kr = kasner_ricci(d).unwrap();
        for i in 0..3 {
            assert_relative_eq!(d2u[i] / u, kr.eigen[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn static_positive_and_negative_controls() {
        for &d in &[0.5, 0.9] {
            let res = kasner_static_check(d).unwrap();
            assert!(res.sup_pointwise < 1e-7, "d={d}: sup {}", res.sup_pointwise);
        }
        // u = t^{c+0.1} must fail by a visible margin
        let d = 0.5;
        let (_, _, c) = kasner_exponents(d).unwrap();
        let g = kasner_metric(d, 1.0, 2.0).unwrap();
        let bad = RadialProfile::closed_form(1.0, 2.0, move |t, ord| {
            jet_pow(t, c + 0.1, ord).scale(-1.0)
        });
        let pot = PotentialField::from_tau(bad, &g, None, None);
        let res = el_residual(ElSystem::StaticVacuum, &g, &pot, &ElOptions::default()).unwrap();
        assert!(res.sup_pointwise > 1e-3, "sup {}", res.sup_pointwise);
    }

    #[test]
    fn refutation_margins_positive() {
        let rows = kasner_zs2_refutation(&[0.05, 0.3, 0.5, 0.7, 0.95]).unwrap();
        for r in &rows {
            assert!(
                r.ratio > 1e-3,
                "d={}: margin ratio {} too small",
                r.d,
                r.ratio
            );
            assert!(r.trace_sup < 1e-8, "trace of the constructed u must hold");
        }
        // absolute margins shrink toward the flat endpoints
        assert!(rows[0].margin < rows[2].margin);
        assert!(rows[4].margin < rows[2].margin);
    }

    #[test]
    fn audit_rows_and_b9_scan() {
        // spot values at d = 1/2, frozen from direct arithmetic
        let row = b8_b9_audit(0.5).unwrap();
        assert_relative_eq!(row.lhs_b8[0], 64.0 / 729.0, max_relative = 1e-12);
        assert_relative_eq!(row.rhs_b8[0], 4.5 * 32.0 / 243.0, max_relative = 1e-12);
        assert_relative_eq!(row.lhs_b9, -10.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(row.rhs_b9, -1.0 / 24.0, max_relative = 1e-12);
        // the printed identity does not close under any convention pairing
        for lhs in row.lhs_b8 {
            for rhs in row.rhs_b8 {
                assert!((lhs - rhs).abs() > 1e-3);
            }
        }
        // lhs < rhs everywhere on (0, 1)
        for i in 1..=99 {
            let row = b8_b9_audit(i as f64 / 100.0).unwrap();
            assert!(row.b9_strictly_below, "B9 scan fails at d = {}", row.d);
        }
    }
}
