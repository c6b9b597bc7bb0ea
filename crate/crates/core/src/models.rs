//! Model-metric families: constant-scalar-curvature ODE caps glued to
//! constant-curvature bulk, and the (eps, delta) scan that extracts the
//! scaling laws of the glued family.
//!
//! Cap ODEs in first-integral form, with c = delta + delta^3 resp. delta:
//!   hyperbolic:    f'^2 = 1 + f^2 - c/f       (s == -6 along the cap)
//!   schwarzschild: f'^2 = 1 - c/f             (s == 0, mass delta/2)
//! Both degenerate at the start f(0) = delta, f'(0) = 0; the equivalent
//! second-order form f'' = k0 f + c/(2 f^2) is regular there and is what
//! gets integrated, after a short Taylor start.

use crate::error::{Error, Result};
use crate::functionals::{volume, z2_functional};
use crate::geometry::SymmetricMetric;
use crate::jet::Jet;
use crate::ode::{solve, DenseSolution, OdeOpts};
use crate::profile::{ProfileImpl, ProfileSource, RadialProfile};
use crate::quad::{integrate, QuadOpts};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapKind {
    Hyperbolic,
    Schwarzschild,
}

impl CapKind {
    /// (k0, c): f'' = k0 f + c/(2 f^2)
    fn ode_params(&self, delta: f64) -> (f64, f64) {
        match self {
            CapKind::Hyperbolic => (1.0, delta + delta.powi(3)),
            CapKind::Schwarzschild => (0.0, delta),
        }
    }

    /// rhs of the first integral f'^2 = rhs(f)
    pub fn first_integral_rhs(&self, delta: f64, f: f64) -> f64 {
        let (k0, c) = self.ode_params(delta);
        1.0 + k0 * f * f - c / f
    }
}

struct CapProfile {
    k0: f64,
    c: f64,
    delta: f64,
    t_series: f64,
    f2: f64,
    f4: f64,
    sol: DenseSolution,
    t_end: f64,
}

impl CapProfile {
    fn lift(&self, f: f64, fp: f64, ord: usize) -> Jet {
        let mut d = [0.0; 5];
        d[0] = f;
        d[1] = fp;
        // algebraic derivatives from the ODE
        let fpp = self.k0 * f + self.c / (2.0 * f * f);
        let g = self.k0 - self.c / (f * f * f);
        d[2] = fpp;
        d[3] = g * fp;
        d[4] = g * fpp + 3.0 * self.c * fp * fp / (f * f * f * f);
        Jet::from_derivs(&d[..=ord])
    }

    fn series_eval(&self, t: f64) -> (f64, f64) {
        let t2 = t * t;
        (
            self.delta + self.f2 / 2.0 * t2 + self.f4 / 24.0 * t2 * t2,
            self.f2 * t + self.f4 / 6.0 * t2 * t,
        )
    }
}

impl ProfileImpl for CapProfile {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.t_end)
    }

    fn jet(&self, t: f64, ord: usize) -> Jet {
        let (f, fp) = if t <= self.t_series {
            self.series_eval(t)
        } else {
            // f from the dense output, f' re-enforced through the first
            // integral: near the core the scalar curvature divides the
            // conserved-quantity drift by f^2, so the enforced branch keeps
            // s exactly constant along the cap while f itself carries the
            // solver accuracy
            let y = self.sol.eval(t);
            let rhs = 1.0 + self.k0 * y[0] * y[0] - self.c / y[0];
            (y[0], rhs.max(0.0).sqrt())
        };
        self.lift(f, fp, ord)
    }

    fn source(&self) -> ProfileSource {
        ProfileSource::ClosedForm
    }
}

/// A solved cap: the profile (first-integral-consistent jets) plus access
/// to the raw integrator output for drift diagnostics.
pub struct CapSolution {
    pub profile: RadialProfile,
    pub kind: CapKind,
    pub delta: f64,
    inner: Arc<CapProfile>,
}

impl CapSolution {
    /// Sup over a sample grid of |f'^2 - rhs(f)| / (1 + f^2) evaluated on
    /// the *raw* dense output (the integrator's conserved-quantity drift,
    /// before the first-integral enforcement of the profile jets).
    pub fn first_integral_drift(&self, n: usize) -> f64 {
        let (t0, t1) = self.profile.domain();
        let mut worst = 0.0f64;
        for i in 0..n {
            let t = t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64;
            let (f, fp) = if t <= self.inner.t_series {
                self.inner.series_eval(t)
            } else {
                let y = self.inner.sol.eval(t);
                (y[0], y[1])
            };
            let r = (fp * fp - self.kind.first_integral_rhs(self.delta, f)).abs()
                / (1.0 + f * f);
            worst = worst.max(r);
        }
        worst
    }
}

/// Solve a cap and keep the raw integrator output for diagnostics.
pub fn solve_cap_solution(kind: CapKind, delta: f64, t_end: f64) -> Result<CapSolution> {
    if delta <= 0.0 {
        return Err(Error::Input(format!("cap needs delta > 0, got {delta}")));
    }
    if kind == CapKind::Hyperbolic && delta >= 0.3 {
        return Err(Error::Input(format!(
            "hyperbolic cap wants delta < 0.3, got {delta}"
        )));
    }
    let (k0, c) = kind.ode_params(delta);
    let mu = delta.cbrt();
    // Taylor start: the series radius is set by the core scale delta, not
    // by mu, so cap the start offset at a small multiple of delta
    let t_series = (1e-3 * mu).min(0.01 * delta);
    let f2 = k0 * delta + c / (2.0 * delta * delta);
    let f4 = (k0 - c / delta.powi(3)) * f2;
    let f_s = delta + f2 / 2.0 * t_series * t_series + f4 / 24.0 * t_series.powi(4);
    let fp_s = f2 * t_series + f4 / 6.0 * t_series.powi(3);
    let sol = solve(
        |_, y| [y[1], k0 * y[0] + c / (2.0 * y[0] * y[0])],
        t_series,
        t_end,
        [f_s, fp_s],
        OdeOpts {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: (0.01 * delta).min(1e-3),
            max_steps: 400_000,
        },
    )?;
    let inner = Arc::new(CapProfile {
        k0,
        c,
        delta,
        t_series,
        f2,
        f4,
        sol,
        t_end,
    });
    Ok(CapSolution {
        profile: RadialProfile::from_impl(inner.clone()),
        kind,
        delta,
        inner,
    })
}

fn solve_cap(kind: CapKind, delta: f64, t_end: f64) -> Result<RadialProfile> {
    Ok(solve_cap_solution(kind, delta, t_end)?.profile)
}

/// Constant-curvature cap of the hyperbolic family on [0, t_end]
/// (default t_end = mu = delta^{1/3}).
pub fn solve_cap_hyperbolic(delta: f64, t_end: Option<f64>) -> Result<RadialProfile> {
    solve_cap(CapKind::Hyperbolic, delta, t_end.unwrap_or(delta.cbrt()))
}

/// Scalar-flat cap: the Schwarzschild profile of mass delta/2.
pub fn solve_cap_schwarzschild(delta: f64, t_end: Option<f64>) -> Result<RadialProfile> {
    solve_cap(CapKind::Schwarzschild, delta, t_end.unwrap_or(delta.cbrt()))
}

/// Sup over a sample grid of |f'^2 - rhs(f)| / (1 + f^2) on the profile's
/// jets (identically small once the first integral is enforced; see
/// [`CapSolution::first_integral_drift`] for the raw solver drift).
pub fn ode_residual_sup(profile: &RadialProfile, kind: CapKind, delta: f64, n: usize) -> f64 {
    let (t0, t1) = profile.domain();
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64;
        let j = profile.jet(t, 1);
        let f = j.value();
        let fp = j.deriv(1);
        let r = (fp * fp - kind.first_integral_rhs(delta, f)).abs() / (1.0 + f * f);
        worst = worst.max(r);
    }
    worst
}

// ---------------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------------

/// Nominal blend-window curvature bound; assemblies with max |r| above ten
/// times this are rejected.
pub const C_BLEND_NOMINAL: f64 = 11.0;

/// A cap blended to the hyperbolic bulk: cap profile on [0, mu/2], quintic
/// Hermite mix to a shifted sinh on [mu/2, mu]. Bulk hyperbolic manifolds
/// enter as volume triples (volume, s = -6, z = 0); each cap replaces a
/// geodesic ball of radius mu of its bulk manifold.
pub struct ModelAssembly {
    pub delta: f64,
    pub mu: f64,
    pub cap_kind: CapKind,
    pub bulk_volumes: Vec<f64>,
    pub doubled: bool,
    pub sinh_shift: f64,
    pub profile: RadialProfile,
}

fn quintic_step_jet(t: f64, lo: f64, hi: f64, ord: usize) -> Jet {
    let w = hi - lo;
    let x = (t - lo) / w;
    if x <= 0.0 {
        return Jet::constant(0.0, ord);
    }
    if x >= 1.0 {
        return Jet::constant(1.0, ord);
    }
    let d0 = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    let d1 = 30.0 * x * x * (1.0 - x) * (1.0 - x) / w;
    let d2 = 60.0 * x * (1.0 - 3.0 * x + 2.0 * x * x) / (w * w);
    let d3 = 60.0 * (1.0 - 6.0 * x + 6.0 * x * x) / (w * w * w);
    let d4 = 60.0 * (-6.0 + 12.0 * x) / (w * w * w * w);
    Jet::from_derivs(&[d0, d1, d2, d3, d4][..=ord])
}

pub fn assemble_model(
    delta: f64,
    cap_kind: CapKind,
    bulk_volumes: &[f64],
) -> Result<ModelAssembly> {
    if bulk_volumes.is_empty() || bulk_volumes.iter().any(|&v| v <= 0.0) {
        return Err(Error::Input("bulk volumes must be positive".into()));
    }
    let mu = delta.cbrt();
    let cap = solve_cap(cap_kind, delta, mu)?;
    let f_mu = cap.eval(mu);
    let sinh_shift = f_mu.asinh() - mu;
    let lo = mu / 2.0;
    let cap2 = cap.clone();
    let profile = RadialProfile::closed_form(0.0, mu, move |t, ord| {
        let cj = cap2.jet(t, ord);
        if t <= lo {
            return cj;
        }
        let psi = quintic_step_jet(t, lo, mu, ord);
        let gs = crate::jet::jet_sinh(t + sinh_shift, ord);
        // (1 - psi) cap + psi sinh
        cj.sub(&psi.mul(&cj)).add(&psi.mul(&gs))
    });

    let assembly = ModelAssembly {
        delta,
        mu,
        cap_kind,
        bulk_volumes: bulk_volumes.to_vec(),
        doubled: true,
        sinh_shift,
        profile,
    };
    // reject unusable blends
    let mut min_f = f64::INFINITY;
    let mut max_r = 0.0f64;
    let g = assembly.metric();
    for i in 0..=128 {
        let t = lo + (mu - lo) * i as f64 / 128.0;
        min_f = min_f.min(assembly.profile.eval(t));
        max_r = max_r.max(g.curvature_at(t)?.rnorm());
    }
    if min_f <= 0.0 {
        return Err(Error::Assembly(format!(
            "blend produced non-positive warping (min f = {min_f})"
        )));
    }
    if max_r > 10.0 * C_BLEND_NOMINAL {
        return Err(Error::Assembly(format!(
            "blend curvature {max_r} above 10 x {C_BLEND_NOMINAL}"
        )));
    }
    Ok(assembly)
}

/// Hyperbolic ball volume of radius mu: pi (sinh 2mu - 2mu).
pub fn hyperbolic_ball_volume(mu: f64) -> f64 {
    std::f64::consts::PI * ((2.0 * mu).sinh() - 2.0 * mu)
}

/// Cap-region integrals of one cap (on [0, mu], blend included).
#[derive(Clone, Copy, Debug)]
pub struct CapFunctionals {
    pub vol: f64,
    pub z2: f64,
    pub s2minus: f64,
}

/// Functionals of a volume-bearing assembly at one eps.
#[derive(Clone, Copy, Debug)]
pub struct AssemblyFunctionals {
    pub volume: f64,
    pub z2: f64,
    pub s2minus_int: f64,
    pub sminus2: f64,
    pub i_eps: f64,
    pub floor: f64,
}

impl ModelAssembly {
    pub fn metric(&self) -> SymmetricMetric {
        SymmetricMetric::sphere(self.profile.clone())
    }

    fn n_caps(&self) -> f64 {
        if self.doubled {
            2.0
        } else {
            1.0
        }
    }

    /// Cap integrals: the constant-s core region in closed form where the
    /// quantity is algebraic (s = s_cap exactly, |z|^2 = (3/2) c^2/f^6),
    /// plus the blend window through the curvature engine.
    pub fn cap_functionals(&self) -> Result<CapFunctionals> {
        let mu = self.mu;
        let lo = mu / 2.0;
        let (_, c) = self.cap_kind.ode_params(self.delta);
        let g = self.metric();
        let pi = std::f64::consts::PI;

        let steep = QuadOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-16,
            max_panels: 6000,
        };
        let vol = volume(&g, (0.0, mu))?;
        let vol_core = volume(&g, (0.0, lo))?;
        let z2_core = integrate(
            |t| {
                let f = self.profile.eval(t);
                6.0 * pi * c * c / f.powi(4)
            },
            0.0,
            lo,
            steep,
        )?;
        let z2_blend = z2_functional(&g, (lo, mu))?;
        let s2_core = match self.cap_kind {
            CapKind::Hyperbolic => 36.0 * vol_core,
            CapKind::Schwarzschild => 0.0,
        };
        let s2_blend = integrate(
            |t| match g.curvature_at(t) {
                Ok(cp) => {
                    let sm = cp.s.min(0.0);
                    let f = self.profile.eval(t);
                    sm * sm * 4.0 * pi * f * f
                }
                Err(_) => f64::NAN,
            },
            lo,
            mu,
            QuadOpts::with_rel_tol(1e-10),
        )?;
        if s2_blend.is_nan() {
            return Err(Error::Numeric {
                what: "blend curvature integrand",
                requested: 1e-10,
                achieved: f64::INFINITY,
            });
        }
        Ok(CapFunctionals {
            vol,
            z2: z2_core + z2_blend,
            s2minus: s2_core + s2_blend,
        })
    }

    pub fn functionals(&self, eps: f64, cap: &CapFunctionals) -> AssemblyFunctionals {
        let nc = self.n_caps();
        let vb: f64 = self.bulk_volumes.iter().sum();
        let ball = hyperbolic_ball_volume(self.mu);
        let v = vb - nc * ball + nc * cap.vol;
        let z2 = nc * cap.z2;
        let s2m = 36.0 * (vb - nc * ball) + nc * cap.s2minus;
        let sminus2 = (v.cbrt() * s2m).sqrt();
        AssemblyFunctionals {
            volume: v,
            z2,
            s2minus_int: s2m,
            sminus2,
            i_eps: eps * v.cbrt() * z2 + sminus2,
            floor: 6.0 * vb.powf(2.0 / 3.0),
        }
    }

    pub fn i_eps(&self, eps: f64) -> Result<AssemblyFunctionals> {
        let cap = self.cap_functionals()?;
        Ok(self.functionals(eps, &cap))
    }

    /// Max |r| over the blend window (the C_blend measurement).
    pub fn max_r_blend(&self) -> Result<f64> {
        let g = self.metric();
        let mut worst = 0.0f64;
        for i in 0..=256 {
            let t = self.mu / 2.0 + (self.mu / 2.0) * i as f64 / 256.0;
            worst = worst.max(g.curvature_at(t)?.rnorm());
        }
        Ok(worst)
    }

    /// Max |r| over the whole cap with its location.
    pub fn max_r_total(&self) -> Result<(f64, f64)> {
        let g = self.metric();
        let mut worst = (0.0f64, 0.0f64);
        for i in 0..=512 {
            let t = self.mu * i as f64 / 512.0;
            let r = g.curvature_at(t)?.rnorm();
            if r > worst.0 {
                worst = (r, t);
            }
        }
        Ok(worst)
    }
}

// ---------------------------------------------------------------------------
// the scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub cap_kind: CapKind,
    pub bulk_volumes: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            cap_kind: CapKind::Hyperbolic,
            bulk_volumes: vec![1.0, 1.2],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub eps: f64,
    pub delta_star: f64,
    pub i_star: f64,
    pub gap: f64,
    pub minimizer_index: usize,
    pub unimodal: bool,
}

pub struct ScalingFit {
    pub rows: Vec<ScanRow>,
    pub p_delta: f64,
    pub p_gap: f64,
    pub fit_rms_delta: f64,
    pub fit_rms_gap: f64,
    pub floor: f64,
}

/// Evaluate I_eps over the (eps, delta) grids, minimize in delta per eps,
/// and fit the scaling exponents delta* ~ eps^{p_delta},
/// (I* - floor) ~ eps^{p_gap} by least squares on the log-log rows
/// (first and last eps point excluded from the fit).
pub fn scan_scaling(
    eps_grid: &[f64],
    delta_grid: &[f64],
    cfg: &ScanConfig,
) -> Result<ScalingFit> {
    for (name, g) in [("eps", eps_grid), ("delta", delta_grid)] {
        if g.len() < 4 || g.windows(2).any(|p| p[1] <= p[0]) || g[0] <= 0.0 {
            return Err(Error::Input(format!("{name} grid must be >=4 increasing positive points")));
        }
        let decades = (g[g.len() - 1] / g[0]).log10();
        if decades < 1.5 {
            return Err(Error::Input(format!(
                "{name} grid spans {decades:.2} decades, need >= 1.5"
            )));
        }
    }

    let caps: Vec<Result<(ModelAssembly, CapFunctionals)>> = delta_grid
        .par_iter()
        .map(|&d| {
            let a = assemble_model(d, cfg.cap_kind, &cfg.bulk_volumes)?;
            let c = a.cap_functionals()?;
            Ok((a, c))
        })
        .collect();
    let mut assemblies = Vec::with_capacity(caps.len());
    for r in caps {
        assemblies.push(r?);
    }
    let floor = 6.0 * cfg.bulk_volumes.iter().sum::<f64>().powf(2.0 / 3.0);

    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let vals: Vec<f64> = assemblies
            .iter()
            .map(|(a, c)| a.functionals(eps, c).i_eps)
            .collect();
        let (k, _) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite functional values"))
            .expect("non-empty grid");
        if k == 0 || k == vals.len() - 1 {
            return Err(Error::ScanBoundary { eps });
        }
        let switches = vals
            .windows(2)
            .map(|p| (p[1] - p[0]).signum())
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|q| q[0] != q[1])
            .count();
        rows.push(ScanRow {
            eps,
            delta_star: delta_grid[k],
            i_star: vals[k],
            gap: vals[k] - floor,
            minimizer_index: k,
            unimodal: switches <= 1,
        });
    }

    let pts_delta: Vec<(f64, f64)> = rows[1..rows.len() - 1]
        .iter()
        .map(|r| (r.eps.ln(), r.delta_star.ln()))
        .collect();
    let pts_gap: Vec<(f64, f64)> = rows[1..rows.len() - 1]
        .iter()
        .map(|r| (r.eps.ln(), r.gap.ln()))
        .collect();
    let (p_delta, _, fit_rms_delta) = crate::fit::ols_fit(&pts_delta);
    let (p_gap, _, fit_rms_gap) = crate::fit::ols_fit(&pts_gap);

    Ok(ScalingFit {
        rows,
        p_delta,
        p_gap,
        fit_rms_delta,
        fit_rms_gap,
        floor,
    })
}
