//! Batch driver: configures scans, runs the verification suites, and emits
//! machine-readable reports (one CSV per command plus a JSON report).
//!
//! Output contract: `<command>.csv` holds one row per grid point (scans) or
//! per check (verification suites); `report.json` mirrors the check rows.
//! All floats are printed with 17 significant digits so rows round-trip
//! exactly; rows are produced in a fixed order independent of the worker
//! pool width.

use crate::canonical::kasner::{
    b8_b9_audit, kasner_exponents, kasner_metric, kasner_ricci, kasner_static_check,
    kasner_zs2_refutation,
};
use crate::canonical::schwarzschild::{
    asymptotic_flatness_fit, asymptotic_flatness_fit_profile, mass_flux, mass_identity_check,
    schwarzschild_profile, t_of_r, tau_617_verbatim, verify_schwarzschild_zs2,
    zs2_residual_with_tau, SchwarzschildSolution,
};
use crate::error::{Error, Result};
use crate::functionals::{
    configured_junction_field, curvature_jets, el_residual, fd_directional_z2, functional_report,
    grad_z2, junction_residual, middle_third_basket, smoothing_phi, standard_basket, tau_sigma,
    volume, weak_pairing, ElOptions, ElSystem, PotentialField, TauSigma,
};
use crate::geometry::{scale_metric, SymmetricMetric};
use crate::jet::Jet;
use crate::models::{
    assemble_model, hyperbolic_ball_volume, scan_scaling,
    solve_cap_schwarzschild, CapKind, ScanConfig,
};
use crate::profile::RadialProfile;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curvature,
    Functional,
    ModelScan,
    SchwarzschildVerify,
    KasnerScan,
    AuditB8,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Functional => "functional",
            Command::ModelScan => "model-scan",
            Command::SchwarzschildVerify => "schwarzschild-verify",
            Command::KasnerScan => "kasner-scan",
            Command::AuditB8 => "audit-b8",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.min < self.max) || self.count < 2 {
            return Err(Error::Input(format!(
                "grid must have min < max and count >= 2, got {self:?}"
            )));
        }
        let n = self.count;
        Ok((0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * s,
                    Spacing::Log => self.min * (self.max / self.min).powf(s),
                }
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quadrature_rel: f64,
    pub residual_sup: f64,
    pub fit_slope_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature_rel: 1e-9,
            residual_sup: 1e-5,
            fit_slope_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub m: f64,
    pub alpha: f64,
    pub eps_grid: GridSpec,
    pub delta_grid: GridSpec,
    pub d_grid: GridSpec,
    pub bulk_volumes: Vec<f64>,
    pub tolerances: Tolerances,
    /// worker pool width; 0 = library default
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::All,
            m: 1.0,
            alpha: 1.0,
            eps_grid: GridSpec {
                min: 1e-6,
                max: 1e-3,
                count: 13,
                spacing: Spacing::Log,
            },
            delta_grid: GridSpec {
                min: 1e-4,
                max: 1e-1,
                count: 41,
                spacing: Spacing::Log,
            },
            d_grid: GridSpec {
                min: 0.01,
                max: 0.99,
                count: 99,
                spacing: Spacing::Linear,
            },
            bulk_volumes: vec![1.0, 1.2],
            tolerances: Tolerances::default(),
            jobs: 0,
        }
    }
}

impl RunConfig {
    /// Parse a JSON config; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))
    }

    /// Apply `key=value` overrides with dotted paths into the JSON tree,
    /// then re-validate against the schema.
    pub fn with_overrides(&self, sets: &[String]) -> Result<Self> {
        let mut tree = serde_json::to_value(self).expect("config serializes");
        for kv in sets {
            let (key, raw) = kv
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("--set wants key=value, got '{kv}'")))?;
            let val: serde_json::Value = serde_json::from_str(raw)
                .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
            let (parent_path, leaf) = match key.rsplit_once('.') {
                Some((p, l)) => (format!("/{}", p.replace('.', "/")), l),
                None => (String::new(), key),
            };
            let parent = if parent_path.is_empty() {
                &mut tree
            } else {
                tree.pointer_mut(&parent_path)
                    .ok_or_else(|| Error::Input(format!("--set: unknown path '{key}'")))?
            };
            let obj = parent.as_object_mut().ok_or_else(|| {
                Error::Input(format!("--set path '{key}' does not address an object"))
            })?;
            obj.insert(leaf.to_string(), val);
        }
        serde_json::from_value(tree).map_err(|e| Error::Input(format!("config override: {e}")))
    }
}

// ---------------------------------------------------------------------------
// report rows
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub id: String,
    /// short slug naming what the check verifies
    pub reference: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    /// |value - target| <= tol
    fn near(id: &str, reference: &str, value: f64, target: f64, tol: f64) -> Self {
        CheckRow {
            id: id.into(),
            reference: reference.into(),
            value,
            target,
            tol,
            pass: (value - target).abs() <= tol,
        }
    }

    /// value <= target
    fn at_most(id: &str, reference: &str, value: f64, target: f64) -> Self {
        CheckRow {
            id: id.into(),
            reference: reference.into(),
            value,
            target,
            tol: 0.0,
            pass: value <= target,
        }
    }

    /// value >= target
    fn at_least(id: &str, reference: &str, value: f64, target: f64) -> Self {
        CheckRow {
            id: id.into(),
            reference: reference.into(),
            value,
            target,
            tol: 0.0,
            pass: value >= target,
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub rows: Vec<CheckRow>,
    pub overall_pass: bool,
    pub wall_ms: u128,
    pub config: RunConfig,
}

pub struct CommandOutput {
    /// (csv file stem, csv text)
    pub csv: Vec<(String, String)>,
    pub rows: Vec<CheckRow>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_header(command: &str, columns: &str) -> String {
    format!("# symvar-lab v{VERSION} {command}\n{columns}\n")
}

fn rows_to_csv(command: &str, rows: &[CheckRow]) -> String {
    let mut s = csv_header(command, "id,reference,value,target,tol,pass");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.id,
            r.reference,
            fmt17(r.value),
            fmt17(r.target),
            fmt17(r.tol),
            r.pass
        );
    }
    s
}

// ---------------------------------------------------------------------------
// the suites
// ---------------------------------------------------------------------------

fn generic_fleet_metric() -> SymmetricMetric {
    // a hyperbolic profile with a localized dent: s varies, sigma > 0,
    // z != 0, all derivatives closed form
    let bump = crate::functionals::polynomial_bump(0.3, 2.5, 1.4, 0.5);
    let f = RadialProfile::closed_form(0.3, 2.5, move |t, ord| {
        let s = crate::jet::jet_sinh(t, ord);
        s.add(&bump.jet(t, ord).scale(0.05))
    });
    SymmetricMetric::sphere(f)
}

fn fleet(m: f64) -> Vec<(String, SymmetricMetric)> {
    let mut v = vec![
        (
            "schwarzschild".to_string(),
            SymmetricMetric::sphere(schwarzschild_profile(m, 45.0 * m)),
        ),
        (
            "kasner-d0.5".to_string(),
            kasner_metric(0.5, 1.0, 2.0).expect("kasner fleet metric"),
        ),
        ("hyperbolic-dent".to_string(), generic_fleet_metric()),
    ];
    if let Ok(a) = assemble_model(1e-2, CapKind::Hyperbolic, &[1.0, 1.2]) {
        v.push(("cap-assembly".to_string(), a.metric()));
    }
    v
}

pub fn run_curvature(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut rows = Vec::new();
    let pi = std::f64::consts::PI;

    let s3 = SymmetricMetric::sphere(RadialProfile::sin(0.0, pi));
    let c = s3.curvature_at(pi / 4.0)?;
    rows.push(CheckRow::near("roundS3_K12", "round-unit-S3", c.k12, 1.0, 1e-12));
    rows.push(CheckRow::near("roundS3_K23", "round-unit-S3", c.k23, 1.0, 1e-12));
    rows.push(CheckRow::near("roundS3_s", "round-unit-S3", c.s, 6.0, 1e-12));
    rows.push(CheckRow::near(
        "roundS3_znorm2",
        "round-unit-S3",
        c.znorm2,
        0.0,
        1e-12,
    ));

    let hyp = SymmetricMetric::sphere(RadialProfile::sinh(0.0, 3.0));
    let ch = hyp.curvature_at(1.0)?;
    rows.push(CheckRow::near("hyperbolic_K12", "hyperbolic-space", ch.k12, -1.0, 1e-12));
    rows.push(CheckRow::near("hyperbolic_s", "hyperbolic-space", ch.s, -6.0, 1e-12));

    let flat = SymmetricMetric::sphere(RadialProfile::linear(0.0, 10.0, 1.0, 0.0));
    let cf = flat.curvature_at(5.0)?;
    rows.push(CheckRow::near("flat_K12", "euclidean-space", cf.k12, 0.0, 1e-12));
    rows.push(CheckRow::near("flat_K23", "euclidean-space", cf.k23, 0.0, 1e-12));

    // oracle order by h-halving on a closed-form profile
    let t = 1.1;
    let exact = hyp.curvature_at(t)?;
    let err = |h: f64| -> Result<f64> {
        let o = hyp.curvature_oracle(t, h)?;
        Ok((o.k12 - exact.k12).abs() + (o.k23 - exact.k23).abs())
    };
    let order = (err(2e-2)? / err(1e-2)?).log2();
    rows.push(CheckRow::at_least("oracle_order", "stencil-h-halving", order, 3.8));

    // Schwarzschild Ricci eigenvalues at area radius 5m
    let m = cfg.m;
    let schw = SymmetricMetric::sphere(schwarzschild_profile(m, 45.0 * m));
    let r = 5.0 * m;
    let cs = schw.curvature_at(t_of_r(r, m))?;
    rows.push(CheckRow::near(
        "schwarzschild_ric1",
        "mass-m-profile",
        cs.ric1,
        -2.0 * m / r.powi(3),
        1e-9,
    ));
    rows.push(CheckRow::near(
        "schwarzschild_s",
        "mass-m-profile",
        cs.s,
        0.0,
        1e-10,
    ));
    rows.push(CheckRow::near(
        "schwarzschild_znorm2",
        "mass-m-profile",
        cs.znorm2,
        6.0 * m * m / r.powi(6),
        1e-10,
    ));

    // Kasner d = 1/2: oracle vs exponent algebra (two code paths)
    let kr = kasner_ricci(0.5)?;
    let kg = kasner_metric(0.5, 0.5, 2.0)?;
    let ko = kg.curvature_oracle(1.0, 1e-3)?;
    let dev = (ko.ric1 - kr.eigen[0])
        .abs()
        .max((ko.ric2 - kr.eigen[1]).abs())
        .max((ko.ric3 - kr.eigen[2]).abs());
    rows.push(CheckRow::at_most(
        "kasner_oracle_vs_algebra",
        "torus-two-paths",
        dev / kr.eigen[2].abs(),
        1e-6,
    ));

    // algebraic point identities across the fleet
    let mut worst = 0.0f64;
    for (_, g) in fleet(m) {
        let (t0, t1) = g.domain();
        for i in 1..32 {
            let t = t0 + (t1 - t0) * i as f64 / 32.0;
            let c = g.curvature_at(t)?;
            let scale = 1.0 + c.s.abs() + c.rnorm2;
            let d1 = (c.s - 2.0 * (c.k12 + c.k13 + c.k23)).abs();
            let d2 = (c.z1 + c.z2 + c.z3).abs();
            let d3 = (c.znorm2 - (c.z1 * c.z1 + c.z2 * c.z2 + c.z3 * c.z3)).abs();
            worst = worst.max((d1 + d2 + d3) / scale);
        }
    }
    rows.push(CheckRow::at_most(
        "point_identities",
        "curvature-package",
        worst,
        1e-12,
    ));

    let csv = rows_to_csv("curvature", &rows);
    Ok(CommandOutput {
        csv: vec![("curvature".into(), csv)],
        rows,
    })
}

pub fn run_functional(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut rows = Vec::new();
    let pi = std::f64::consts::PI;
    let m = cfg.m;

    let s3 = SymmetricMetric::sphere(RadialProfile::sin(0.0, pi));
    rows.push(CheckRow::near(
        "vol_round_s3",
        "unit-S3-volume",
        volume(&s3, (0.0, pi))?,
        2.0 * pi * pi,
        1e-8,
    ));
    let ball = SymmetricMetric::sphere(RadialProfile::linear(0.0, 2.0, 1.0, 0.0));
    rows.push(CheckRow::near(
        "vol_euclidean_ball",
        "flat-ball-volume",
        volume(&ball, (0.0, 2.0))?,
        4.0 / 3.0 * pi * 8.0,
        1e-9,
    ));

    // Schwarzschild volume, arclength quadrature vs endpoint substitution
    let schw = SymmetricMetric::sphere(schwarzschild_profile(1.0, 12.0));
    let v_arc = volume(&schw, (0.0, t_of_r(10.0, 1.0)))?;
    let v_sub = crate::quad::integrate(
        |w| 64.0 * pi * (1.0 - w * w).powi(-4),
        0.0,
        0.8f64.sqrt(),
        crate::quad::QuadOpts::with_rel_tol(1e-12),
    )?;
    rows.push(CheckRow::at_most(
        "schwarzschild_vol_two_routes",
        "endpoint-substitution",
        (v_arc - v_sub).abs() / v_sub,
        1e-8,
    ));

    // unit-volume hyperbolic piece
    let t1 = 0.605403045606683;
    let hyp = SymmetricMetric::sphere(RadialProfile::sinh(0.0, t1));
    let rep = functional_report(&hyp, 1e-4)?;
    rows.push(CheckRow::near("hyp_sminus2", "constant-s-piece", rep.sminus2, 6.0, 1e-7));
    rows.push(CheckRow::near("hyp_z2", "constant-s-piece", rep.z2, 0.0, 1e-9));
    rows.push(CheckRow::near("hyp_c_const", "el-constant", rep.c_const, 0.5, 1e-6));
    match tau_sigma(&hyp)? {
        TauSigma::Potential(p) => {
            rows.push(CheckRow::near(
                "tau_constant_metric",
                "normalized-potential",
                p.tau.eval(0.3),
                -1.0,
                1e-6,
            ));
        }
        TauSigma::ZeroPotential => {
            return Err(Error::Numeric {
                what: "tau_sigma on hyperbolic piece",
                requested: 0.0,
                achieved: 0.0,
            })
        }
    }
    let zero_pot = matches!(tau_sigma(&s3)?, TauSigma::ZeroPotential);
    rows.push(CheckRow::near(
        "zero_potential_nonneg_s",
        "s-nonnegative-case",
        zero_pot as i32 as f64,
        1.0,
        0.0,
    ));

    // smoothing family
    rows.push(CheckRow::near(
        "phi_left_branch",
        "smoothing-family",
        smoothing_phi(0.1, -1.0),
        -1.0,
        0.0,
    ));
    rows.push(CheckRow::near(
        "phi_right_branch",
        "smoothing-family",
        smoothing_phi(0.1, 0.2),
        0.02,
        1e-15,
    ));
    let mut worst = 0.0f64;
    for &delta in &[1e-1, 1e-2, 1e-3] {
        for i in 0..=2000 {
            let s = -10.0 + 20.0 * i as f64 / 2000.0;
            let diff = (smoothing_phi(delta, s) - s.min(0.0)).abs();
            worst = worst.max(diff / (delta * s.abs().max(delta)));
        }
    }
    rows.push(CheckRow::at_most(
        "phi_convergence",
        "smoothing-sup-bound",
        worst,
        1.0 + 1e-12,
    ));

    // scale invariance of I_eps^-
    let mut worst_scale = 0.0f64;
    for (_, g) in [
        ("hyperbolic-dent", generic_fleet_metric()),
        (
            "schwarzschild",
            SymmetricMetric::sphere(schwarzschild_profile(m, 20.0 * m)),
        ),
    ] {
        let base = functional_report(&g, 1e-3)?;
        for &lam in &[0.5, 2.0] {
            let scaled = functional_report(&scale_metric(&g, lam), 1e-3)?;
            let denom = base.i_eps_minus.abs().max(1e-300);
            worst_scale = worst_scale.max((scaled.i_eps_minus - base.i_eps_minus).abs() / denom);
        }
    }
    rows.push(CheckRow::at_most(
        "ieps_scale_invariance",
        "homothety-covariance",
        worst_scale,
        1e-8,
    ));

    // trace consistency of all residual systems across the fleet
    let mut worst_trace = 0.0f64;
    for (name, g) in fleet(m) {
        let (t0, t1) = g.domain();
        let trim = 0.05 * (t1 - t0);
        let tau = match tau_sigma(&g)? {
            TauSigma::Potential(p) => p.tau,
            TauSigma::ZeroPotential => {
                RadialProfile::closed_form(t0, t1, |_, ord| Jet::constant(0.0, ord))
            }
        };
        let _ = name;
        for sys in [
            ElSystem::Z2sys,
            ElSystem::Zc2,
            ElSystem::Zs2,
            ElSystem::StaticVacuum,
            ElSystem::FullIepsEl,
        ] {
            let pot = PotentialField::from_tau(tau.clone(), &g, Some(cfg.alpha), Some(1e-3));
            let opts = ElOptions {
                grid_points: 33,
                interval: Some((t0 + trim, t1 - trim)),
                ..Default::default()
            };
            let res = el_residual(sys, &g, &pot, &opts)?;
            worst_trace = worst_trace.max(res.sup_trace);
        }
    }
    rows.push(CheckRow::at_most(
        "trace_consistency",
        "tensor-vs-scalar-trace",
        worst_trace,
        1e-8,
    ));

    // gradient of Z^2 vs directional finite differences over the fleet
    let mut worst_grad = 0.0f64;
    for (name, g) in fleet(m) {
        let gz = grad_z2(&g);
        let basket = if name == "schwarzschild" {
            standard_basket((t_of_r(3.0 * m, m), t_of_r(6.0 * m, m)), g.domain())
        } else {
            middle_third_basket(&g)
        };
        let (t0, t1) = g.domain();
        let trim = 1e-3 * (t1 - t0);
        let interval = (t0 + trim, t1 - trim);
        for h in basket {
            let fd = fd_directional_z2(&g, &h, interval, crate::functionals::FD_STEP)?;
            let pair = weak_pairing(&gz, &h, &g, interval)?;
            worst_grad = worst_grad.max((fd - pair).abs() / fd.abs().max(1e-12));
        }
    }
    rows.push(CheckRow::at_most(
        "grad_z2_vs_fd",
        "directional-derivative-oracle",
        worst_grad,
        1e-4,
    ));

    // junction relation on the configured field
    let field = configured_junction_field(1e-2, 6.0);
    rows.push(CheckRow::at_most(
        "junction_relation",
        "one-sided-limits",
        junction_residual(&field, 8.0 / 4096.0),
        1e-8,
    ));

    let csv = rows_to_csv("functional", &rows);
    Ok(CommandOutput {
        csv: vec![("functional".into(), csv)],
        rows,
    })
}

pub fn run_model_scan(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut rows = Vec::new();
    let eps_grid = cfg.eps_grid.points()?;
    let delta_grid = cfg.delta_grid.points()?;
    let scan_cfg = ScanConfig {
        cap_kind: CapKind::Hyperbolic,
        bulk_volumes: cfg.bulk_volumes.clone(),
    };
    let fit = scan_scaling(&eps_grid, &delta_grid, &scan_cfg)?;

    rows.push(CheckRow::near(
        "p_delta",
        "scaling-law-delta",
        fit.p_delta,
        0.5,
        cfg.tolerances.fit_slope_tol,
    ));
    rows.push(CheckRow::near(
        "p_gap",
        "scaling-law-gap",
        fit.p_gap,
        0.5,
        cfg.tolerances.fit_slope_tol,
    ));
    let interior = fit
        .rows
        .iter()
        .all(|r| r.minimizer_index > 0 && r.minimizer_index + 1 < delta_grid.len());
    rows.push(CheckRow::near(
        "minimizer_interior",
        "scan-wellposedness",
        interior as i32 as f64,
        1.0,
        0.0,
    ));
    let unimodal = fit.rows.iter().all(|r| r.unimodal);
    rows.push(CheckRow::near(
        "unimodal_in_delta",
        "two-term-tradeoff",
        unimodal as i32 as f64,
        1.0,
        0.0,
    ));
    // gap shrinks toward the floor as eps -> 0
    rows.push(CheckRow::at_most(
        "gap_monotone_down",
        "floor-approach",
        fit.rows
            .windows(2)
            .map(|p| p[0].gap / p[1].gap)
            .fold(0.0f64, f64::max),
        1.0,
    ));

    // cap quality rows: raw solver drift of the first integral, and the
    // scalar-curvature conservation through the curvature engine
    let mut worst_ode = 0.0f64;
    let mut worst_s = 0.0f64;
    for &d in &[1e-2, 1e-3, 1e-4] {
        let cap = crate::models::solve_cap_solution(CapKind::Hyperbolic, d, d.cbrt())?;
        worst_ode = worst_ode.max(cap.first_integral_drift(200));
        let g = SymmetricMetric::sphere(cap.profile.clone());
        let mu = d.cbrt();
        for i in 1..64 {
            let t = mu * i as f64 / 64.0;
            worst_s = worst_s.max((g.curvature_at(t)?.s + 6.0).abs());
        }
    }
    rows.push(CheckRow::at_most(
        "cap_ode_residual",
        "first-integral-drift",
        worst_ode,
        1e-10,
    ));
    rows.push(CheckRow::at_most(
        "cap_s_conservation",
        "constant-s-minus-6",
        worst_s,
        1e-6,
    ));

    // scalar-flat cap against the closed-form profile of mass delta/2
    let cap_s = solve_cap_schwarzschild(1.0, Some(5.0))?;
    let exact = schwarzschild_profile(0.5, 20.0);
    let mut worst_cap = 0.0f64;
    for i in 0..=128 {
        let t = 5.0 * i as f64 / 128.0;
        worst_cap = worst_cap.max((cap_s.eval(t) - exact.eval(t)).abs());
    }
    rows.push(CheckRow::at_most(
        "schwarzschild_cap_match",
        "closed-form-oracle",
        worst_cap,
        1e-6,
    ));

    // blend-window curvature bound stability and core curvature size
    let mut cbs = Vec::new();
    for &d in &[1e-2, 1e-3, 1e-4] {
        let a = assemble_model(d, CapKind::Hyperbolic, &cfg.bulk_volumes)?;
        cbs.push(a.max_r_blend()?);
    }
    let mean = cbs.iter().sum::<f64>() / cbs.len() as f64;
    let spread = cbs
        .iter()
        .map(|c| (c - mean).abs() / mean)
        .fold(0.0f64, f64::max);
    rows.push(CheckRow::at_most(
        "c_blend_stability",
        "uniform-annulus-bound",
        spread,
        0.25,
    ));
    let a = assemble_model(1e-2, CapKind::Hyperbolic, &cfg.bulk_volumes)?;
    let (max_r, _) = a.max_r_total()?;
    rows.push(CheckRow::near(
        "core_curvature_delta2",
        "core-blowup-rate",
        (max_r * 1e-4).log10(),
        0.0,
        1.0,
    ));

    // volume fidelity ratio decreasing over three decades
    let mut ratios = Vec::new();
    for &d in &[1e-2, 1e-3, 1e-4] {
        let a = assemble_model(d, CapKind::Hyperbolic, &cfg.bulk_volumes)?;
        let capf = a.cap_functionals()?;
        ratios.push((capf.vol - hyperbolic_ball_volume(a.mu)).abs() / d);
    }
    let decreasing = ratios[1] < ratios[0] && ratios[2] < ratios[1];
    rows.push(CheckRow::near(
        "volume_fidelity_decreasing",
        "cap-vs-hyperbolic-ball",
        decreasing as i32 as f64,
        1.0,
        0.0,
    ));
    rows.push(CheckRow::at_most(
        "volume_fidelity_final",
        "cap-vs-hyperbolic-ball",
        ratios[2],
        0.15,
    ));

    let mut csv = csv_header("model-scan", "eps,delta_star,I_star,gap");
    for r in &fit.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt17(r.eps),
            fmt17(r.delta_star),
            fmt17(r.i_star),
            fmt17(r.gap)
        );
    }
    Ok(CommandOutput {
        csv: vec![
            ("model-scan".into(), csv),
            ("model-scan-checks".into(), rows_to_csv("model-scan-checks", &rows)),
        ],
        rows,
    })
}

pub fn run_schwarzschild(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut rows = Vec::new();
    let (m, alpha) = (cfg.m, cfg.alpha);
    let sol = SchwarzschildSolution::new(m, alpha, 45.0 * m)?;

    // the potential at the horizon. The first row pins the printed closed
    // value alpha/(8m (2m)^3); the equation-consistent potential carries
    // the extra (2m)^2, so this row records the discrepancy deliberately
    // (see the README note on the potential normalization).
    let tau_h = sol.tau.eval(0.0).abs();
    rows.push(CheckRow::near(
        "tau_horizon",
        "printed-horizon-value",
        tau_h,
        alpha / (8.0 * m * (2.0 * m).powi(3)),
        1e-8,
    ));
    rows.push(CheckRow::near(
        "tau_horizon_el_consistent",
        "equation-consistent-value",
        tau_h,
        alpha / (16.0 * m * m),
        1e-12,
    ));
    // the printed formula itself, via quadrature + Richardson in a -> 2m
    let r_probe = 3.0 * m;
    let w = (1.0f64 - 2.0 * m / r_probe).sqrt();
    let q = 1.0 + 3.0 * w * w - w.powi(4) + w.powi(6) / 5.0;
    rows.push(CheckRow::near(
        "tau617_quadrature_limit",
        "verbatim-formula-machinery",
        tau_617_verbatim(m, alpha, r_probe)?,
        -(alpha / (64.0 * m.powi(4))) * q,
        1e-9 * alpha / (64.0 * m.powi(4)),
    ));

    // one-sided horizon slope in arclength (Richardson extrapolated)
    let h = 1e-3 * m;
    let d1 = (sol.tau.eval(4.0 * h) - sol.tau.eval(0.0)) / (4.0 * h);
    let d2 = (sol.tau.eval(2.0 * h) - sol.tau.eval(0.0)) / (2.0 * h);
    rows.push(CheckRow::near(
        "dtau_horizon_one_sided",
        "even-reflection-slope",
        2.0 * d2 - d1,
        0.0,
        1e-5,
    ));

    // trace equation on r in [2.05, 40] (in units of m)
    let mut sup_tr = 0.0f64;
    for i in 0..=256 {
        let r = m * (2.05 + (40.0 - 2.05) * i as f64 / 256.0);
        let t = t_of_r(r, m);
        let c = curvature_jets(&sol.exterior, t)?;
        let tj = sol.tau.jet(t, 2);
        let lap = tj.deriv(2) + (c.kap[0].value() + c.kap[1].value()) * tj.deriv(1);
        sup_tr = sup_tr.max((lap + alpha / 4.0 * sol.znorm2_at_r(r)).abs());
    }
    rows.push(CheckRow::at_most(
        "tau_trace_residual",
        "trace-equation",
        sup_tr,
        1e-6,
    ));

    // full constrained-system residual with positive and negative controls
    let res = verify_schwarzschild_zs2(m, alpha)?;
    rows.push(CheckRow::at_most(
        "zs2_pointwise_sup",
        "constrained-system",
        res.sup_pointwise,
        1e-5 / m.powi(4),
    ));
    rows.push(CheckRow::at_most(
        "zs2_weak_relative",
        "weak-form-oracle",
        res.max_weak() / res.weak_scale.max(1e-300),
        1e-4,
    ));
    let neg = zs2_residual_with_tau(&sol, &sol.u_static)?;
    rows.push(CheckRow::at_least(
        "zs2_negative_control",
        "static-potential-control",
        neg.sup_pointwise,
        1e-2 / m.powi(4),
    ));

    // masses
    let sol_far = SchwarzschildSolution::new(m, alpha, 400.0 * m)?;
    let radii = [50.0 * m, 100.0 * m, 200.0 * m, 400.0 * m];
    let mf = mass_flux(&sol_far, &radii)?;
    rows.push(CheckRow::near(
        "mass_flux_vs_expansion",
        "two-mass-extractions",
        (mf.m_e - mf.m_expansion_fit).abs() / m,
        0.0,
        1e-2,
    ));
    let id = mass_identity_check(&sol_far)?;
    rows.push(CheckRow::at_most(
        "mass_identity_rel_err",
        "doubled-mass-identity",
        id.rel_err,
        5e-3,
    ));
    rows.push(CheckRow::at_least(
        "mass_identity_positive",
        "positive-total-mass",
        id.rhs.min(id.lhs),
        0.0,
    ));

    // asymptotic flatness
    let fit = asymptotic_flatness_fit(&sol_far)?;
    rows.push(CheckRow::near(
        "af_mass_fit",
        "conformal-chart-fit",
        fit.mass_fit,
        m,
        0.02 * m,
    ));
    rows.push(CheckRow::at_least(
        "af_decay_order",
        "remainder-decay",
        fit.residual_decay_order,
        1.8,
    ));
    let flat_fit = asymptotic_flatness_fit_profile(
        &RadialProfile::linear(0.0, 400.0 * m, 1.0, 0.0),
        10.0 * m,
    )?;
    rows.push(CheckRow::near(
        "af_flat_mass",
        "zero-mass-control",
        flat_fit.mass_fit,
        0.0,
        1e-6,
    ));

    let csv = rows_to_csv("schwarzschild-verify", &rows);
    Ok(CommandOutput {
        csv: vec![("schwarzschild-verify".into(), csv)],
        rows,
    })
}

pub fn run_kasner(cfg: &RunConfig) -> Result<CommandOutput> {
    let ds = cfg.d_grid.points()?;
    // exponent invariants over the grid
    let mut worst_inv = 0.0f64;
    let mut signs_ok = true;
    for &d in &ds {
        let (a, b, c) = kasner_exponents(d)?;
        signs_ok &= a < 0.0 && b > 0.0 && a + b > 0.0 && a + b < 1.0;
        worst_inv = worst_inv
            .max((a * a + b * b + c * c - 1.0).abs())
            .max((-a - d * b).abs());
    }
    let mut rows = vec![
        CheckRow::near(
            "exponent_signs_and_ranges",
            "kasner-family",
            signs_ok as i32 as f64,
            1.0,
            0.0,
        ),
        CheckRow::at_most("exponent_identities", "kasner-family", worst_inv, 1e-12),
    ];

    // static-vacuum positive control and refutation margins, in parallel
    use rayon::prelude::*;
    let per_d: Vec<Result<(f64, crate::canonical::kasner::RefutationRow, bool)>> = ds
        .par_iter()
        .map(|&d| {
            let stat = kasner_static_check(d)?;
            let refrow = kasner_zs2_refutation(&[d])?[0];
            let audit = b8_b9_audit(d)?;
            Ok((stat.sup_pointwise, refrow, audit.b9_strictly_below))
        })
        .collect();
    let mut static_sup = 0.0f64;
    // the margin gate applies away from the flat endpoints
    let mut min_ratio_gated = f64::INFINITY;
    let mut b9_all = true;
    let mut csv = csv_header(
        "kasner-scan",
        "d,a,b,c_exp,lambda_sq,margin,margin_over_lambda_sq,static_sup",
    );
    for (i, r) in per_d.into_iter().enumerate() {
        let (stat, refrow, b9) = r?;
        static_sup = static_sup.max(stat);
        if (0.05..=0.95).contains(&ds[i]) {
            min_ratio_gated = min_ratio_gated.min(refrow.ratio);
        }
        b9_all &= b9;
        let (a, b, c) = kasner_exponents(ds[i])?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt17(ds[i]),
            fmt17(a),
            fmt17(b),
            fmt17(c),
            fmt17(refrow.lambda_sq),
            fmt17(refrow.margin),
            fmt17(refrow.ratio),
            fmt17(stat)
        );
    }
    rows.push(CheckRow::at_most(
        "static_control_sup",
        "vacuum-positive-control",
        static_sup,
        1e-7,
    ));
    rows.push(CheckRow::at_least(
        "refutation_margin_ratio_min",
        "non-solution-margin",
        min_ratio_gated,
        1e-3,
    ));
    rows.push(CheckRow::near(
        "b9_scan_below",
        "final-inequality-scan",
        b9_all as i32 as f64,
        1.0,
        0.0,
    ));

    Ok(CommandOutput {
        csv: vec![
            ("kasner-scan".into(), csv),
            ("kasner-scan-checks".into(), rows_to_csv("kasner-scan-checks", &rows)),
        ],
        rows,
    })
}

pub fn run_audit(cfg: &RunConfig) -> Result<CommandOutput> {
    let ds = cfg.d_grid.points()?;
    let mut csv = csv_header(
        "audit-b8",
        "d,lhs_b8_printed,lhs_b8_repaired,rhs_b8_read0,rhs_b8_read1,lhs_b9,rhs_b9,b9_strictly_below",
    );
    let mut all_below = true;
    for &d in &ds {
        let row = b8_b9_audit(d)?;
        all_below &= row.b9_strictly_below;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt17(d),
            fmt17(row.lhs_b8[0]),
            fmt17(row.lhs_b8[1]),
            fmt17(row.rhs_b8[0]),
            fmt17(row.rhs_b8[1]),
            fmt17(row.lhs_b9),
            fmt17(row.rhs_b9),
            row.b9_strictly_below
        );
    }
    let rows = vec![CheckRow::near(
        "b9_audit_scan_below",
        "final-inequality-scan",
        all_below as i32 as f64,
        1.0,
        0.0,
    )];
    Ok(CommandOutput {
        csv: vec![
            ("audit-b8".into(), csv),
            ("audit-b8-checks".into(), rows_to_csv("audit-b8-checks", &rows)),
        ],
        rows,
    })
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

/// Run the configured command; write CSV outputs and `report.json` under
/// `out_dir` if given. Exit-code mapping is the caller's job (see the
/// binary): pass -> 0, any failing row -> 1, config errors -> 2, numeric
/// errors -> 3.
pub fn run(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunReport> {
    let start = std::time::Instant::now();
    let commands: Vec<Command> = match cfg.command {
        Command::All => vec![
            Command::Curvature,
            Command::Functional,
            Command::ModelScan,
            Command::SchwarzschildVerify,
            Command::KasnerScan,
            Command::AuditB8,
        ],
        c => vec![c],
    };
    let mut all_rows = Vec::new();
    let mut outputs = Vec::new();
    for c in commands {
        let out = match c {
            Command::Curvature => run_curvature(cfg)?,
            Command::Functional => run_functional(cfg)?,
            Command::ModelScan => run_model_scan(cfg)?,
            Command::SchwarzschildVerify => run_schwarzschild(cfg)?,
            Command::KasnerScan => run_kasner(cfg)?,
            Command::AuditB8 => run_audit(cfg)?,
            Command::All => unreachable!(),
        };
        for (name, text) in &out.csv {
            outputs.push((name.clone(), text.clone()));
        }
        all_rows.extend(out.rows);
    }
    let overall_pass = all_rows.iter().all(|r| r.pass);
    let report = RunReport {
        version: VERSION.to_string(),
        command: cfg.command.name().to_string(),
        rows: all_rows,
        overall_pass,
        wall_ms: start.elapsed().as_millis(),
        config: cfg.clone(),
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Input(format!("cannot create out dir: {e}")))?;
        for (name, text) in &outputs {
            std::fs::write(dir.join(format!("{name}.csv")), text)
                .map_err(|e| Error::Input(format!("cannot write csv: {e}")))?;
        }
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(dir.join("report.json"), json)
            .map_err(|e| Error::Input(format!("cannot write report: {e}")))?;
    }
    Ok(report)
}
