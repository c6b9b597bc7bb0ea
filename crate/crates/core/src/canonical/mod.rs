//! Closed-form canonical solutions and refutations: the Schwarzschild
//! metric as the spherically symmetric Zs2 solution (with its potential,
//! masses and asymptotics) and the Kasner family as the torus-symmetric
//! non-solution.

pub mod kasner;
pub mod schwarzschild;

pub use kasner::{
    b8_b9_audit, kasner_exponents, kasner_metric, kasner_ricci, kasner_static_check,
    kasner_zs2_refutation, AuditRow, KasnerRicci, KasnerSolution, RefutationRow,
};
pub use schwarzschild::{
    asymptotic_flatness_fit, mass_flux, mass_identity_check, schwarzschild_profile,
    schwarzschild_tau, tau_617_verbatim, verify_schwarzschild_zs2, AsymptoticFit, MassFlux,
    MassIdentity, SchwarzschildSolution,
};
