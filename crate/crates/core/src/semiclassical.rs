//! Semi-classical approximations: continuum spectrum with an optional
//! first-order finite-size term `c = (3/2)(ω̃/ω̄)τ` and an optional explicit
//! ground state.
//!
//! ```text
//! N(x)   = [g₃(x) + c g₂(x)] / τ³                  (+ N₀ for SC)
//! ρ(r)   = [g_{3/2}(y) + c g_{1/2}(y)] / λ³          (+ N₀ π^{-3/2} e^{-r²} for SC)
//! y      = x + τ r²/2
//! ```
//!
//! Integrating `d` axes multiplies by `(2π/τ)^{d/2}` and raises both Bose orders by `d/2`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::exact::LSumControl;
use crate::special::{bose_g_x, zeta, BoseOrder};
use crate::thermo::{self, tau_critical, Fugacity, ModelKind, Tau, TrapSpec};

/// A semi-classical model together with its trap anisotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScVariant {
    model: ModelKind,
    aniso_ratio: f64,
}

impl ScVariant {
    pub fn new(model: ModelKind, aniso_ratio: f64) -> Result<Self> {
        if model == ModelKind::Ex {
            return domain("the exact model is not a semi-classical variant");
        }
        if !(aniso_ratio.is_finite() && aniso_ratio >= 1.0) {
            return domain(format!("anisotropy ratio must be >= 1, got {aniso_ratio}"));
        }
        Ok(ScVariant { model, aniso_ratio })
    }

    pub fn isotropic(model: ModelKind) -> Result<Self> {
        Self::new(model, 1.0)
    }

    pub fn model(self) -> ModelKind {
        self.model
    }

    pub fn aniso_ratio(self) -> f64 {
        self.aniso_ratio
    }

    /// Coefficient `c` of the finite-size Bose function.
    pub fn finite_size_coefficient(self, tau: Tau) -> f64 {
        match self.model {
            ModelKind::ScInf => 0.0,
            _ => 1.5 * self.aniso_ratio * tau.value(),
        }
    }
}

fn order(twice_nu: u8) -> BoseOrder {
    BoseOrder::from_nu(f64::from(twice_nu) / 2.0).expect("Bose order within the supported range")
}

fn bose_pair(variant: ScVariant, x: f64, tau: Tau, twice_nu: u8) -> Result<f64> {
    let c = variant.finite_size_coefficient(tau);
    let main = bose_g_x(order(twice_nu), x)?;
    if c == 0.0 {
        return Ok(main);
    }
    Ok(main + c * bose_g_x(order(twice_nu - 2), x)?)
}

/// Excited-state (continuum) population.
pub fn excited_population_sc(variant: ScVariant, fugacity: Fugacity, tau: Tau) -> Result<f64> {
    Ok(bose_pair(variant, fugacity.x(), tau, 6)? / tau.value().powi(3))
}

/// Total atom number, including `z/(1-z)` for SC.
pub fn population_sc(variant: ScVariant, fugacity: Fugacity, tau: Tau) -> Result<f64> {
    let excited = excited_population_sc(variant, fugacity, tau)?;
    if variant.model.has_ground_state() {
        if fugacity.is_saturated() {
            return domain("the SC ground-state population diverges at z = 1");
        }
        return Ok(excited + fugacity.ground_population());
    }
    Ok(excited)
}

/// `[ζ(3) + c ζ(2)] / τ³`, the left side of the semi-classical `T*` condition.
pub fn saturated_excited_sc(variant: ScVariant, tau: Tau) -> f64 {
    let z3 = zeta(BoseOrder::Three).expect("zeta(3)");
    let z2 = zeta(BoseOrder::Two).expect("zeta(2)");
    (z3 + variant.finite_size_coefficient(tau) * z2) / tau.value().powi(3)
}

/// Ground and excited parts of the density integrated over `dims` axes, at
/// distance `s` in the remaining dimensions.
///
/// The ground part is `N₀ π^{(d-3)/2} e^{-s²}` and vanishes for SC0/SCINF,
/// which carry no ground-state density.
pub fn column_components_sc(variant: ScVariant, fugacity: Fugacity, tau: Tau, dims: u8, s: f64) -> Result<(f64, f64)> {
    if dims > 3 {
        return domain(format!("can integrate over at most 3 axes, got {dims}"));
    }
    if !(s.is_finite() && s >= 0.0) {
        return domain(format!("radius must be finite and non-negative, got {s}"));
    }
    let t = tau.value();
    let s2 = if dims == 3 { 0.0 } else { s * s };
    let y = fugacity.x() + 0.5 * t * s2;
    let half_d = f64::from(dims) / 2.0;
    let scale = (2.0 * PI / t).powf(half_d) / tau.lambda_cubed();
    let excited = scale * bose_pair(variant, y, tau, 3 + dims)?;
    let ground = if variant.model.has_ground_state() {
        if fugacity.is_saturated() {
            return domain("the SC ground-state density diverges at z = 1");
        }
        PI.powf(half_d - 1.5) * fugacity.ground_population() * (-s2).exp()
    } else {
        0.0
    };
    Ok((ground, excited))
}

pub fn column_density_sc(variant: ScVariant, fugacity: Fugacity, tau: Tau, dims: u8, s: f64) -> Result<f64> {
    let (ground, excited) = column_components_sc(variant, fugacity, tau, dims, s)?;
    Ok(ground + excited)
}

/// 3D density. SC0 at `z = 1` diverges at the origin and is refused there.
pub fn density_sc(variant: ScVariant, fugacity: Fugacity, tau: Tau, r: f64) -> Result<f64> {
    column_density_sc(variant, fugacity, tau, 0, r)
}

/// Condensate fraction `N₀/N` at `(N, τ)`.
///
/// SCINF and SC0 follow the saturation formulas `1 - (T/T_c)³` and its
/// finite-size analogue below their `T*` and are 0 above; SC comes from the
/// solved fugacity.
pub fn condensate_fraction_sc(variant: ScVariant, atoms: f64, tau: Tau) -> Result<f64> {
    if !(atoms.is_finite() && atoms >= 2.0) {
        return domain(format!("condensate fraction needs N >= 2, got {atoms}"));
    }
    if variant.model.has_ground_state() {
        let state = thermo::solve_fugacity_for_ratio(variant.model, atoms, tau, variant.aniso_ratio, &LSumControl::default())?;
        return Ok(state.condensate_fraction());
    }
    Ok((1.0 - saturated_excited_sc(variant, tau) / atoms).max(0.0))
}

/// Closed-form large-`N` results for the isotropic SC model at threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighNAsymptotics {
    /// `(ζ(3)/N)^{1/3}`.
    pub tau_c: f64,
    /// Solution of the SC saturation equation.
    pub tau_sc: f64,
    /// `τ_c^{3/2}/√ζ(2)`.
    pub x_star_first_order: f64,
    /// `τ_sc^{3/2}/√ζ(2) · (1 + 9/(8ζ(2)) τ_sc ln τ_sc)`.
    pub x_star_second_order: f64,
    /// `ζ(3/2) + 2√(2ζ(2))`, the peak phase-space density at threshold as `N → ∞`.
    pub degeneracy_limit: f64,
    /// `2√(2ζ(2)) / degeneracy_limit`, the ground-state share of that peak.
    pub ground_share_limit: f64,
}

pub fn high_n_asymptotics(atoms: f64) -> Result<HighNAsymptotics> {
    if !(atoms.is_finite() && atoms >= 10.0) {
        return domain(format!("large-N formulas need N >= 10, got {atoms}"));
    }
    let z2 = zeta(BoseOrder::Two)?;
    let z32 = zeta(BoseOrder::ThreeHalves)?;
    let tau_c = tau_critical(atoms);
    let tau_sc = thermo::transition_temperature(ModelKind::Sc, atoms, &TrapSpec::isotropic())?.value();
    let ground = 2.0 * (2.0 * z2).sqrt();
    Ok(HighNAsymptotics {
        tau_c,
        tau_sc,
        x_star_first_order: tau_c.powf(1.5) / z2.sqrt(),
        x_star_second_order: tau_sc.powf(1.5) / z2.sqrt() * (1.0 + 9.0 / (8.0 * z2) * tau_sc * tau_sc.ln()),
        degeneracy_limit: z32 + ground,
        ground_share_limit: ground / (z32 + ground),
    })
}
