//! Trap geometry, reduced units, the resolved gas state and the two nonlinear
//! solvers every model shares: fugacity at fixed `(N, T)` and transition
//! temperature at fixed `N`.
//!
//! Units: energies in `ħω`, temperatures in `ħω/k_B`, lengths in the
//! ground-state size `σ = sqrt(ħ/mω)`, densities in `σ⁻³`. For an anisotropic
//! trap `ω` is the geometric mean `ω̄`.
//!
//! The fugacity is always `z = exp(β(μ - ε₀))`, for every model, so `0 < z < 1`
//! and the ground-state population is exactly `z/(1-z)`. It is stored as
//! `x = -ln z` because near saturation `x ~ 1e-6` and `z` itself carries no
//! usable digits of `N₀ ≈ 1/x`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::exact::{self, LSumControl};
use crate::roots::solve_monotone_root;
use crate::semiclassical::{self, ScVariant};
use crate::special::{zeta, BoseOrder};

/// Which equation set evaluates populations and densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Exact grand-canonical l-sums.
    Ex,
    /// Semi-classical with the first-order finite-size term and the ground state.
    Sc,
    /// Semi-classical with the finite-size term, no ground state.
    Sc0,
    /// Thermodynamic limit: continuum spectrum, no ground state.
    ScInf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Ex, ModelKind::Sc, ModelKind::Sc0, ModelKind::ScInf];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Ex => "ex",
            ModelKind::Sc => "sc",
            ModelKind::Sc0 => "sc0",
            ModelKind::ScInf => "scinf",
        }
    }

    /// Whether the model carries an explicit `z/(1-z)` ground-state term.
    pub fn has_ground_state(self) -> bool {
        matches!(self, ModelKind::Ex | ModelKind::Sc)
    }

    pub fn is_semiclassical(self) -> bool {
        self != ModelKind::Ex
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex" => Ok(ModelKind::Ex),
            "sc" => Ok(ModelKind::Sc),
            "sc0" => Ok(ModelKind::Sc0),
            "scinf" => Ok(ModelKind::ScInf),
            other => domain(format!("unknown model '{other}' (expected ex, sc, sc0 or scinf)")),
        }
    }
}

/// Harmonic trap. Only frequency ratios matter in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    pub omega: f64,
    pub anisotropy: Option<[f64; 3]>,
}

impl TrapSpec {
    pub fn isotropic() -> Self {
        TrapSpec { omega: 1.0, anisotropy: None }
    }

    pub fn anisotropic(frequencies: [f64; 3]) -> Result<Self> {
        if frequencies.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return domain(format!("trap frequencies must be positive, got {frequencies:?}"));
        }
        let omega = (frequencies[0] * frequencies[1] * frequencies[2]).cbrt();
        Ok(TrapSpec { omega, anisotropy: Some(frequencies) })
    }

    /// Geometric mean `ω̄`.
    pub fn geometric_mean(&self) -> f64 {
        match self.anisotropy {
            Some(w) => (w[0] * w[1] * w[2]).cbrt(),
            None => self.omega,
        }
    }

    /// Arithmetic mean `ω̃`.
    pub fn arithmetic_mean(&self) -> f64 {
        match self.anisotropy {
            Some(w) => (w[0] + w[1] + w[2]) / 3.0,
            None => self.omega,
        }
    }

    /// `ω̃/ω̄ >= 1`; scales the semi-classical finite-size term.
    pub fn aniso_ratio(&self) -> f64 {
        match self.anisotropy {
            Some([a, b, c]) if a == b && b == c => 1.0,
            Some(_) => (self.arithmetic_mean() / self.geometric_mean()).max(1.0),
            None => 1.0,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.aniso_ratio() == 1.0
    }
}

impl Default for TrapSpec {
    fn default() -> Self {
        Self::isotropic()
    }
}

/// `τ = ħω/k_BT`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tau(f64);

impl Tau {
    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 {
            Ok(Tau(tau))
        } else {
            domain(format!("tau must be positive and finite, got {tau}"))
        }
    }

    /// From a temperature in units of `ħω/k_B`.
    pub fn from_temperature(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Tau::new(1.0 / t)
        } else {
            domain(format!("temperature must be positive and finite, got {t}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Temperature in units of `ħω/k_B`.
    pub fn temperature(self) -> f64 {
        1.0 / self.0
    }

    /// Thermal de Broglie wavelength in units of `σ`.
    pub fn lambda(self) -> f64 {
        (2.0 * std::f64::consts::PI * self.0).sqrt()
    }

    /// `λ³/σ³ = (2πτ)^{3/2}`.
    pub fn lambda_cubed(self) -> f64 {
        (2.0 * std::f64::consts::PI * self.0).powf(1.5)
    }
}

/// Fugacity `z = exp(-x)`, stored through `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fugacity {
    x: f64,
}

impl Fugacity {
    pub fn from_x(x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 || x.is_infinite() {
            return domain(format!("x = -ln z must be finite and >= 0, got {x}"));
        }
        Ok(Fugacity { x })
    }

    pub fn from_z(z: f64) -> Result<Self> {
        if !(z > 0.0 && z <= 1.0) {
            return domain(format!("fugacity must lie in (0, 1], got {z}"));
        }
        Fugacity::from_x(-z.ln())
    }

    /// `z = 1`, the saturation point of the excited states.
    pub fn saturated() -> Self {
        Fugacity { x: 0.0 }
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn z(self) -> f64 {
        (-self.x).exp()
    }

    pub fn is_saturated(self) -> bool {
        self.x == 0.0
    }

    /// `z/(1-z)`; infinite at saturation.
    pub fn ground_population(self) -> f64 {
        1.0 / self.x.exp_m1()
    }

    /// Occupation of one single-particle state `n` quanta above the ground state.
    pub fn occupation(self, tau: Tau, n: f64) -> f64 {
        1.0 / (self.x + tau.value() * n).exp_m1()
    }
}

/// A solved thermodynamic point of one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub model: ModelKind,
    pub atoms: f64,
    pub tau: Tau,
    pub fugacity: Fugacity,
    /// Ground-state population `N₀`.
    pub ground: f64,
    /// `true` when a model without a ground-state term sits below its `T*`:
    /// `z` is pinned to 1 and `N₀` comes from the condensate-fraction formula.
    pub condensed: bool,
    pub aniso_ratio: f64,
    pub control: LSumControl,
}

impl GasState {
    pub fn z(&self) -> f64 {
        self.fugacity.z()
    }

    pub fn condensate_fraction(&self) -> f64 {
        self.ground / self.atoms
    }

    pub fn temperature(&self) -> f64 {
        self.tau.temperature()
    }
}

fn model_ratio(model: ModelKind, trap: &TrapSpec) -> Result<f64> {
    let ratio = trap.aniso_ratio();
    if model == ModelKind::Ex && ratio != 1.0 {
        return domain("the exact model is only available for an isotropic trap");
    }
    Ok(ratio)
}

fn check_atoms(atoms: f64) -> Result<()> {
    if atoms.is_finite() && atoms > 0.0 {
        Ok(())
    } else {
        domain(format!("atom number must be positive and finite, got {atoms}"))
    }
}

/// Total atom number (ground state included where the model has one).
pub fn population_total(
    model: ModelKind,
    fugacity: Fugacity,
    tau: Tau,
    aniso_ratio: f64,
    control: &LSumControl,
) -> Result<f64> {
    match model {
        ModelKind::Ex => {
            if aniso_ratio != 1.0 {
                return domain("the exact model is only available for an isotropic trap");
            }
            exact::population_ex(fugacity, tau, control)
        }
        m => semiclassical::population_sc(ScVariant::new(m, aniso_ratio)?, fugacity, tau),
    }
}

/// Excited-state population at saturation (`μ = ε₀`), the left side of the `T*` condition.
pub fn saturated_excited(model: ModelKind, tau: Tau, aniso_ratio: f64, control: &LSumControl) -> Result<f64> {
    match model {
        ModelKind::Ex => exact::saturated_excited_ex(tau, control),
        m => Ok(semiclassical::saturated_excited_sc(ScVariant::new(m, aniso_ratio)?, tau)),
    }
}

/// `τ_c = (ζ(3)/N)^{1/3}`, the thermodynamic-limit critical point.
pub fn tau_critical(atoms: f64) -> f64 {
    (zeta(BoseOrder::Three).expect("zeta(3)") / atoms).cbrt()
}

/// Solves the model's number equation for the fugacity at fixed `N` and `τ`.
pub fn solve_fugacity(model: ModelKind, atoms: f64, tau: Tau, trap: &TrapSpec) -> Result<GasState> {
    solve_fugacity_with(model, atoms, tau, trap, &LSumControl::default())
}

pub fn solve_fugacity_with(
    model: ModelKind,
    atoms: f64,
    tau: Tau,
    trap: &TrapSpec,
    control: &LSumControl,
) -> Result<GasState> {
    let ratio = model_ratio(model, trap)?;
    solve_fugacity_for_ratio(model, atoms, tau, ratio, control)
}

/// Fugacity solve with the finite-size scaling `ω̃/ω̄` given directly.
pub(crate) fn solve_fugacity_for_ratio(
    model: ModelKind,
    atoms: f64,
    tau: Tau,
    ratio: f64,
    control: &LSumControl,
) -> Result<GasState> {
    check_atoms(atoms)?;
    let state = |fugacity: Fugacity, ground: f64, condensed: bool| GasState {
        model,
        atoms,
        tau,
        fugacity,
        ground,
        condensed,
        aniso_ratio: ratio,
        control: *control,
    };

    if !model.has_ground_state() {
        let saturated = saturated_excited(model, tau, ratio, control)?;
        if atoms >= saturated {
            return Ok(state(Fugacity::saturated(), atoms - saturated, true));
        }
    }

    let mut failure = None;
    let target = atoms.ln();
    let residual = |u: f64| {
        let pop = Fugacity::from_x(u.exp()).and_then(|f| population_total(model, f, tau, ratio, control));
        match pop {
            Ok(n) => n.ln() - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let root = solve_monotone_root(residual, -12.0, 0.0);
    if let Some(e) = failure {
        return Err(e);
    }
    let fugacity = Fugacity::from_x(root?.exp())?;
    let ground = if model.has_ground_state() { fugacity.ground_population() } else { 0.0 };
    Ok(state(fugacity, ground, false))
}

/// Transition temperature `τ*`: the excited states saturate exactly at `N`.
pub fn transition_temperature(model: ModelKind, atoms: f64, trap: &TrapSpec) -> Result<Tau> {
    transition_temperature_with(model, atoms, trap, &LSumControl::default())
}

pub fn transition_temperature_with(
    model: ModelKind,
    atoms: f64,
    trap: &TrapSpec,
    control: &LSumControl,
) -> Result<Tau> {
    check_atoms(atoms)?;
    if atoms < 2.0 {
        return domain(format!("transition temperature needs N >= 2, got {atoms}"));
    }
    let ratio = model_ratio(model, trap)?;
    // SC and SC0 share one saturation equation; route both through the same closure
    let model = if model == ModelKind::Sc0 { ModelKind::Sc } else { model };
    let tau_c = tau_critical(atoms);
    let target = atoms.ln();
    let mut failure = None;
    let residual = |v: f64| match Tau::new(v.exp()).and_then(|t| saturated_excited(model, t, ratio, control)) {
        Ok(n) => n.ln() - target,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = solve_monotone_root(residual, (tau_c / 4.0).ln(), (4.0 * tau_c).ln());
    if let Some(e) = failure {
        return Err(e);
    }
    Tau::new(root?.exp())
}

/// The state at the model's own transition temperature.
///
/// Models without a ground-state term sit exactly at `z = 1` with `N₀ = 0`.
pub fn threshold_state(model: ModelKind, atoms: f64, trap: &TrapSpec) -> Result<GasState> {
    threshold_state_with(model, atoms, trap, &LSumControl::default())
}

pub fn threshold_state_with(
    model: ModelKind,
    atoms: f64,
    trap: &TrapSpec,
    control: &LSumControl,
) -> Result<GasState> {
    let tau = transition_temperature_with(model, atoms, trap, control)?;
    if model.has_ground_state() {
        return solve_fugacity_with(model, atoms, tau, trap, control);
    }
    Ok(GasState {
        model,
        atoms,
        tau,
        fugacity: Fugacity::saturated(),
        ground: 0.0,
        condensed: false,
        aniso_ratio: trap.aniso_ratio(),
        control: *control,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso() -> TrapSpec {
        TrapSpec::isotropic()
    }

    #[test]
    fn model_labels_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(m.label().parse::<ModelKind>().unwrap(), m);
        }
        assert!("foo".parse::<ModelKind>().is_err());
    }

    #[test]
    fn trap_means() {
        let t = TrapSpec::anisotropic([1.0, 2.0, 4.0]).unwrap();
        assert!((t.geometric_mean() - 2.0).abs() < 1e-15);
        assert!((t.arithmetic_mean() - 7.0 / 3.0).abs() < 1e-15);
        assert!(t.aniso_ratio() > 1.0);
        assert_eq!(TrapSpec::anisotropic([3.0, 3.0, 3.0]).unwrap().aniso_ratio(), 1.0);
        assert!(TrapSpec::anisotropic([1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn reduced_units() {
        let t = Tau::from_temperature(4.0).unwrap();
        assert_eq!(t.value(), 0.25);
        let pi = std::f64::consts::PI;
        assert!((t.lambda_cubed() - (pi / 2.0).powf(1.5)).abs() < 1e-15);
        assert!(Tau::new(0.0).is_err());
        assert!(Tau::new(f64::NAN).is_err());
    }

    #[test]
    fn fugacity_round_trip() {
        let f = Fugacity::from_z(0.5).unwrap();
        assert!((f.z() - 0.5).abs() < 1e-16);
        assert!((f.ground_population() - 1.0).abs() < 1e-15);
        assert!(Fugacity::from_z(1.5).is_err());
        assert!(Fugacity::from_z(0.0).is_err());
        assert!(Fugacity::saturated().is_saturated());
    }

    #[test]
    fn exact_inversion_recovers_fugacity() {
        let tau = Tau::new(1.0).unwrap();
        let ctl = LSumControl::default();
        let n = population_total(ModelKind::Ex, Fugacity::from_z(0.5).unwrap(), tau, 1.0, &ctl).unwrap();
        let s = solve_fugacity(ModelKind::Ex, n, tau, &iso()).unwrap();
        assert!((s.z() - 0.5).abs() < 1e-10, "{}", s.z());
    }

    #[test]
    fn scinf_closed_form_transition() {
        for n in [1e3, 1e6] {
            let t = transition_temperature(ModelKind::ScInf, n, &iso()).unwrap();
            let closed = tau_critical(n);
            assert!(((t.value() - closed) / closed).abs() < 1e-11);
        }
    }

    #[test]
    fn sc_and_sc0_share_transition_bitwise() {
        for n in [10.0, 1e3, 1e5] {
            let a = transition_temperature(ModelKind::Sc, n, &iso()).unwrap();
            let b = transition_temperature(ModelKind::Sc0, n, &iso()).unwrap();
            assert_eq!(a.value().to_bits(), b.value().to_bits());
        }
    }

    #[test]
    fn exact_rejects_anisotropy() {
        let trap = TrapSpec::anisotropic([1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(transition_temperature(ModelKind::Ex, 1e4, &trap), Err(Error::Domain(_))));
        let tau = Tau::new(0.1).unwrap();
        assert!(matches!(solve_fugacity(ModelKind::Ex, 1e4, tau, &trap), Err(Error::Domain(_))));
        assert!(transition_temperature(ModelKind::Sc, 1e4, &trap).is_ok());
    }

    #[test]
    fn isotropic_triple_matches_isotropic_path() {
        let trap = TrapSpec::anisotropic([2.0, 2.0, 2.0]).unwrap();
        for m in ModelKind::ALL {
            let a = transition_temperature(m, 1e4, &trap).unwrap();
            let b = transition_temperature(m, 1e4, &iso()).unwrap();
            assert_eq!(a.value().to_bits(), b.value().to_bits(), "{m}");
        }
    }

    #[test]
    fn small_atom_numbers_rejected() {
        assert!(transition_temperature(ModelKind::Ex, 1.5, &iso()).is_err());
        assert!(solve_fugacity(ModelKind::Ex, -1.0, Tau::new(1.0).unwrap(), &iso()).is_err());
    }

    #[test]
    fn saturated_models_condense_below_threshold() {
        let n = 1e4;
        let t = transition_temperature(ModelKind::Sc0, n, &iso()).unwrap();
        let colder = Tau::new(t.value() * 1.25).unwrap();
        let s = solve_fugacity(ModelKind::Sc0, n, colder, &iso()).unwrap();
        assert!(s.condensed && s.fugacity.is_saturated());
        assert!(s.ground > 0.0);
        let hotter = Tau::new(t.value() / 1.2).unwrap();
        let s = solve_fugacity(ModelKind::Sc0, n, hotter, &iso()).unwrap();
        assert!(!s.condensed && s.z() < 1.0 && s.ground == 0.0);
    }

    #[test]
    fn scinf_at_rounded_tc_is_at_the_boundary() {
        // T_c(1e6) = 94.04990, so T = 94.05 is a hair above it
        let s = solve_fugacity(ModelKind::ScInf, 1e6, Tau::from_temperature(94.05).unwrap(), &iso()).unwrap();
        assert!(!s.condensed);
        assert!(s.z() > 1.0 - 1e-5);
        let s = solve_fugacity(ModelKind::ScInf, 1e6, Tau::from_temperature(94.0).unwrap(), &iso()).unwrap();
        assert!(s.condensed && s.z() == 1.0);
    }
}
