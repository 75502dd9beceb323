//! Quantities derived from a solved [`GasState`]: density profiles split into
//! ground / first-excited / remaining excited states, peak phase-space density,
//! the central dip of the excited-state density, ground-state shares of column
//! densities and density moments.
//!
//! For an anisotropic trap all radii are in scaled coordinates
//! `u_i = x_i sqrt(ω_i/ω̄)`, in which every semi-classical density is spherical.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::exact;
use crate::quadrature::integrate;
use crate::semiclassical::{self, ScVariant};
use crate::thermo::{GasState, ModelKind};

/// Sampled density with its decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    /// Radii (or transverse distances for column densities) in `σ`.
    pub grid: Vec<f64>,
    pub total: Vec<f64>,
    pub ground: Vec<f64>,
    /// Zero for the semi-classical models, which have no discrete levels.
    pub first_excited: Vec<f64>,
    pub other_excited: Vec<f64>,
    /// Number of integrated axes: 0 for the 3D density.
    pub dims: u8,
    pub state: GasState,
}

fn check_density_defined(state: &GasState) -> Result<()> {
    if state.condensed && state.ground > 0.0 {
        return domain(format!(
            "model {} has no condensate density below its transition temperature",
            state.model
        ));
    }
    Ok(())
}

/// `(ground, all excited)` at distance `s` after integrating `dims` axes.
fn components(state: &GasState, dims: u8, s: f64) -> Result<(f64, f64)> {
    check_density_defined(state)?;
    match state.model {
        ModelKind::Ex => exact::column_components_ex(state.fugacity, state.tau, dims, s, &state.control),
        m => semiclassical::column_components_sc(ScVariant::new(m, state.aniso_ratio)?, state.fugacity, state.tau, dims, s),
    }
}

/// Total density (3D for `dims = 0`) at distance `s`.
pub fn density(state: &GasState, dims: u8, s: f64) -> Result<f64> {
    let (g, e) = components(state, dims, s)?;
    Ok(g + e)
}

/// Density of the three degenerate first-excited orbitals,
/// `N₁/3 · Σ_i |ψ_{1,i}|²`, integrated over `dims` axes.
///
/// In 3D this is `n₁ 2 r² e^{-r²} π^{-3/2}` with `n₁` the per-state occupation;
/// each integrated axis contributes `√π` and adds `1/2` to the radial factor.
/// Zero for the semi-classical models.
pub fn first_excited_density(state: &GasState, dims: u8, s: f64) -> Result<f64> {
    if dims > 3 {
        return domain(format!("can integrate over at most 3 axes, got {dims}"));
    }
    if state.model != ModelKind::Ex {
        return Ok(0.0);
    }
    let s2 = if dims == 3 { 0.0 } else { s * s };
    let half_d = f64::from(dims) / 2.0;
    let occupation = state.fugacity.occupation(state.tau, 1.0);
    Ok(occupation * 2.0 * PI.powf(half_d - 1.5) * (s2 + half_d) * (-s2).exp())
}

/// Samples the decomposed density on `grid` (non-negative, ascending).
pub fn profile(state: &GasState, grid: &[f64], dims: u8) -> Result<DensityProfile> {
    if dims > 2 {
        return domain(format!("profiles integrate at most 2 axes, got {dims}"));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("profile grid must be finite, non-negative and ascending");
    }
    check_density_defined(state)?;
    let mut out = DensityProfile {
        grid: grid.to_vec(),
        total: Vec::with_capacity(grid.len()),
        ground: Vec::with_capacity(grid.len()),
        first_excited: Vec::with_capacity(grid.len()),
        other_excited: Vec::with_capacity(grid.len()),
        dims,
        state: *state,
    };
    for &r in grid {
        let (g, e) = components(state, dims, r)?;
        let first = first_excited_density(state, dims, r)?.min(e);
        out.total.push(g + e);
        out.ground.push(g);
        out.first_excited.push(first);
        out.other_excited.push(e - first);
    }
    Ok(out)
}

/// Peak-density summary of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub rho_total_peak: f64,
    pub rho0_peak: f64,
    /// `ρ(0) λ³`.
    pub degeneracy_parameter: f64,
    /// `N₀/N`.
    pub condensate_fraction: f64,
    /// `ρ₀(0)/ρ(0)`.
    pub peak_fraction: f64,
}

pub fn peak_report(state: &GasState) -> Result<PeakReport> {
    let (ground, excited) = components(state, 0, 0.0)?;
    let total = ground + excited;
    Ok(PeakReport {
        rho_total_peak: total,
        rho0_peak: ground,
        degeneracy_parameter: total * state.tau.lambda_cubed(),
        condensate_fraction: state.condensate_fraction(),
        peak_fraction: ground / total,
    })
}

/// Central dip of the excited-state density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    /// `max_r ρ_exc(r) - ρ_exc(0)`.
    pub height: f64,
    /// Radius of the maximum.
    pub radius: f64,
    /// First-excited density at that radius; it vanishes at the origin, so this
    /// is its share of the rise.
    pub first_excited_rise: f64,
}

/// Grid used to locate the excited-state maximum before refinement.
const DIP_SCAN_RADIUS: f64 = 6.0;
const DIP_SCAN_POINTS: usize = 301;

/// Locates the maximum of the 3D excited-state density near the origin.
///
/// Semi-classical excited densities decrease monotonically, giving a zero-height dip.
pub fn dip(state: &GasState) -> Result<Dip> {
    let excited = |r: f64| components(state, 0, r).map(|(_, e)| e);
    let at_origin = excited(0.0)?;
    let step = DIP_SCAN_RADIUS / (DIP_SCAN_POINTS - 1) as f64;
    let mut best = (0usize, at_origin);
    for i in 1..DIP_SCAN_POINTS {
        let v = excited(i as f64 * step)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 {
        return Ok(Dip { height: 0.0, radius: 0.0, first_excited_rise: 0.0 });
    }

    // golden-section refinement inside the neighbouring grid cells
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.0 as f64 - 1.0) * step, (best.0 as f64 + 1.0) * step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (excited(c)?, excited(d)?);
    while b - a > 1e-9 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = excited(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = excited(d)?;
        }
    }
    let radius = 0.5 * (a + b);
    let peak = excited(radius)?.max(best.1);
    Ok(Dip {
        height: peak - at_origin,
        radius,
        first_excited_rise: first_excited_density(state, 0, radius)?,
    })
}

pub fn dip_height(state: &GasState) -> Result<f64> {
    dip(state).map(|d| d.height)
}

/// Ground-state share of the central density after integrating `dims` axes
/// (0 gives the 3D peak share).
pub fn integrated_peak_fraction(state: &GasState, dims: u8) -> Result<f64> {
    if !state.model.has_ground_state() {
        return domain(format!("model {} has no ground-state density", state.model));
    }
    if dims > 2 {
        return domain(format!("peak fractions integrate at most 2 axes, got {dims}"));
    }
    let (g, e) = components(state, dims, 0.0)?;
    Ok(g / (g + e))
}

/// Relative tolerance of [`density_moment`].
pub const MOMENT_REL_TOL: f64 = 1e-6;

/// `∫ ρ(r)^p d³r` over `r <= 8 max(1, 1/√τ)`: eight thermal radii, or eight
/// ground-state widths when the cloud is colder than one level spacing.
pub fn density_moment(state: &GasState, p: u32) -> Result<f64> {
    if !(2..=3).contains(&p) {
        return domain(format!("density moments are defined for p = 2 or 3, got {p}"));
    }
    check_density_defined(state)?;
    let thermal = 1.0 / state.tau.value().sqrt();
    let breakpoints = [0.5, 1.0, 2.0, 4.0, thermal, 2.0 * thermal, 4.0 * thermal];
    let failure = RefCell::new(None);
    let value = integrate(
        |r| match density(state, 0, r) {
            Ok(rho) => 4.0 * PI * r * r * rho.powi(p as i32),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        8.0 * thermal.max(1.0),
        &breakpoints,
        MOMENT_REL_TOL,
        0.0,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{solve_fugacity, threshold_state, transition_temperature, Tau, TrapSpec};

    fn iso() -> TrapSpec {
        TrapSpec::isotropic()
    }

    #[test]
    fn first_excited_column_integrates_to_population() {
        let state = solve_fugacity(ModelKind::Ex, 1e3, Tau::new(0.2).unwrap(), &iso()).unwrap();
        let n1 = 3.0 * state.fugacity.occupation(state.tau, 1.0);
        let full = first_excited_density(&state, 3, 0.0).unwrap();
        assert!((full - n1).abs() < 1e-12 * n1);
        let s0: f64 = 0.7;
        for dims in 0..2u8 {
            let integral = 2.0
                * integrate(
                    |u| first_excited_density(&state, dims, (s0 * s0 + u * u).sqrt()).unwrap(),
                    0.0,
                    12.0,
                    &[1.0],
                    1e-12,
                    0.0,
                )
                .unwrap();
            let direct = first_excited_density(&state, dims + 1, s0).unwrap();
            assert!(((integral - direct) / direct).abs() < 1e-10, "dims={dims}");
        }
    }

    #[test]
    fn first_excited_matches_eigenfunction_sum() {
        // the Hermite oracle restricted to n = 1 reproduces the closed form
        let state = solve_fugacity(ModelKind::Ex, 50.0, Tau::new(1.0).unwrap(), &iso()).unwrap();
        for r in [0.0_f64, 0.5, 1.0, 2.0] {
            let h1 = 2f64.sqrt() * r * PI.powf(-0.25) * (-0.5 * r * r).exp();
            let h0_origin = PI.powf(-0.25);
            // on the x axis only ψ_{100} is non-zero away from the origin
            let expected = state.fugacity.occupation(state.tau, 1.0) * h1 * h1 * h0_origin.powi(4);
            let got = first_excited_density(&state, 0, r).unwrap();
            assert!((got - expected).abs() < 1e-14 * (1.0 + expected), "r={r}");
        }
    }

    #[test]
    fn profile_components_add_up() {
        let state = threshold_state(ModelKind::Ex, 1e4, &iso()).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| 0.25 * f64::from(i)).collect();
        for dims in 0..=2 {
            let p = profile(&state, &grid, dims).unwrap();
            for i in 0..grid.len() {
                let sum = p.ground[i] + p.first_excited[i] + p.other_excited[i];
                assert!((sum - p.total[i]).abs() <= 1e-10 * p.total[i]);
                assert!(p.ground[i] >= 0.0 && p.first_excited[i] >= 0.0 && p.other_excited[i] >= 0.0);
            }
        }
        let p = profile(&state, &grid, 0).unwrap();
        assert_eq!(p.first_excited[0], 0.0);
    }

    #[test]
    fn profile_rejects_bad_input() {
        let state = threshold_state(ModelKind::Ex, 1e3, &iso()).unwrap();
        assert!(profile(&state, &[1.0, 0.5], 0).is_err());
        assert!(profile(&state, &[-1.0], 0).is_err());
        assert!(profile(&state, &[0.0], 3).is_err());
        let t = transition_temperature(ModelKind::ScInf, 1e3, &iso()).unwrap();
        let cold = solve_fugacity(ModelKind::ScInf, 1e3, Tau::new(t.value() * 1.2).unwrap(), &iso()).unwrap();
        assert!(profile(&cold, &[0.0, 1.0], 0).is_err());
        assert!(peak_report(&cold).is_err());
    }

    #[test]
    fn scinf_threshold_peak_is_zeta_three_halves() {
        let state = threshold_state(ModelKind::ScInf, 1e5, &iso()).unwrap();
        let report = peak_report(&state).unwrap();
        assert!((report.degeneracy_parameter - 2.612_375_348_685_488).abs() < 1e-12);
        assert_eq!(report.peak_fraction, 0.0);
        assert_eq!(dip_height(&state).unwrap(), 0.0);
    }

    #[test]
    fn exact_threshold_has_central_dip() {
        let state = threshold_state(ModelKind::Ex, 1e4, &iso()).unwrap();
        let d = dip(&state).unwrap();
        assert!(d.height > 0.0);
        assert!(d.radius > 0.3 && d.radius < 3.0, "{}", d.radius);
        assert!(d.first_excited_rise > 0.0);
        let sc = threshold_state(ModelKind::Sc, 1e4, &iso()).unwrap();
        assert_eq!(dip_height(&sc).unwrap(), 0.0);
    }

    #[test]
    fn integrated_fraction_ordering() {
        let state = threshold_state(ModelKind::Ex, 1e4, &iso()).unwrap();
        let f3 = integrated_peak_fraction(&state, 0).unwrap();
        let f2 = integrated_peak_fraction(&state, 1).unwrap();
        let f1 = integrated_peak_fraction(&state, 2).unwrap();
        assert!(f3 > f2 && f2 > f1 && f1 > 0.0);
        let scinf = threshold_state(ModelKind::ScInf, 1e4, &iso()).unwrap();
        assert!(integrated_peak_fraction(&scinf, 1).is_err());
    }

    #[test]
    fn pure_ground_state_moment() {
        // z/(1-z) = N₀ with τ large: ρ = N₀ π^{-3/2} e^{-r²}, ∫ρ² = N₀² (2π)^{-3/2}
        let tau = Tau::new(30.0).unwrap();
        let state = solve_fugacity(ModelKind::Ex, 100.0, tau, &iso()).unwrap();
        let n0 = state.ground;
        let m2 = density_moment(&state, 2).unwrap();
        let expected = n0 * n0 / (2.0 * PI).powf(1.5);
        assert!(((m2 - expected) / expected).abs() < 1e-6);
        let m3 = density_moment(&state, 3).unwrap();
        let expected3 = n0.powi(3) / (PI.powf(3.0) * 3f64.powf(1.5));
        assert!(((m3 - expected3) / expected3).abs() < 1e-6);
        assert!(density_moment(&state, 4).is_err());
    }

    #[test]
    fn scinf_threshold_second_moment_is_finite() {
        let state = threshold_state(ModelKind::ScInf, 1e4, &iso()).unwrap();
        let m2 = density_moment(&state, 2).unwrap();
        assert!(m2.is_finite() && m2 > 0.0);
    }
}
