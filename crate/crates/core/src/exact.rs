//! Exact grand-canonical sums for the ideal gas in an isotropic harmonic trap.
//!
//! With `q = e^{-τ}` and `z = e^{-x}`:
//!
//! ```text
//! N      = Σ_l z^l / (1 - q^l)^3
//! ρ(r)   = π^{-3/2} Σ_l z^l (1 - q^{2l})^{-3/2} exp(-tanh(τl/2) r²)
//! ```
//!
//! Every term tends to the ground-state term `z^l` (resp. `z^l π^{-3/2} e^{-r²}`)
//! as `l → ∞`. The ground state is therefore summed in closed form, `z/(1-z)`,
//! and only the excited remainder is summed term by term. That remainder decays
//! like `q^l` whatever `z` is, so the number of terms scales with `1/τ` and not
//! with `1/x`, which is what makes states with `x ~ 1e-8` tractable.
//!
//! Column densities integrate `d` Cartesian axes analytically: term `l` picks up
//! `(π/a_l)^{d/2}` with `a_l = tanh(τl/2)`. `d = 3` gives back the atom number
//! through `(1 - q^{2l}) tanh(τl/2) = (1 - q^l)^2`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::thermo::{Fugacity, Tau};

/// Truncation control for the l-sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LSumControl {
    /// The sum stops once a rigorous bound on the remaining tail is below
    /// `rel_tol` times the running total.
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl LSumControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1e-6) {
            return domain(format!("l-sum tolerance must lie in (0, 1e-6), got {rel_tol}"));
        }
        if max_terms < 1000 {
            return domain(format!("l-sum term cap must be at least 1000, got {max_terms}"));
        }
        Ok(LSumControl { rel_tol, max_terms })
    }
}

impl Default for LSumControl {
    fn default() -> Self {
        LSumControl { rel_tol: 1e-14, max_terms: 10_000_000 }
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sums `Σ_{l>=1} z^l term(l)` where `term(l) <= bound(q^l)` and `bound` is convex
/// with `bound(0) = 0`. Convexity gives `bound(q t) <= q bound(t)`, hence the tail
/// after `l` is at most `bound(q^{l+1}) z^{l+1} / (1 - q z)`.
///
/// `reference` is added to the running sum when judging relative convergence
/// (the closed-form ground-state part of the same quantity).
fn excited_lsum<T, B>(fugacity: Fugacity, tau: Tau, control: &LSumControl, reference: f64, term: T, bound: B) -> Result<f64>
where
    T: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let x = fugacity.x();
    let t = tau.value();
    let geometric = 1.0 / -(-(t + x)).exp_m1();
    let mut acc = Accumulator::default();
    for l in 1..=control.max_terms {
        let l = l as f64;
        acc.add((-x * l).exp() * term(l));
        let next = l + 1.0;
        let tail = bound(next) * (-x * next).exp() * geometric;
        if tail <= control.rel_tol * (acc.value() + reference) {
            return Ok(acc.value());
        }
    }
    Err(Error::Truncation { terms: control.max_terms })
}

/// `(1 - q^l)^{-3} - 1`, evaluated without cancellation.
fn population_bracket(tau: f64, l: f64) -> f64 {
    let t = (-tau * l).exp();
    let one_minus = -(-tau * l).exp_m1();
    t * (3.0 - 3.0 * t + t * t) / one_minus.powi(3)
}

/// Excited-state part of `N`, i.e. `Σ_l z^l [(1 - q^l)^{-3} - 1]`.
pub fn excited_population_ex(fugacity: Fugacity, tau: Tau, control: &LSumControl) -> Result<f64> {
    let t = tau.value();
    let reference = if fugacity.is_saturated() { 0.0 } else { fugacity.ground_population() };
    excited_lsum(
        fugacity,
        tau,
        control,
        reference,
        |l| population_bracket(t, l),
        |l| population_bracket(t, l),
    )
}

/// Saturated excited population `Σ_l [(1 - e^{-τl})^{-3} - 1]`; equals `N` at `T*_ex`.
pub fn saturated_excited_ex(tau: Tau, control: &LSumControl) -> Result<f64> {
    excited_population_ex(Fugacity::saturated(), tau, control)
}

fn require_unsaturated(fugacity: Fugacity) -> Result<()> {
    if fugacity.is_saturated() {
        domain("the exact model needs z < 1 (the ground-state population diverges at z = 1)")
    } else {
        Ok(())
    }
}

/// Total atom number `Σ_l z^l / (1 - e^{-τl})^3`.
pub fn population_ex(fugacity: Fugacity, tau: Tau, control: &LSumControl) -> Result<f64> {
    require_unsaturated(fugacity)?;
    Ok(excited_population_ex(fugacity, tau, control)? + fugacity.ground_population())
}

/// Ground-state and excited-state parts of a density integrated over `dims`
/// Cartesian axes, at distance `s` (in `σ`) from the trap centre in the
/// remaining `3 - dims` dimensions. `dims = 0` is the 3D density, `dims = 3`
/// the atom number.
pub fn column_components_ex(
    fugacity: Fugacity,
    tau: Tau,
    dims: u8,
    s: f64,
    control: &LSumControl,
) -> Result<(f64, f64)> {
    require_unsaturated(fugacity)?;
    if dims > 3 {
        return domain(format!("can integrate over at most 3 axes, got {dims}"));
    }
    if !(s.is_finite() && s >= 0.0) {
        return domain(format!("radius must be finite and non-negative, got {s}"));
    }
    let t = tau.value();
    let half_d = f64::from(dims) / 2.0;
    let prefactor = PI.powf(half_d - 1.5);
    let s2 = if dims == 3 { 0.0 } else { s * s };
    let gaussian = (-s2).exp();
    let ground = prefactor * gaussian * fugacity.ground_population();

    // prefactor * [exp(A - s²) - exp(-s²)] without overflow or cancellation
    let shifted = move |a: f64| {
        if a < 0.5 {
            prefactor * gaussian * a.exp_m1()
        } else {
            prefactor * ((a - s2).exp() - gaussian)
        }
    };
    // A = -3/2 ln(1 - q^{2l}) + (1 - a_l) s² + d/2 ln(1/a_l), a_l = tanh(τl/2),
    // with 1 - a_l = 2q^l/(1 + q^l). The bound replaces that weight by 2q^l,
    // which keeps it convex in q^l.
    let exponent = move |l: f64, bound: bool| {
        let tl = (-t * l).exp();
        let weight = if bound { 2.0 * tl } else { 2.0 * tl / (1.0 + tl) };
        let log_one_minus_t2 = (-(-2.0 * t * l).exp_m1()).ln();
        let log_inv_a = -(0.5 * t * l).tanh().ln();
        -1.5 * log_one_minus_t2 + weight * s2 + half_d * log_inv_a
    };
    let excited = excited_lsum(
        fugacity,
        tau,
        control,
        ground,
        |l| shifted(exponent(l, false)),
        |l| shifted(exponent(l, true)),
    )?;
    Ok((ground, excited))
}

/// Column density in `σ^{dims-3}` units.
pub fn column_density_ex(fugacity: Fugacity, tau: Tau, dims: u8, s: f64, control: &LSumControl) -> Result<f64> {
    let (ground, excited) = column_components_ex(fugacity, tau, dims, s, control)?;
    Ok(ground + excited)
}

/// 3D density at radius `r` in `σ⁻³` units.
pub fn density_ex(fugacity: Fugacity, tau: Tau, r: f64, control: &LSumControl) -> Result<f64> {
    column_density_ex(fugacity, tau, 0, r, control)
}

/// Population of one energy level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPopulation {
    /// Quanta above the ground state.
    pub level: u32,
    pub degeneracy: u64,
    /// Summed over the degenerate states.
    pub population: f64,
}

/// Bose-Einstein populations of the levels `0..=n_max`.
pub fn level_populations_ex(fugacity: Fugacity, tau: Tau, n_max: u32) -> Result<Vec<LevelPopulation>> {
    require_unsaturated(fugacity)?;
    Ok((0..=n_max)
        .map(|n| {
            let degeneracy = u64::from(n + 1) * u64::from(n + 2) / 2;
            LevelPopulation {
                level: n,
                degeneracy,
                population: degeneracy as f64 * fugacity.occupation(tau, f64::from(n)),
            }
        })
        .collect())
}

/// Normalised 1D Hermite functions `φ_0..φ_{n_max}` at `x`.
fn hermite_functions(x: f64, n_max: usize) -> Vec<f64> {
    let mut phi = Vec::with_capacity(n_max + 1);
    phi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        phi.push(2f64.sqrt() * x * phi[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * phi[n] - (nf / (nf + 1.0)).sqrt() * phi[n - 1];
        phi.push(next);
    }
    phi
}

fn check_oracle_window(fugacity: Fugacity, tau: Tau, n_max: u32) -> Result<()> {
    if tau.value() < 0.2 || fugacity.z() > 0.95 {
        return domain(format!(
            "eigenfunction oracle validated only for tau >= 0.2 and z <= 0.95 (got tau = {}, z = {})",
            tau.value(),
            fugacity.z()
        ));
    }
    if !(1..=400).contains(&n_max) {
        return domain(format!("oracle cutoff must lie in 1..=400, got {n_max}"));
    }
    Ok(())
}

/// Reference density from the quantum-number sum
/// `Σ_{nx+ny+nz <= n_max} N(n) |φ_nx(r) φ_ny(0) φ_nz(0)|²`, evaluated on the x axis.
///
/// Independent of the l-sum route; no performance contract.
pub fn eigenfunction_oracle(fugacity: Fugacity, tau: Tau, r: f64, n_max: u32) -> Result<f64> {
    check_oracle_window(fugacity, tau, n_max)?;
    let n = n_max as usize;
    let along: Vec<f64> = hermite_functions(r, n).iter().map(|p| p * p).collect();
    let across: Vec<f64> = hermite_functions(0.0, n).iter().map(|p| p * p).collect();
    let occupation: Vec<f64> = (0..=n).map(|k| fugacity.occupation(tau, k as f64)).collect();
    let mut acc = Accumulator::default();
    for nx in 0..=n {
        for ny in 0..=(n - nx) {
            for nz in 0..=(n - nx - ny) {
                acc.add(occupation[nx + ny + nz] * along[nx] * across[ny] * across[nz]);
            }
        }
    }
    Ok(acc.value())
}

/// Reference atom number from the same triple sum over quantum numbers.
pub fn population_oracle(fugacity: Fugacity, tau: Tau, n_max: u32) -> Result<f64> {
    check_oracle_window(fugacity, tau, n_max)?;
    let n = n_max as usize;
    let occupation: Vec<f64> = (0..=n).map(|k| fugacity.occupation(tau, k as f64)).collect();
    let mut acc = Accumulator::default();
    for nx in 0..=n {
        for ny in 0..=(n - nx) {
            for nz in 0..=(n - nx - ny) {
                acc.add(occupation[nx + ny + nz]);
            }
        }
    }
    Ok(acc.value())
}
