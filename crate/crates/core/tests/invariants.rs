use proptest::prelude::*;

use trapbose::exact::{density_ex, population_ex, LSumControl};
use trapbose::observables::{dip, first_excited_density, integrated_peak_fraction, peak_report, profile};
use trapbose::semiclassical::high_n_asymptotics;
use trapbose::special::{bose_g, BoseOrder};
use trapbose::thermo::{
    population_total, saturated_excited, solve_fugacity, threshold_state, transition_temperature, Fugacity, ModelKind,
    Tau, TrapSpec,
};

fn iso() -> TrapSpec {
    TrapSpec::isotropic()
}

fn recovered_atoms(model: ModelKind, n: f64, temperature: f64) -> f64 {
    let ctl = LSumControl::default();
    let state = solve_fugacity(model, n, Tau::from_temperature(temperature).unwrap(), &iso()).unwrap();
    if state.condensed {
        state.ground + saturated_excited(model, state.tau, 1.0, &ctl).unwrap()
    } else {
        population_total(model, state.fugacity, state.tau, 1.0, &ctl).unwrap()
    }
}

#[test]
fn fugacity_round_trip_recovers_atom_number() {
    for model in ModelKind::ALL {
        for n in [1e2, 1e3, 1e6] {
            let t_star = transition_temperature(model, n, &iso()).unwrap().temperature();
            for factor in [1.2, 1.0, 0.8] {
                let back = recovered_atoms(model, n, factor * t_star);
                assert!(((back - n) / n).abs() < 1e-9, "{model:?} N={n} T/T*={factor}: {back}");
            }
        }
    }
}

#[test]
fn fugacity_grows_with_atom_number() {
    let tau = Tau::from_temperature(30.0).unwrap();
    for model in ModelKind::ALL {
        let zs: Vec<f64> = [1e3, 1e4, 3e4, 1e5, 1e6]
            .iter()
            .map(|&n| solve_fugacity(model, n, tau, &iso()).unwrap().z())
            .collect();
        assert!(zs.windows(2).all(|w| w[1] >= w[0]), "{model:?}: {zs:?}");
    }
}

#[test]
fn profile_components_add_up() {
    let state = threshold_state(ModelKind::Ex, 1e5, &iso()).unwrap();
    let grid: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
    for dims in 0..=2 {
        let p = profile(&state, &grid, dims).unwrap();
        for i in 0..grid.len() {
            let sum = p.ground[i] + p.first_excited[i] + p.other_excited[i];
            assert!((sum - p.total[i]).abs() <= 1e-12 * p.total[i], "dims {dims} at {}", grid[i]);
        }
    }
}

#[test]
fn profile_ground_integrates_to_ground_population() {
    let state = threshold_state(ModelKind::Ex, 1e4, &iso()).unwrap();
    let h = 0.01;
    let grid: Vec<f64> = (0..=600).map(|i| h * i as f64).collect();
    let p = profile(&state, &grid, 0).unwrap();
    let shell: Vec<f64> = grid.iter().zip(&p.ground).map(|(r, g)| 4.0 * std::f64::consts::PI * r * r * g).collect();
    let trapezoid = h * (shell.iter().sum::<f64>() - 0.5 * (shell[0] + shell[shell.len() - 1]));
    assert!(((trapezoid - state.ground) / state.ground).abs() < 0.01);
}

#[test]
fn first_excited_state_makes_up_the_dip() {
    let state = threshold_state(ModelKind::Ex, 1e6, &iso()).unwrap();
    let d = dip(&state).unwrap();
    assert!(d.height > 0.0);
    let rise = first_excited_density(&state, 0, d.radius).unwrap() - first_excited_density(&state, 0, 0.0).unwrap();
    assert!((rise - d.first_excited_rise).abs() <= 1e-12 * rise.abs());
    assert!(rise >= 0.8 * d.height, "rise {rise} vs dip {}", d.height);
}

#[test]
fn integrating_axes_dilutes_the_peak() {
    for n in [1e3, 1e4, 1e6] {
        let state = threshold_state(ModelKind::Ex, n, &iso()).unwrap();
        let f: Vec<f64> = (0..=2).map(|d| integrated_peak_fraction(&state, d).unwrap()).collect();
        assert!(f[0] > f[1] && f[1] > f[2], "N={n}: {f:?}");
    }
}

#[test]
fn peak_share_rises_faster_than_condensate_fraction() {
    let n = 1e6;
    let t_star = transition_temperature(ModelKind::Ex, n, &iso()).unwrap().temperature();
    let at = |t: f64| {
        let s = solve_fugacity(ModelKind::Ex, n, Tau::from_temperature(t).unwrap(), &iso()).unwrap();
        let r = peak_report(&s).unwrap();
        (r.condensate_fraction, r.peak_fraction)
    };
    let (f_hi, p_hi) = at(t_star * 1.001);
    let (f_lo, p_lo) = at(t_star * 0.999);
    assert!(f_lo > f_hi && (p_lo - p_hi) > 5.0 * (f_lo - f_hi), "{f_lo} {f_hi} {p_lo} {p_hi}");
}

#[test]
fn threshold_observables_scale_with_tau() {
    // N0 ~ rho(0) ~ tau^(-3/2) makes x* ~ tau^(3/2), and the dip ~ 1/tau;
    // prefactors drift by well under 20%
    let at = |n: f64| {
        let s = threshold_state(ModelKind::Ex, n, &iso()).unwrap();
        let t = s.tau.value();
        (s.fugacity.x() / t.powf(1.5), dip(&s).unwrap().height * t)
    };
    let (x4, d4) = at(1e4);
    let (x6, d6) = at(1e6);
    assert!((x4 / x6 - 1.0).abs() < 0.2, "{x4} {x6}");
    assert!((d4 / d6 - 1.0).abs() < 0.2, "{d4} {d6}");
}

#[test]
fn semiclassical_ground_share_approaches_its_limit() {
    let share = |n: f64| peak_report(&threshold_state(ModelKind::Sc, n, &iso()).unwrap()).unwrap().peak_fraction;
    let limit = high_n_asymptotics(1e12).unwrap().ground_share_limit;
    let gaps: Vec<f64> = [1e6, 1e8, 1e10, 1e12].iter().map(|&n| (share(n) - limit).abs() / limit).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 0.05, "{gaps:?}");
}

#[test]
fn exact_density_is_finite_and_decreasing_at_threshold_of_tiny_trap() {
    let state = threshold_state(ModelKind::Ex, 10.0, &iso()).unwrap();
    let mut last = f64::INFINITY;
    for i in 0..40 {
        let rho = density_ex(state.fugacity, state.tau, 0.1 * i as f64, &state.control).unwrap();
        assert!(rho.is_finite() && rho < last);
        last = rho;
    }
}

proptest! {
    #[test]
    fn bose_functions_increase_with_fugacity(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        for order in [BoseOrder::Half, BoseOrder::ThreeHalves, BoseOrder::Two, BoseOrder::Three] {
            prop_assert!(bose_g(order, hi).unwrap() > bose_g(order, lo).unwrap());
        }
    }

    #[test]
    fn higher_order_bose_functions_are_smaller(z in 0.01f64..0.999) {
        let orders = [BoseOrder::Half, BoseOrder::One, BoseOrder::ThreeHalves, BoseOrder::Two, BoseOrder::FiveHalves, BoseOrder::Three];
        let g: Vec<f64> = orders.iter().map(|&o| bose_g(o, z).unwrap()).collect();
        prop_assert!(g.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(g[5] > z);
    }

    #[test]
    fn exact_population_is_monotone_in_fugacity(x in 1e-6f64..3.0, t in 0.05f64..3.0) {
        let ctl = LSumControl::default();
        let tau = Tau::new(t).unwrap();
        let near = population_ex(Fugacity::from_x(x).unwrap(), tau, &ctl).unwrap();
        let far = population_ex(Fugacity::from_x(1.1 * x).unwrap(), tau, &ctl).unwrap();
        prop_assert!(near > far && far > 0.0);
    }

    #[test]
    fn round_trip_holds_above_threshold(log_n in 2.0f64..6.5, factor in 1.0f64..2.0) {
        let n = 10f64.powf(log_n);
        let t_star = transition_temperature(ModelKind::Ex, n, &iso()).unwrap().temperature();
        let back = recovered_atoms(ModelKind::Ex, n, factor * t_star);
        prop_assert!(((back - n) / n).abs() < 1e-9);
    }
}
