//! Bose functions `g_ν(z) = Σ_{l≥1} z^l / l^ν` and the Riemann zeta values they
//! reduce to at `z = 1`.
//!
//! Arguments close to unity are passed as `x = -ln z` so that the singular
//! behaviour of `g_{1/2}` and `g_1` (and the `x ln x` terms of `g_2`, `g_3`) can
//! be resolved without cancellation. For `x <= X_SWITCH` the Robinson expansion
//! is used, above it the direct series.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Below this value of `x = -ln z` the Robinson expansion replaces the direct series.
pub const X_SWITCH: f64 = 0.1;

/// Highest power of `x` kept in the Robinson expansion.
const EXPANSION_ORDER: i32 = 8;

/// Order `ν` of a Bose function. Only the orders needed by the trap models exist.
///
/// `g_1` and `g_{5/2}` are the one-axis integrals of `g_{1/2}` and `g_{3/2}` and
/// appear in column densities of the semi-classical models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoseOrder {
    Half,
    One,
    ThreeHalves,
    Two,
    FiveHalves,
    Three,
}

impl BoseOrder {
    pub const ALL: [BoseOrder; 6] = [
        BoseOrder::Half,
        BoseOrder::One,
        BoseOrder::ThreeHalves,
        BoseOrder::Two,
        BoseOrder::FiveHalves,
        BoseOrder::Three,
    ];

    pub fn nu(self) -> f64 {
        f64::from(self.twice_nu()) / 2.0
    }

    /// Looks up the order with the given exponent.
    pub fn from_nu(nu: f64) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|o| o.nu() == nu)
            .map_or_else(|| domain(format!("unsupported Bose order {nu}")), Ok)
    }

    /// `ν - 1`, the order produced by `z d/dz`.
    pub fn lowered(self) -> Option<Self> {
        Self::from_twice_nu(self.twice_nu() - 2)
    }

    /// `ν + 1/2`, the order produced by integrating a Gaussian argument over one axis.
    pub fn raised_half(self) -> Option<Self> {
        Self::from_twice_nu(self.twice_nu() + 1)
    }

    fn twice_nu(self) -> i32 {
        match self {
            BoseOrder::Half => 1,
            BoseOrder::One => 2,
            BoseOrder::ThreeHalves => 3,
            BoseOrder::Two => 4,
            BoseOrder::FiveHalves => 5,
            BoseOrder::Three => 6,
        }
    }

    fn from_twice_nu(twice: i32) -> Option<Self> {
        Self::ALL.iter().copied().find(|o| o.twice_nu() == twice)
    }
}

/// ζ(s) for `2s` an integer in `[-15, 6]`, `s != 1`.
fn zeta_twice(twice_s: i32) -> f64 {
    match twice_s {
        6 => 1.202_056_903_159_594_3,
        5 => 1.341_487_257_250_917_2,
        4 => 1.644_934_066_848_226_4,
        3 => 2.612_375_348_685_488_3,
        1 => -1.460_354_508_809_586_8,
        0 => -0.5,
        -1 => -0.207_886_224_977_354_57,
        -2 => -1.0 / 12.0,
        -3 => -0.025_485_201_889_833_036,
        -4 => 0.0,
        -5 => 0.008_516_928_777_850_330_5,
        -6 => 1.0 / 120.0,
        -7 => 0.004_441_011_335_479_432,
        -8 => 0.0,
        -9 => -0.003_091_669_247_215_833_8,
        -10 => -1.0 / 252.0,
        -11 => -0.002_671_458_019_899_224_6,
        -12 => 0.0,
        -13 => 0.002_746_767_939_536_868_8,
        -14 => 1.0 / 240.0,
        -15 => 0.003_269_039_572_600_220,
        _ => unreachable!("zeta table lookup outside [-15/2, 3]: 2s = {twice_s}"),
    }
}

/// ζ(ν), the value of `g_ν(1)` for `ν > 1`. ζ(1/2) is returned as well since the
/// Robinson expansion of `g_{3/2}` needs it; ν = 1 is the pole.
pub fn zeta(order: BoseOrder) -> Result<f64> {
    match order {
        BoseOrder::One => domain("zeta(1) is a pole"),
        o => Ok(zeta_twice(o.twice_nu())),
    }
}

/// `g_ν(z)` for `z ∈ [0, 1]`.
pub fn bose_g(order: BoseOrder, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("fugacity {z} outside [0, 1]"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    bose_g_x(order, -z.ln())
}

/// `g_ν(e^{-x})` for `x >= 0`, dispatching between the expansion and the series.
pub fn bose_g_x(order: BoseOrder, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("x = -ln z must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return match order {
            BoseOrder::Half | BoseOrder::One => {
                domain(format!("g_{} diverges at z = 1", order.nu()))
            }
            o => zeta(o),
        };
    }
    if x <= X_SWITCH {
        bose_g_small_x(order, x)
    } else {
        Ok(series(order, x))
    }
}

fn series(order: BoseOrder, x: f64) -> f64 {
    let nu = order.nu();
    // z / (1 - z)
    let tail_factor = 1.0 / x.exp_m1();
    let mut sum = 0.0;
    let mut l = 1.0_f64;
    loop {
        let term = (-x * l).exp() / l.powf(nu);
        sum += term;
        if term == 0.0 || (term < 1e-16 * sum && term * tail_factor < 1e-14) {
            return sum;
        }
        l += 1.0;
    }
}

/// Robinson expansion of `g_ν(e^{-x})` about `x = 0`.
///
/// Half-integer ν: `Γ(1-ν) x^{ν-1} + Σ_k ζ(ν-k) (-x)^k / k!`.
/// Integer n: the `k = n-1` term is replaced by `(-x)^{n-1}/(n-1)! (H_{n-1} - ln x)`.
pub fn bose_g_small_x(order: BoseOrder, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return domain(format!("expansion needs x > 0, got {x}"));
    }
    if x > X_SWITCH {
        return domain(format!("expansion used outside x <= {X_SWITCH}: {x}"));
    }
    let twice_nu = order.twice_nu();
    let mut sum = 0.0;
    // (-x)^k / k!
    let mut power = 1.0;
    for k in 0..=EXPANSION_ORDER {
        let twice_s = twice_nu - 2 * k;
        if twice_s == 2 {
            let harmonic: f64 = (1..=k).map(|j| 1.0 / f64::from(j)).sum();
            sum += power * (harmonic - x.ln());
        } else {
            sum += zeta_twice(twice_s) * power;
        }
        power *= -x / f64::from(k + 1);
    }
    let sqrt_pi = PI.sqrt();
    let singular = match order {
        BoseOrder::Half => sqrt_pi / x.sqrt(),
        BoseOrder::ThreeHalves => -2.0 * sqrt_pi * x.sqrt(),
        BoseOrder::FiveHalves => 4.0 / 3.0 * sqrt_pi * x * x.sqrt(),
        _ => 0.0,
    };
    Ok(singular + sum)
}
