//! Bracketed scalar root finding (Brent's method) with automatic bracket expansion.

use crate::error::{Error, Result};

/// Relative tolerance on the root location.
pub const ROOT_REL_TOL: f64 = 1e-12;
/// Iteration cap for the Brent loop; the current best estimate is returned when hit.
pub const MAX_ITERATIONS: usize = 200;
/// Bracket doublings attempted before giving up.
pub const MAX_EXPANSIONS: usize = 60;

/// Finds the root of a continuous monotone `f` starting from the hint `[lo, hi]`.
///
/// If `f(lo)` and `f(hi)` share a sign the end with the smaller `|f|` is pushed
/// outward, doubling the bracket width each time.
pub fn solve_monotone_root<F>(mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Convergence(format!("non-finite bracket [{lo}, {hi}]")));
    }
    if a == b {
        b = a + a.abs().max(1.0);
    }
    let mut fa = eval(&mut f, a)?;
    let mut fb = eval(&mut f, b)?;

    let mut expansions = 0;
    while fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::Convergence(format!(
                "no sign change after {MAX_EXPANSIONS} bracket doublings (last [{a}, {b}])"
            )));
        }
        let width = b - a;
        if fa.abs() < fb.abs() {
            a -= width;
            fa = eval(&mut f, a)?;
        } else {
            b += width;
            fb = eval(&mut f, b)?;
        }
        expansions += 1;
    }
    brent(&mut f, a, b, fa, fb)
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_nan() {
        Err(Error::Convergence(format!("function returned NaN at {x}")))
    } else {
        Ok(y)
    }
}

fn brent<F: FnMut(f64) -> f64>(f: &mut F, a0: f64, b0: f64, fa0: f64, fb0: f64) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a0, b0, fa0, fb0);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * ROOT_REL_TOL * b.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points are distinct
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = eval(f, b)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear() {
        let r = solve_monotone_root(|x| x - 1.0, 0.0, 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cube_root_of_two() {
        let r = solve_monotone_root(|x| x * x * x - 2.0, 1.0, 2.0).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12 * 2f64.cbrt());
    }

    #[test]
    fn expands_bracket_in_both_directions() {
        let r = solve_monotone_root(|x| x - 1000.0, 0.0, 1.0).unwrap();
        assert!((r - 1000.0).abs() < 1e-9);
        let r = solve_monotone_root(|x| (x + 37.5).atan(), 0.0, 1.0).unwrap();
        assert!((r + 37.5).abs() < 1e-10);
        let r = solve_monotone_root(|x| 3.0 - x, 5.0, 4.0).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fails_without_sign_change() {
        let err = solve_monotone_root(|x| x * x + 1.0, -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)));
    }

    #[test]
    fn nan_is_reported() {
        let err = solve_monotone_root(|_| f64::NAN, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| x.exp() - 5.0;
        let a = solve_monotone_root(f, 0.0, 1.0).unwrap();
        let b = solve_monotone_root(f, 0.0, 1.0).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - 5f64.ln()).abs() < 1e-12);
    }
}
