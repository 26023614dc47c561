//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Refine a root of `f` inside [lo, hi] (f must change sign) to absolute
/// tolerance `tol` by bisection with a secant acceleration step.
pub fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{a}, {b}] (f = {fa:.3e}, {fb:.3e})"
        )));
    }
    for _ in 0..200 {
        // Secant proposal clamped into the bracket; fall back to midpoint.
        let mut x = b - fb * (b - a) / (fb - fa);
        if !x.is_finite() || x <= a || x >= b {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 || (b - a).abs() <= tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Guarantee progress: bisect whenever the bracket stalls.
        if (b - a).abs() > 0.9 * (hi - lo).abs() {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(0.5 * (a + b))
}

/// Scan [lo, hi] on `n` equal steps and return every sub-bracket where `f`
/// changes sign, in ascending order. A grid point landing exactly on a root
/// yields one degenerate bracket (x, x), not two.
pub fn sign_change_brackets(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if f_prev != 0.0 && fx.signum() != f_prev.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_finds_both_turning_points() {
        let f = |x: f64| 10.5 - 0.5 * x * x;
        let brackets = sign_change_brackets(f, -10.0, 10.0, 200);
        assert_eq!(brackets.len(), 2);
    }
}
