//! Bracketed root finding for monotone functions.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket width falls below `rel_tol * |x|`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::RootNotConverged { lo, hi, f_lo: fa, f_hi: fb, iterations: 0 });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
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
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::RootNotConverged { lo: b.min(c), hi: b.max(c), f_lo: fb, f_hi: fc, iterations: MAX_ITER })
}

/// Solves `f(x) = 0` on `(0, ∞)` for a decreasing `f`, starting from the bracket
/// `[guess/2, 4 guess]` and expanding it geometrically until the sign changes.
pub fn solve_decreasing_positive<F: FnMut(f64) -> f64>(
    mut f: F,
    guess: f64,
    rel_tol: f64,
) -> Result<f64> {
    let guess = if guess.is_finite() && guess > 0.0 { guess } else { 1.0 };
    let mut lo = 0.5 * guess;
    let mut hi = 4.0 * guess;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut expansions = 0;
    while f_lo < 0.0 || f_lo.is_nan() {
        lo *= 0.25;
        f_lo = f(lo);
        expansions += 1;
        if expansions > 400 || lo == 0.0 {
            return Err(Error::RootNotConverged { lo, hi, f_lo, f_hi, iterations: expansions });
        }
    }
    while f_hi > 0.0 || f_hi.is_nan() {
        hi *= 4.0;
        f_hi = f(hi);
        expansions += 1;
        if expansions > 400 || !hi.is_finite() {
            return Err(Error::RootNotConverged { lo, hi, f_lo, f_hi, iterations: expansions });
        }
    }
    brent(f, lo, hi, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn expands_bracket() {
        let r = solve_decreasing_positive(|x| 1e6 - x, 1.0, 1e-13).unwrap();
        assert!((r - 1e6).abs() < 1e-6);
        let r = solve_decreasing_positive(|x| 1e-5 - x, 1.0, 1e-13).unwrap();
        assert!((r - 1e-5).abs() < 1e-16);
    }

    #[test]
    fn reports_bracket_when_no_sign_change() {
        match brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12) {
            Err(Error::RootNotConverged { lo, hi, .. }) => {
                assert_eq!((lo, hi), (-1.0, 1.0));
            }
            other => panic!("expected a bracket error, got {other:?}"),
        }
    }
}
