//! Scalar root finding: Brent's method, bracket scanning and a plain bisection
//! scanner kept separate as a cross-check.

use crate::error::{Error, Result};

/// Brent's method on a bracket with `f(a)` and `f(b)` of opposite sign.
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonConvergence(format!(
            "no sign change on [{a}, {b}]: f = {fa}, {fb}"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
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
    Err(Error::NonConvergence(format!(
        "Brent did not converge in {max_iter} iterations"
    )))
}

/// Sub-intervals of `[lo, hi]` (split into `pieces`) on which `f` changes sign.
/// A grid point where `f` is exactly zero yields a degenerate bracket.
pub fn scan_brackets(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, pieces: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let width = (hi - lo) / pieces as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        out.push((x0, x0));
    }
    for i in 1..=pieces {
        let x1 = if i == pieces { hi } else { lo + width * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push((x1, x1));
        } else if f0 != 0.0 && f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Reference root finder: evaluate on a grid of spacing `step`, then bisect every
/// sign change to 1e-12.
pub fn brute_force_roots(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if !(hi > lo && step > 0.0) {
        return roots;
    }
    let count = ((hi - lo) / step).ceil() as usize;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=count {
        let x1 = (lo + step * i as f64).min(hi);
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f1 != 0.0 && f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_linear() {
        let r = brent(|x| x - 0.5, 0.0, 1.0, 1e-14, 100).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
    }

    #[test]
    fn brent_cubic() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_needs_sign_change() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_roots(|x| x - 0.5, 0.0, 1.0, 1e-3);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-12);
        assert!(brute_force_roots(|x| x * x + 1.0, 0.0, 1.0, 1e-3).is_empty());
        let two = brute_force_roots(|x| (x - 0.25) * (x - 0.75), 0.0, 1.0, 0.01);
        assert_eq!(two.len(), 2);
    }

    #[test]
    fn scan_finds_both_brackets() {
        let b = scan_brackets(|x| (x - 0.25) * (x - 0.75), 0.0, 1.0, 7);
        assert_eq!(b.len(), 2);
    }
}
