//! Fixed-step classical Runge-Kutta.

/// One RK4 step of size `h` for `y' = f(t, y)`.
pub fn rk4_step<const N: usize, E>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N], E> {
    let shift = |base: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *base;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &shift(y, &k1, 0.5 * h))?;
    let k3 = f(t + 0.5 * h, &shift(y, &k2, 0.5 * h))?;
    let k4 = f(t + h, &shift(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn decay(h: f64) -> f64 {
        let mut f = |_t: f64, y: &[f64; 1]| Ok::<_, Infallible>([-y[0]]);
        let mut y = [1.0];
        let steps = (1.0 / h).round() as usize;
        for i in 0..steps {
            y = rk4_step(&mut f, i as f64 * h, &y, h).unwrap();
        }
        y[0]
    }

    #[test]
    fn fourth_order() {
        let exact = (-1.0f64).exp();
        let e1 = (decay(0.1) - exact).abs();
        let e2 = (decay(0.05) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.9 && order < 4.1, "order {order}");
    }

    #[test]
    fn time_dependent() {
        // y' = t, y(0) = 0 -> y(1) = 1/2, exact for RK4
        let mut f = |t: f64, _y: &[f64; 1]| Ok::<_, Infallible>([t]);
        let y = rk4_step(&mut f, 0.0, &[0.0], 1.0).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15);
    }
}
