//! Dormand–Prince 5(4) with adaptive step control for small fixed-size systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stepper {
    pub rtol: f64,
    pub atol: f64,
    /// Last accepted step magnitude, reused as the next initial guess.
    pub h: f64,
    pub max_steps: usize,
}

impl Stepper {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h: 0.0,
            max_steps: 2_000_000,
        }
    }

    /// Advances `y` from `x0` to `x1` (either direction).
    pub fn run<const N: usize, F>(&mut self, f: &mut F, x0: f64, y0: [f64; N], x1: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut h = if self.h > 0.0 { self.h } else { 1e-3 * span.abs() };
        h = h.min(span.abs());
        let mut x = x0;
        let mut y = y0;
        let mut k = [[0.0; N]; 7];
        k[0] = f(x, &y);
        let mut steps = 0;
        loop {
            let remaining = (x1 - x) * dir;
            if remaining <= 0.0 {
                break;
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h } * dir;

            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s][j] * k[j][i];
                    }
                    *yi += step * acc;
                }
                k[s] = f(x + C[s] * step, &ys);
            }
            let mut y_new = y;
            let mut err = 0.0_f64;
            for i in 0..N {
                let mut acc = 0.0;
                let mut eacc = 0.0;
                for s in 0..6 {
                    acc += A[6][s] * k[s][i];
                }
                for s in 0..7 {
                    eacc += E[s] * k[s][i];
                }
                y_new[i] = y[i] + step * acc;
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((step * eacc).abs() / sc);
            }
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h *= 0.1;
                if h < 1e-15 * x.abs().max(1e-300) {
                    return Err(Error::Integration(format!("non-finite state near x = {x}")));
                }
                continue;
            }
            if err <= 1.0 {
                x = if last { x1 } else { x + step };
                y = y_new;
                // FSAL: the last stage is the derivative at the new point.
                k[0] = k[6];
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = h;
                }
                h *= fac;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
            if h < 1e-15 * x.abs() {
                return Err(Error::Integration(format!("step size underflow near x = {x}")));
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Integration(format!("too many steps before x = {x}")));
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut s = Stepper::new(1e-12, 1e-14);
        let y = s.run(&mut |_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0).unwrap();
        assert!((y[0] - (-5.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn harmonic_backwards() {
        let mut s = Stepper::new(1e-12, 1e-14);
        let mut f = |_: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = s.run(&mut f, 3.0, [3.0_f64.sin(), 3.0_f64.cos()], 0.5).unwrap();
        assert!((y[0] - 0.5_f64.sin()).abs() < 1e-10);
        assert!((y[1] - 0.5_f64.cos()).abs() < 1e-10);
    }
}
