//! Dormand–Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State<const N: usize> = [Complex64; N];

#[derive(Debug, Clone, Copy)]
pub struct Dopri {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri {
    fn default() -> Self {
        Dopri { rel_tol: 1e-10, abs_tol: 1e-14, h_min: 1e-12, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri {
    /// Integrates y' = f(x, y) from `x0` and returns the state at each of
    /// the increasing abscissae in `outputs` (all ≥ x0).
    pub fn solve<const N: usize, F>(
        &self,
        mut f: F,
        x0: f64,
        y0: State<N>,
        outputs: &[f64],
    ) -> Result<Vec<State<N>>>
    where
        F: FnMut(f64, &State<N>) -> State<N>,
    {
        let mut out = Vec::with_capacity(outputs.len());
        let mut x = x0;
        let mut y = y0;
        let span = outputs.last().map_or(0.0, |&e| e - x0);
        let mut h = (span / 100.0).max(1e-4);
        let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
        k[0] = f(x, &y);
        let mut steps = 0;
        for &target in outputs {
            while x < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::StepUnderflow(x));
                }
                let last = x + h >= target;
                let hs = if last { target - x } else { h };
                for s in 1..7 {
                    let mut ys = y;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            for i in 0..N {
                                ys[i] += kj[i] * (hs * a);
                            }
                        }
                    }
                    k[s] = f(x + C[s] * hs, &ys);
                }
                let mut y5 = y;
                for i in 0..N {
                    for s in 0..6 {
                        y5[i] += k[s][i] * (hs * A[6][s]);
                    }
                }
                let k7 = f(x + hs, &y5);
                let mut err: f64 = 0.0;
                for i in 0..N {
                    let mut e = Complex64::new(0.0, 0.0);
                    for s in 0..6 {
                        e += k[s][i] * (A[6][s] - B4[s]);
                    }
                    e += k7[i] * (-B4[6]);
                    let scale = self.abs_tol + self.rel_tol * y[i].norm().max(y5[i].norm());
                    err = err.max((e * hs).norm() / scale);
                }
                if err <= 1.0 {
                    x = if last { target } else { x + hs };
                    y = y5;
                    k[0] = k7;
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).min(5.0) };
                    if !last {
                        h = hs * grow;
                    } else {
                        h = h.max(hs * grow.min(1.0));
                    }
                } else {
                    h = hs * (0.9 * err.powf(-0.25)).max(0.1);
                    if h < self.h_min {
                        return Err(Error::StepUnderflow(x));
                    }
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let sol = Dopri::default()
            .solve(
                |_, y: &State<2>| [y[1], -y[0]],
                0.0,
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                &[1.0, 10.0],
            )
            .unwrap();
        assert!((sol[0][0].re - 1f64.sin()).abs() < 1e-9);
        assert!((sol[1][0].re - 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn complex_exponential() {
        let w = Complex64::new(-0.3, 2.0);
        let sol = Dopri::default()
            .solve(|_, y: &State<1>| [w * y[0]], 0.0, [Complex64::new(1.0, 0.0)], &[3.0])
            .unwrap();
        assert!((sol[0][0] - (w * 3.0).exp()).norm() < 1e-9);
    }
}
