//! Quadrature rules: Gauss–Legendre, Gauss–Hermite, panelled sums and an
//! adaptive Gauss–Kronrod (7/15) integrator for complex integrands.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Nodes and weights mapped from [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }
}

const MAX_CACHED: usize = 96;

/// Gauss–Legendre rule on [-1, 1]; cached for n ≤ 96.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    static CACHE: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((1..=MAX_CACHED).contains(&n), "unsupported Gauss–Legendre order {n}");
    &CACHE.get_or_init(|| (1..=MAX_CACHED).map(legendre_rule).collect())[n - 1]
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Hermite rule for the weight e^{-x²} on ℝ.
pub fn gauss_hermite(n: usize) -> &'static Rule {
    static CACHE: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((1..=64).contains(&n), "unsupported Gauss–Hermite order {n}");
    &CACHE.get_or_init(|| (1..=64).map(hermite_rule).collect())[n - 1]
}

fn hermite_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Sum of an `n`-point Gauss–Legendre rule over equal panels of [a, b].
pub fn gl_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in rule.mapped(lo, lo + h) {
            s += w * f(x);
        }
    }
    s
}

/// Nodes and weights of a panelled Gauss–Legendre rule on [a, b].
pub fn gl_panel_nodes(a: f64, b: f64, panels: usize, n: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(n);
    let h = (b - a) / panels.max(1) as f64;
    (0..panels.max(1))
        .flat_map(|p| {
            let lo = a + h * p as f64;
            rule.mapped(lo, lo + h).collect::<Vec<_>>()
        })
        .collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { rel_tol: 1e-11, abs_tol: 1e-300, max_intervals: 4000 }
    }
}

impl Adaptive {
    pub fn new(rel_tol: f64) -> Self {
        Adaptive { rel_tol, ..Default::default() }
    }

    /// Integrates `f` over [a, b], starting from `init` equal panels.
    pub fn integrate<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        init: usize,
    ) -> Result<Complex64> {
        let init = init.max(1);
        let h = (b - a) / init as f64;
        let mut parts: Vec<(f64, f64, Complex64, f64)> = (0..init)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == init { b } else { lo + h };
                let (v, e) = gk15(&mut f, lo, hi);
                (lo, hi, v, e)
            })
            .collect();
        loop {
            let total: Complex64 = parts.iter().map(|p| p.2).sum();
            let err: f64 = parts.iter().map(|p| p.3).sum();
            let tol = self.abs_tol.max(self.rel_tol * total.norm());
            if err <= tol {
                return Ok(total);
            }
            if parts.len() >= self.max_intervals {
                return Err(Error::Quadrature {
                    achieved: err / total.norm().max(f64::MIN_POSITIVE),
                    wanted: self.rel_tol,
                });
            }
            let (worst, _) = parts
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
            let (lo, hi, _, _) = parts[worst];
            let mid = 0.5 * (lo + hi);
            let (v1, e1) = gk15(&mut f, lo, mid);
            let (v2, e2) = gk15(&mut f, mid, hi);
            parts[worst] = (lo, mid, v1, e1);
            parts.push((mid, hi, v2, e2));
        }
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        init: usize,
    ) -> Result<f64> {
        Ok(self.integrate(|x| Complex64::new(f(x), 0.0), a, b, init)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        for n in [2, 5, 10, 16, 32, 64] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let v: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((v - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn hermite_moments() {
        for n in [1, 4, 8, 20, 40] {
            let r = gauss_hermite(n);
            let m0: f64 = r.weights.iter().sum();
            assert!((m0 - PI.sqrt()).abs() < 1e-12, "n={n}");
            if n >= 2 {
                let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
                assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adaptive_oscillatory() {
        let q = Adaptive::new(1e-12);
        let v = q
            .integrate(|x| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 1.0, 1)
            .unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let q = Adaptive { rel_tol: 1e-14, abs_tol: 0.0, max_intervals: 3 };
        assert!(q.integrate_real(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1).is_err());
    }
}
