//! Complex log-Gamma via the Lanczos approximation (g = 7, nine terms),
//! with the reflection formula on the left half-plane.
//!
//! Quotients of Gamma values are always formed as `exp` of differences of
//! `ln_gamma`, so the branch of the logarithm never matters to callers.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Absolute distance to a pole below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-8;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance from `z` to the nearest pole of Γ (a nonpositive integer).
pub fn pole_distance(z: Complex64) -> f64 {
    let k = z.re.round().min(0.0);
    (z - k).norm()
}

fn check_pole(z: Complex64, factor: &'static str) -> Result<()> {
    let d = pole_distance(z);
    if d < POLE_TOL {
        return Err(Error::GammaPole {
            factor,
            arg: format!("{z}"),
            distance: d,
        });
    }
    Ok(())
}

/// log Γ(z) on some branch; `exp(ln_gamma(z)) = Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma_named(z, "Gamma")
}

/// As [`ln_gamma`], tagging pole errors with `factor`.
pub fn ln_gamma_named(z: Complex64, factor: &'static str) -> Result<Complex64> {
    check_pole(z, factor)?;
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let ln_pi = Complex64::new(PI.ln(), 0.0);
        return ln_pi - ln_sin_pi(z) - ln_gamma_unchecked(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + x.ln()
}

/// log sin(πz), stable for large |Im z| where sin itself overflows.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 1.0 {
        return (z * PI).sin().ln();
    }
    let two_i = Complex64::new(0.0, 2.0);
    if z.im > 0.0 {
        let e = (i * 2.0 * PI * z).exp();
        -i * PI * z + ((e - 1.0) / two_i).ln()
    } else {
        let e = (-i * 2.0 * PI * z).exp();
        i * PI * z + ((1.0 - e) / two_i).ln()
    }
}

/// Γ(z) itself; overflows for large arguments, prefer [`ln_gamma`].
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// Real Γ(x) for x away from poles.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// Digamma ψ(x) for real x > 0.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x
        - x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn special_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-11);
        assert!((gamma_real(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn recurrence_on_grid() {
        for &re in &[-3.7, -0.4, 0.1, 0.5, 1.3, 7.2, 40.0] {
            for &im in &[-60.0, -3.0, -0.2, 0.0, 0.7, 5.0, 120.0] {
                let z = c(re, im);
                let lhs = ln_gamma(z + 1.0).unwrap();
                let rhs = ln_gamma(z).unwrap() + z.ln();
                let rel = ((lhs - rhs).exp() - 1.0).norm();
                assert!(rel < 1e-10, "z = {z}: {rel}");
            }
        }
    }

    #[test]
    fn reflection_identity() {
        for &z in &[c(0.3, 0.4), c(-2.2, 1.5), c(0.25, -9.0)] {
            let lhs = ln_gamma(z).unwrap() + ln_gamma(1.0 - z).unwrap();
            let rhs = (c(PI, 0.0) / (z * PI).sin()).ln();
            assert!(((lhs - rhs).exp() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[0.1, 1.0, 10.0, 200.0] {
            let lg = ln_gamma(c(0.0, y)).unwrap();
            let lhs = 2.0 * lg.re;
            let rhs = PI.ln() - y.ln() - (PI * y).sinh().ln();
            let rhs = if y > 100.0 { PI.ln() - y.ln() - PI * y + 2f64.ln() } else { rhs };
            assert!((lhs - rhs).abs() < 1e-10, "y = {y}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = c(0.7, 3.3);
        let a = gamma(z).unwrap();
        let b = gamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn poles_rejected() {
        let err = ln_gamma_named(c(-2.0, 1e-10), "Γ(iz)").unwrap_err();
        assert!(matches!(err, Error::GammaPole { factor: "Γ(iz)", .. }));
        assert!(ln_gamma(c(0.0, 0.0)).is_err());
        assert!(ln_gamma(c(-2.0, 1e-6)).is_ok());
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-13);
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-13);
        assert!((digamma(10.0) - (digamma(9.0) + 1.0 / 9.0)).abs() < 1e-13);
    }
}
