//! Closed forms for complex type (all m_α = 2, no doubles).
//!
//! φ_λ(exp H) = 𝛑(ρ₀) Σ_w det(w) e^{i⟨wλ,H⟩} / (𝛑(iλ) ∏_α sinh⟨α,H⟩),
//! with 𝛑(iλ) = ∏_α i⟨α,λ⟩. The value is complex in general; its
//! conjugate is φ_{−λ}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spacegeom::{dot, SpaceSpec, WALL_TOL};

use super::series::{regularity, REGULAR_TOL};

type C = Complex64;

fn require_complex(space: &SpaceSpec) -> Result<()> {
    if !space.is_complex_type() {
        return Err(Error::Domain(format!("{} is not of complex type", space.name)));
    }
    Ok(())
}

/// Σ_w det(w) e^{⟨w μ, H⟩} for complex μ = iλ. Uses the exponential
/// series of the alternating sum when every exponent is small, which
/// avoids cancellation near H = 0.
fn alternating_sum(space: &SpaceSpec, lambda: &[f64], h: &[f64]) -> C {
    let xs: Vec<(f64, C)> = space
        .datum
        .weyl
        .iter()
        .map(|w| (w.det(), C::new(0.0, dot(&w.apply(lambda), h))))
        .collect();
    let big = xs.iter().map(|(_, x)| x.norm()).fold(0.0, f64::max);
    if big >= 1.0 {
        return xs.iter().map(|(d, x)| x.exp() * *d).sum();
    }
    let mut pow: Vec<C> = vec![C::new(1.0, 0.0); xs.len()];
    let mut fact = 1.0;
    let mut acc = C::new(0.0, 0.0);
    for k in 1..60 {
        fact *= k as f64;
        let mut pk = C::new(0.0, 0.0);
        for (p, (d, x)) in pow.iter_mut().zip(&xs) {
            *p *= *x;
            pk += *p * *d;
        }
        // Anti-invariant sums vanish below degree |Σ_r⁺|; keep only rounding-free terms.
        if k < space.datum.roots.len() {
            continue;
        }
        let term = pk / fact;
        acc += term;
        if k > space.datum.roots.len() + 2 && term.norm() <= 1e-18 * acc.norm() {
            break;
        }
    }
    acc
}

/// φ_λ(exp H) for complex-type spaces, λ real and regular.
pub fn complex_case_phi(space: &SpaceSpec, lambda: &[f64], h: &[f64]) -> Result<C> {
    require_complex(space)?;
    if regularity(space, lambda) < REGULAR_TOL {
        return Err(Error::Domain(format!("λ = {lambda:?} is singular")));
    }
    let roots = &space.datum.roots;
    let ah: Vec<f64> = roots.iter().map(|a| dot(a, h)).collect();
    if ah.iter().any(|&x| x < -WALL_TOL) {
        return Err(Error::Domain(format!("H = {h:?} lies outside the positive chamber")));
    }
    if ah.iter().all(|&x| x.abs() <= WALL_TOL) {
        return Ok(C::new(1.0, 0.0));
    }
    if ah.iter().any(|&x| x.abs() <= WALL_TOL) {
        return Err(Error::Domain(format!("H = {h:?} lies on a wall")));
    }
    let pi_rho0: f64 = roots.iter().map(|a| dot(a, &space.rho0)).product();
    let mut denom = C::new(1.0, 0.0);
    for (a, x) in roots.iter().zip(&ah) {
        denom *= C::new(0.0, dot(a, lambda)) * x.sinh();
    }
    Ok(alternating_sum(space, lambda, h) * pi_rho0 / denom)
}

/// φ₀(exp H) = ∏_α ⟨α,H⟩/sinh⟨α,H⟩.
pub fn phi0_complex(space: &SpaceSpec, h: &[f64]) -> Result<f64> {
    require_complex(space)?;
    Ok(ln_phi0_complex(space, h).exp())
}

pub fn ln_phi0_complex(space: &SpaceSpec, h: &[f64]) -> f64 {
    space
        .datum
        .roots
        .iter()
        .map(|a| {
            let x = dot(a, h).abs();
            if x < 1e-8 {
                -x * x / 6.0
            } else {
                x.ln() - crate::spacegeom::log_sinh(x)
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical::series::phi_series_hc;

    #[test]
    fn normalized_at_origin() {
        let s = SpaceSpec::complex_a2();
        let lam = [0.4, 1.1];
        let h: Vec<f64> = s.rho.iter().map(|x| 1e-6 * x).collect();
        let v = complex_case_phi(&s, &lam, &h).unwrap();
        assert!((v - 1.0).norm() < 1e-9, "{v}");
        let h: Vec<f64> = s.rho.iter().map(|x| 0.05 * x).collect();
        assert!((complex_case_phi(&s, &lam, &h).unwrap() - 1.0).norm() < 0.1);
    }

    #[test]
    fn matches_series() {
        let s = SpaceSpec::complex_a2();
        let lam = [0.4, 1.1];
        let h = [2.9, 3.4];
        let a = complex_case_phi(&s, &lam, &h).unwrap();
        let b = phi_series_hc(&s, &lam, &h).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn phi0_limit() {
        let s = SpaceSpec::complex_a2();
        let h = [0.8, 1.7];
        let small = [1e-4, 0.0];
        let v = complex_case_phi(&s, &small, &h);
        assert!(v.is_err());
        let lam: Vec<f64> = s.rho.iter().map(|x| 1e-3 * x + 1e-4).collect();
        let near = complex_case_phi(&s, &lam, &h).unwrap();
        assert!((near.re - phi0_complex(&s, &h).unwrap()).abs() < 1e-5);
    }
}
