//! Spherical functions φ_λ and the ground spherical function φ₀.

pub mod complex;
pub mod rank1;
pub mod series;

pub use complex::{complex_case_phi, phi0_complex};
pub use rank1::{
    gamma_coeffs, iwasawa_a_rank1, k_average, phi_integral_rank1, phi_ode_profile, phi_ode_rank1,
    phi_rank1, Phi0Rank1,
};
pub use series::{phi_series_hc, Gangolli};

use crate::error::{Error, Result};
use crate::harish::CFunction;
use crate::spacegeom::{dot, SpaceSpec};

/// φ₀ evaluator for the spaces where it is available: rank one and
/// complex type.
#[derive(Debug, Clone)]
pub enum Phi0 {
    Rank1(Phi0Rank1),
    Complex(SpaceSpec),
}

impl Phi0 {
    pub fn new(space: &SpaceSpec) -> Result<Self> {
        if let Some(jac) = space.jacobi() {
            return Ok(Phi0::Rank1(Phi0Rank1::new(jac, &CFunction::new(space))));
        }
        if space.is_complex_type() {
            return Ok(Phi0::Complex(space.clone()));
        }
        Err(Error::Domain(format!("φ₀ is not available for {}", space.name)))
    }

    pub fn ln_eval(&self, h: &[f64]) -> Result<f64> {
        match self {
            Phi0::Rank1(p) => p.ln_eval(h[0].abs()),
            Phi0::Complex(s) => Ok(complex::ln_phi0_complex(s, h)),
        }
    }

    pub fn eval(&self, h: &[f64]) -> Result<f64> {
        Ok(self.ln_eval(h)?.exp())
    }
}

/// φ₀(exp H).
pub fn phi0(space: &SpaceSpec, h: &[f64]) -> Result<f64> {
    Phi0::new(space)?.eval(h)
}

/// φ₀(exp H) together with its ratio to ∏_{α∈Σ_r⁺}(1+⟨α,H⟩) e^{−⟨ρ,H⟩}.
pub fn phi0_envelope_check(space: &SpaceSpec, h: &[f64]) -> Result<(f64, f64)> {
    let ln = Phi0::new(space)?.ln_eval(h)?;
    let env: f64 = space.datum.roots.iter().map(|a| (1.0 + dot(a, h)).ln()).sum::<f64>()
        - dot(&space.rho, h);
    Ok((ln.exp(), (ln - env).exp()))
}

/// C₂ = 𝛑(ρ₀)^{-1}𝐛(0).
pub fn c2_constant(space: &SpaceSpec) -> f64 {
    let pi_rho0: f64 = space.datum.roots.iter().map(|a| dot(a, &space.rho0)).product();
    CFunction::new(space).b_zero() / pi_rho0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_values() {
        assert!((c2_constant(&SpaceSpec::from_tag("Hr:3").unwrap()) - 2.0).abs() < 1e-12);
        assert!((c2_constant(&SpaceSpec::complex_a2()) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn far_field_constant() {
        for tag in ["Hr:2", "Hr:3", "Hc:2"] {
            let s = SpaceSpec::from_tag(tag).unwrap();
            // The approach is O(1/r): the scaled residual settles.
            let scaled = |r: f64| {
                let v = phi0(&s, &[r]).unwrap() * (s.rho[0] * r).exp() / r;
                (v / c2_constant(&s) - 1.0) * r
            };
            let (a, b) = (scaled(30.0), scaled(60.0));
            assert!(a.abs() < 3.0 && (a - b).abs() < 0.05, "{tag}: {a} {b}");
        }
        let s = SpaceSpec::complex_a2();
        let h: Vec<f64> = s.rho.iter().map(|x| 30.0 * x / 2.0).collect();
        let ln = Phi0::new(&s).unwrap().ln_eval(&h).unwrap();
        let ratio = (ln + dot(&s.rho, &h) - crate::spacegeom::pi_prod(&s, &h).ln()).exp();
        assert!((ratio / 8.0 - 1.0).abs() < 0.05, "{ratio}");
    }
}
