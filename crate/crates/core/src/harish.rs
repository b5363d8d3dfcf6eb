//! The Gindikin–Karpelevič c-function, its regularization 𝐛 and the
//! Plancherel density.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_named;
use crate::spacegeom::{dot, SpaceSpec, WALL_TOL};

/// λ = re + i·im in the complexified dual of the Cartan subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SpectralPoint {
    pub fn real(re: Vec<f64>) -> Self {
        let im = vec![0.0; re.len()];
        SpectralPoint { re, im }
    }

    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Self {
        SpectralPoint { re, im }
    }

    pub fn scalar(z: Complex64) -> Self {
        SpectralPoint { re: vec![z.re], im: vec![z.im] }
    }

    /// ⟨α, λ⟩ extended complex-bilinearly.
    pub fn pair(&self, alpha: &[f64]) -> Complex64 {
        Complex64::new(dot(alpha, &self.re), dot(alpha, &self.im))
    }

    pub fn neg(&self) -> Self {
        SpectralPoint {
            re: self.re.iter().map(|x| -x).collect(),
            im: self.im.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|x| x.is_finite())
    }
}

/// Per-root constants of the Gamma product.
#[derive(Debug, Clone)]
struct RootFactor {
    alpha: Vec<f64>,
    aa: f64,
    m: f64,
    m2: f64,
    ln_k: f64,
}

/// Precomputed c-function data of a space.
#[derive(Debug, Clone)]
pub struct CFunction {
    roots: Vec<RootFactor>,
}

fn cre(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl CFunction {
    pub fn new(space: &SpaceSpec) -> Self {
        let roots = space
            .datum
            .roots
            .iter()
            .zip(&space.datum.mult)
            .map(|(alpha, &(m, m2))| {
                let aa = dot(alpha, alpha);
                let a = dot(alpha, &space.rho) / aa;
                let (m, m2) = (m as f64, m2 as f64);
                let lg = |x: f64| ln_gamma_named(cre(x), "constant").map(|v| v.re).unwrap();
                let mut ln_k = lg(a + m / 2.0) - lg(a);
                if m2 > 0.0 {
                    ln_k += lg(a / 2.0 + m / 4.0 + m2 / 2.0) - lg(a / 2.0 + m / 4.0);
                }
                RootFactor { alpha: alpha.clone(), aa, m, m2, ln_k }
            })
            .collect();
        CFunction { roots }
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// log of Γ(iz+1)/Γ(iz+m/2) · Γ(iz/2+m/4)/Γ(iz/2+m/4+m₂/2).
    fn ln_gamma_quotient(&self, idx: usize, z: Complex64) -> Result<Complex64> {
        let r = &self.roots[idx];
        let iz = Complex64::i() * z;
        let mut acc = Complex64::new(0.0, 0.0);
        if r.m != 2.0 {
            acc += ln_gamma_named(iz + 1.0, "Γ(iz+1)")?
                - ln_gamma_named(iz + r.m / 2.0, "Γ(iz+m_α/2)")?;
        }
        if r.m2 > 0.0 {
            let w = iz / 2.0 + r.m / 4.0;
            acc += ln_gamma_named(w, "Γ(iz/2+m_α/4)")?
                - ln_gamma_named(w + r.m2 / 2.0, "Γ(iz/2+m_α/4+m_2α/2)")?;
        }
        Ok(acc)
    }

    /// log 𝐛_α(z).
    pub fn ln_b_alpha(&self, idx: usize, z: Complex64) -> Result<Complex64> {
        let r = &self.roots[idx];
        Ok(cre(r.aa.ln() + r.ln_k) + self.ln_gamma_quotient(idx, z)?)
    }

    /// 1/𝐜_α(z) = |α|² i z / 𝐛_α(z).
    pub fn c_alpha_inv(&self, idx: usize, z: Complex64) -> Result<Complex64> {
        let r = &self.roots[idx];
        Ok(Complex64::i() * z * r.aa * (-self.ln_b_alpha(idx, z)?).exp())
    }

    /// The exact Gamma quotient whose large-|z| behavior is modelled by
    /// [`CFunction::gamma_ratio_asymptotic`].
    pub fn gamma_ratio_exact(&self, idx: usize, z: Complex64) -> Result<Complex64> {
        Ok(self.ln_gamma_quotient(idx, z)?.exp())
    }

    /// 2^{m₂/2}(iz)^{1−m/2−m₂/2}. The factor i inside the power carries the
    /// phase that the modulus-level statement leaves implicit.
    pub fn gamma_ratio_asymptotic(&self, idx: usize, z: Complex64) -> Result<Complex64> {
        if z.norm() < 1.0 {
            return Err(Error::Domain(format!("asymptotic model needs |z| >= 1, got {z}")));
        }
        let r = &self.roots[idx];
        let p = 1.0 - r.m / 2.0 - r.m2 / 2.0;
        Ok((Complex64::i() * z).powf(p) * 2f64.powf(r.m2 / 2.0))
    }

    fn arg(&self, idx: usize, lambda: &SpectralPoint) -> Complex64 {
        let r = &self.roots[idx];
        lambda.pair(&r.alpha) / r.aa
    }

    /// 1/𝐜(λ) = ∏_α 1/𝐜_α(⟨α,λ⟩/⟨α,α⟩).
    pub fn c_inv(&self, lambda: &SpectralPoint) -> Result<Complex64> {
        let mut acc = cre(1.0);
        for i in 0..self.roots.len() {
            acc *= self.c_alpha_inv(i, self.arg(i, lambda))?;
        }
        Ok(acc)
    }

    /// log 𝐛(λ) as a sum over reduced roots.
    pub fn ln_b(&self, lambda: &SpectralPoint) -> Result<Complex64> {
        let mut acc = cre(0.0);
        for i in 0..self.roots.len() {
            acc += self.ln_b_alpha(i, self.arg(i, lambda))?;
        }
        Ok(acc)
    }

    /// |𝐜(λ)|^{-2} for real λ.
    pub fn plancherel(&self, lambda: &[f64]) -> f64 {
        let mut acc = 1.0;
        for (i, r) in self.roots.iter().enumerate() {
            let z = cre(dot(&r.alpha, lambda) / r.aa);
            if z.re.abs() < 1e-300 {
                return 0.0;
            }
            acc *= self.c_alpha_inv(i, z).map(|v| v.norm_sqr()).unwrap_or(0.0);
        }
        acc
    }

    /// 𝐛(−λ) for λ with imaginary part in the closed positive chamber.
    pub fn b_minus(&self, space: &SpaceSpec, lambda: &SpectralPoint) -> Result<Complex64> {
        check_tube(space, lambda)?;
        Ok(self.ln_b(&lambda.neg())?.exp())
    }

    /// 𝐛(−λ)^{-1}.
    pub fn b_minus_inv(&self, space: &SpaceSpec, lambda: &SpectralPoint) -> Result<Complex64> {
        check_tube(space, lambda)?;
        Ok((-self.ln_b(&lambda.neg())?).exp())
    }

    /// 𝐛(0), real and positive.
    pub fn b_zero(&self) -> f64 {
        (0..self.roots.len())
            .map(|i| self.ln_b_alpha(i, cre(0.0)).map(|v| v.re.exp()).unwrap_or(f64::NAN))
            .product()
    }
}

fn check_tube(space: &SpaceSpec, lambda: &SpectralPoint) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::Domain("non-finite spectral point".into()));
    }
    for s in &space.datum.simple {
        if dot(s, &lambda.im) < -WALL_TOL {
            return Err(Error::Domain(format!(
                "imaginary part {:?} outside the closed positive chamber",
                lambda.im
            )));
        }
    }
    Ok(())
}

/// 1/𝐜_α(z) for the reduced root with index `idx`.
pub fn c_alpha_inv(space: &SpaceSpec, idx: usize, z: Complex64) -> Result<Complex64> {
    CFunction::new(space).c_alpha_inv(idx, z)
}

pub fn plancherel_density(space: &SpaceSpec, lambda: &[f64]) -> f64 {
    CFunction::new(space).plancherel(lambda)
}

pub fn b_function(space: &SpaceSpec, lambda: &SpectralPoint) -> Result<Complex64> {
    CFunction::new(space).b_minus(space, lambda)
}

pub fn b_inv(space: &SpaceSpec, lambda: &SpectralPoint) -> Result<Complex64> {
    CFunction::new(space).b_minus_inv(space, lambda)
}

pub fn gamma_ratio_asymptotic(space: &SpaceSpec, idx: usize, z: Complex64) -> Result<Complex64> {
    CFunction::new(space).gamma_ratio_asymptotic(idx, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn space(tag: &str) -> SpaceSpec {
        SpaceSpec::from_tag(tag).unwrap()
    }

    #[test]
    fn h3_is_lambda_squared() {
        let c = CFunction::new(&space("Hr:3"));
        for &l in &[0.5, 1.0, 2.0, 4.0] {
            assert!((c.plancherel(&[l]) / (l * l) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn h2_is_tanh() {
        let c = CFunction::new(&space("Hr:2"));
        for &l in &[0.25, 1.0, 3.0] {
            let v = c.plancherel(&[l]);
            let oracle = PI * l * (PI * l).tanh();
            assert!((v / oracle - 1.0).abs() < 1e-10, "{l}: {v} vs {oracle}");
        }
    }

    #[test]
    fn conjugate_reflection() {
        for tag in ["Hr:2", "Hc:2", "Hq:2"] {
            let c = CFunction::new(&space(tag));
            let a = c.c_alpha_inv(0, cre(1.7)).unwrap();
            let b = c.c_alpha_inv(0, cre(-1.7)).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn zero_at_origin() {
        let s = space("Hr:2");
        assert_eq!(plancherel_density(&s, &[0.0]), 0.0);
        assert!(b_function(&s, &SpectralPoint::real(vec![0.0])).unwrap().norm() > 0.0);
    }

    #[test]
    fn tube_enforced() {
        let s = space("Hr:2");
        let bad = SpectralPoint::new(vec![1.0], vec![-0.5]);
        assert!(matches!(b_function(&s, &bad), Err(Error::Domain(_))));
        let ok = SpectralPoint::new(vec![1.0], vec![0.5]);
        assert!(b_inv(&s, &ok).is_ok());
    }

    #[test]
    fn factorization_identity() {
        let s = space("Hc:3");
        let c = CFunction::new(&s);
        for &l in &[0.3, 2.0, 7.0] {
            let lam = SpectralPoint::real(vec![l]);
            let lhs = c.plancherel(&[l]);
            let rhs = c.c_inv(&lam).unwrap() * c.c_inv(&lam.neg()).unwrap();
            assert!((rhs.re / lhs - 1.0).abs() < 1e-10 && rhs.im.abs() < 1e-10 * lhs);
            // c(−λ)^{-1} = 𝛑(−iλ) 𝐛(−λ)^{-1} with 𝛑(−iλ) = −iλ in rank one.
            let direct = c.c_inv(&lam.neg()).unwrap();
            let via_b = Complex64::new(0.0, -l) * c.b_minus_inv(&s, &lam).unwrap();
            assert!((direct - via_b).norm() < 1e-10 * direct.norm());
        }
    }

    #[test]
    fn pole_is_named() {
        let s = space("Hr:2");
        // Γ(iz+1/2) has a pole at iz = −1/2, i.e. z = i/2.
        let err = c_alpha_inv(&s, 0, Complex64::new(0.0, 0.5)).unwrap_err();
        match err {
            Error::GammaPole { factor, .. } => assert_eq!(factor, "Γ(iz+m_α/2)"),
            e => panic!("unexpected {e}"),
        }
    }
}
