//! Rank-one spherical functions: Jacobi functions φ_λ^{(a,b)}.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamma::{digamma, gamma_real};
use crate::harish::CFunction;
use crate::ode::Dopri;
use crate::quad::Adaptive;
use crate::spacegeom::{JacobiParams, SpaceSpec};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Below this radius φ_λ is evaluated from its power series at the origin.
pub const ORIGIN_RADIUS: f64 = 0.05;
/// Launch point of the radial ODE.
pub const ODE_LAUNCH: f64 = 1e-3;

/// Gauss series ₂F₁(a, b; c; z) for |z| < 1.
pub fn hyp2f1_series(a: C, b: C, cc: C, z: C) -> Result<C> {
    let mut term = c(1.0);
    let mut sum = c(1.0);
    let mut small = 0;
    for k in 0..5000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((cc + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Series { terms: 5000, mu: z.norm() })
}

/// φ_λ(r) and dφ/dr from ₂F₁((ρ+iλ)/2, (ρ−iλ)/2; a+1; −sinh²r).
pub fn phi_origin_series(jac: &JacobiParams, lambda: C, r: f64) -> Result<(C, C)> {
    let sh = r.sinh();
    if sh * sh > 0.8 {
        return Err(Error::Domain(format!("origin series used at r = {r}")));
    }
    let il = C::i() * lambda;
    let a = (il + jac.rho) / 2.0;
    let b = (-il + jac.rho) / 2.0;
    let cc = c(jac.a + 1.0);
    let z = c(-sh * sh);
    let f = hyp2f1_series(a, b, cc, z)?;
    let df = if r == 0.0 {
        c(0.0)
    } else {
        a * b / cc * hyp2f1_series(a + 1.0, b + 1.0, cc + 1.0, z)? * (-(2.0 * r).sinh())
    };
    Ok((f, df))
}

fn check_tube(jac: &JacobiParams, lambda: C) -> Result<()> {
    if lambda.im.abs() > jac.rho + 1e-12 || !lambda.re.is_finite() {
        return Err(Error::Domain(format!(
            "spectral parameter {lambda} outside the tube |Im λ| <= {}",
            jac.rho
        )));
    }
    Ok(())
}

/// φ_λ at the increasing radii `rs`, from the radial eigen-equation.
/// No tube restriction: the equation makes sense for every complex λ.
pub fn phi_ode_profile(jac: &JacobiParams, lambda: C, rs: &[f64]) -> Result<Vec<(C, C)>> {
    let mut out = Vec::with_capacity(rs.len());
    let mut ode_rs = Vec::new();
    for &r in rs {
        if r < ODE_LAUNCH {
            out.push(phi_origin_series(jac, lambda, r)?);
        } else {
            ode_rs.push(r);
        }
    }
    if ode_rs.is_empty() {
        return Ok(out);
    }
    let (u0, du0) = phi_origin_series(jac, lambda, ODE_LAUNCH)?;
    let k2 = lambda * lambda + jac.rho * jac.rho;
    let (p, q) = (2.0 * jac.a + 1.0, 2.0 * jac.b + 1.0);
    let solver = Dopri { rel_tol: 1e-11, abs_tol: 1e-300, ..Dopri::default() };
    let sol = solver.solve(
        |r, y: &[C; 2]| {
            let drift = p / r.tanh() + q * r.tanh();
            [y[1], -y[1] * drift - k2 * y[0]]
        },
        ODE_LAUNCH,
        [u0, du0],
        &ode_rs,
    )?;
    out.extend(sol.into_iter().map(|y| (y[0], y[1])));
    Ok(out)
}

/// φ_λ(r) by integrating the radial ODE from a series launch near 0.
pub fn phi_ode_rank1(jac: &JacobiParams, lambda: C, r: f64) -> Result<C> {
    check_tube(jac, lambda)?;
    if r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    Ok(phi_ode_profile(jac, lambda, &[r])?[0].0)
}

/// Dispatch: origin series for small r, ODE beyond.
pub fn phi_rank1(jac: &JacobiParams, lambda: C, r: f64) -> Result<C> {
    check_tube(jac, lambda)?;
    if r < ORIGIN_RADIUS {
        return Ok(phi_origin_series(jac, lambda, r)?.0);
    }
    phi_ode_rank1(jac, lambda, r)
}

/// cosh s − sinh s cos θ, written to stay accurate when it is tiny.
pub fn horo_base(theta: f64, s: f64) -> f64 {
    let (sh, ch) = (0.5 * theta).sin_cos();
    (-s).exp() * ch * ch + s.exp() * sh * sh
}

/// ⟨α, A(k⁻¹y)⟩ = −log(cosh s − sinh s cos θ).
pub fn iwasawa_a_rank1(theta: f64, s: f64) -> f64 {
    -horo_base(theta, s).ln()
}

/// Normalized measure of the sphere S^{n−1} in the polar angle:
/// c_n sin^{n−2}θ dθ with total mass one.
pub fn angular_normalization(n: u32) -> f64 {
    let n = n as f64;
    gamma_real(n / 2.0).unwrap() / (PI.sqrt() * gamma_real((n - 1.0) / 2.0).unwrap())
}

/// K-average ∫ f(θ) dk over the polar angle of S^{n−1}, using the
/// substitution tan(θ/2) = e^{−s} sinh v which resolves the peak of the
/// Poisson-type weight (cosh s − sinh s cos θ)^{-p} at θ = 0.
///
/// `f` receives (θ, log(cosh s − sinh s cos θ)).
pub fn k_average<F>(n: u32, s: f64, rel_tol: f64, mut f: F) -> Result<C>
where
    F: FnMut(f64, f64) -> C,
{
    let cn = angular_normalization(n);
    let es = (-s).exp();
    let v_max = s + 40.0;
    let q = Adaptive { rel_tol, abs_tol: 1e-300, max_intervals: 20000 };
    let panels = (v_max.ceil() as usize).max(4) * 2;
    let val = q.integrate(
        |v| {
            let t = es * v.sinh();
            let ln1t2 = if t > 1e8 { 2.0 * t.ln() } else { (t * t).ln_1p() };
            let theta = 2.0 * t.atan();
            let ln_base = -s + 2.0 * ln_cosh(v) - ln1t2;
            let jac = 2.0 * es * v.cosh() * (-ln1t2).exp();
            let sin_pow = if n == 2 { 1.0 } else { (2.0 * t * (-ln1t2).exp()).powi(n as i32 - 2) };
            f(theta, ln_base) * (jac * sin_pow)
        },
        0.0,
        v_max,
        panels,
    )?;
    Ok(val * cn)
}

fn ln_cosh(v: f64) -> f64 {
    let a = v.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// φ_λ(r) = ∫_K e^{⟨iλ+ρ, A(kx)⟩} dk on the real hyperbolic space H^n.
pub fn phi_integral_rank1(space: &SpaceSpec, lambda: C, r: f64) -> Result<C> {
    let n = space
        .real_hyperbolic_dim()
        .ok_or_else(|| Error::Domain("integral representation needs a real hyperbolic space".into()))?;
    let rho = space.rho[0];
    if lambda.im.abs() > rho + 1e-12 {
        return Err(Error::Domain(format!("spectral parameter {lambda} outside the tube")));
    }
    if r == 0.0 {
        return Ok(c(1.0));
    }
    let e = -(C::i() * lambda + rho);
    k_average(n, r, 1e-12, |_, ln_base| (e * ln_base).exp())
}

/// Harish-Chandra coefficients γ_k(λ), k = 0..=kmax, of
/// Φ_λ(r) = e^{(iλ−ρ)r} Σ_k γ_k(λ) e^{−2kr} in rank one.
pub fn gamma_coeffs(jac: &JacobiParams, lambda: C, kmax: usize) -> Vec<C> {
    let (m, m2) = multiplicities(jac);
    let s = C::i() * lambda - jac.rho;
    let il = C::i() * lambda;
    let mut g = Vec::with_capacity(kmax + 1);
    g.push(c(1.0));
    let mut all = c(0.0);
    let mut parity = [c(0.0), c(0.0)];
    for k in 1..=kmax {
        let i = k - 1;
        let term = (s - 2.0 * i as f64) * g[i];
        all += term;
        parity[i % 2] += term;
        let rhs = -(all * (2.0 * m) + parity[k % 2] * (4.0 * m2));
        let kf = k as f64;
        g.push(rhs / ((kf - il) * (4.0 * kf)));
    }
    g
}

/// (m_α, m_{2α}) recovered from the Jacobi parameters.
pub fn multiplicities(jac: &JacobiParams) -> (f64, f64) {
    (2.0 * (jac.a - jac.b), 2.0 * jac.b + 1.0)
}

/// Σ_k γ_k e^{−2kr}, or `None` if the available coefficients do not
/// reach relative accuracy `tol`.
pub fn series_sum(coeffs: &[C], r: f64, tol: f64) -> Option<C> {
    let x = (-2.0 * r).exp();
    let mut xk = 1.0;
    let mut sum = c(0.0);
    let mut small = 0;
    for g in coeffs {
        let term = *g * xk;
        sum += term;
        if term.norm() <= tol * sum.norm() {
            small += 1;
            if small >= 3 {
                return Some(sum);
            }
        } else {
            small = 0;
        }
        xk *= x;
        if xk == 0.0 {
            return Some(sum);
        }
    }
    None
}

/// Number of coefficients that comfortably converges the series at r.
pub fn coeffs_needed(r: f64) -> usize {
    ((22.0 / r).ceil() as usize + 30).min(2000)
}

/// φ_λ(r) for real λ ≠ 0 from the Harish-Chandra expansion
/// c(λ)Φ_λ + c(−λ)Φ_{−λ}.
pub fn phi_hc_rank1(cf: &CFunction, jac: &JacobiParams, lambda: f64, r: f64) -> Result<C> {
    let mut acc = c(0.0);
    for l in [lambda, -lambda] {
        let lc = c(l);
        let coeffs = gamma_coeffs(jac, lc, 200);
        let sum = series_sum(&coeffs, r, 1e-15).ok_or(Error::Series { terms: 200, mu: r })?;
        let c_val = 1.0 / cf.c_alpha_inv(0, lc)?;
        acc += c_val * ((C::i() * l - jac.rho) * r).exp() * sum;
    }
    Ok(acc)
}

/// Ground spherical function φ₀ in rank one. Large radii use the λ → 0
/// limit of the Harish-Chandra expansion, which needs γ_k(0), their
/// λ-derivatives and 𝐛'(0)/𝐛(0).
#[derive(Debug, Clone)]
pub struct Phi0Rank1 {
    jac: JacobiParams,
    b0: f64,
    beta: f64,
    g: Vec<f64>,
    gd: Vec<f64>,
}

/// Radius beyond which the expansion is used.
const PHI0_SERIES_FROM: f64 = 1.0;
const PHI0_TERMS: usize = 120;

impl Phi0Rank1 {
    pub fn new(jac: JacobiParams, cf: &CFunction) -> Self {
        let (m, m2) = multiplicities(&jac);
        let rho = jac.rho;
        let mut beta = digamma(1.0) - digamma(m / 2.0);
        if m2 > 0.0 {
            beta += 0.5 * (digamma(m / 4.0) - digamma(m / 4.0 + m2 / 2.0));
        }
        // Recursion in the variable μ = iλ at μ = 0, with its μ-derivative.
        let kmax = PHI0_TERMS;
        let mut g = vec![1.0];
        let mut gd = vec![0.0];
        let (mut all, mut alld) = (0.0, 0.0);
        let mut par = [0.0, 0.0];
        let mut pard = [0.0, 0.0];
        for k in 1..=kmax {
            let i = k - 1;
            let si = -rho - 2.0 * i as f64;
            all += si * g[i];
            par[i % 2] += si * g[i];
            alld += si * gd[i] + g[i];
            pard[i % 2] += si * gd[i] + g[i];
            let kf = k as f64;
            let rhs = -(2.0 * m * all + 4.0 * m2 * par[k % 2]);
            let rhsd = -(2.0 * m * alld + 4.0 * m2 * pard[k % 2]);
            let gk = rhs / (4.0 * kf * kf);
            g.push(gk);
            gd.push((rhsd + 4.0 * kf * gk) / (4.0 * kf * kf));
        }
        Phi0Rank1 { jac, b0: cf.b_zero(), beta, g, gd }
    }

    pub fn jacobi(&self) -> &JacobiParams {
        &self.jac
    }

    /// log φ₀(r) for r ≥ 1, safe for very large r.
    fn ln_far(&self, r: f64) -> f64 {
        let x = (-2.0 * r).exp();
        let (mut s0, mut s1, mut xk) = (0.0, 0.0, 1.0);
        for (g, gd) in self.g.iter().zip(&self.gd) {
            s0 += g * xk;
            s1 += gd * xk;
            xk *= x;
            if xk < 1e-18 {
                break;
            }
        }
        (2.0 * self.b0 * ((self.beta + r) * s0 + s1)).ln() - self.jac.rho * r
    }

    pub fn ln_eval(&self, r: f64) -> Result<f64> {
        if r >= PHI0_SERIES_FROM {
            return Ok(self.ln_far(r));
        }
        Ok(self.eval_near(r)?.ln())
    }

    fn eval_near(&self, r: f64) -> Result<f64> {
        if r < ORIGIN_RADIUS {
            return Ok(phi_origin_series(&self.jac, c(0.0), r)?.0.re);
        }
        Ok(phi_ode_profile(&self.jac, c(0.0), &[r])?[0].0.re)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r >= PHI0_SERIES_FROM {
            return Ok(self.ln_far(r).exp());
        }
        self.eval_near(r)
    }

    /// C₂ = 𝛑(ρ₀)^{-1} 𝐛(0) with 𝛑(ρ₀) = 1/2 in rank one.
    pub fn c2(&self) -> f64 {
        2.0 * self.b0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jac(tag: &str) -> (SpaceSpec, JacobiParams) {
        let s = SpaceSpec::from_tag(tag).unwrap();
        let j = s.jacobi().unwrap();
        (s, j)
    }

    fn h3_phi(l: f64, r: f64) -> f64 {
        (l * r).sin() / (l * r.sinh())
    }

    #[test]
    fn origin_series_matches_h3() {
        let (_, j) = jac("Hr:3");
        for &r in &[0.0, 0.01, 0.04, 0.3] {
            let (v, _) = phi_origin_series(&j, c(1.5), r).unwrap();
            let exact = if r == 0.0 { 1.0 } else { h3_phi(1.5, r) };
            assert!((v.re - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn ode_matches_h3() {
        let (_, j) = jac("Hr:3");
        let rs = [0.1, 1.0, 5.0, 10.0];
        let prof = phi_ode_profile(&j, c(2.0), &rs).unwrap();
        for (r, (v, _)) in rs.iter().zip(prof) {
            assert!((v.re - h3_phi(2.0, *r)).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn integral_matches_h3() {
        let (s, _) = jac("Hr:3");
        for &l in &[0.5, 4.0] {
            for &r in &[0.1, 3.0, 10.0] {
                let v = phi_integral_rank1(&s, c(l), r).unwrap();
                assert!((v.re - h3_phi(l, r)).abs() < 1e-10 && v.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn h3_coefficients_are_one() {
        let (_, j) = jac("Hr:3");
        let g = gamma_coeffs(&j, C::new(0.7, 0.2), 10);
        for v in g {
            assert!((v - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn hc_matches_ode_h2() {
        let (s, j) = jac("Hr:2");
        let cf = CFunction::new(&s);
        let hc = phi_hc_rank1(&cf, &j, 1.0, 6.0).unwrap();
        let ode = phi_ode_rank1(&j, c(1.0), 6.0).unwrap();
        assert!((hc - ode).norm() < 1e-9 * ode.norm().max(1e-3), "{hc} vs {ode}");
    }

    #[test]
    fn phi0_far_matches_near() {
        for tag in ["Hr:2", "Hr:3", "Hc:2", "Hq:2"] {
            let (s, j) = jac(tag);
            let p = Phi0Rank1::new(j, &CFunction::new(&s));
            for &r in &[1.0, 1.5, 3.0] {
                let far = p.ln_far(r).exp();
                let near = p.eval_near(r).unwrap();
                assert!((far / near - 1.0).abs() < 1e-9, "{tag} r={r}: {far} vs {near}");
            }
        }
    }

    #[test]
    fn iwasawa_special_values() {
        assert_eq!(iwasawa_a_rank1(0.7, 0.0), 0.0);
        assert!((iwasawa_a_rank1(0.0, 1.3) - 1.3).abs() < 1e-15);
        assert!((iwasawa_a_rank1(PI, 1.3) + 1.3).abs() < 1e-14);
    }
}
