//! Heat kernel h_t by spherical inversion, its envelope and asymptotics,
//! the concentration region Ω_t and calibration of the normalization.
//!
//! Rank one: for r ≥ 0.05 the inversion integral is moved to the line
//! λ = μ + i r/2t, where the Gaussian phase cancels the oscillation of
//! Φ_λ(r) and the integrand becomes positive and smooth:
//!
//!   h_t(r) = 4C₀ e^{−ρ²t−ρr−r²/4t} Re ∫₀^∞ 𝐜(−λ)^{-1} S_λ(r) e^{−tμ²} dμ,
//!
//! with S_λ(r) = Σ γ_k(λ)e^{−2kr}. Near the origin the real axis is used.
//! Complex type in rank two uses the same shift with the product form of
//! Φ_λ and tensor Gauss–Hermite nodes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harish::{CFunction, SpectralPoint};
use crate::quad::{gauss_hermite, gauss_legendre, gl_panel_nodes};
use crate::spacegeom::{dot, log_density, mu_min, norm, JacobiParams, SpaceSpec};
use crate::spherical::rank1::{coeffs_needed, gamma_coeffs, phi_origin_series, series_sum, ORIGIN_RADIUS};
use crate::spherical::Phi0;

type C = Complex64;

pub const T_MIN: f64 = 0.05;
pub const T_REF: f64 = 1.0;
/// Spectral cutoff Λ(t) = √(CUTOFF/t): the Gaussian factor is below e^{−80}.
const CUTOFF: f64 = 80.0;

/// e^{−t(|λ|²+|ρ|²)}.
pub fn heat_transform(space: &SpaceSpec, lambda: &[f64], t: f64) -> f64 {
    (-t * (dot(lambda, lambda) + space.rho_sq())).exp()
}

/// ε(t) = t^{−p}, r(t) = √t/ε(t), Ω_t = B(2tρ, r(t)) ∩ a⁺.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationSpec {
    pub eps_power: f64,
    pub scale: f64,
}

impl Default for ConcentrationSpec {
    fn default() -> Self {
        ConcentrationSpec { eps_power: 0.25, scale: 1.0 }
    }
}

impl ConcentrationSpec {
    pub fn eps(&self, t: f64) -> f64 {
        t.powf(-self.eps_power) * self.scale
    }

    pub fn radius(&self, t: f64) -> f64 {
        t.sqrt() / self.eps(t)
    }

    pub fn center(&self, space: &SpaceSpec, t: f64) -> Vec<f64> {
        space.rho.iter().map(|x| 2.0 * t * x).collect()
    }

    pub fn contains(&self, space: &SpaceSpec, t: f64, h: &[f64]) -> bool {
        let c = self.center(space, t);
        let d: f64 = h.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        d <= self.radius(t)
    }
}

/// A quadrature node on a⁺ carrying log(c_meas δ(H) w).
#[derive(Debug, Clone)]
pub struct Node {
    pub h: Vec<f64>,
    pub ln_w: f64,
}

/// Σ exp(ln_w + ln f)·sign over nodes, summed in node order.
pub fn sum_nodes(nodes: &[Node], vals: &[(f64, f64)]) -> f64 {
    nodes.iter().zip(vals).map(|(n, (ln_f, s))| s * (n.ln_w + ln_f).exp()).sum()
}

#[derive(Debug, Clone)]
enum Kind {
    Rank1 { jac: JacobiParams },
    Complex,
}

#[derive(Debug, Clone)]
pub struct HeatEngine {
    pub space: SpaceSpec,
    pub cf: CFunction,
    pub phi0: Phi0,
    /// Radial integrals over X are c_meas ∫_{a⁺} δ(H) f(H) dH.
    pub c_meas: f64,
    /// Calibrated inversion constant.
    pub c0: f64,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EngineInfo {
    pub c_meas: f64,
    pub c0: f64,
    pub t_ref: f64,
    pub cutoff: f64,
}

impl HeatEngine {
    pub fn new(space: &SpaceSpec) -> Result<Self> {
        let kind = if let Some(jac) = space.jacobi() {
            Kind::Rank1 { jac }
        } else if space.is_complex_type() && space.rank() == 2 {
            Kind::Complex
        } else {
            return Err(Error::Domain(format!(
                "heat kernel is implemented for rank one and rank-two complex type, not {}",
                space.name
            )));
        };
        let mut e = HeatEngine {
            space: space.clone(),
            cf: CFunction::new(space),
            phi0: Phi0::new(space)?,
            c_meas: space.measure_constant(),
            c0: 1.0,
            kind,
        };
        // The kernel is linear in C₀, so one raw mass fixes it.
        let raw = e.total_mass(T_REF)?;
        e.c0 = 1.0 / raw;
        Ok(e)
    }

    pub fn info(&self) -> EngineInfo {
        EngineInfo { c_meas: self.c_meas, c0: self.c0, t_ref: T_REF, cutoff: CUTOFF }
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t >= T_MIN) {
            return Err(Error::Domain(format!("t = {t} is below t_min = {T_MIN}")));
        }
        Ok(())
    }

    /// log h_t(exp H).
    pub fn ln_heat_kernel(&self, t: f64, h: &[f64]) -> Result<f64> {
        self.check_t(t)?;
        match &self.kind {
            Kind::Rank1 { jac } => self.ln_rank1(jac, t, h[0].abs()),
            Kind::Complex => self.ln_complex(t, h),
        }
    }

    pub fn heat_kernel(&self, t: f64, h: &[f64]) -> Result<f64> {
        Ok(self.ln_heat_kernel(t, h)?.exp())
    }

    fn spectral_nodes(t: f64) -> Vec<(f64, f64)> {
        let lam = (CUTOFF / t).sqrt();
        let width = (1.0 / t.sqrt()).min(1.0);
        let panels = (lam / width).ceil() as usize;
        gl_panel_nodes(0.0, lam, panels.max(1), 16)
    }

    fn ln_rank1(&self, jac: &JacobiParams, t: f64, r: f64) -> Result<f64> {
        let rho = jac.rho;
        let nodes = Self::spectral_nodes(t);
        if r < ORIGIN_RADIUS {
            let mut acc = 0.0;
            for (l, w) in nodes {
                let phi = phi_origin_series(jac, C::new(l, 0.0), r)?.0.re;
                acc += w * self.cf.plancherel(&[l]) * phi * (-t * l * l).exp();
            }
            return positive_ln(2.0 * acc, t, r).map(|v| v + self.c0.ln() - rho * rho * t);
        }
        let eta = r / (2.0 * t);
        let k = coeffs_needed(r);
        let mut acc = 0.0;
        for (mu, w) in nodes {
            let lam = C::new(mu, eta);
            let s = series_sum(&gamma_coeffs(jac, lam, k), r, 1e-16)
                .ok_or(Error::Series { terms: k, mu: r })?;
            let ci = self.cf.c_alpha_inv(0, -lam)?;
            acc += w * (ci * s).re * (-t * mu * mu).exp();
        }
        let ln = positive_ln(4.0 * acc, t, r)?;
        Ok(ln + self.c0.ln() - rho * rho * t - rho * r - r * r / (4.0 * t))
    }

    fn ln_complex(&self, t: f64, h: &[f64]) -> Result<f64> {
        let sp = &self.space;
        let mut h = h.to_vec();
        if mu_min(sp, &h) < 1e-6 {
            let rn = norm(&sp.rho);
            for (x, r) in h.iter_mut().zip(&sp.rho) {
                *x += 1e-6 * r / rn;
            }
        }
        let eta: Vec<f64> = h.iter().map(|x| x / (2.0 * t)).collect();
        let gh = gauss_hermite(8);
        let st = t.sqrt();
        let mut acc = C::new(0.0, 0.0);
        for (x1, w1) in gh.nodes.iter().zip(&gh.weights) {
            for (x2, w2) in gh.nodes.iter().zip(&gh.weights) {
                let lam = SpectralPoint::new(vec![-x1 / st, -x2 / st], eta.iter().map(|e| -e).collect());
                acc += self.cf.c_inv(&lam)? * (w1 * w2);
            }
        }
        let integral = acc.re / t;
        let mut ln = self.c0.ln() + (sp.weyl_order() as f64).ln() - sp.rho_sq() * t - dot(&sp.rho, &h)
            - dot(&h, &h) / (4.0 * t);
        for a in &sp.datum.roots {
            ln -= (-(-2.0 * dot(a, &h)).exp()).ln_1p();
        }
        Ok(ln + positive_ln(integral, t, norm(&h))?)
    }

    /// Quadrature nodes covering where δ h_t lives at time t.
    pub fn support_nodes(&self, t: f64) -> Vec<Node> {
        let sd = (2.0 * t).sqrt();
        let c: Vec<f64> = self.space.rho.iter().map(|x| 2.0 * t * x).collect();
        match self.kind {
            Kind::Rank1 { .. } => {
                let lo = (c[0] - 14.0 * sd).max(0.0);
                let hi = c[0] + 14.0 * sd;
                self.interval_nodes(lo, hi, sd / 2.0)
            }
            Kind::Complex => self.box_nodes(&c, 13.0 * sd, sd / 1.5),
        }
    }

    /// Rank-one nodes on [a, b] with panel width about `width`.
    pub fn interval_nodes(&self, a: f64, b: f64, width: f64) -> Vec<Node> {
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        gl_panel_nodes(a, b, panels, 16)
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(r, w)| Node {
                ln_w: self.c_meas.ln() + log_density(&self.space, &[r]) + w.ln(),
                h: vec![r],
            })
            .filter(|n| n.ln_w.is_finite())
            .collect()
    }

    /// Rank-two nodes in the coordinates u_i = ⟨α_i, H⟩ ≥ 0 on the square
    /// around `center` of half-width `half` (in H units), clipped to a⁺.
    pub fn box_nodes(&self, center: &[f64], half: f64, width: f64) -> Vec<Node> {
        let simple = &self.space.datum.simple;
        let (a1, a2) = (&simple[0], &simple[1]);
        let det = (a1[0] * a2[1] - a1[1] * a2[0]).abs();
        let axis = |a: &Vec<f64>| {
            let c = dot(a, center);
            let hw = half * norm(a);
            let lo = (c - hw).max(0.0);
            let hi = c + hw;
            let panels = ((hi - lo) / (width * norm(a))).ceil().max(1.0) as usize;
            gl_panel_nodes(lo, hi, panels, 16)
        };
        let (us, vs) = (axis(a1), axis(a2));
        let mut out = Vec::with_capacity(us.len() * vs.len());
        for (u, wu) in &us {
            for (v, wv) in &vs {
                // Solve ⟨a1,H⟩ = u, ⟨a2,H⟩ = v.
                let h = vec![(u * a2[1] - v * a1[1]) / (a1[0] * a2[1] - a1[1] * a2[0]),
                             (v * a1[0] - u * a2[0]) / (a1[0] * a2[1] - a1[1] * a2[0])];
                let ln_w = self.c_meas.ln() + log_density(&self.space, &h) + (wu * wv / det).ln();
                if ln_w.is_finite() {
                    out.push(Node { h, ln_w });
                }
            }
        }
        out
    }

    /// Nodes on the disc B(center, radius) ∩ a⁺ in polar coordinates
    /// around the center (rank two).
    pub fn disc_nodes(&self, center: &[f64], radius: f64) -> Vec<Node> {
        let sr = gauss_legendre(24).mapped(0.0, radius).collect::<Vec<_>>();
        let panels = 8;
        let th = gl_panel_nodes(0.0, 2.0 * std::f64::consts::PI, panels, 16);
        let mut out = Vec::new();
        let rings = (radius / 4.0).ceil().max(1.0) as usize;
        let radial = if rings > 1 { gl_panel_nodes(0.0, radius, rings, 16) } else { sr };
        for (s, ws) in &radial {
            for (a, wa) in &th {
                let h = vec![center[0] + s * a.cos(), center[1] + s * a.sin()];
                if self.space.datum.simple.iter().any(|al| dot(al, &h) <= 0.0) {
                    continue;
                }
                let ln_w = self.c_meas.ln() + log_density(&self.space, &h) + (ws * wa * s).ln();
                if ln_w.is_finite() {
                    out.push(Node { h, ln_w });
                }
            }
        }
        out
    }

    /// log h_t at every node, in node order.
    pub fn ln_kernel_at(&self, t: f64, nodes: &[Node]) -> Result<Vec<f64>> {
        nodes.par_iter().map(|n| self.ln_heat_kernel(t, &n.h)).collect()
    }

    /// c_meas ∫ δ h_t f over the nodes, with f given in log-sign form.
    pub fn integrate_kernel<F>(&self, t: f64, nodes: &[Node], f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> (f64, f64) + Sync,
    {
        let lh = self.ln_kernel_at(t, nodes)?;
        let vals: Vec<(f64, f64)> = nodes
            .par_iter()
            .zip(&lh)
            .map(|(n, l)| {
                let (lf, s) = f(&n.h);
                (l + lf, s)
            })
            .collect();
        Ok(sum_nodes(nodes, &vals))
    }

    /// c_meas ∫ δ h_t.
    pub fn total_mass(&self, t: f64) -> Result<f64> {
        let nodes = self.support_nodes(t);
        self.integrate_kernel(t, &nodes, |_| (0.0, 1.0))
    }

    /// c_meas ∫ δ h_t φ_{−λ}: equals e^{−t(λ²+ρ²)} (rank one).
    pub fn transform_round_trip(&self, t: f64, lambda: f64) -> Result<f64> {
        let jac = match &self.kind {
            Kind::Rank1 { jac } => *jac,
            Kind::Complex => {
                return Err(Error::Domain("round trip is implemented in rank one".into()));
            }
        };
        let nodes = self.support_nodes(t);
        let rs: Vec<f64> = nodes.iter().map(|n| n.h[0]).collect();
        let phis = crate::spherical::rank1::phi_ode_profile(&jac, C::new(-lambda, 0.0), &sorted_check(&rs)?)?;
        let lh = self.ln_kernel_at(t, &nodes)?;
        Ok(nodes
            .iter()
            .zip(&lh)
            .zip(&phis)
            .map(|((n, l), (p, _))| (n.ln_w + l).exp() * p.re)
            .sum())
    }

    /// t^{−n/2} ∏(1+t+⟨α,H⟩)^{(m_α+m_{2α})/2−1} φ₀ e^{−|ρ|²t−|H|²/4t}, in logs.
    pub fn ln_envelope(&self, t: f64, h: &[f64]) -> Result<f64> {
        let sp = &self.space;
        let mut ln = -(sp.n as f64) / 2.0 * t.ln() + self.phi0.ln_eval(h)? - sp.rho_sq() * t
            - dot(h, h) / (4.0 * t);
        for (a, &(m1, m2)) in sp.datum.roots.iter().zip(&sp.datum.mult) {
            let p = (m1 + m2) as f64 / 2.0 - 1.0;
            ln += p * (1.0 + t + dot(a, h)).ln();
        }
        Ok(ln)
    }

    pub fn heat_envelope(&self, t: f64, h: &[f64]) -> Result<f64> {
        Ok(self.ln_envelope(t, h)?.exp())
    }

    /// C₁ = C₀ 2^{−|Σ_r⁺|}|W|π^{ℓ/2}𝛑(ρ₀)𝐛(0)^{-1}.
    pub fn c1(&self) -> f64 {
        let sp = &self.space;
        let pi_rho0: f64 = sp.datum.roots.iter().map(|a| dot(a, &sp.rho0)).product();
        self.c0 * 2f64.powi(-(sp.datum.roots.len() as i32)) * sp.weyl_order() as f64
            * std::f64::consts::PI.powf(sp.rank() as f64 / 2.0)
            * pi_rho0
            / self.cf.b_zero()
    }

    /// C₃ = C₁ 𝛑(ρ₀)^{-1}.
    pub fn c3(&self) -> f64 {
        let sp = &self.space;
        let pi_rho0: f64 = sp.datum.roots.iter().map(|a| dot(a, &sp.rho0)).product();
        self.c1() / pi_rho0
    }

    /// log of C₁ t^{−ν/2} 𝐛(−iH/2t)^{-1} φ₀ e^{−|ρ|²t−|H|²/4t}.
    pub fn ln_critical_asymptote(&self, t: f64, h: &[f64]) -> Result<f64> {
        let sp = &self.space;
        if mu_min(sp, h) < 5.0 || t < 5.0 {
            return Err(Error::Domain(format!("critical asymptote needs μ(H) ≥ 5 and t ≥ 5 (t = {t})")));
        }
        let lam = SpectralPoint::new(vec![0.0; h.len()], h.iter().map(|x| x / (2.0 * t)).collect());
        let binv = self.cf.b_minus_inv(sp, &lam)?;
        Ok(self.c1().ln() - sp.nu as f64 / 2.0 * t.ln() + binv.re.ln() + self.phi0.ln_eval(h)?
            - sp.rho_sq() * t
            - dot(h, h) / (4.0 * t))
    }

    pub fn critical_asymptote(&self, t: f64, h: &[f64]) -> Result<f64> {
        Ok(self.ln_critical_asymptote(t, h)?.exp())
    }

    /// Nodes of Ω_t.
    pub fn omega_nodes(&self, spec: &ConcentrationSpec, t: f64) -> Vec<Node> {
        let c = spec.center(&self.space, t);
        let r = spec.radius(t);
        match self.kind {
            Kind::Rank1 { .. } => {
                let lo = (c[0] - r).max(0.0);
                self.interval_nodes(lo, c[0] + r, (2.0 * t).sqrt() / 2.0)
            }
            Kind::Complex => self.disc_nodes(&c, r),
        }
    }

    /// 1 − c_meas ∫_{Ω_t} δ h_t.
    pub fn mass_outside(&self, spec: &ConcentrationSpec, t: f64) -> Result<f64> {
        if t < 1.0 {
            return Err(Error::Domain("mass_outside needs t ≥ 1".into()));
        }
        let nodes = self.omega_nodes(spec, t);
        Ok(1.0 - self.integrate_kernel(t, &nodes, |_| (0.0, 1.0))?)
    }

    /// t^{ν/2} e^{|ρ|²t} (h_t(0) − h_{t+t'}(0)).
    pub fn delayed_kernel_gap(&self, t: f64, tp: f64) -> Result<f64> {
        let sp = &self.space;
        let zero = vec![0.0; sp.rank()];
        if tp == 0.0 {
            return Ok(0.0);
        }
        let a = self.ln_heat_kernel(t, &zero)?;
        let b = self.ln_heat_kernel(t + tp, &zero)?;
        let scale = sp.nu as f64 / 2.0 * t.ln() + sp.rho_sq() * t;
        Ok((a + scale).exp() * -(b - a).exp_m1())
    }
}

/// Spacing of the η-bins used by [`HeatEngine::invert_rank1`], in units of 1/√t.
const ETA_BIN: f64 = 0.25;

/// Per-radius result of a weighted inversion: value_j = exp(ln_scale)·values[j].
#[derive(Debug, Clone)]
pub struct Inverted {
    pub ln_scale: f64,
    pub values: Vec<f64>,
}

impl HeatEngine {
    /// Jacobi parameters in rank one.
    pub fn jacobi(&self) -> Result<JacobiParams> {
        match &self.kind {
            Kind::Rank1 { jac } => Ok(*jac),
            Kind::Complex => Err(Error::Domain("operation is implemented in rank one".into())),
        }
    }

    /// C₀ ∫ |𝐜(λ)|^{-2} W_j(λ) φ_λ(r) e^{−t(λ²+ρ²)} dλ for each r and each
    /// weight W_j, where W_j are even entire functions real on the real
    /// axis (a constant, a spherical transform).
    ///
    /// Radii are grouped into bins of the contour height η ≈ r/2t so that
    /// c(−λ)^{-1}, γ_k(λ) and W(λ) are computed once per bin.
    pub fn invert_rank1<W>(&self, t: f64, rs: &[f64], nw: usize, weight: W) -> Result<Vec<Inverted>>
    where
        W: Fn(&[C]) -> Result<Vec<Vec<C>>> + Sync,
    {
        self.check_t(t)?;
        let jac = self.jacobi()?;
        let rho = jac.rho;
        let nodes = Self::spectral_nodes(t);
        let ln_c0 = self.c0.ln();
        let mut out: Vec<Option<Inverted>> = vec![None; rs.len()];

        let near: Vec<usize> = (0..rs.len()).filter(|&i| rs[i] < ORIGIN_RADIUS).collect();
        if !near.is_empty() {
            let lams: Vec<C> = nodes.iter().map(|(l, _)| C::new(*l, 0.0)).collect();
            let ws = weight(&lams)?;
            let dens: Vec<f64> = nodes.iter().map(|(l, _)| self.cf.plancherel(&[*l])).collect();
            for &i in &near {
                let mut vals = vec![0.0; nw];
                for (k, (l, w)) in nodes.iter().enumerate() {
                    let phi = phi_origin_series(&jac, lams[k], rs[i])?.0;
                    let f = w * dens[k] * (-t * l * l).exp() * 2.0;
                    for j in 0..nw {
                        vals[j] += f * (ws[k][j] * phi).re;
                    }
                }
                out[i] = Some(Inverted { ln_scale: ln_c0 - rho * rho * t, values: vals });
            }
        }

        let d_eta = ETA_BIN / t.sqrt();
        let mut bins: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
        for (i, &r) in rs.iter().enumerate() {
            if r >= ORIGIN_RADIUS {
                bins.entry((r / (2.0 * t * d_eta)).round() as i64).or_default().push(i);
            }
        }
        let bins: Vec<(i64, Vec<usize>)> = bins.into_iter().collect();
        let done: Vec<Vec<(usize, Inverted)>> = bins
            .par_iter()
            .map(|(b, idx)| -> Result<Vec<(usize, Inverted)>> {
                let eta = *b as f64 * d_eta;
                let lams: Vec<C> = nodes.iter().map(|(m, _)| C::new(*m, eta)).collect();
                let ws = weight(&lams)?;
                let r_min = idx.iter().map(|&i| rs[i]).fold(f64::INFINITY, f64::min);
                let kmax = coeffs_needed(r_min);
                let mut pre = Vec::with_capacity(lams.len());
                for (k, lam) in lams.iter().enumerate() {
                    let ci = self.cf.c_alpha_inv(0, -*lam)?;
                    let (mu, w) = nodes[k];
                    pre.push((ci * (w * (-t * mu * mu).exp()), gamma_coeffs(&jac, *lam, kmax)));
                }
                let mut res = Vec::with_capacity(idx.len());
                for &i in idx {
                    let r = rs[i];
                    let mut acc = vec![C::new(0.0, 0.0); nw];
                    for (k, (cw, g)) in pre.iter().enumerate() {
                        let s = series_sum(g, r, 1e-16).ok_or(Error::Series { terms: kmax, mu: r })?;
                        let phase = C::from_polar(1.0, nodes[k].0 * (r - 2.0 * t * eta));
                        let base = *cw * s * phase;
                        for j in 0..nw {
                            acc[j] += base * ws[k][j];
                        }
                    }
                    res.push((
                        i,
                        Inverted {
                            ln_scale: ln_c0 - rho * rho * t - rho * r - eta * r + t * eta * eta,
                            values: acc.iter().map(|v| 4.0 * v.re).collect(),
                        },
                    ));
                }
                Ok(res)
            })
            .collect::<Result<Vec<_>>>()?;
        for bin in done {
            for (i, v) in bin {
                out[i] = Some(v);
            }
        }
        Ok(out.into_iter().map(|v| v.expect("every radius is assigned")).collect())
    }

    /// log h_t tabulated on a uniform grid of [0, r_max].
    pub fn kernel_table(&self, t: f64, r_max: f64) -> Result<KernelTable> {
        let dr = TABLE_STEP;
        let n = (r_max / dr).ceil() as usize + 4;
        let rs: Vec<f64> = (0..=n).map(|j| j as f64 * dr).collect();
        let inv = self.invert_rank1(t, &rs, 1, |l| Ok(vec![vec![C::new(1.0, 0.0)]; l.len()]))?;
        let mut ln_h = Vec::with_capacity(rs.len());
        for (r, v) in rs.iter().zip(inv) {
            ln_h.push(v.ln_scale + positive_ln(v.values[0], t, *r)?);
        }
        Ok(KernelTable::new(dr, ln_h))
    }
}

const TABLE_STEP: f64 = 0.05;

/// An even function of r given by samples of its logarithm on a uniform
/// grid, evaluated by six-point Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct KernelTable {
    dr: f64,
    ln: Vec<f64>,
}

impl KernelTable {
    pub fn new(dr: f64, ln: Vec<f64>) -> Self {
        KernelTable { dr, ln }
    }

    pub fn r_max(&self) -> f64 {
        (self.ln.len() - 4) as f64 * self.dr
    }

    pub fn ln_eval(&self, r: f64) -> f64 {
        let x = r.abs() / self.dr;
        let n = self.ln.len() as i64;
        let i0 = (x.floor() as i64 - 2).min(n - 6);
        let mut acc = 0.0;
        for a in 0..6 {
            let ia = i0 + a;
            let mut l = 1.0;
            for b in 0..6 {
                if a != b {
                    l *= (x - (i0 + b) as f64) / (a - b) as f64;
                }
            }
            acc += l * self.ln[ia.unsigned_abs() as usize];
        }
        acc
    }
}

fn positive_ln(v: f64, t: f64, r: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::Domain(format!("inversion integral not positive at t = {t}, |H| = {r}: {v}")))
    }
}

fn sorted_check(rs: &[f64]) -> Result<Vec<f64>> {
    if rs.windows(2).all(|w| w[0] <= w[1]) {
        Ok(rs.to_vec())
    } else {
        Err(Error::Domain("radii must be increasing".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h3_exact(t: f64, r: f64) -> f64 {
        let g = if r == 0.0 { 1.0 } else { r / r.sinh() };
        (4.0 * PI * t).powf(-1.5) * g * (-t - r * r / (4.0 * t)).exp()
    }

    #[test]
    fn h3_closed_form() {
        let e = HeatEngine::new(&SpaceSpec::from_tag("Hr:3").unwrap()).unwrap();
        assert!((e.c0 * 4.0 * PI * PI - 1.0).abs() < 1e-8, "{}", e.c0);
        for &t in &[0.5, 1.0, 2.0, 5.0] {
            for &r in &[0.0, 0.03, 0.1, 1.0, 4.0, 10.0] {
                let v = e.heat_kernel(t, &[r]).unwrap();
                assert!((v / h3_exact(t, r) - 1.0).abs() < 1e-7, "t={t} r={r}");
            }
        }
    }

    #[test]
    fn a2_closed_form() {
        let s = SpaceSpec::complex_a2();
        let e = HeatEngine::new(&s).unwrap();
        let h = [1.3, 2.2];
        let t = 2.0;
        let pi_h = crate::spacegeom::pi_prod(&s, &h);
        let sh: f64 = s.datum.roots.iter().map(|a| dot(a, &h).sinh()).product();
        let exact = (4.0 * PI * t).powi(-4) * (-8.0 * t - dot(&h, &h) / (4.0 * t)).exp() * pi_h / sh;
        let v = e.heat_kernel(t, &h).unwrap();
        assert!((v / exact - 1.0).abs() < 1e-6, "{} {}", v / exact, e.c0);
    }

    #[test]
    fn table_matches_direct() {
        let e = HeatEngine::new(&SpaceSpec::from_tag("Hr:3").unwrap()).unwrap();
        for &t in &[0.2, 3.0, 40.0] {
            let tab = e.kernel_table(t, 2.0 * t + 30.0).unwrap();
            for &r in &[0.0, 0.02, 0.33, 1.7, 2.0 * t + 7.3] {
                let want = h3_exact(t, r).ln();
                assert!((tab.ln_eval(r) - want).abs() < 1e-7, "t={t} r={r}: {} {want}", tab.ln_eval(r));
            }
        }
    }

    #[test]
    fn h2_mass_stays_one() {
        let e = HeatEngine::new(&SpaceSpec::from_tag("Hr:2").unwrap()).unwrap();
        for &t in &[0.5, 5.0, 10.0] {
            assert!((e.total_mass(t).unwrap() - 1.0).abs() < 1e-7);
        }
    }
}
