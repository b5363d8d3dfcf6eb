//! Non-radial data on real hyperbolic spaces: the L¹ gap between kernels
//! centered at two points, the kernel quotient and its Iwasawa limit,
//! Busemann functions, and boundary values of the Helgason transform.
//!
//! Two-point integrals use geodesic polar coordinates around the origin
//! and cosh d(x,y) = cosh r cosh s − sinh r sinh s cos θ.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit::{loglog_slope, SlopeFit};
use crate::heatkern::{ConcentrationSpec, HeatEngine, KernelTable, Node};
use crate::quad::gl_panel_nodes;
use crate::spacegeom::SpaceSpec;
use crate::spherical::rank1::{angular_normalization, iwasawa_a_rank1, k_average};

use super::{deviation_nodes, evolve_parts, PreparedDatum, Profile};

type C = Complex64;

fn hyperbolic_dim(space: &SpaceSpec) -> Result<u32> {
    space
        .real_hyperbolic_dim()
        .ok_or_else(|| Error::Domain(format!("{} is not a real hyperbolic space", space.name)))
}

/// d(γ(r), y) − r for y at distance s and angle θ from the ray γ.
pub fn busemann(theta: f64, s: f64, r: f64) -> f64 {
    let e2 = (-2.0 * r).exp();
    let y = 0.5 * (1.0 + e2) * (s.cosh() - r.tanh() * s.sinh() * theta.cos());
    (y + (y * y - e2).max(0.0).sqrt()).ln()
}

/// Distance from the point at polar (r, θ) to the point at (s, 0).
pub fn polar_distance(r: f64, theta: f64, s: f64) -> f64 {
    (r + busemann(theta, s, r)).max(0.0)
}

/// Polar-angle nodes on [0, π] with the normalized S^{n−1} weight.
fn angle_nodes(n: u32, panels: usize) -> Vec<(f64, f64)> {
    let cn = angular_normalization(n);
    gl_panel_nodes(0.0, PI, panels, 8)
        .into_iter()
        .map(|(th, w)| (th, w * cn * th.sin().powi(n as i32 - 2)))
        .collect()
}

const ANGLE_PANELS: usize = 64;

/// c_meas ∫ δ(r) ∫_K |e^{f(d)} − e^{g(r)}| dk dr, with d the distance to
/// the point at distance s.
fn two_point_l1<F, G>(n: u32, nodes: &[Node], s: f64, f: F, g: G) -> f64
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    let ang = angle_nodes(n, ANGLE_PANELS);
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|nd| {
            let r = nd.h[0];
            let lg = g(r);
            let inner: f64 = ang
                .iter()
                .map(|(th, w)| w * ((f(polar_distance(r, *th, s)) - lg).exp() - 1.0).abs())
                .sum();
            (nd.ln_w + lg).exp() * inner
        })
        .collect();
    terms.iter().sum()
}

/// Largest share of the kernel mass allowed outside the radial range.
const TAIL_LIMIT: f64 = 0.005;

fn table_for(engine: &HeatEngine, t: f64, s: f64) -> Result<(Vec<Node>, KernelTable)> {
    let nodes = deviation_nodes(engine, t, s);
    let r_max = nodes.last().map(|n| n.h[0]).unwrap_or(0.0) + s + 1.0;
    let table = engine.kernel_table(t, r_max)?;
    let inside: f64 = nodes.iter().map(|n| (n.ln_w + table.ln_eval(n.h[0])).exp()).sum();
    if (1.0 - inside).abs() > TAIL_LIMIT {
        return Err(Error::Coverage { share: (1.0 - inside).abs(), limit: TAIL_LIMIT });
    }
    Ok((nodes, table))
}

/// ‖h_t(·, y) − h_t(·, o)‖₁ for y at distance s from the origin.
pub fn dirac_l1_gap(engine: &HeatEngine, s: f64, t: f64) -> Result<f64> {
    let n = hyperbolic_dim(&engine.space)?;
    if t < 5.0 || s < 0.0 {
        return Err(Error::Domain(format!("dirac_l1_gap needs t ≥ 5 and s ≥ 0 (t = {t}, s = {s})")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let (nodes, table) = table_for(engine, t, s)?;
    Ok(two_point_l1(n, &nodes, s, |d| table.ln_eval(d), |r| table.ln_eval(r)))
}

/// ∫_K |e^{⟨2ρ, A(k⁻¹y)⟩} − 1| dk for y at distance s.
pub fn k_integral_limit(space: &SpaceSpec, s: f64) -> Result<f64> {
    k_integral(space, s, true, 1e-11)
}

/// The same integral without absolute value; it vanishes identically.
pub fn k_integral_signed(space: &SpaceSpec, s: f64) -> Result<f64> {
    k_integral(space, s, false, 1e-12)
}

fn k_integral(space: &SpaceSpec, s: f64, abs: bool, tol: f64) -> Result<f64> {
    let n = hyperbolic_dim(space)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let rho2 = 2.0 * space.rho[0];
    if !abs {
        let v = k_average(n, s, tol, |_, ln_base| C::new((-rho2 * ln_base).exp(), 0.0))?;
        return Ok(v.re - 1.0);
    }
    let v = k_average(n, s, tol, |_, ln_base| C::new((-rho2 * ln_base).exp_m1().abs(), 0.0))?;
    Ok(v.re)
}

/// h_t(d(x,y))/h_t(d(x,o)) for x at distance r, angle θ from y, |y| = s.
pub fn kernel_quotient(engine: &HeatEngine, t: f64, r: f64, theta: f64, s: f64) -> Result<f64> {
    hyperbolic_dim(&engine.space)?;
    let d = polar_distance(r, theta, s);
    Ok((engine.ln_heat_kernel(t, &[d])? - engine.ln_heat_kernel(t, &[r])?).exp())
}

/// The quotient's limit e^{⟨2ρ, A(k⁻¹y)⟩}.
pub fn quotient_limit(space: &SpaceSpec, theta: f64, s: f64) -> f64 {
    (2.0 * space.rho[0] * iwasawa_a_rank1(theta, s)).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientFit {
    pub times: Vec<f64>,
    /// r(t)/t.
    pub scale: Vec<f64>,
    pub error: Vec<f64>,
    pub fit: Option<SlopeFit>,
}

/// |quotient − limit| at H = 2tρ regressed against r(t)/t.
pub fn quotient_error_fit(
    engine: &HeatEngine,
    times: &[f64],
    theta: f64,
    s: f64,
    eps: &ConcentrationSpec,
) -> Result<QuotientFit> {
    let lim = quotient_limit(&engine.space, theta, s);
    let rho = engine.space.rho[0];
    let error = times
        .par_iter()
        .map(|&t| Ok((kernel_quotient(engine, t, 2.0 * t * rho, theta, s)? - lim).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let scale: Vec<f64> = times.iter().map(|&t| eps.radius(t) / t).collect();
    let fit = loglog_slope(&scale, &error);
    Ok(QuotientFit { times: times.to_vec(), scale, error, fit })
}

/// ‖u(t) − M h_t‖₁ for a radial profile recentered at distance s.
pub fn offorigin_l1_deviation(engine: &HeatEngine, profile: Profile, s: f64, t: f64) -> Result<f64> {
    let n = hyperbolic_dim(&engine.space)?;
    let datum = PreparedDatum::new(engine, profile)?;
    let (nodes, table) = table_for(engine, t, s + datum.reach())?;
    let r_max = nodes.last().map(|n| n.h[0]).unwrap_or(0.0) + s + 1.0;
    let ub = evolved_table(engine, &datum, t, r_max)?;
    let ln_m = datum.mass.ln();
    Ok(two_point_l1(n, &nodes, s, |d| ub.ln_eval(d), |r| ln_m + table.ln_eval(r)))
}

/// log(u₀ ∗ h_t) on a uniform grid of [0, r_max] (positive data).
pub fn evolved_table(engine: &HeatEngine, datum: &PreparedDatum, t: f64, r_max: f64) -> Result<KernelTable> {
    let dr = 0.05;
    let n = (r_max / dr).ceil() as usize + 4;
    let rs: Vec<f64> = (0..=n).map(|j| j as f64 * dr).collect();
    let ev = evolve_parts(engine, datum, t, &rs)?;
    let ln = (0..rs.len()).map(|i| ev.ln_u(i)).collect::<Result<Vec<f64>>>()?;
    Ok(KernelTable::new(dr, ln))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundarySign {
    /// λ = iρ: exponent ⟨2ρ, A⟩.
    Plus,
    /// λ = −iρ: exponent zero.
    Minus,
}

const BOUNDARY_PSI: usize = 96;

/// Hu₀(λ, k_θ𝕄) = ∫_G u₀(g) e^{⟨−iλ+ρ, A(k_θ⁻¹g)⟩} dg at λ = ±iρ by direct
/// quadrature on H², for a profile centered at distance `center` along
/// θ = 0. Points are handled in the hyperboloid model, where
/// e^{−A(k_θ⁻¹x)} = x₀ − x₁cos θ − x₂ sin θ.
pub fn boundary_transform(
    engine: &HeatEngine,
    profile: Profile,
    center: f64,
    theta: f64,
    sign: BoundarySign,
) -> Result<f64> {
    Ok(boundary_values(engine, profile, center, &[theta], sign)?[0])
}

pub fn boundary_values(
    engine: &HeatEngine,
    profile: Profile,
    center: f64,
    thetas: &[f64],
    sign: BoundarySign,
) -> Result<Vec<f64>> {
    if hyperbolic_dim(&engine.space)? != 2 {
        return Err(Error::Domain("direct boundary quadrature is implemented on H²".into()));
    }
    let expo = match sign {
        BoundarySign::Plus => 2.0 * engine.space.rho[0],
        BoundarySign::Minus => 0.0,
    };
    let datum = PreparedDatum::new(engine, profile)?;
    let (ch, sh) = (center.cosh(), center.sinh());
    let mut pts = Vec::with_capacity(datum.rs.len() * BOUNDARY_PSI);
    for (r, w) in datum.rs.iter().zip(&datum.weights) {
        for j in 0..BOUNDARY_PSI {
            let psi = 2.0 * PI * j as f64 / BOUNDARY_PSI as f64;
            let (x0, x1, x2) = (r.cosh(), r.sinh() * psi.cos(), r.sinh() * psi.sin());
            pts.push((ch * x0 + sh * x1, sh * x0 + ch * x1, x2, w / BOUNDARY_PSI as f64));
        }
    }
    Ok(thetas
        .par_iter()
        .map(|th| {
            let (c, s) = (th.cos(), th.sin());
            pts.iter().map(|(x0, x1, x2, w)| w * (x0 - x1 * c - x2 * s).powf(-expo)).sum()
        })
        .collect())
}

/// ∫_K |Hu₀(iρ, k𝕄) − M| dk computed two ways: by direct quadrature of
/// the boundary values, and as M ∫_K |e^{⟨2ρ,A(k⁻¹c)⟩} − 1| dk through
/// the cocycle identity for a recentered radial datum.
pub fn boundary_limit(engine: &HeatEngine, profile: Profile, center: f64) -> Result<(f64, f64)> {
    let datum = PreparedDatum::new(engine, profile)?;
    let ang = angle_nodes(2, 2 * ANGLE_PANELS);
    let thetas: Vec<f64> = ang.iter().map(|a| a.0).collect();
    let vals = boundary_values(engine, profile, center, &thetas, BoundarySign::Plus)?;
    let direct: f64 = ang.iter().zip(&vals).map(|((_, w), v)| w * (v - datum.mass).abs()).sum();
    let cocycle = datum.mass * k_integral_limit(&engine.space, center)?;
    Ok((direct, cocycle))
}

/// (u₀ ∗ h_t)(x) for radial u₀ and |x| = r by space-side quadrature:
/// ∫ u₀(y) h_t(d(x, y)) dy in polar coordinates around the origin.
pub fn direct_convolution(engine: &HeatEngine, profile: Profile, t: f64, r: f64) -> Result<f64> {
    let n = hyperbolic_dim(&engine.space)?;
    let datum = PreparedDatum::new(engine, profile)?;
    let table = engine.kernel_table(t, r + datum.reach() + 1.0)?;
    let ang = angle_nodes(n, ANGLE_PANELS);
    Ok(datum
        .rs
        .iter()
        .zip(&datum.weights)
        .map(|(y, w)| w * ang.iter().map(|(th, wa)| wa * table.ln_eval(polar_distance(*y, *th, r)).exp()).sum::<f64>())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2() -> HeatEngine {
        HeatEngine::new(&SpaceSpec::from_tag("Hr:2").unwrap()).unwrap()
    }

    #[test]
    fn busemann_limits() {
        for r in [0.5, 3.0, 20.0] {
            assert!(busemann(0.7, 0.0, r).abs() < 1e-12);
        }
        assert!((busemann(0.0, 1.0, 20.0) + 1.0).abs() < 1e-3);
        assert!((busemann(PI, 1.0, 20.0) - 1.0).abs() < 1e-3);
        let th = 1.1;
        assert!((busemann(th, 1.0, 20.0) + iwasawa_a_rank1(th, 1.0)).abs() < 1e-9);
        // Exact distances for moderate r.
        let (r, s) = (2.0f64, 0.7f64);
        let d = (r.cosh() * s.cosh() - r.sinh() * s.sinh() * th.cos()).acosh();
        assert!((polar_distance(r, th, s) - d).abs() < 1e-12);
    }

    #[test]
    fn k_integrals() {
        let s = SpaceSpec::from_tag("Hr:2").unwrap();
        assert!(k_integral_signed(&s, 1.0).unwrap().abs() < 1e-10);
        let a = k_integral(&s, 1.0, true, 1e-10).unwrap();
        let b = k_integral(&s, 1.0, true, 1e-13).unwrap();
        assert!(a > 0.0 && (a - b).abs() < 1e-8, "{a} {b}");
        assert_eq!(k_integral_limit(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quotient_at_zero_offset() {
        let e = h2();
        assert!((kernel_quotient(&e, 10.0, 20.0, 0.4, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_minus_is_mass() {
        let e = h2();
        let p = Profile::bump(0.8);
        let m = PreparedDatum::new(&e, p).unwrap().mass;
        for th in [0.0, 1.0, 2.5] {
            let v = boundary_transform(&e, p, 1.0, th, BoundarySign::Minus).unwrap();
            assert!((v - m).abs() < 1e-8 * m);
        }
        let (a, b) = boundary_limit(&e, p, 0.0).unwrap();
        assert!(a < 1e-8 * m && b == 0.0);
        let (a, b) = boundary_limit(&e, p, 1.0).unwrap();
        assert!(a > 1e-3 && (a / b - 1.0).abs() < 0.05, "{a} {b}");
    }

    #[test]
    fn direct_convolution_matches_spectral() {
        let e = h2();
        let p = Profile::bump(1.0);
        let d = PreparedDatum::new(&e, p).unwrap();
        let t = 2.0;
        for &x in &[0.3, 2.5] {
            let direct = direct_convolution(&e, p, t, x).unwrap();
            let spec = evolve_parts(&e, &d, t, &[x]).unwrap().u(0);
            assert!((direct / spec - 1.0).abs() < 1e-5, "x={x}: {direct} {spec}");
        }
    }
}
