//! The distinguished Laplacian on the solvable group S = N exp a.
//!
//! h̃_t = δ̃^{1/2} e^{|ρ|²t} h_t with δ̃(n exp A) = e^{−2⟨ρ,A⟩}. Integrals
//! against the right Haar measure become ∫_G dg e^{⟨2ρ,A(g)⟩} f(g); for
//! radial factors the K-average e^{⟨ρ,A⟩} ↦ φ₀ reduces them to a⁺.
//!
//! Non-radial computations use the half-space model of H², in the
//! coordinates (A, w) with x = 2√(h cosh A) sinh(w/2), h = e^A, where
//! cosh d(o, ·) = cosh A cosh w and the volume is
//! √(h cosh A) cosh(w/2) h^{−2} dh dw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convlab::{evolve_against, evolved_table, PreparedDatum, Profile};
use crate::error::{Error, Result};
use crate::fit::{loglog_slope, SlopeFit};
use crate::heatkern::{ConcentrationSpec, HeatEngine, KernelTable, Node};
use crate::quad::{gl_panel_nodes, Adaptive};
use crate::spacegeom::{dot, log_density, mu_min, norm, pi_prod};

/// A point n_x exp(A) of S in the half-space model: h = e^A.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpacePoint {
    pub x: Vec<f64>,
    pub h: f64,
}

impl HalfSpacePoint {
    pub fn new(x: Vec<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("half-space point needs h > 0 (h = {h})")));
        }
        Ok(HalfSpacePoint { x, h })
    }

    pub fn identity(dim: usize) -> Self {
        HalfSpacePoint { x: vec![0.0; dim - 1], h: 1.0 }
    }

    /// The A-coordinate log h.
    pub fn a(&self) -> f64 {
        self.h.ln()
    }

    /// Distance to the origin: cosh d = 1 + (|x|² + (h−1)²)/(2h).
    pub fn radius(&self) -> f64 {
        let e = (dot(&self.x, &self.x) + (self.h - 1.0).powi(2)) / (2.0 * self.h);
        2.0 * (e / 2.0).sqrt().asinh()
    }
}

fn rank_one_rho(engine: &HeatEngine) -> Result<f64> {
    engine.jacobi().map(|j| j.rho)
}

fn half_space_dim(engine: &HeatEngine) -> Result<usize> {
    match engine.space.real_hyperbolic_dim() {
        Some(n @ 2..=3) => Ok(n as usize),
        _ => Err(Error::Domain(format!("half-space model is implemented for H² and H³, not {}", engine.space.name))),
    }
}

/// δ̃ = e^{−2⟨ρ,A⟩} = h^{−2ρ}.
pub fn modular(rho: f64, p: &HalfSpacePoint) -> f64 {
    p.h.powf(-2.0 * rho)
}

/// h̃_t at a half-space point.
pub fn h_tilde(engine: &HeatEngine, t: f64, p: &HalfSpacePoint) -> Result<f64> {
    let rho = rank_one_rho(engine)?;
    Ok((-rho * p.a() + rho * rho * t + engine.ln_heat_kernel(t, &[p.radius()])?).exp())
}

/// ∫_G dg e^{⟨ρ,A(g)⟩} F(g) = c_meas ∫ δ φ₀ F for radial F, over nodes,
/// with F in log-sign form.
pub fn right_haar_radial_integral<F>(engine: &HeatEngine, nodes: &[Node], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<(f64, f64)> + Sync,
{
    let terms = nodes
        .par_iter()
        .map(|n| {
            let (lf, s) = f(&n.h)?;
            Ok(s * (n.ln_w + engine.phi0.ln_eval(&n.h)? + lf).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

/// Nodes where δ φ₀ h_t e^{|ρ|²t} lives: |H| up to about 12√(2t).
pub fn tilde_nodes(engine: &HeatEngine, t: f64, reach: f64) -> Vec<Node> {
    let sd = (2.0 * t).sqrt();
    let hi = 12.0 * sd + reach + 4.0;
    if engine.rank() == 1 {
        engine.interval_nodes(0.0, hi, (sd / 4.0).min(1.0))
    } else {
        sector_nodes(engine, 0.0, hi, 0.0)
    }
}

/// Rank-two nodes on {s_lo ≤ |H| ≤ s_hi, μ(H) ≥ mu} ∩ a⁺ in polar
/// coordinates; the angular range at each radius is exact.
pub fn sector_nodes(engine: &HeatEngine, s_lo: f64, s_hi: f64, mu: f64) -> Vec<Node> {
    let sp = &engine.space;
    let simple = &sp.datum.simple;
    let ang = |a: &Vec<f64>| a[1].atan2(a[0]);
    let width = (s_hi - s_lo) / 40.0;
    let panels = ((s_hi - s_lo) / width.max(0.25)).ceil().max(1.0) as usize;
    let mut out = Vec::new();
    for (s, ws) in gl_panel_nodes(s_lo, s_hi, panels, 16) {
        // ⟨α, (cos φ, sin φ)⟩ ≥ mu/s  ⇔  |φ − arg α| ≤ acos(mu/(s|α|)).
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut empty = false;
        for a in simple {
            let q = mu / (s * norm(a));
            if q >= 1.0 {
                empty = true;
                break;
            }
            let half = q.max(-1.0).acos().min(std::f64::consts::FRAC_PI_2);
            lo = lo.max(ang(a) - half);
            hi = hi.min(ang(a) + half);
        }
        if empty || hi <= lo {
            continue;
        }
        for (phi, wp) in gl_panel_nodes(lo, hi, 4, 16) {
            let h = vec![s * phi.cos(), s * phi.sin()];
            let ln_w = engine.c_meas.ln() + log_density(sp, &h) + (ws * wp * s).ln();
            if ln_w.is_finite() {
                out.push(Node { h, ln_w });
            }
        }
    }
    out
}

/// ∫_S d_r h̃_t = e^{|ρ|²t} c_meas ∫ δ φ₀ h_t.
pub fn htilde_total_mass(engine: &HeatEngine, t: f64) -> Result<f64> {
    let nodes = tilde_nodes(engine, t, 0.0);
    let rho2 = engine.space.rho_sq();
    right_haar_radial_integral(engine, &nodes, |h| Ok((engine.ln_heat_kernel(t, h)? + rho2 * t, 1.0)))
}

/// ∫_G dg e^{⟨ρ,A(g)⟩} 1[a ≤ d(o,g) ≤ b] on H² in two ways: by the radial
/// reduction, and directly in the half-plane where, at fixed height h,
/// the shell is a union of x-intervals with explicit endpoints.
pub fn shell_integral_two_ways(engine: &HeatEngine, a: f64, b: f64) -> Result<(f64, f64)> {
    if engine.space.real_hyperbolic_dim() != Some(2) {
        return Err(Error::Domain("shell check is implemented on H²".into()));
    }
    let rho = rank_one_rho(engine)?;
    let nodes = engine.interval_nodes(a, b, 0.05);
    let radial = right_haar_radial_integral(engine, &nodes, |_| Ok((0.0, 1.0)))?;
    // x_c(h)² = 2h(cosh c − 1) − (h − 1)²; measure h^{ρ−2} dx dh = e^{(ρ−1)A} dx dA.
    let half = |c: f64, big_a: f64| {
        let h = big_a.exp();
        (2.0 * h * (c.cosh() - 1.0) - (h - 1.0).powi(2)).max(0.0).sqrt()
    };
    let q = Adaptive { rel_tol: 1e-11, abs_tol: 1e-14, max_intervals: 20000 };
    let direct = q.integrate_real(
        |big_a| 2.0 * (half(b, big_a) - half(a, big_a)) * ((rho - 1.0) * big_a).exp(),
        -b,
        b,
        64,
    )?;
    Ok((radial, direct))
}

/// ∫_{ℝ^{n−1}} h̃_t(n_x exp A) dx against (4πt)^{−1/2} e^{−A²/4t}.
pub fn abel_check(engine: &HeatEngine, t: f64, big_a: f64) -> Result<(f64, f64)> {
    let n = half_space_dim(engine)?;
    let rho = rank_one_rho(engine)?;
    if big_a.abs() > 4.0 * t.sqrt() + 1e-12 {
        return Err(Error::Domain(format!("abel_check needs |A| ≤ 4√t (A = {big_a})")));
    }
    let w_max = 14.0 * (2.0 * t).sqrt() + 2.0 * t * rho + 4.0;
    let table = engine.kernel_table(t, big_a.abs() + w_max + 1.0)?;
    let h = big_a.exp();
    let ca = big_a.cosh();
    let scale = (h * ca).sqrt();
    let panels = (w_max / (t.sqrt() / 4.0).min(1.0)).ceil() as usize;
    let mut acc = 0.0;
    for (w, ww) in gl_panel_nodes(0.0, w_max, panels, 16) {
        let d = acosh_product(big_a, w);
        let dx = scale * (w / 2.0).cosh();
        let jac = if n == 2 {
            2.0 * dx
        } else {
            let x = 2.0 * scale * (w / 2.0).sinh();
            2.0 * std::f64::consts::PI * x * dx
        };
        acc += ww * jac * table.ln_eval(d).exp();
    }
    let value = acc * (-rho * big_a + rho * rho * t).exp();
    let gauss = (4.0 * std::f64::consts::PI * t).powf(-0.5) * (-big_a * big_a / (4.0 * t)).exp();
    Ok((value, gauss))
}

/// acosh(cosh a cosh w), accurate near zero and without overflow.
fn acosh_product(a: f64, w: f64) -> f64 {
    let (a, w) = (a.abs(), w.abs());
    if a + w > 30.0 {
        // cosh a cosh w = e^{a+w}(1+e^{−2a})(1+e^{−2w})/4.
        let ln_x = a + w - 2.0 * std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p() + (-2.0 * w).exp().ln_1p();
        return ln_x + std::f64::consts::LN_2;
    }
    // cosh a cosh w − 1 = 2 sinh²(a/2) cosh w + 2 sinh²(w/2), then d = 2 asinh √(·/2).
    let e = 2.0 * (a / 2.0).sinh().powi(2) * w.cosh() + 2.0 * (w / 2.0).sinh().powi(2);
    2.0 * (e / 2.0).sqrt().asinh()
}

/// Ω̃_t = {ε√t ≤ |H| ≤ √t/ε, μ(H) ≥ ε√t}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OmegaTilde {
    pub inner: f64,
    pub outer: f64,
    pub mu: f64,
}

pub fn omega_tilde(spec: &ConcentrationSpec, t: f64) -> OmegaTilde {
    let e = spec.eps(t);
    OmegaTilde { inner: e * t.sqrt(), outer: t.sqrt() / e, mu: e * t.sqrt() }
}

impl OmegaTilde {
    pub fn contains(&self, engine: &HeatEngine, h: &[f64]) -> bool {
        let r = norm(h);
        r >= self.inner && r <= self.outer && mu_min(&engine.space, h) >= self.mu
    }
}

fn omega_tilde_nodes(engine: &HeatEngine, om: &OmegaTilde) -> Vec<Node> {
    if engine.rank() == 1 {
        engine.interval_nodes(om.inner, om.outer, 0.5)
    } else {
        sector_nodes(engine, om.inner, om.outer, om.mu)
    }
}

/// 1 − ∫_{Ω̃_t} d_r h̃_t.
pub fn mass_outside_tilde(engine: &HeatEngine, spec: &ConcentrationSpec, t: f64) -> Result<f64> {
    if t < 1.0 {
        return Err(Error::Domain("mass_outside_tilde needs t ≥ 1".into()));
    }
    let om = omega_tilde(spec, t);
    let nodes = omega_tilde_nodes(engine, &om);
    let rho2 = engine.space.rho_sq();
    let inside = right_haar_radial_integral(engine, &nodes, |h| Ok((engine.ln_heat_kernel(t, h)? + rho2 * t, 1.0)))?;
    Ok(1.0 - inside)
}

/// Scaled residuals of the refined asymptotics at H ∈ Ω̃_t:
/// (h_t/(t^{−ν/2}e^{−|ρ|²t}𝛑(H)e^{−⟨ρ,H⟩−|H|²/4t}) − C₃)·ε(t)√t and
/// (φ₀/(𝛑(H)e^{−⟨ρ,H⟩}) − C₂)·μ(H).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RefinedResiduals {
    pub h_ratio: f64,
    pub h_residual: f64,
    pub phi_ratio: f64,
    pub phi_residual: f64,
}

pub fn refined_asymptotics(engine: &HeatEngine, spec: &ConcentrationSpec, t: f64, h: &[f64]) -> Result<RefinedResiduals> {
    let sp = &engine.space;
    let om = omega_tilde(spec, t);
    if !om.contains(engine, h) {
        return Err(Error::Domain(format!("H = {h:?} is outside Ω̃_t at t = {t}")));
    }
    let ln_model_phi = pi_prod(sp, h).ln() - dot(&sp.rho, h);
    let ln_model_h = -(sp.nu as f64) / 2.0 * t.ln() - sp.rho_sq() * t + ln_model_phi - dot(h, h) / (4.0 * t);
    let h_ratio = (engine.ln_heat_kernel(t, h)? - ln_model_h).exp();
    let phi_ratio = (engine.phi0.ln_eval(h)? - ln_model_phi).exp();
    let c2 = crate::spherical::c2_constant(sp);
    Ok(RefinedResiduals {
        h_ratio,
        h_residual: (h_ratio - engine.c3()) * spec.eps(t) * t.sqrt(),
        phi_ratio,
        phi_residual: (phi_ratio - c2) * mu_min(sp, h),
    })
}

/// log φ₀ on a uniform grid (rank one).
pub fn phi0_table(engine: &HeatEngine, r_max: f64) -> Result<KernelTable> {
    let dr = 0.05;
    let n = (r_max / dr).ceil() as usize + 4;
    let ln = (0..=n)
        .into_par_iter()
        .map(|j| engine.phi0.ln_eval(&[j as f64 * dr]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(KernelTable::new(dr, ln))
}

/// Hv₀(0) = c_meas ∫ δ v₀ φ₀, the constant mass of a radial datum.
pub fn radial_mass(engine: &HeatEngine, profile: Profile) -> Result<f64> {
    let d = PreparedDatum::new(engine, profile)?;
    let mut acc = 0.0;
    for (r, w) in d.rs.iter().zip(&d.weights) {
        acc += w * engine.phi0.eval(&[*r])?;
    }
    Ok(acc)
}

fn angle_weights(n: u32, panels: usize) -> Vec<(f64, f64)> {
    let cn = crate::spherical::rank1::angular_normalization(n);
    gl_panel_nodes(0.0, std::f64::consts::PI, panels, 8)
        .into_iter()
        .map(|(th, w)| (th, w * cn * th.sin().powi(n as i32 - 2)))
        .collect()
}

/// M̃(g) = (v₀ ∗ φ₀)(g)/φ₀(g) for v₀ the profile recentered at distance
/// `center` (zero for radial data), with g at distance `dist_center` from
/// the center and `dist_origin` from the origin. The convolution is
/// ∫ v₀(y) φ₀(d(y, g)) dy in polar coordinates around the center.
pub fn mass_function(
    engine: &HeatEngine,
    profile: Profile,
    dist_center: f64,
    dist_origin: f64,
) -> Result<f64> {
    let n = engine
        .space
        .real_hyperbolic_dim()
        .ok_or_else(|| Error::Domain("mass_function quadrature needs a real hyperbolic space".into()))?;
    let d = PreparedDatum::new(engine, profile)?;
    let table = phi0_table(engine, dist_center + d.reach() + 1.0)?;
    let ang = angle_weights(n, 32);
    let conv: f64 = d
        .rs
        .iter()
        .zip(&d.weights)
        .map(|(r, w)| {
            w * ang
                .iter()
                .map(|(th, wa)| wa * table.ln_eval(crate::convlab::offcenter::polar_distance(dist_center, *th, *r)).exp())
                .sum::<f64>()
        })
        .sum();
    Ok(conv / engine.phi0.eval(&[dist_origin])?)
}

/// max φ₀(d(y, g))/φ₀(g) over |y| ≤ ξ and the sample radii of g.
pub fn harnack_ratio(engine: &HeatEngine, xi: f64, sample: &[f64]) -> Result<f64> {
    let table = phi0_table(engine, sample.iter().cloned().fold(0.0, f64::max) + xi + 1.0)?;
    let mut best: f64 = 0.0;
    for &g in sample {
        for i in 0..=20 {
            let y = xi * i as f64 / 20.0;
            for j in 0..=32 {
                let th = std::f64::consts::PI * j as f64 / 32.0;
                let d = crate::convlab::offcenter::polar_distance(g, th, y);
                best = best.max((table.ln_eval(d) - table.ln_eval(g)).exp());
            }
        }
    }
    Ok(best)
}

/// h_t(d(g,y))/h_t(g) − φ₀(d(g,y))/φ₀(g) for |g| = r and y at distance s,
/// angle θ; together with the value scaled by ε(t)√t.
pub fn ratio_gap(engine: &HeatEngine, spec: &ConcentrationSpec, t: f64, r: f64, s: f64, theta: f64) -> Result<(f64, f64)> {
    engine.space.real_hyperbolic_dim().ok_or_else(|| Error::Domain("ratio_gap needs a real hyperbolic space".into()))?;
    let om = omega_tilde(spec, t);
    if !om.contains(engine, &[r]) {
        return Err(Error::Domain(format!("|g| = {r} is outside Ω̃_t at t = {t}")));
    }
    let d = crate::convlab::offcenter::polar_distance(r, theta, s);
    let hq = (engine.ln_heat_kernel(t, &[d])? - engine.ln_heat_kernel(t, &[r])?).exp();
    let pq = (engine.phi0.ln_eval(&[d])? - engine.phi0.ln_eval(&[r])?).exp();
    let gap = hq - pq;
    Ok((gap, gap * spec.eps(t) * t.sqrt()))
}

/// ⟨ρ, A(g)⟩ ≤ ⟨ρ, g⁺⟩ in the half-space model.
pub fn kostant_check(rho: f64, p: &HalfSpacePoint) -> bool {
    rho * p.a() <= rho * p.radius() + 1e-12
}

/// Kostant inequality on `count` random half-space points of H^n.
pub fn kostant_sweep(rho: f64, n: usize, count: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = 0;
    for _ in 0..count {
        let x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let h = rng.gen_range(-5.0f64..5.0).exp();
        if kostant_check(rho, &HalfSpacePoint::new(x, h)?) {
            pass += 1;
        }
    }
    Ok(pass)
}

/// Sup-norm data for h̃_t.
#[derive(Debug, Clone, Serialize)]
pub struct SupNorm {
    pub t: f64,
    /// ‖h̃_t‖_∞ = e^{|ρ|²t} max_H e^{⟨ρ,H⟩} h_t(H).
    pub value: f64,
    /// value · t^{(ℓ+|Σ_r⁺|)/2}.
    pub normalized: f64,
    pub argmax: Vec<f64>,
    /// Normalized value at H = √t ρ/|ρ|.
    pub probe: f64,
}

/// Chamber grid for sup searches: |H| up to 12√t.
fn chamber_grid(engine: &HeatEngine, t: f64) -> Vec<Vec<f64>> {
    let r_max = 12.0 * t.sqrt();
    if engine.rank() == 1 {
        return (0..=480).map(|i| vec![r_max * i as f64 / 480.0]).collect();
    }
    let simple = &engine.space.datum.simple;
    // a⁺ is the cone between the two walls α_i^⊥; parametrize by angle.
    let perp = |a: &Vec<f64>| [-a[1], a[0]];
    let (p1, p2) = (perp(&simple[0]), perp(&simple[1]));
    let mut walls: Vec<f64> = [p1, p2, [-p1[0], -p1[1]], [-p2[0], -p2[1]]]
        .iter()
        .filter(|p| simple.iter().all(|a| dot(a, &p[..]) >= -1e-12))
        .map(|p| p[1].atan2(p[0]))
        .collect();
    walls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = (walls[0], walls[walls.len() - 1]);
    let mut out = Vec::new();
    for i in 1..=120 {
        let s = r_max * i as f64 / 120.0;
        for j in 0..=40 {
            let phi = lo + (hi - lo) * j as f64 / 40.0;
            out.push(vec![s * phi.cos(), s * phi.sin()]);
        }
    }
    out.push(vec![0.0, 0.0]);
    out
}

fn sup_exponent(engine: &HeatEngine) -> f64 {
    (engine.rank() + engine.space.datum.roots.len()) as f64 / 2.0
}

pub fn sup_norm_htilde(engine: &HeatEngine, t: f64) -> Result<SupNorm> {
    if t < 1.0 {
        return Err(Error::Domain("sup_norm_htilde needs t ≥ 1".into()));
    }
    let sp = &engine.space;
    let grid = chamber_grid(engine, t);
    let vals = grid
        .par_iter()
        .map(|h| Ok(engine.ln_heat_kernel(t, h)? + dot(&sp.rho, h)))
        .collect::<Result<Vec<f64>>>()?;
    let (arg, best) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let r_max = 12.0 * t.sqrt();
    if norm(&grid[arg]) > 0.9 * r_max {
        return Err(Error::Coverage { share: norm(&grid[arg]) / r_max, limit: 0.9 });
    }
    let k = sup_exponent(engine);
    let ln_value = best + sp.rho_sq() * t;
    let rn = norm(&sp.rho);
    let probe_h: Vec<f64> = sp.rho.iter().map(|x| t.sqrt() * x / rn).collect();
    let probe = engine.ln_heat_kernel(t, &probe_h)? + dot(&sp.rho, &probe_h) + sp.rho_sq() * t + k * t.ln();
    Ok(SupNorm { t, value: ln_value.exp(), normalized: (ln_value + k * t.ln()).exp(), argmax: grid[arg].clone(), probe: probe.exp() })
}

/// Fitted exponent of ‖h̃_t‖_∞ against t.
pub fn sup_norm_fit(rows: &[SupNorm]) -> Option<SlopeFit> {
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let v: Vec<f64> = rows.iter().map(|r| r.value).collect();
    loglog_slope(&t, &v)
}

/// max of t^{(ℓ+|Σ_r⁺|)/2} e^{|ρ|²t} e^{⟨ρ,H⟩} h_t(H) over H ∉ Ω̃_t, split
/// by regime: |H| < ε√t, |H| > √t/ε, and μ(H) < ε√t with |H| in range.
pub fn outside_sup_tilde(engine: &HeatEngine, spec: &ConcentrationSpec, t: f64) -> Result<[f64; 3]> {
    let sp = &engine.space;
    let om = omega_tilde(spec, t);
    let k = sup_exponent(engine);
    let mut grid = chamber_grid(engine, t);
    if engine.rank() == 1 {
        // The outer regime extends past 12√t when ε is small.
        let hi = (om.outer * 1.5).max(12.0 * t.sqrt());
        grid.extend((0..=200).map(|i| vec![om.outer + (hi - om.outer) * i as f64 / 200.0]));
    }
    let vals = grid
        .par_iter()
        .map(|h| Ok((engine.ln_heat_kernel(t, h)? + dot(&sp.rho, h) + sp.rho_sq() * t + k * t.ln()).exp()))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = [0.0f64; 3];
    for (h, v) in grid.iter().zip(&vals) {
        let r = norm(h);
        let idx = if r < om.inner {
            0
        } else if r > om.outer {
            1
        } else if mu_min(sp, h) < om.mu {
            2
        } else {
            continue;
        };
        out[idx] = out[idx].max(*v);
    }
    Ok(out)
}

/// Deviations of the distinguished flow at one time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowRow {
    pub t: f64,
    pub l1: f64,
    pub linf: f64,
    /// t^{(ℓ+|Σ_r⁺|)/2} · linf.
    pub linf_norm: f64,
}

/// ‖ṽ(t) − M̃h̃_t‖ in L¹(S) and L^∞(S) for ṽ₀ = δ̃^{1/2}v₀ with radial v₀.
pub fn distinguished_radial(engine: &HeatEngine, profile: Profile, t: f64) -> Result<FlowRow> {
    let rho2 = engine.space.rho_sq();
    let rho = rank_one_rho(engine)?;
    let datum = PreparedDatum::new(engine, profile)?;
    let m_tilde = radial_mass(engine, profile)?;
    let nodes = tilde_nodes(engine, t, datum.reach());
    let rs: Vec<f64> = nodes.iter().map(|n| n.h[0]).collect();
    let ev = evolve_against(engine, &datum, t, &rs, m_tilde)?;
    let mut l1 = 0.0;
    let mut ln_sup = f64::NEG_INFINITY;
    for (i, n) in nodes.iter().enumerate() {
        let ld = ev.ln_abs_deviation(i) + rho2 * t;
        l1 += (n.ln_w + engine.phi0.ln_eval(&n.h)? + ld).exp();
        // Kostant: the sup of δ̃^{1/2} over the K-orbit of H is e^{⟨ρ,H⟩}.
        ln_sup = ln_sup.max(ld + rho * n.h[0]);
    }
    let k = sup_exponent(engine);
    Ok(FlowRow { t, l1, linf: ln_sup.exp(), linf_norm: (ln_sup + k * t.ln()).exp() })
}

/// The same for v₀ the profile recentered at the point exp(s H₀) of A, on
/// H², by quadrature in the (A, w) coordinates. Here
/// M̃(g) = Hb(0) φ₀(d(c,g))/φ₀(d(o,g)), and the L^∞ sup is searched on
/// the quadrature grid.
pub fn distinguished_offorigin(engine: &HeatEngine, profile: Profile, s: f64, t: f64) -> Result<FlowRow> {
    if engine.space.real_hyperbolic_dim() != Some(2) {
        return Err(Error::Domain("non-radial distinguished flow is implemented on H²".into()));
    }
    let rho = rank_one_rho(engine)?;
    let datum = PreparedDatum::new(engine, profile)?;
    let hb0 = radial_mass(engine, profile)?;
    let l = 14.0 * (2.0 * t).sqrt() + s + datum.reach() + 4.0;
    let r_max = 2.0 * l + s + 2.0;
    let ub = evolved_table(engine, &datum, t, r_max)?;
    let kt = engine.kernel_table(t, r_max)?;
    let ph = phi0_table(engine, r_max)?;
    let width = (t.sqrt() / 3.0).min(1.0);
    let a_nodes = gl_panel_nodes(-l, l, (2.0 * l / width).ceil() as usize, 16);
    let w_nodes = gl_panel_nodes(0.0, l, (l / width).ceil() as usize, 16);
    let ems = (-s).exp();
    let rows: Vec<(f64, f64)> = a_nodes
        .par_iter()
        .map(|&(a, wa)| {
            let ca = a.cosh();
            let cam = (a - s).cosh();
            let mut l1 = 0.0;
            let mut sup = f64::NEG_INFINITY;
            for &(w, ww) in &w_nodes {
                let d_o = acosh_product(a, w);
                // cosh d(c,g) = cosh(A − s) + cosh A (cosh w − 1) e^{−s}.
                let x = cam + ca * 2.0 * (w / 2.0).sinh().powi(2) * ems;
                let d_c = 2.0 * ((x - 1.0).max(0.0) / 2.0).sqrt().asinh();
                let v = ub.ln_eval(d_c).exp();
                let mh = hb0 * (ph.ln_eval(d_c) - ph.ln_eval(d_o) + kt.ln_eval(d_o)).exp();
                let dev = (v - mh).abs();
                // d_r = e^{2ρA} dg, ṽ = e^{−ρA} e^{ρ²t} v; dg = √(h cosh A) cosh(w/2) h^{−2} dh dw.
                let meas = ((0.5 - 1.0 + rho) * a).exp() * ca.sqrt() * (w / 2.0).cosh();
                l1 += 2.0 * ww * meas * dev;
                if dev > 0.0 {
                    sup = sup.max(dev.ln() - rho * a);
                }
            }
            (wa * l1, sup)
        })
        .collect();
    let rho2t = rho * rho * t;
    let l1 = rows.iter().map(|r| r.0).sum::<f64>() * rho2t.exp();
    let ln_sup = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max) + rho2t;
    let k = sup_exponent(engine);
    Ok(FlowRow { t, l1, linf: ln_sup.exp(), linf_norm: (ln_sup + k * t.ln()).exp() })
}

/// Checks ∫_G |v₀| e^{⟨ρ,g⁺⟩} dg < ∞ for v₀ = amp·e^{−rate·r} (untruncated)
/// by comparing partial integrals over growing radii.
pub fn weighted_class_check(engine: &HeatEngine, rate: f64) -> Result<f64> {
    let rho = rank_one_rho(engine)?;
    let partial = |r: f64| -> f64 {
        engine
            .interval_nodes(0.0, r, 0.5)
            .iter()
            .map(|n| (n.ln_w - rate * n.h[0] + rho * n.h[0]).exp())
            .sum()
    };
    let (a, b, c) = (partial(20.0), partial(40.0), partial(80.0));
    let converged = (c - b).abs() <= 1e-6 * c && (c - b).abs() <= (b - a).abs();
    if !converged {
        return Err(Error::Domain(format!(
            "weighted integral diverges for decay rate {rate}: partial sums {a:.3e}, {b:.3e}, {c:.3e}"
        )));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SpaceSpec;

    fn engine(tag: &str) -> HeatEngine {
        HeatEngine::new(&SpaceSpec::from_tag(tag).unwrap()).unwrap()
    }

    #[test]
    fn points_and_modular() {
        let p = HalfSpacePoint::identity(2);
        assert_eq!(p.radius(), 0.0);
        assert_eq!(modular(0.5, &p), 1.0);
        let q = HalfSpacePoint::new(vec![0.0], 4.0).unwrap();
        assert!((q.radius() - 4f64.ln()).abs() < 1e-14);
        assert!((modular(0.5, &q).sqrt() - 0.5).abs() < 1e-14);
        assert!(HalfSpacePoint::new(vec![0.0], 0.0).is_err());
        let e = engine("Hr:2");
        let v = h_tilde(&e, 2.0, &HalfSpacePoint::identity(2)).unwrap();
        assert!((v - (0.5f64 + e.ln_heat_kernel(2.0, &[0.0]).unwrap()).exp()).abs() < 1e-14 * v);
    }

    #[test]
    fn acosh_product_matches() {
        for (a, w) in [(0.0, 0.0), (1e-5, 2e-5), (0.7, -1.2), (3.0, 5.0), (20.0, 25.0)] {
            let want = ((a as f64).cosh() * (w as f64).cosh()).acosh();
            assert!((acosh_product(a, w) - want).abs() < 1e-9 * (1.0 + want), "{a} {w}");
        }
    }

    #[test]
    fn distinguished_mass_is_one() {
        let e = engine("Hr:2");
        for t in [1.0, 5.0] {
            assert!((htilde_total_mass(&e, t).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn shell_two_ways() {
        let e = engine("Hr:2");
        let (a, b) = shell_integral_two_ways(&e, 0.3, 3.7).unwrap();
        assert!((a / b - 1.0).abs() < 1e-4, "{a} {b}");
    }

    #[test]
    fn abel() {
        let e = engine("Hr:2");
        let (v, g) = abel_check(&e, 1.0, 0.0).unwrap();
        assert!((v / g - 1.0).abs() < 1e-3);
        assert!((g - (4.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-15);
        let (p, _) = abel_check(&e, 4.0, 1.5).unwrap();
        let (m, _) = abel_check(&e, 4.0, -1.5).unwrap();
        assert!((p / m - 1.0).abs() < 1e-3);
    }

    #[test]
    fn radial_mass_function_is_constant() {
        let e = engine("Hr:2");
        let p = Profile::bump(1.0);
        let m0 = radial_mass(&e, p).unwrap();
        for g in [0.0, 0.5, 2.0, 7.0] {
            let m = mass_function(&e, p, g, g).unwrap();
            assert!((m / m0 - 1.0).abs() < 1e-6, "g={g}: {m} {m0}");
        }
    }

    #[test]
    fn offorigin_mass_function_closed_form() {
        let e = engine("Hr:2");
        let p = Profile::bump(1.0);
        let hb0 = radial_mass(&e, p).unwrap();
        // g at distance 3 from the origin, angle 1 from the center at distance 1.
        let dc = crate::convlab::offcenter::polar_distance(3.0, 1.0, 1.0);
        let m = mass_function(&e, p, dc, 3.0).unwrap();
        let want = hb0 * e.phi0.eval(&[dc]).unwrap() / e.phi0.eval(&[3.0]).unwrap();
        assert!((m / want - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kostant() {
        assert!(kostant_check(0.5, &HalfSpacePoint::identity(2)));
        let p = HalfSpacePoint::new(vec![0.0], 3.0).unwrap();
        assert!((p.a() - p.radius()).abs() < 1e-14);
        assert_eq!(kostant_sweep(1.0, 3, 500, 7).unwrap(), 500);
    }

    #[test]
    fn weighted_class() {
        let e = engine("Hr:2");
        assert!(weighted_class_check(&e, 2.5).is_ok());
        assert!(weighted_class_check(&e, 0.5).is_err());
    }

    #[test]
    fn heat_profile_mass_and_narrow_bumps() {
        let e = engine("Hr:3");
        let m = radial_mass(&e, Profile::Heat { s: 0.5 }).unwrap();
        assert!((m - (-0.5f64).exp()).abs() < 1e-7, "{m}");
        let mut last = f64::INFINITY;
        for xi in [0.4, 0.2, 0.1] {
            let p = Profile::bump(xi);
            let d = PreparedDatum::new(&e, p).unwrap();
            let gap = (radial_mass(&e, p).unwrap() / d.mass - 1.0).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn harnack_bounds_mass_function() {
        let e = engine("Hr:2");
        let p = Profile::bump(1.0);
        let d = PreparedDatum::new(&e, p).unwrap();
        let sample = [0.0, 1.0, 3.0, 8.0];
        let bound = d.mass * harnack_ratio(&e, 1.0, &sample).unwrap();
        for g in sample {
            for th in [0.0, 1.5, 3.0] {
                let dc = crate::convlab::offcenter::polar_distance(g, th, 1.0);
                let m = mass_function(&e, p, dc, g).unwrap();
                assert!(m > 0.0 && m <= bound * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn offorigin_flow_reduces_to_radial() {
        let e = engine("Hr:2");
        let a = distinguished_radial(&e, Profile::bump(1.0), 5.0).unwrap();
        let b = distinguished_offorigin(&e, Profile::bump(1.0), 0.0, 5.0).unwrap();
        assert!((a.l1 / b.l1 - 1.0).abs() < 1e-4);
        assert!((a.linf / b.linf - 1.0).abs() < 1e-4);
    }

}
