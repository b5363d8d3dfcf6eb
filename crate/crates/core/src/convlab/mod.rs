//! Long-time convergence of the heat flow towards M·h_t.
//!
//! Radial data are evolved in spectral form: u(t) has transform
//! Hu₀(λ)e^{−t(λ²+ρ²)}, and u − Mh_t is inverted directly from the weight
//! Hu₀(λ) − M so that the deviation is never a difference of two large
//! numbers. Everything here is rank one.

pub mod euclid;
pub mod offcenter;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{loglog_slope, SlopeFit};
use crate::heatkern::{ConcentrationSpec, HeatEngine, Node};
use crate::quad::gl_panel_nodes;
use crate::spacegeom::log_density;
use crate::spherical::rank1::phi_ode_profile;

pub use offcenter::evolved_table;
pub use euclid::{euclidean_baseline, EuclideanRow};
pub use offcenter::{
    boundary_limit, boundary_transform, busemann, direct_convolution, dirac_l1_gap, k_integral_limit, k_integral_signed,
    kernel_quotient, offorigin_l1_deviation, quotient_error_fit, BoundarySign, QuotientFit,
};

type C = Complex64;

/// Radial profile of an initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// amp·exp(−1/(1−(r/ξ)²)) for r < ξ.
    Bump { xi: f64, amp: f64 },
    /// The heat kernel h_s.
    Heat { s: f64 },
    /// amp·e^{−rate·r}, cut off at r = cut.
    Decay { rate: f64, amp: f64, cut: f64 },
}

impl Profile {
    pub fn bump(xi: f64) -> Self {
        Profile::Bump { xi, amp: 1.0 }
    }

    /// Radius beyond which the profile vanishes (or is negligible for h_s).
    pub fn reach(&self, rho: f64) -> f64 {
        match *self {
            Profile::Bump { xi, .. } => xi,
            Profile::Heat { s } => 2.0 * s * rho + 14.0 * (2.0 * s).sqrt(),
            Profile::Decay { cut, .. } => cut,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Bump { xi, amp } => xi > 0.0 && amp.is_finite(),
            Profile::Heat { s } => s >= crate::heatkern::T_MIN,
            Profile::Decay { rate, amp, cut } => rate > 0.0 && cut > 0.0 && amp.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid profile {self:?}")))
        }
    }

    pub fn value(&self, engine: &HeatEngine, r: f64) -> Result<f64> {
        Ok(match *self {
            Profile::Bump { xi, amp } => bump(r / xi) * amp,
            Profile::Heat { s } => engine.heat_kernel(s, &[r])?,
            Profile::Decay { rate, amp, cut } => {
                if r <= cut {
                    amp * (-rate * r).exp()
                } else {
                    0.0
                }
            }
        })
    }
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Initial datum: a radial profile placed at the origin or recentered at
/// geodesic distance `distance`, or a unit point mass at that distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "placement", rename_all = "kebab-case")]
pub enum InitialDatum {
    Radial { profile: Profile },
    OffOrigin { profile: Profile, distance: f64 },
    PointMass { distance: f64 },
}

impl InitialDatum {
    pub fn radial(profile: Profile) -> Self {
        InitialDatum::Radial { profile }
    }

    pub fn profile(&self) -> Option<Profile> {
        match *self {
            InitialDatum::Radial { profile } | InitialDatum::OffOrigin { profile, .. } => Some(profile),
            InitialDatum::PointMass { .. } => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, InitialDatum::Radial { .. })
    }

    pub fn radial_profile(&self) -> Result<Profile> {
        match *self {
            InitialDatum::Radial { profile } => Ok(profile),
            _ => Err(Error::Domain("operation needs a radial datum".into())),
        }
    }
}

/// A radial profile resolved against an engine: quadrature nodes carrying
/// c_meas δ(r) w · u₀(r), and the mass.
#[derive(Debug, Clone)]
pub struct PreparedDatum {
    pub profile: Profile,
    pub rs: Vec<f64>,
    pub weights: Vec<f64>,
    pub mass: f64,
    rho: f64,
}

fn datum_panels(profile: &Profile, reach: f64) -> usize {
    let per_unit = match profile {
        Profile::Bump { xi, .. } => 12.0 / xi.min(1.0),
        Profile::Heat { .. } => 4.0,
        Profile::Decay { .. } => 2.0,
    };
    ((reach * per_unit).ceil() as usize).max(8)
}

impl PreparedDatum {
    pub fn new(engine: &HeatEngine, profile: Profile) -> Result<Self> {
        profile.validate()?;
        let jac = engine.jacobi()?;
        let reach = profile.reach(jac.rho);
        let panels = datum_panels(&profile, reach);
        let mut rs = Vec::new();
        let mut weights = Vec::new();
        // h_s has a closed-form transform; its nodes serve only L¹ distances.
        for (r, w) in gl_panel_nodes(0.0, reach, panels, 16) {
            let v = profile.value(engine, r)?;
            let ln_meas = engine.c_meas.ln() + log_density(&engine.space, &[r]);
            rs.push(r);
            weights.push(w * ln_meas.exp() * v);
        }
        let mass = match profile {
            Profile::Heat { .. } => 1.0,
            _ => weights.iter().sum(),
        };
        Ok(PreparedDatum { profile, rs, weights, mass, rho: jac.rho })
    }

    /// Hu₀(λ) = c_meas ∫ δ u₀ φ_{−λ} at each λ.
    pub fn transform(&self, engine: &HeatEngine, lambdas: &[C]) -> Result<Vec<C>> {
        if let Profile::Heat { s } = self.profile {
            let r2 = self.rho * self.rho;
            return Ok(lambdas.iter().map(|l| (-(l * l + r2) * s).exp()).collect());
        }
        let jac = engine.jacobi()?;
        lambdas
            .iter()
            .map(|l| {
                let phis = phi_ode_profile(&jac, *l, &self.rs)?;
                Ok(phis.iter().zip(&self.weights).map(|((p, _), w)| p * w).sum())
            })
            .collect()
    }

    pub fn reach(&self) -> f64 {
        self.profile.reach(self.rho)
    }
}

/// Hu₀(λ) for a radial datum.
pub fn spherical_transform(engine: &HeatEngine, profile: Profile, lambda: C) -> Result<C> {
    Ok(PreparedDatum::new(engine, profile)?.transform(engine, &[lambda])?[0])
}

/// u(t, r) and u(t, r) − M h_t(r) in log-scaled form.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub t: f64,
    pub rs: Vec<f64>,
    ln_scale: Vec<f64>,
    u: Vec<f64>,
    dev: Vec<f64>,
}

impl Evolution {
    pub fn u(&self, i: usize) -> f64 {
        self.ln_scale[i].exp() * self.u[i]
    }

    pub fn deviation(&self, i: usize) -> f64 {
        self.ln_scale[i].exp() * self.dev[i]
    }

    /// log|u − M h_t| (−∞ where it vanishes).
    pub fn ln_abs_deviation(&self, i: usize) -> f64 {
        self.ln_scale[i] + self.dev[i].abs().ln()
    }

    pub fn ln_u(&self, i: usize) -> Result<f64> {
        if self.u[i] > 0.0 {
            Ok(self.ln_scale[i] + self.u[i].ln())
        } else {
            Err(Error::Domain(format!("evolved datum not positive at r = {}", self.rs[i])))
        }
    }
}

/// (u₀ ∗ h_t) and its deviation from M h_t at the radii `rs`.
pub fn evolve_parts(engine: &HeatEngine, datum: &PreparedDatum, t: f64, rs: &[f64]) -> Result<Evolution> {
    evolve_against(engine, datum, t, rs, datum.mass)
}

/// (u₀ ∗ h_t) and its deviation from m·h_t for a given reference mass m.
pub fn evolve_against(engine: &HeatEngine, datum: &PreparedDatum, t: f64, rs: &[f64], m: f64) -> Result<Evolution> {
    let inv = engine.invert_rank1(t, rs, 2, |lams| {
        let hu = datum.transform(engine, lams)?;
        Ok(hu.into_iter().map(|v| vec![v, v - m]).collect())
    })?;
    Ok(Evolution {
        t,
        rs: rs.to_vec(),
        ln_scale: inv.iter().map(|v| v.ln_scale).collect(),
        u: inv.iter().map(|v| v.values[0]).collect(),
        dev: inv.iter().map(|v| v.values[1]).collect(),
    })
}

/// u(t, r) = (u₀ ∗ h_t)(r) for a radial datum.
pub fn evolve(engine: &HeatEngine, profile: Profile, t: f64, rs: &[f64]) -> Result<Vec<f64>> {
    let d = PreparedDatum::new(engine, profile)?;
    let ev = evolve_parts(engine, &d, t, rs)?;
    Ok((0..rs.len()).map(|i| ev.u(i)).collect())
}

/// Radial nodes covering the supports of u(t) and M h_t.
pub fn deviation_nodes(engine: &HeatEngine, t: f64, reach: f64) -> Vec<Node> {
    let sd = (2.0 * t).sqrt();
    let c = 2.0 * t * engine.space.rho[0];
    let lo = (c - 14.0 * sd - reach).max(0.0);
    engine.interval_nodes(lo, c + 14.0 * sd + reach, sd / 2.0)
}

/// Share of the L¹ integral coming from the outermost panel; above 1% the
/// node range is declared too short.
const COVERAGE_LIMIT: f64 = 0.01;

fn coverage_check(nodes: &[Node], terms: &[f64], total: f64) -> Result<()> {
    let last = nodes.last().map(|n| n.h[0]).unwrap_or(0.0);
    let first = nodes.first().map(|n| n.h[0]).unwrap_or(0.0);
    let span = (last - first) / 100.0;
    let edge: f64 = nodes
        .iter()
        .zip(terms)
        .filter(|(n, _)| n.h[0] > last - span || (first > 1.0 && n.h[0] < first + span))
        .map(|(_, v)| v)
        .sum();
    if total > 0.0 && edge > COVERAGE_LIMIT * total {
        return Err(Error::Coverage { share: edge / total, limit: COVERAGE_LIMIT });
    }
    Ok(())
}

/// All deviation norms at one time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Deviations {
    pub t: f64,
    pub l1: f64,
    pub linf: f64,
    /// t^{ν/2} e^{|ρ|²t} ‖u − M h_t‖_∞.
    pub linf_norm: f64,
    pub lp: f64,
    pub p: f64,
}

/// ‖u(t) − M h_t‖ in L¹, L^∞ and L^p for a radial datum.
pub fn deviations(engine: &HeatEngine, datum: &PreparedDatum, t: f64, p: f64, eps: &ConcentrationSpec) -> Result<Deviations> {
    if p < 1.0 {
        return Err(Error::Config(format!("p = {p} must be at least 1")));
    }
    let sp = &engine.space;
    let nodes = deviation_nodes(engine, t, datum.reach());
    let sup_grid = linf_grid(engine, t, eps, datum.reach());
    let mut rs: Vec<f64> = nodes.iter().map(|n| n.h[0]).collect();
    let n_nodes = rs.len();
    rs.extend_from_slice(&sup_grid);
    let ev = evolve_parts(engine, datum, t, &rs)?;
    let ln_dev: Vec<f64> = (0..rs.len()).map(|i| ev.ln_abs_deviation(i)).collect();

    let terms: Vec<f64> = nodes.iter().zip(&ln_dev).map(|(n, l)| (n.ln_w + l).exp()).collect();
    let l1: f64 = terms.iter().sum();
    coverage_check(&nodes, &terms, l1)?;

    let ln_sup = ln_dev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let arg = ln_dev.iter().position(|&v| v == ln_sup).unwrap_or(0);
    if arg == rs.len() - 1 {
        return Err(Error::Coverage { share: 1.0, limit: COVERAGE_LIMIT });
    }
    let lp_terms: Vec<f64> = nodes.iter().zip(&ln_dev[..n_nodes]).map(|(n, l)| n.ln_w + p * l).collect();
    let lp = (log_sum_exp(&lp_terms) / p).exp();
    let ln_norm = ln_sup + sp.nu as f64 / 2.0 * t.ln() + sp.rho_sq() * t;
    Ok(Deviations { t, l1, linf: ln_sup.exp(), linf_norm: ln_norm.exp(), lp, p })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Search grid for the sup: fine near the origin, dense up to
/// 2tρ + 2r(t), then coarse.
pub fn linf_grid(engine: &HeatEngine, t: f64, eps: &ConcentrationSpec, reach: f64) -> Vec<f64> {
    let sd = (2.0 * t).sqrt();
    let c = 2.0 * t * engine.space.rho[0];
    let mid = c + 2.0 * eps.radius(t) + reach;
    let mut out: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let step = sd / 8.0;
    let mut r = 10.0 + step;
    while r < mid {
        out.push(r);
        r += step;
    }
    for k in 0..=20 {
        out.push(mid + k as f64 * sd);
    }
    out
}

/// Deviation norms over a time grid, with the rate of the L¹ deviation.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub times: Vec<f64>,
    pub l1_dev: Vec<f64>,
    pub linf_dev: Vec<f64>,
    pub linf_norm: Vec<f64>,
    pub lp_dev: Vec<f64>,
    pub p: f64,
    pub fit_window: (f64, f64),
    pub fitted_slope: Option<SlopeFit>,
}

pub const FIT_WINDOW: (f64, f64) = (10.0, 160.0);

pub fn convergence_report(
    engine: &HeatEngine,
    profile: Profile,
    times: &[f64],
    p: f64,
    eps: &ConcentrationSpec,
) -> Result<ConvergenceReport> {
    let datum = PreparedDatum::new(engine, profile)?;
    let rows = times
        .par_iter()
        .map(|&t| deviations(engine, &datum, t, p, eps))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = FIT_WINDOW;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.t >= lo && r.t <= hi).map(|r| (r.t, r.l1)).unzip();
    Ok(ConvergenceReport {
        times: times.to_vec(),
        l1_dev: rows.iter().map(|r| r.l1).collect(),
        linf_dev: rows.iter().map(|r| r.linf).collect(),
        linf_norm: rows.iter().map(|r| r.linf_norm).collect(),
        lp_dev: rows.iter().map(|r| r.lp).collect(),
        p,
        fit_window: FIT_WINDOW,
        fitted_slope: loglog_slope(&xs, &ys),
    })
}

/// ‖u(t) − M h_t‖₁ for a radial datum.
pub fn l1_deviation(engine: &HeatEngine, profile: Profile, t: f64) -> Result<f64> {
    let d = PreparedDatum::new(engine, profile)?;
    Ok(deviations(engine, &d, t, 2.0, &ConcentrationSpec::default())?.l1)
}

pub fn linf_deviation(engine: &HeatEngine, profile: Profile, t: f64) -> Result<f64> {
    let d = PreparedDatum::new(engine, profile)?;
    Ok(deviations(engine, &d, t, 2.0, &ConcentrationSpec::default())?.linf)
}

pub fn lp_deviation(engine: &HeatEngine, profile: Profile, t: f64, p: f64) -> Result<f64> {
    let d = PreparedDatum::new(engine, profile)?;
    Ok(deviations(engine, &d, t, p, &ConcentrationSpec::default())?.lp)
}

/// ‖f‖_p ≤ ‖f‖₁^{1/p} ‖f‖_∞^{1−1/p} on every row.
pub fn lp_interpolation_check(report: &ConvergenceReport, p: f64) -> bool {
    report.l1_dev.iter().zip(&report.linf_dev).zip(&report.lp_dev).all(|((l1, li), lp)| {
        let bound = l1.powf(1.0 / p) * li.powf(1.0 - 1.0 / p);
        *lp <= bound * (1.0 + 1e-12)
    })
}

/// ‖u₀ − U₀‖₁ for two radial profiles.
pub fn l1_distance(engine: &HeatEngine, a: Profile, b: Profile) -> Result<f64> {
    let jac = engine.jacobi()?;
    let reach = a.reach(jac.rho).max(b.reach(jac.rho));
    let panels = datum_panels(&a, reach).max(datum_panels(&b, reach));
    let mut acc = 0.0;
    for (r, w) in gl_panel_nodes(0.0, reach, panels, 16) {
        let ln_meas = engine.c_meas.ln() + log_density(&engine.space, &[r]);
        acc += w * ln_meas.exp() * (a.value(engine, r)? - b.value(engine, r)?).abs();
    }
    Ok(acc)
}

/// c_meas ∫ δ u(t) over the deviation nodes.
pub fn evolved_mass(engine: &HeatEngine, datum: &PreparedDatum, t: f64) -> Result<f64> {
    let nodes = deviation_nodes(engine, t, datum.reach());
    let rs: Vec<f64> = nodes.iter().map(|n| n.h[0]).collect();
    let ev = evolve_parts(engine, datum, t, &rs)?;
    Ok(nodes.iter().enumerate().map(|(i, n)| n.ln_w.exp() * ev.u(i)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SpaceSpec;

    fn engine(tag: &str) -> HeatEngine {
        HeatEngine::new(&SpaceSpec::from_tag(tag).unwrap()).unwrap()
    }

    #[test]
    fn transform_basics() {
        let e = engine("Hr:3");
        let d = PreparedDatum::new(&e, Profile::bump(1.0)).unwrap();
        let rho = C::new(0.0, 1.0);
        let hu = d.transform(&e, &[C::new(0.0, 0.0), -rho, rho]).unwrap();
        assert!((hu[1].re - d.mass).abs() < 1e-8 * d.mass);
        assert!((hu[2].re - d.mass).abs() < 1e-8 * d.mass);
        assert!(hu[0].re <= d.mass && hu[0].re > 0.0);
        let two = PreparedDatum::new(&e, Profile::Bump { xi: 1.0, amp: 2.0 }).unwrap();
        let v = two.transform(&e, &[C::new(0.7, 0.2)]).unwrap()[0];
        let w = d.transform(&e, &[C::new(0.7, 0.2)]).unwrap()[0];
        assert!((v - 2.0 * w).norm() < 1e-12 * v.norm());
    }

    #[test]
    fn semigroup() {
        let e = engine("Hr:3");
        let d = PreparedDatum::new(&e, Profile::Heat { s: 1.5 }).unwrap();
        let rs = [0.0, 0.5, 3.0, 9.0];
        let ev = evolve_parts(&e, &d, 2.0, &rs).unwrap();
        for (i, r) in rs.iter().enumerate() {
            let want = e.heat_kernel(3.5, &[*r]).unwrap();
            assert!((ev.u(i) / want - 1.0).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn mass_conserved() {
        let e = engine("Hr:2");
        let d = PreparedDatum::new(&e, Profile::bump(1.0)).unwrap();
        for &t in &[0.5, 4.0, 20.0] {
            let m = evolved_mass(&e, &d, t).unwrap();
            assert!((m / d.mass - 1.0).abs() < 1e-6, "t={t}: {m} vs {}", d.mass);
        }
    }

    #[test]
    fn deviation_from_heat_profile() {
        let e = engine("Hr:3");
        let d = PreparedDatum::new(&e, Profile::Heat { s: 1.0 }).unwrap();
        let eps = ConcentrationSpec::default();
        let a = deviations(&e, &d, 10.0, 2.0, &eps).unwrap();
        let b = deviations(&e, &d, 40.0, 2.0, &eps).unwrap();
        assert!(b.l1 < a.l1 && a.l1 > 0.0);
        assert!(a.lp <= a.l1.sqrt() * a.linf.sqrt() * (1.0 + 1e-12));
    }
}
