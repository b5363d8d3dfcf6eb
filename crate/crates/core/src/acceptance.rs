//! Acceptance criteria 1–9 as runnable checks.
//!
//! Every criterion produces a list of named checks and a CSV body built
//! only from computed values, so reruns can be compared byte for byte.

use std::fmt::Write as _;

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::convlab::offcenter::{
    boundary_limit, busemann, dirac_l1_gap, k_integral_limit, k_integral_signed, quotient_error_fit,
};
use crate::convlab::{convergence_report, lp_interpolation_check, Profile};
use crate::error::Result;
use crate::fit::loglog_slope;
use crate::gamma::gamma;
use crate::harish::{plancherel_density, CFunction, SpectralPoint};
use crate::heatkern::{heat_transform, ConcentrationSpec, HeatEngine};
use crate::solvlab;
use crate::spacegeom::SpaceSpec;
use crate::spherical::complex::complex_case_phi;
use crate::spherical::rank1::{iwasawa_a_rank1, phi_integral_rank1, phi_ode_rank1, phi_rank1};
use crate::spherical::series::phi_series_hc;
use crate::spherical::{phi0, phi0_envelope_check};

pub const DYADIC: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];
/// Time grid for the distinguished flow.
pub const DISTINGUISHED_TIMES: [f64; 5] = [5.0, 10.0, 20.0, 40.0, 80.0];
pub const THREAD_COUNTS: [usize; 3] = [1, 4, 8];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Data rows (label, t, value) behind the checks.
    #[serde(skip)]
    pub csv: String,
}

impl Verdict {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {} [{status}] {} ({} checks", self.id, self.title, self.checks.len());
        let f = self.failures();
        if !f.is_empty() {
            let names: Vec<String> = f.iter().map(|c| format!("{}={:.4e} vs {:.4e}", c.name, c.value, c.bound)).collect();
            let _ = write!(s, "; failed: {}", names.join(", "));
        }
        s.push(')');
        s
    }
}

struct Sheet {
    checks: Vec<Check>,
    csv: String,
}

impl Sheet {
    fn new() -> Self {
        Sheet { checks: Vec::new(), csv: String::from("label,t,value\n") }
    }

    fn row(&mut self, label: &str, t: f64, value: f64) {
        let _ = writeln!(self.csv, "{label},{t},{value:.15e}");
    }

    /// value ≤ bound.
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, bound, value <= bound);
    }

    /// value ≥ bound.
    fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, bound, value >= bound);
    }

    fn truth(&mut self, name: &str, ok: bool) {
        self.push(name, ok as u8 as f64, 1.0, ok);
    }

    fn push(&mut self, name: &str, value: f64, bound: f64, passed: bool) {
        let passed = passed && value.is_finite();
        let _ = writeln!(self.csv, "check:{name},,{value:.15e}");
        self.checks.push(Check { name: name.to_string(), value, bound, passed });
    }

    fn finish(self, id: u8, title: &'static str) -> Verdict {
        let passed = self.checks.iter().all(|c| c.passed);
        Verdict { id, title, passed, checks: self.checks, csv: self.csv }
    }
}

fn engine(tag: &str) -> Result<HeatEngine> {
    HeatEngine::new(&SpaceSpec::from_tag(tag)?)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

pub const TITLES: [&str; 9] = [
    "special functions",
    "spherical functions",
    "heat kernel",
    "concentration",
    "L1 convergence rates",
    "sup-norm and Lp rates",
    "off-origin data",
    "distinguished Laplacian",
    "determinism across thread counts",
];

/// Runs one criterion in the current rayon pool.
pub fn run(id: u8) -> Result<Verdict> {
    let title = TITLES[(id as usize).saturating_sub(1).min(8)];
    let sheet = match id {
        1 => special_functions()?,
        2 => spherical_functions()?,
        3 => heat_kernel()?,
        4 => concentration()?,
        5 => l1_rates()?,
        6 => sup_rates()?,
        7 => off_origin()?,
        8 => distinguished()?,
        9 => return determinism(&[1, 2, 3, 4, 5, 6, 7, 8]),
        _ => return Err(crate::Error::Config(format!("no criterion {id}"))),
    };
    Ok(sheet.finish(id, title))
}

/// Reruns the given criteria in pools of 1, 4 and 8 threads and compares
/// CSV bodies.
pub fn determinism(ids: &[u8]) -> Result<Verdict> {
    let mut sheet = Sheet::new();
    for &id in ids {
        let mut bodies = Vec::new();
        for n in THREAD_COUNTS {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::Error::Config(e.to_string()))?;
            bodies.push(pool.install(|| run(id))?.csv);
        }
        let same = bodies.windows(2).all(|w| w[0] == w[1]);
        sheet.row(&format!("criterion{id}_bytes"), 0.0, bodies[0].len() as f64);
        sheet.truth(&format!("criterion{id}_identical"), same);
    }
    Ok(sheet.finish(9, TITLES[8]))
}

fn special_functions() -> Result<Sheet> {
    let mut s = Sheet::new();
    let mut rec: f64 = 0.0;
    let mut refl: f64 = 0.0;
    for x in [-3.7, -1.3, 0.2, 0.5, 1.5, 4.1, 10.3] {
        for y in [0.0, 0.5, -3.0, 7.0] {
            let z = C::new(x, y);
            let g = gamma(z)?;
            rec = rec.max(((gamma(z + 1.0)? - z * g) / gamma(z + 1.0)?).norm());
            let prod = g * gamma(1.0 - z)? * (std::f64::consts::PI * z).sin() / std::f64::consts::PI;
            refl = refl.max((prod - 1.0).norm());
        }
    }
    s.at_most("gamma_recurrence", rec, 1e-10);
    s.at_most("gamma_reflection", refl, 1e-10);

    let lams = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 50.0];
    let h2 = SpaceSpec::from_tag("Hr:2")?;
    let h3 = SpaceSpec::from_tag("Hr:3")?;
    let k2 = plancherel_density(&h2, &[1.0]) / (std::f64::consts::PI).tanh();
    let k3 = plancherel_density(&h3, &[1.0]);
    let (mut e2, mut e3): (f64, f64) = (0.0, 0.0);
    for l in lams {
        let d2 = plancherel_density(&h2, &[l]);
        let d3 = plancherel_density(&h3, &[l]);
        s.row("plancherel_h2", l, d2);
        s.row("plancherel_h3", l, d3);
        e2 = e2.max((d2 / (k2 * l * (std::f64::consts::PI * l).tanh()) - 1.0).abs());
        e3 = e3.max((d3 / (k3 * l * l) - 1.0).abs());
    }
    s.at_most("plancherel_h2_tanh", e2, 1e-8);
    s.at_most("plancherel_h3_square", e3, 1e-10);

    // |𝐛(−λ)|^{-1} ≍ |λ|^{(m_α+m_{2α})/2−1}.
    for (tag, want) in [("Hr:2", -0.5), ("Hr:3", 0.0), ("Hc:2", 0.5), ("Hq:2", 2.5)] {
        let sp = SpaceSpec::from_tag(tag)?;
        let cf = CFunction::new(&sp);
        let xs: Vec<f64> = (0..=20).map(|i| 10f64 * 100f64.powf(i as f64 / 20.0)).collect();
        let ys = xs
            .iter()
            .map(|&l| Ok(cf.b_minus_inv(&sp, &SpectralPoint::real(vec![l]))?.norm()))
            .collect::<Result<Vec<f64>>>()?;
        let slope = loglog_slope(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN);
        s.row(&format!("b_slope_{tag}"), 0.0, slope);
        s.at_most(&format!("b_exponent_{tag}"), (slope - want).abs(), 0.02);
    }
    Ok(s)
}

fn spherical_functions() -> Result<Sheet> {
    let mut s = Sheet::new();
    let mut origin: f64 = 0.0;
    let mut trivial: f64 = 0.0;
    for tag in ["Hr:2", "Hr:3", "Hc:2", "Hq:2"] {
        let sp = SpaceSpec::from_tag(tag)?;
        let jac = sp.jacobi().expect("rank one");
        for l in [0.3, 1.0, 4.0] {
            origin = origin.max((phi_rank1(&jac, C::new(l, 0.0), 0.0)? - 1.0).norm());
        }
        for r in [0.1, 1.0, 5.0, 20.0] {
            trivial = trivial.max((phi_rank1(&jac, C::new(0.0, jac.rho), r)? - 1.0).norm());
        }
    }
    let a2 = SpaceSpec::complex_a2();
    for lam in [[0.4, 1.1], [2.0, 0.3]] {
        origin = origin.max((complex_case_phi(&a2, &lam, &[0.0, 0.0])? - 1.0).norm());
    }
    s.at_most("phi_at_origin", origin, 1e-9);
    s.at_most("phi_i_rho_is_one", trivial, 1e-9);

    let h3 = SpaceSpec::from_tag("Hr:3")?;
    let jac3 = h3.jacobi().expect("rank one");
    let mut e3: f64 = 0.0;
    for l in [0.5f64, 1.0, 2.0, 5.0] {
        for r in [0.1f64, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let exact = (l * r).sin() / (l * r.sinh());
            let v = phi_rank1(&jac3, C::new(l, 0.0), r)?;
            s.row(&format!("phi_h3_l{l}"), r, v.re);
            e3 = e3.max((v - exact).norm() / phi0(&h3, &[r])?);
        }
    }
    s.at_most("h3_closed_form", e3, 1e-8);

    let mut eo: f64 = 0.0;
    for tag in ["Hr:2", "Hr:3"] {
        let sp = SpaceSpec::from_tag(tag)?;
        let jac = sp.jacobi().expect("rank one");
        for l in [0.5, 2.0] {
            for r in [0.5, 2.0, 5.0] {
                let a = phi_ode_rank1(&jac, C::new(l, 0.0), r)?;
                let b = phi_integral_rank1(&sp, C::new(l, 0.0), r)?;
                eo = eo.max((a - b).norm() / phi0(&sp, &[r])?);
            }
        }
    }
    s.at_most("ode_vs_integral", eo, 1e-7);

    let mut es: f64 = 0.0;
    for (lam, h) in [([0.4, 1.1], [2.9, 3.4]), ([1.5, -0.7], [4.0, 5.0]), ([0.2, 0.2], [3.2, 6.5])] {
        let a = complex_case_phi(&a2, &lam, &h)?;
        let b = phi_series_hc(&a2, &lam, &h)?;
        es = es.max((a - b).norm() / a.norm().max(1e-300));
    }
    s.at_most("a2_series_vs_closed", es, 1e-6);

    let ratios = (0..=60)
        .map(|i| Ok(phi0_envelope_check(&SpaceSpec::from_tag("Hr:2")?, &[0.5 * i as f64])?.1))
        .collect::<Result<Vec<f64>>>()?;
    for (i, r) in ratios.iter().enumerate() {
        s.row("phi0_envelope_ratio_h2", 0.5 * i as f64, *r);
    }
    s.at_most("phi0_envelope_spread", spread(&ratios), 10.0);
    Ok(s)
}

fn heat_kernel() -> Result<Sheet> {
    let mut s = Sheet::new();
    let times = [0.5, 1.0, 2.0, 5.0, 10.0];
    let mut mass_err: f64 = 0.0;
    for tag in ["Hr:2", "Hr:3"] {
        let e = engine(tag)?;
        for t in times {
            let m = e.total_mass(t)?;
            s.row(&format!("mass_{tag}"), t, m);
            mass_err = mass_err.max((m - 1.0).abs());
        }
    }
    let a2 = engine("A2c")?;
    for t in [1.0, 2.0] {
        let m = a2.total_mass(t)?;
        s.row("mass_A2c", t, m);
        mass_err = mass_err.max((m - 1.0).abs());
    }
    s.at_most("normalization", mass_err, 1e-6);

    let h3 = engine("Hr:3")?;
    let mut rt: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        for l in [0.0, 0.5, 1.5] {
            let v = h3.transform_round_trip(t, l)?;
            rt = rt.max((v - heat_transform(&h3.space, &[l], t)).abs());
        }
    }
    s.at_most("transform_round_trip", rt, 1e-6);

    let mut cf: f64 = 0.0;
    for t in [0.5f64, 1.0, 2.0, 5.0] {
        for r in [0.1f64, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let v = h3.heat_kernel(t, &[r])?;
            let exact = (4.0 * std::f64::consts::PI * t).powf(-1.5) * (r / r.sinh()) * (-t - r * r / (4.0 * t)).exp();
            s.row(&format!("h3_t{t}"), r, v);
            cf = cf.max((v / exact - 1.0).abs());
        }
    }
    s.at_most("h3_closed_form", cf, 1e-6);

    for tag in ["Hr:2", "Hr:3"] {
        let e = engine(tag)?;
        let mut ratios = Vec::new();
        for t in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            for k in 0..=12 {
                let r = 6.0 * t * k as f64 / 12.0;
                let ln = e.ln_heat_kernel(t, &[r])? - e.ln_envelope(t, &[r])?;
                ratios.push(ln.exp());
            }
        }
        s.at_most(&format!("envelope_spread_{tag}"), spread(&ratios), 50.0);
    }

    for tag in ["Hr:2", "Hr:3"] {
        let e = engine(tag)?;
        let t = 80.0;
        let h = [2.0 * t * e.space.rho[0]];
        let ratio = (e.ln_heat_kernel(t, &h)? - e.ln_critical_asymptote(t, &h)?).exp();
        s.row(&format!("critical_ratio_{tag}"), t, ratio);
        s.at_most(&format!("critical_asymptote_{tag}"), (ratio - 1.0).abs(), 0.05);
    }
    Ok(s)
}

fn concentration() -> Result<Sheet> {
    let mut s = Sheet::new();
    let spec = ConcentrationSpec::default();
    for tag in ["Hr:2", "Hr:3"] {
        let e = engine(tag)?;
        let out = DYADIC.iter().map(|&t| e.mass_outside(&spec, t)).collect::<Result<Vec<f64>>>()?;
        for (t, v) in DYADIC.iter().zip(&out) {
            s.row(&format!("outside_{tag}"), *t, *v);
        }
        s.truth(&format!("decreasing_{tag}"), strictly_decreasing(&out));
        s.at_most(&format!("final_{tag}"), out[4], 0.05);
    }
    let a2 = engine("A2c")?;
    let out = [10.0, 20.0].iter().map(|&t| a2.mass_outside(&spec, t)).collect::<Result<Vec<f64>>>()?;
    s.row("outside_A2c", 10.0, out[0]);
    s.row("outside_A2c", 20.0, out[1]);
    s.truth("decreasing_A2c", strictly_decreasing(&out));
    s.at_most("final_A2c", out[1], 0.3);
    Ok(s)
}

fn l1_rates() -> Result<Sheet> {
    let mut s = Sheet::new();
    let spec = ConcentrationSpec::default();
    for tag in ["Hr:3", "Hr:2"] {
        let e = engine(tag)?;
        let rep = convergence_report(&e, Profile::bump(1.0), &DYADIC, 2.0, &spec)?;
        for (t, v) in rep.times.iter().zip(&rep.l1_dev) {
            s.row(&format!("l1_{tag}"), *t, *v);
        }
        let slope = rep.fitted_slope.map(|f| f.slope).unwrap_or(f64::NAN);
        s.row(&format!("slope_{tag}"), 0.0, slope);
        s.truth(&format!("decreasing_{tag}"), strictly_decreasing(&rep.l1_dev));
        s.at_least(&format!("slope_low_{tag}"), slope, -0.65);
        s.at_most(&format!("slope_high_{tag}"), slope, -0.35);
    }
    Ok(s)
}

fn sup_rates() -> Result<Sheet> {
    let mut s = Sheet::new();
    let spec = ConcentrationSpec::default();
    for tag in ["Hr:3", "Hr:2"] {
        let e = engine(tag)?;
        let rep = convergence_report(&e, Profile::bump(1.0), &DYADIC, 2.0, &spec)?;
        for (i, t) in rep.times.iter().enumerate() {
            s.row(&format!("linf_norm_{tag}"), *t, rep.linf_norm[i]);
            s.row(&format!("lp_{tag}"), *t, rep.lp_dev[i]);
        }
        s.at_most(&format!("linf_norm_spread_{tag}"), spread(&rep.linf_norm), 10.0);
        s.truth(&format!("holder_{tag}"), lp_interpolation_check(&rep, 2.0));
        let gaps = DYADIC.iter().map(|&t| e.delayed_kernel_gap(t, 20.0)).collect::<Result<Vec<f64>>>()?;
        for (t, g) in DYADIC.iter().zip(&gaps) {
            s.row(&format!("delayed_gap_{tag}"), *t, *g);
        }
        s.at_least(&format!("delayed_gap_{tag}"), gaps.iter().cloned().fold(f64::INFINITY, f64::min), 0.01);
    }
    Ok(s)
}

fn off_origin() -> Result<Sheet> {
    let mut s = Sheet::new();
    let h2 = engine("Hr:2")?;
    let mut signed: f64 = 0.0;
    for sd in [0.5, 1.0, 2.0] {
        signed = signed.max(k_integral_signed(&h2.space, sd)?.abs());
    }
    s.at_most("signed_k_average", signed, 1e-9);

    let gap = dirac_l1_gap(&h2, 1.0, 80.0)?;
    let lim = k_integral_limit(&h2.space, 1.0)?;
    s.row("dirac_gap", 80.0, gap);
    s.row("k_limit", 0.0, lim);
    s.at_most("dirac_gap_vs_limit", (gap / lim - 1.0).abs(), 0.05);

    let q = quotient_error_fit(&h2, &DYADIC, 0.0, 1.0, &ConcentrationSpec::default())?;
    for (t, e) in q.times.iter().zip(&q.error) {
        s.row("quotient_error", *t, *e);
    }
    s.at_least("quotient_slope", q.fit.map(|f| f.slope).unwrap_or(f64::NAN), 0.8);

    let mut bg: f64 = 0.0;
    for sd in [0.5, 1.0, 2.0] {
        for k in 0..=8 {
            let th = std::f64::consts::PI * k as f64 / 8.0;
            bg = bg.max((busemann(th, sd, 20.0) + iwasawa_a_rank1(th, sd)).abs());
        }
    }
    s.at_most("busemann_gap_r20", bg, 1e-3);

    let p = Profile::bump(1.0);
    let (radial, _) = boundary_limit(&h2, p, 0.0)?;
    let (direct, cocycle) = boundary_limit(&h2, p, 1.0)?;
    s.row("boundary_radial", 0.0, radial);
    s.row("boundary_direct", 1.0, direct);
    s.row("boundary_cocycle", 1.0, cocycle);
    s.at_most("boundary_radial_zero", radial, 1e-9);
    s.at_least("boundary_offorigin_positive", direct, 1e-3);
    s.at_most("boundary_routes_agree", (direct / cocycle - 1.0).abs(), 0.05);
    Ok(s)
}

fn distinguished() -> Result<Sheet> {
    let mut s = Sheet::new();
    let spec = ConcentrationSpec::default();
    let h2 = engine("Hr:2")?;
    let h3 = engine("Hr:3")?;

    let mut me: f64 = 0.0;
    for t in [1.0, 2.0, 5.0, 10.0] {
        for e in [&h2, &h3] {
            me = me.max((solvlab::htilde_total_mass(e, t)? - 1.0).abs());
        }
    }
    s.at_most("distinguished_mass", me, 1e-6);

    let mut ab: f64 = 0.0;
    for e in [&h2, &h3] {
        for (t, a) in [(1.0, 0.0), (1.0, 1.0), (4.0, 2.0), (4.0, -2.0), (16.0, 4.0)] {
            let (v, g) = solvlab::abel_check(e, t, a)?;
            ab = ab.max((v / g - 1.0).abs());
        }
    }
    s.at_most("abel", ab, 1e-3);

    let om = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&t| solvlab::mass_outside_tilde(&h2, &spec, t))
        .collect::<Result<Vec<f64>>>()?;
    for (t, v) in [10.0, 20.0, 40.0, 80.0].iter().zip(&om) {
        s.row("outside_tilde_h2", *t, *v);
    }
    s.truth("outside_tilde_decreasing", strictly_decreasing(&om));
    s.at_most("outside_tilde_final", om[3], 0.1);

    let mut hr: f64 = 0.0;
    let mut pr: f64 = 0.0;
    for e in [&h2, &h3] {
        for t in DYADIC {
            let r = solvlab::refined_asymptotics(e, &spec, t, &[t.sqrt()])?;
            s.row("refined_h", t, r.h_residual);
            s.row("refined_phi", t, r.phi_residual);
            hr = hr.max(r.h_residual.abs());
            pr = pr.max(r.phi_residual.abs());
        }
    }
    s.at_most("refined_h_residual", hr, 1.0);
    s.at_most("refined_phi_residual", pr, 1.0);

    let pass = solvlab::kostant_sweep(0.5, 2, 500, 11)? + solvlab::kostant_sweep(1.0, 3, 500, 12)?;
    s.at_least("kostant_points", pass as f64, 1000.0);

    let rows = DISTINGUISHED_TIMES
        .iter()
        .map(|&t| solvlab::sup_norm_htilde(&h2, t))
        .collect::<Result<Vec<_>>>()?;
    let norm: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    for r in &rows {
        s.row("sup_norm_h2", r.t, r.normalized);
    }
    s.at_most("sup_band_h2", spread(&norm), 5.0);
    let slope = solvlab::sup_norm_fit(&rows).map(|f| f.slope).unwrap_or(f64::NAN);
    s.at_most("sup_exponent_h2", (slope + 1.0).abs(), 0.1);

    let p = Profile::bump(1.0);
    let radial = DISTINGUISHED_TIMES
        .iter()
        .map(|&t| solvlab::distinguished_radial(&h2, p, t))
        .collect::<Result<Vec<_>>>()?;
    let off = DISTINGUISHED_TIMES
        .iter()
        .map(|&t| solvlab::distinguished_offorigin(&h2, p, 1.0, t))
        .collect::<Result<Vec<_>>>()?;
    for (label, rows) in [("radial", &radial), ("offorigin", &off)] {
        let l1: Vec<f64> = rows.iter().map(|r| r.l1).collect();
        let li: Vec<f64> = rows.iter().map(|r| r.linf_norm).collect();
        for r in rows.iter() {
            s.row(&format!("flow_l1_{label}"), r.t, r.l1);
            s.row(&format!("flow_linf_norm_{label}"), r.t, r.linf_norm);
        }
        s.truth(&format!("flow_l1_decreasing_{label}"), strictly_decreasing(&l1));
        s.truth(&format!("flow_linf_decreasing_{label}"), strictly_decreasing(&li));
        s.at_most(&format!("flow_l1_final_share_{label}"), l1[4] / l1[0], 0.1);
        s.at_most(&format!("flow_linf_final_share_{label}"), li[4] / li[0], 0.1);
    }

    let m0 = solvlab::radial_mass(&h2, p)?;
    let mut drift: f64 = 0.0;
    for k in 0..10 {
        let g = 0.8 * k as f64;
        drift = drift.max((solvlab::mass_function(&h2, p, g, g)? / m0 - 1.0).abs());
    }
    s.row("radial_mass", 0.0, m0);
    s.at_most("mass_function_constant", drift, 1e-6);

    let rho = h2.space.rho[0];
    s.truth("weighted_accepts", solvlab::weighted_class_check(&h2, 3.0 * rho + 1.0).is_ok());
    s.truth("weighted_rejects", solvlab::weighted_class_check(&h2, rho).is_err());
    Ok(s)
}
