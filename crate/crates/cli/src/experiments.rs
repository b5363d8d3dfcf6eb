use heatlab::convlab::offcenter::{
    boundary_limit, boundary_values, busemann, dirac_l1_gap, k_integral_limit, kernel_quotient, quotient_limit,
    BoundarySign,
};
use heatlab::convlab::{convergence_report, lp_interpolation_check};
use heatlab::solvlab;
use heatlab::spherical::rank1::iwasawa_a_rank1;
use heatlab::{ConcentrationSpec, HeatEngine, InitialDatum, SpaceSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    pub assertions: Vec<(String, bool)>,
}

impl Outcome {
    fn new(columns: Vec<&'static str>) -> Self {
        Outcome { table: Table { columns, rows: Vec::new() }, summary: json!({}), assertions: Vec::new() }
    }

    fn assert(&mut self, name: &str, ok: bool) {
        self.assertions.push((name.to_string(), ok));
    }
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Chamber point at distance r along ρ.
fn along_rho(space: &SpaceSpec, r: f64) -> Vec<f64> {
    let n = space.rho.iter().map(|x| x * x).sum::<f64>().sqrt();
    space.rho.iter().map(|x| r * x / n).collect()
}

pub fn run(cfg: &ExperimentConfig, space: &SpaceSpec) -> Result<Outcome, CliError> {
    let engine = HeatEngine::new(space)?;
    let eps = ConcentrationSpec { eps_power: cfg.eps_power, scale: 1.0 };
    let times = &cfg.t_grid;
    match cfg.experiment {
        Experiment::KernelEval => {
            let mut out = Outcome::new(vec!["t", "r", "ln_h", "h"]);
            let pairs: Vec<(f64, f64)> = times.iter().flat_map(|&t| cfg.radii.iter().map(move |&r| (t, r))).collect();
            let vals = pairs
                .par_iter()
                .map(|&(t, r)| engine.ln_heat_kernel(t, &along_rho(space, r)))
                .collect::<heatlab::Result<Vec<f64>>>()?;
            for ((t, r), ln) in pairs.iter().zip(&vals) {
                out.table.rows.push(vec![*t, *r, *ln, ln.exp()]);
            }
            out.assert("positive_finite", vals.iter().all(|v| v.is_finite()));
            out.summary = json!({ "c_meas": engine.c_meas, "c0": engine.c0 });
            Ok(out)
        }
        Experiment::Concentration => {
            let rank_one = space.rank() == 1;
            let mut out = Outcome::new(vec!["t", "eps", "mass_outside", "mass_outside_tilde"]);
            let rows = times
                .par_iter()
                .map(|&t| {
                    let tilde = if rank_one { solvlab::mass_outside_tilde(&engine, &eps, t)? } else { f64::NAN };
                    Ok(vec![t, eps.eps(t), engine.mass_outside(&eps, t)?, tilde])
                })
                .collect::<heatlab::Result<Vec<_>>>()?;
            let outside: Vec<f64> = rows.iter().map(|r| r[2]).collect();
            out.assert("mass_outside_decreasing", decreasing(&outside));
            out.table.rows = rows;
            Ok(out)
        }
        Experiment::Rates => {
            let profile = cfg.datum.radial_profile()?;
            let rep = convergence_report(&engine, profile, times, cfg.p, &eps)?;
            let mut out = Outcome::new(vec!["t", "l1_dev", "linf_dev", "linf_norm", "lp_dev"]);
            for i in 0..rep.times.len() {
                out.table.rows.push(vec![rep.times[i], rep.l1_dev[i], rep.linf_dev[i], rep.linf_norm[i], rep.lp_dev[i]]);
            }
            out.assert("l1_decreasing", decreasing(&rep.l1_dev));
            out.assert("holder_interpolation", lp_interpolation_check(&rep, cfg.p));
            if let Some(f) = rep.fitted_slope {
                out.assert("slope_in_band", (-0.65..=-0.35).contains(&f.slope));
            }
            out.summary = json!({ "fit_window": rep.fit_window, "fitted_slope": rep.fitted_slope });
            Ok(out)
        }
        Experiment::Counterexample => {
            let s = if cfg.center() > 0.0 { cfg.center() } else { 1.0 };
            let lim = k_integral_limit(space, s)?;
            let qlim = quotient_limit(space, 0.0, s);
            let rho = space.rho[0];
            let mut out = Outcome::new(vec!["t", "dirac_l1_gap", "k_limit", "quotient", "quotient_error", "delayed_gap"]);
            let rows = times
                .par_iter()
                .map(|&t| {
                    let gap = if t >= 5.0 { dirac_l1_gap(&engine, s, t)? } else { f64::NAN };
                    let q = kernel_quotient(&engine, t, 2.0 * t * rho, 0.0, s)?;
                    Ok(vec![t, gap, lim, q, (q - qlim).abs(), engine.delayed_kernel_gap(t, 20.0)?])
                })
                .collect::<heatlab::Result<Vec<_>>>()?;
            let errs: Vec<f64> = rows.iter().map(|r| r[4]).collect();
            out.assert("quotient_error_decreasing", decreasing(&errs));
            out.table.rows = rows;
            out.summary = json!({ "s": s, "k_integral_limit": lim, "quotient_limit": qlim });
            Ok(out)
        }
        Experiment::Busemann => {
            let s = if cfg.center() > 0.0 { cfg.center() } else { 1.0 };
            let mut out = Outcome::new(vec!["theta", "r", "finite", "limit", "gap"]);
            for k in 0..=16 {
                let th = std::f64::consts::PI * k as f64 / 16.0;
                for &r in &cfg.radii {
                    let b = busemann(th, s, r);
                    let lim = -iwasawa_a_rank1(th, s);
                    out.table.rows.push(vec![th, r, b, lim, (b - lim).abs()]);
                }
            }
            out.summary = json!({ "s": s });
            Ok(out)
        }
        Experiment::Boundary => {
            let profile = cfg.datum.profile().ok_or_else(|| CliError::Config("boundary needs a bump datum".into()))?;
            let center = cfg.center();
            let thetas: Vec<f64> = (0..=64).map(|k| std::f64::consts::PI * k as f64 / 64.0).collect();
            let plus = boundary_values(&engine, profile, center, &thetas, BoundarySign::Plus)?;
            let minus = boundary_values(&engine, profile, center, &thetas, BoundarySign::Minus)?;
            let mut out = Outcome::new(vec!["theta", "plus", "minus"]);
            for i in 0..thetas.len() {
                out.table.rows.push(vec![thetas[i], plus[i], minus[i]]);
            }
            let (direct, cocycle) = boundary_limit(&engine, profile, center)?;
            out.assert("routes_agree", center == 0.0 || (direct / cocycle - 1.0).abs() < 0.05);
            out.summary = json!({ "center": center, "direct": direct, "cocycle": cocycle });
            Ok(out)
        }
        Experiment::DistinguishedKernel => {
            let mut out = Outcome::new(vec!["t", "mass", "sup_value", "sup_normalized", "probe", "mass_outside_tilde"]);
            let rows = times
                .par_iter()
                .map(|&t| {
                    let mass = solvlab::htilde_total_mass(&engine, t)?;
                    let (sup, norm, probe) = if t >= 1.0 {
                        let s = solvlab::sup_norm_htilde(&engine, t)?;
                        (s.value, s.normalized, s.probe)
                    } else {
                        (f64::NAN, f64::NAN, f64::NAN)
                    };
                    let om = if t >= 1.0 { solvlab::mass_outside_tilde(&engine, &eps, t)? } else { f64::NAN };
                    Ok(vec![t, mass, sup, norm, probe, om])
                })
                .collect::<heatlab::Result<Vec<_>>>()?;
            out.assert("mass_one", rows.iter().all(|r| (r[1] - 1.0).abs() < 1e-6));
            let normalized: Vec<f64> = rows.iter().map(|r| r[3]).filter(|v| v.is_finite()).collect();
            if !normalized.is_empty() {
                let hi = normalized.iter().cloned().fold(0.0, f64::max);
                let lo = normalized.iter().cloned().fold(f64::INFINITY, f64::min);
                out.assert("sup_band", hi / lo < 5.0);
            }
            out.table.rows = rows;
            Ok(out)
        }
        Experiment::DistinguishedFlow => {
            let profile = cfg.datum.profile().ok_or_else(|| CliError::Config("distinguished-flow needs a bump datum".into()))?;
            let mut out = Outcome::new(vec![
                "t",
                "l1_dev_S",
                "linf_dev_S",
                "linf_norm_S",
                "mass_outside_tilde",
                "sup_norm_band",
            ]);
            let mut rows = Vec::new();
            for &t in times {
                let r = match cfg.datum {
                    InitialDatum::Radial { .. } => solvlab::distinguished_radial(&engine, profile, t)?,
                    _ => solvlab::distinguished_offorigin(&engine, profile, cfg.center(), t)?,
                };
                let (om, sup) = if t >= 1.0 {
                    (solvlab::mass_outside_tilde(&engine, &eps, t)?, solvlab::sup_norm_htilde(&engine, t)?.normalized)
                } else {
                    (f64::NAN, f64::NAN)
                };
                rows.push(vec![t, r.l1, r.linf, r.linf_norm, om, sup]);
            }
            let l1: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            let li: Vec<f64> = rows.iter().map(|r| r[3]).collect();
            out.assert("l1_decreasing", decreasing(&l1));
            out.assert("linf_norm_decreasing", decreasing(&li));
            out.summary = json!({ "radial_mass": solvlab::radial_mass(&engine, profile)? });
            out.table.rows = rows;
            Ok(out)
        }
    }
}
