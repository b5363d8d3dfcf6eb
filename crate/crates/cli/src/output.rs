use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use heatlab::harish::{CFunction, SpectralPoint};
use heatlab::spherical::complex::complex_case_phi;
use heatlab::spherical::rank1::phi_rank1;
use heatlab::{HeatEngine, SpaceSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiments::{Outcome, Table};
use crate::CliError;

fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Shortest round-trip form, scientific outside [1e-4, 1e7).
fn cell(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn table_body(columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = columns.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| cell(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// CSV with a leading comment that echoes the config.
pub fn write_csv(cfg: &ExperimentConfig, table: &Table, stamp: bool) -> Result<(), CliError> {
    let mut head = String::new();
    let mut echo = cfg.clone();
    echo.out = None;
    echo.summary = None;
    let _ = writeln!(head, "# config: {}", serde_json::to_string(&echo).expect("json"));
    if stamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = writeln!(head, "# stamp: {secs}");
    }
    head.push_str(&table_body(&table.columns, &table.rows));
    emit(cfg.out.as_deref(), &head)
}

/// Summary JSON to the summary path, or stderr.
pub fn write_summary(cfg: &ExperimentConfig, outcome: &Outcome) -> Result<(), CliError> {
    let assertions: Vec<_> = outcome.assertions.iter().map(|(n, ok)| json!({ "name": n, "passed": ok })).collect();
    let v = json!({
        "config": cfg,
        "rows": outcome.table.rows.len(),
        "summary": outcome.summary,
        "assertions": assertions,
        "passed": outcome.assertions.iter().all(|a| a.1),
    });
    let text = serde_json::to_string_pretty(&v).expect("json") + "\n";
    match &cfg.summary {
        Some(p) => std::fs::write(p, text)?,
        None => eprint!("{text}"),
    }
    Ok(())
}

pub enum Dump {
    CFunction,
    Phi,
    Phi0,
    Kernel,
}

pub fn dump(what: Dump, tag: &str, lambdas: &[f64], radii: &[f64], times: &[f64], out: Option<&Path>) -> Result<(), CliError> {
    let sp = SpaceSpec::from_tag(tag).map_err(|e| CliError::Config(e.to_string()))?;
    let unit: Vec<f64> = {
        let n = sp.rho.iter().map(|x| x * x).sum::<f64>().sqrt();
        sp.rho.iter().map(|x| x / n).collect()
    };
    let scaled = |r: f64| unit.iter().map(|u| r * u).collect::<Vec<f64>>();
    let (columns, rows): (Vec<&str>, Vec<Vec<f64>>) = match what {
        Dump::CFunction => {
            let cf = CFunction::new(&sp);
            let rows = lambdas
                .iter()
                .map(|&l| {
                    let lam = SpectralPoint::real(scaled(l));
                    let b = cf.b_minus_inv(&sp, &lam)?;
                    Ok(vec![l, cf.plancherel(&scaled(l)), b.re, b.im])
                })
                .collect::<heatlab::Result<Vec<_>>>()?;
            (vec!["lambda", "plancherel", "b_minus_inv_re", "b_minus_inv_im"], rows)
        }
        Dump::Phi => {
            let mut rows = Vec::new();
            for &l in lambdas {
                for &r in radii {
                    let v = match sp.jacobi() {
                        Some(jac) => phi_rank1(&jac, Complex64::new(l, 0.0), r)?,
                        None => complex_case_phi(&sp, &scaled(l), &scaled(r))?,
                    };
                    rows.push(vec![l, r, v.re, v.im]);
                }
            }
            (vec!["lambda", "r", "phi_re", "phi_im"], rows)
        }
        Dump::Phi0 => {
            let rows = radii
                .iter()
                .map(|&r| Ok(vec![r, heatlab::spherical::phi0(&sp, &scaled(r))?]))
                .collect::<heatlab::Result<Vec<_>>>()?;
            (vec!["r", "phi0"], rows)
        }
        Dump::Kernel => {
            let e = HeatEngine::new(&sp)?;
            let pairs: Vec<(f64, f64)> = times.iter().flat_map(|&t| radii.iter().map(move |&r| (t, r))).collect();
            let rows = pairs
                .par_iter()
                .map(|&(t, r)| {
                    let ln = e.ln_heat_kernel(t, &scaled(r))?;
                    Ok(vec![t, r, ln, ln.exp()])
                })
                .collect::<heatlab::Result<Vec<_>>>()?;
            (vec!["t", "r", "ln_h", "h"], rows)
        }
    };
    emit(out, &table_body(&columns, &rows))
}
