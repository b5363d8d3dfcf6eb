use std::path::PathBuf;

use clap::ValueEnum;
use heatlab::{InitialDatum, Profile, SpaceSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// h_t at the given radii.
    KernelEval,
    /// Mass of h_t outside Ω_t (and of h̃_t outside Ω̃_t in rank one).
    Concentration,
    /// Deviation norms of a radial datum and the fitted L¹ rate.
    Rates,
    /// Dirac-pair L¹ gap, kernel quotient and delayed-kernel gap.
    Counterexample,
    /// Finite-r Busemann differences against the Iwasawa limit.
    Busemann,
    /// Boundary transform of a recentered bump.
    Boundary,
    /// Mass, sup norm and concentration of the distinguished kernel.
    DistinguishedKernel,
    /// Deviations of the distinguished flow.
    DistinguishedFlow,
}

impl Experiment {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: String,
    pub experiment: Experiment,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_eps_power")]
    pub eps_power: f64,
    #[serde(default = "default_datum")]
    pub datum: InitialDatum,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Radii for kernel-eval and busemann.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

fn default_eps_power() -> f64 {
    0.25
}

fn default_p() -> f64 {
    2.0
}

fn default_datum() -> InitialDatum {
    InitialDatum::radial(Profile::bump(1.0))
}

pub const DYADIC_DEFAULT: &str = "10:160:dyadic";

impl ExperimentConfig {
    pub fn validate(&self) -> Result<SpaceSpec, CliError> {
        let space = SpaceSpec::from_tag(&self.space).map_err(|e| CliError::Config(e.to_string()))?;
        if self.t_grid.is_empty() {
            return Err(CliError::Config("t grid is empty".into()));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(CliError::Config("times must be positive".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("t grid must be strictly increasing".into()));
        }
        if !(self.eps_power > 0.0 && self.eps_power < 0.5) {
            return Err(CliError::Config(format!("eps power must lie in (0, 1/2), got {}", self.eps_power)));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(CliError::Config(format!("p must be finite and > 1, got {}", self.p)));
        }
        if let Some(profile) = self.datum.profile() {
            profile.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        let rank_one_real = space.real_hyperbolic_dim().is_some();
        match self.experiment {
            Experiment::Rates if !self.datum.is_radial() => {
                return Err(CliError::Config("rates needs a radial datum".into()));
            }
            Experiment::Counterexample | Experiment::Busemann | Experiment::Boundary if !rank_one_real => {
                return Err(CliError::Config(format!("{} needs a real hyperbolic space", self.experiment.name())));
            }
            Experiment::Boundary if space.real_hyperbolic_dim() != Some(2) => {
                return Err(CliError::Config("boundary runs on Hr:2".into()));
            }
            Experiment::KernelEval | Experiment::Busemann if self.radii.is_empty() => {
                return Err(CliError::Config(format!("{} needs --r", self.experiment.name())));
            }
            Experiment::DistinguishedFlow if !self.datum.is_radial() && space.real_hyperbolic_dim() != Some(2) => {
                return Err(CliError::Config("non-radial distinguished flow runs on Hr:2".into()));
            }
            Experiment::DistinguishedFlow | Experiment::Rates if space.rank() != 1 => {
                return Err(CliError::Config(format!("{} runs in rank one", self.experiment.name())));
            }
            _ => {}
        }
        if matches!(self.datum, InitialDatum::PointMass { .. })
            && !matches!(self.experiment, Experiment::Counterexample | Experiment::Busemann)
        {
            return Err(CliError::Config("point-mass data are only used by counterexample and busemann".into()));
        }
        if self.radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(CliError::Config("radii must be finite and nonnegative".into()));
        }
        Ok(space)
    }

    /// Distance of the datum's center from the origin.
    pub fn center(&self) -> f64 {
        match self.datum {
            InitialDatum::Radial { .. } => 0.0,
            InitialDatum::OffOrigin { distance, .. } | InitialDatum::PointMass { distance } => distance,
        }
    }
}

/// Parses "1", "1,2,5", "a:b:dyadic" (a, 2a, … ≤ b) or "a:b:n" (n
/// evenly spaced points).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("cannot parse grid '{s}'"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [one] => one.split(',').map(num).collect(),
        [a, b, how] => {
            let (a, b) = (num(a)?, num(b)?);
            if !(a >= 0.0 && b >= a) {
                return Err(bad());
            }
            if how.trim() == "dyadic" {
                if a == 0.0 {
                    return Err(bad());
                }
                let mut out = vec![a];
                while out[out.len() - 1] * 2.0 <= b * (1.0 + 1e-12) {
                    out.push(out[out.len() - 1] * 2.0);
                }
                Ok(out)
            } else {
                let n: usize = how.trim().parse().map_err(|_| bad())?;
                match n {
                    0 => Err(bad()),
                    1 => Ok(vec![a]),
                    _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
                }
            }
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10:160:dyadic").unwrap(), vec![10.0, 20.0, 40.0, 80.0, 160.0]);
        assert_eq!(parse_grid("1,2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert!(parse_grid("0:1:dyadic").is_err());
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("1:2:3").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(parse_grid("x").is_err());
    }
}
