//! Euclidean reference: radial data on ℝ³ under the Gaussian heat flow,
//! where t^{3/2}‖u(t) − M G_t‖_∞ tends to zero.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::gl_panel_nodes;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EuclideanRow {
    pub t: f64,
    /// t^{3/2} sup_x |u(t,x) − M G_t(x)|.
    pub linf_norm: f64,
}

/// u(t, r) = (1/(r√(4πt))) ∫ s u₀(s) e^{−(r²+s²)/4t} 2 sinh(rs/2t) ds.
fn evolve_r3<F: Fn(f64) -> f64>(u0: &F, xi: f64, t: f64, r: f64) -> f64 {
    let nodes = gl_panel_nodes(0.0, xi, 24, 16);
    let pref = 1.0 / (4.0 * PI * t).sqrt();
    nodes
        .iter()
        .map(|(s, w)| {
            let x = r * s / (2.0 * t);
            // 2 sinh(x)/r, continuous at r = 0.
            let shr = if x < 1e-6 { s / t * (1.0 + x * x / 6.0) } else { 2.0 * x.sinh() / r };
            w * s * u0(*s) * (-(r * r + s * s) / (4.0 * t)).exp() * shr
        })
        .sum::<f64>()
        * pref
}

/// t^{3/2}‖u(t) − M G_t‖_∞ on ℝ³ for a radial profile supported in [0, ξ].
pub fn euclidean_baseline<F>(u0: F, xi: f64, times: &[f64]) -> Result<Vec<EuclideanRow>>
where
    F: Fn(f64) -> f64,
{
    if xi <= 0.0 {
        return Err(Error::Config("support radius must be positive".into()));
    }
    let mass: f64 = gl_panel_nodes(0.0, xi, 24, 16).iter().map(|(s, w)| 4.0 * PI * s * s * w * u0(*s)).sum();
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let reach = 12.0 * t.sqrt() + xi;
        let mut sup: f64 = 0.0;
        for i in 0..=600 {
            let r = reach * i as f64 / 600.0;
            let g = (4.0 * PI * t).powf(-1.5) * (-r * r / (4.0 * t)).exp();
            sup = sup.max((evolve_r3(&u0, xi, t, r) - mass * g).abs());
        }
        rows.push(EuclideanRow { t, linf_norm: t.powf(1.5) * sup });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_datum_is_exact() {
        // u₀ = G_1 truncated far out evolves to G_{1+t}.
        let g = |s: f64| (4.0 * PI).powf(-1.5) * (-s * s / 4.0).exp();
        let u = evolve_r3(&g, 14.0, 2.0, 1.3);
        let want = (12.0 * PI).powf(-1.5) * (-1.69f64 / 12.0).exp();
        assert!((u / want - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normalized_sup_vanishes() {
        let bump = |s: f64| if s < 1.0 { (-1.0 / (1.0 - s * s)).exp() } else { 0.0 };
        let rows = euclidean_baseline(bump, 1.0, &[10.0, 40.0, 160.0]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].linf_norm < w[0].linf_norm));
        assert!(rows[2].linf_norm < 0.1 * rows[0].linf_norm);
    }
}
