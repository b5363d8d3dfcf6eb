//! Least-squares rate fits in log-log coordinates.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence half-width of the slope.
    pub half_width: f64,
    pub points: usize,
}

// Two-sided 97.5% Student-t quantiles for 1..=10 degrees of freedom.
const T975: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];

/// Fits log y = intercept + slope·log x over points with positive y.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    linear_fit(&pts)
}

pub fn linear_fit(pts: &[(f64, f64)]) -> Option<SlopeFit> {
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half_width = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let q = T975.get(n - 3).copied().unwrap_or(1.96);
        q * se
    } else {
        f64::INFINITY
    };
    Some(SlopeFit { slope, intercept, half_width, points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [10.0, 20.0, 40.0, 80.0];
        let y: Vec<f64> = x.iter().map(|t: &f64| 3.0 * t.powf(-0.5)).collect();
        let f = loglog_slope(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(f.half_width < 1e-10);
    }

    #[test]
    fn too_few_points() {
        assert!(loglog_slope(&[1.0], &[1.0]).is_none());
    }
}
