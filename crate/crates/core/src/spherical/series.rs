//! Harish-Chandra expansion φ_λ(exp H) = Σ_w 𝐜(wλ)Φ_{wλ}(H) with
//! coefficients γ_q from the radial eigen-equation.
//!
//! With q = 2Σ n_i α_i (α_i simple) and s = iλ − ρ the recursion reads
//!
//!   γ_q ⟨q, q − 2iλ⟩ = −2 Σ_{α>0} m_α Σ_{j≥1} ⟨α, s − q + 2jα⟩ γ_{q−2jα},
//!
//! where α runs over all positive roots, doubles included, and ⟨·,·⟩ is
//! complex bilinear. In rank one it reduces to the Jacobi recursion of
//! [`super::rank1::gamma_coeffs`].

use num_complex::Complex64;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::harish::{CFunction, SpectralPoint};
use crate::spacegeom::{dot, mu_min, norm, SpaceSpec};

type C = Complex64;

pub const MU_MIN: f64 = 1.0;
pub const REGULAR_TOL: f64 = 1e-3;
pub const MAX_SHELLS: usize = 200;
const SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct PosRoot {
    alpha: Vec<f64>,
    coeffs: Vec<usize>,
    mult: f64,
}

/// Recursion data for one space.
#[derive(Debug, Clone)]
pub struct Gangolli {
    rank: usize,
    simple: Vec<Vec<f64>>,
    roots: Vec<PosRoot>,
    rho: Vec<f64>,
}

/// Coefficients of a root in the basis of simple roots.
fn simple_coords(simple: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let l = simple.len();
    // Solve the Gram system G c = (⟨α_i, v⟩).
    let mut a: Vec<Vec<f64>> = (0..l)
        .map(|i| {
            let mut row: Vec<f64> = (0..l).map(|j| dot(&simple[i], &simple[j])).collect();
            row.push(dot(&simple[i], v));
            row
        })
        .collect();
    for col in 0..l {
        let piv = (col..l).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        for row in 0..l {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=l {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..l).map(|i| a[i][l] / a[i][i]).collect()
}

/// All multi-indices n ∈ ℕ^rank with Σ n_i = shell.
fn shell_indices(rank: usize, shell: usize) -> Vec<Vec<usize>> {
    if rank == 1 {
        return vec![vec![shell]];
    }
    let mut out = Vec::new();
    for first in (0..=shell).rev() {
        for mut rest in shell_indices(rank - 1, shell - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Gangolli {
    pub fn new(space: &SpaceSpec) -> Self {
        let simple = space.datum.simple.clone();
        let roots = space
            .datum
            .all_positive()
            .into_iter()
            .map(|(alpha, m)| {
                let coeffs = simple_coords(&simple, &alpha)
                    .into_iter()
                    .map(|x| x.round() as usize)
                    .collect();
                PosRoot { alpha, coeffs, mult: m as f64 }
            })
            .collect();
        Gangolli { rank: space.rank(), simple, roots, rho: space.rho.clone() }
    }

    fn q_vec(&self, n: &[usize]) -> Vec<f64> {
        let mut q = vec![0.0; self.rank];
        for (ni, a) in n.iter().zip(&self.simple) {
            for k in 0..self.rank {
                q[k] += 2.0 * *ni as f64 * a[k];
            }
        }
        q
    }

    /// Coefficients γ_q(λ) for every q in the first `shells` shells,
    /// listed shell by shell.
    pub fn coefficients(&self, lambda: &SpectralPoint, shells: usize) -> Vec<(Vec<usize>, C)> {
        let mut out = Vec::new();
        let mut table: HashMap<Vec<usize>, C> = HashMap::new();
        self.extend(lambda, &mut table, 0, shells, |n, g| out.push((n.to_vec(), g)));
        out
    }

    fn extend<F: FnMut(&[usize], C)>(
        &self,
        lambda: &SpectralPoint,
        table: &mut HashMap<Vec<usize>, C>,
        from: usize,
        to: usize,
        mut sink: F,
    ) {
        for shell in from..to {
            for n in shell_indices(self.rank, shell) {
                let g = self.gamma_at(lambda, table, &n);
                sink(&n, g);
                table.insert(n, g);
            }
        }
    }

    fn gamma_at(&self, lambda: &SpectralPoint, table: &HashMap<Vec<usize>, C>, n: &[usize]) -> C {
        if n.iter().all(|&x| x == 0) {
            return C::new(1.0, 0.0);
        }
        let q = self.q_vec(n);
        let lhs = C::new(dot(&q, &q), 0.0) - 2.0 * C::i() * lambda.pair(&q);
        let mut weighted = C::new(0.0, 0.0);
        for r in &self.roots {
            let a_s = C::i() * lambda.pair(&r.alpha) - dot(&r.alpha, &self.rho);
            let a_q = dot(&r.alpha, &q);
            let aa = dot(&r.alpha, &r.alpha);
            let mut idx = n.to_vec();
            let mut j = 1.0;
            let mut part = C::new(0.0, 0.0);
            while idx.iter().zip(&r.coeffs).all(|(x, c)| x >= c) {
                for (x, c) in idx.iter_mut().zip(&r.coeffs) {
                    *x -= c;
                }
                let g = table.get(&idx).copied().unwrap_or_default();
                part += (a_s - a_q + 2.0 * j * aa) * g;
                j += 1.0;
            }
            weighted += part * r.mult;
        }
        -2.0 * weighted / lhs
    }

    /// Φ_λ(H) = e^{⟨iλ−ρ,H⟩} Σ_q γ_q(λ) e^{−⟨q,H⟩}.
    pub fn big_phi(&self, lambda: &SpectralPoint, h: &[f64]) -> Result<C> {
        let mu = self.simple.iter().map(|a| dot(a, h)).fold(f64::INFINITY, f64::min);
        let mut table: HashMap<Vec<usize>, C> = HashMap::new();
        let mut sum = C::new(0.0, 0.0);
        let mut quiet = 0;
        for shell in 0..MAX_SHELLS {
            let mut part = C::new(0.0, 0.0);
            self.extend(lambda, &mut table, shell, shell + 1, |n, g| {
                let qh: f64 = n.iter().zip(&self.simple).map(|(ni, a)| 2.0 * *ni as f64 * dot(a, h)).sum();
                part += g * (-qh).exp();
            });
            sum += part;
            if shell >= 2 && part.norm() < SERIES_TOL * sum.norm() {
                quiet += 1;
                if quiet >= 2 {
                    let lead = C::i() * lambda.pair(h) - dot(&self.rho, h);
                    return Ok(lead.exp() * sum);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Series { terms: MAX_SHELLS, mu })
    }
}

/// min over reduced roots of |⟨α,λ⟩|.
pub fn regularity(space: &SpaceSpec, lambda: &[f64]) -> f64 {
    space.datum.roots.iter().map(|a| dot(a, lambda).abs()).fold(f64::INFINITY, f64::min)
}

fn orbit_sum(space: &SpaceSpec, g: &Gangolli, cf: &CFunction, lambda: &[f64], h: &[f64]) -> Result<C> {
    let mut acc = C::new(0.0, 0.0);
    for w in &space.datum.weyl {
        let wl = SpectralPoint::real(w.apply(lambda));
        let c_val = 1.0 / cf.c_inv(&wl)?;
        acc += c_val * g.big_phi(&wl, h)?;
    }
    Ok(acc)
}

/// φ_λ(exp H) from the Harish-Chandra expansion, for real λ and H with
/// μ(H) ≥ 1. Near-singular λ are handled by Richardson extrapolation
/// along ρ from four regular neighbours.
pub fn phi_series_hc(space: &SpaceSpec, lambda: &[f64], h: &[f64]) -> Result<C> {
    let mu = mu_min(space, h);
    if mu < MU_MIN {
        return Err(Error::Domain(format!("μ(H) = {mu} is below {MU_MIN}; series not admissible")));
    }
    let g = Gangolli::new(space);
    let cf = CFunction::new(space);
    if regularity(space, lambda) >= REGULAR_TOL {
        return orbit_sum(space, &g, &cf, lambda, h);
    }
    let rn = norm(&space.rho);
    let dir: Vec<f64> = space.rho.iter().map(|x| x / rn).collect();
    let h0 = 0.01;
    let xs: Vec<f64> = (1..=4).map(|k| h0 * k as f64).collect();
    let mut ys = Vec::with_capacity(4);
    for &x in &xs {
        let l: Vec<f64> = lambda.iter().zip(&dir).map(|(a, d)| a + x * d).collect();
        ys.push(orbit_sum(space, &g, &cf, &l, h)?);
    }
    Ok(neville_at_zero(&xs, &ys))
}

/// Polynomial extrapolation of (x_i, y_i) to x = 0.
pub fn neville_at_zero(xs: &[f64], ys: &[C]) -> C {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (p[i] * xs[i + k] - p[i + 1] * xs[i]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical::rank1::gamma_coeffs;

    #[test]
    fn rank_one_matches_jacobi_recursion() {
        for tag in ["Hr:2", "Hc:3", "Hq:2"] {
            let s = SpaceSpec::from_tag(tag).unwrap();
            let g = Gangolli::new(&s);
            let lam = C::new(0.8, 0.3);
            let general = g.coefficients(&SpectralPoint::scalar(lam), 12);
            let jac = gamma_coeffs(&s.jacobi().unwrap(), lam, 11);
            for ((_, a), b) in general.iter().zip(&jac) {
                assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "{tag}");
            }
        }
    }

    #[test]
    fn a2_big_phi_product_form() {
        let s = SpaceSpec::complex_a2();
        let g = Gangolli::new(&s);
        let lam = SpectralPoint::real(vec![0.3, 0.7]);
        let h = vec![1.3, 2.1];
        let v = g.big_phi(&lam, &h).unwrap();
        let mut prod = (C::i() * lam.pair(&h) - dot(&s.rho, &h)).exp();
        for a in &s.datum.roots {
            prod /= 1.0 - (-2.0 * dot(a, &h)).exp();
        }
        assert!((v - prod).norm() < 1e-12 * prod.norm());
    }

    #[test]
    fn neville_exact_for_cubics() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let ys: Vec<C> = xs.iter().map(|x| C::new(2.0 + x - 3.0 * x * x * x, 0.0)).collect();
        assert!((neville_at_zero(&xs, &ys).re - 2.0).abs() < 1e-12);
    }
}
