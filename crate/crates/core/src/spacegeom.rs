//! Root data, Weyl groups and the radial geometry of the catalog spaces.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::gamma_real;

/// Chamber walls are detected with this absolute tolerance on ⟨α,H⟩.
pub const WALL_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Row-major ℓ×ℓ matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Matrix { dim, entries }
    }

    pub fn reflection(alpha: &[f64]) -> Self {
        let dim = alpha.len();
        let aa = dot(alpha, alpha);
        let mut m = Self::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] -= 2.0 * alpha[i] * alpha[j] / aa;
            }
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entries[i * self.dim + j] * v[j]).sum())
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Matrix { dim: d, entries }
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.entries[0],
            2 => self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2],
            _ => {
                let d = self.dim;
                let mut a = self.entries.clone();
                let mut det = 1.0;
                for c in 0..d {
                    let p = (c..d)
                        .max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs()))
                        .unwrap();
                    if a[p * d + c] == 0.0 {
                        return 0.0;
                    }
                    if p != c {
                        for j in 0..d {
                            a.swap(p * d + j, c * d + j);
                        }
                        det = -det;
                    }
                    det *= a[c * d + c];
                    for i in c + 1..d {
                        let f = a[i * d + c] / a[c * d + c];
                        for j in c..d {
                            a[i * d + j] -= f * a[c * d + j];
                        }
                    }
                }
                det
            }
        }
    }

    fn close_to(&self, other: &Matrix) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| (a - b).abs() < 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootDatum {
    pub rank: usize,
    /// Positive reduced roots.
    pub roots: Vec<Vec<f64>>,
    /// (m_α, m_{2α}) per reduced root.
    pub mult: Vec<(u32, u32)>,
    pub simple: Vec<Vec<f64>>,
    pub weyl: Vec<Matrix>,
}

/// Abstract root data as read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AbstractDatum {
    pub rank: usize,
    pub roots: Vec<Vec<f64>>,
    pub mult: Vec<[u32; 2]>,
}

impl RootDatum {
    pub fn new(rank: usize, roots: Vec<Vec<f64>>, mult: Vec<(u32, u32)>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Construction("rank must be positive".into()));
        }
        if roots.is_empty() || roots.len() != mult.len() {
            return Err(Error::Construction("roots and multiplicities must be nonempty and aligned".into()));
        }
        for (r, &(m1, m2)) in roots.iter().zip(&mult) {
            if r.len() != rank {
                return Err(Error::Construction(format!("root {r:?} is not in R^{rank}")));
            }
            if norm(r) < 1e-12 {
                return Err(Error::Construction("zero root".into()));
            }
            if m1 == 0 {
                return Err(Error::Construction(format!(
                    "root {r:?}: m_alpha must be positive (m_2alpha = {m2})"
                )));
            }
        }
        for (i, a) in roots.iter().enumerate() {
            for b in roots.iter().skip(i + 1) {
                let c = dot(a, b) / (norm(a) * norm(b));
                if c > 1.0 - 1e-12 {
                    return Err(Error::Construction(format!(
                        "roots {a:?} and {b:?} are positive multiples of each other"
                    )));
                }
            }
        }
        let simple = simple_roots(&roots);
        if simple.len() != rank {
            return Err(Error::Construction(format!(
                "found {} simple roots for rank {rank}",
                simple.len()
            )));
        }
        let weyl = weyl_closure(rank, &simple, &roots)?;
        let datum = RootDatum { rank, roots, mult, simple, weyl };
        datum.check_invariance()?;
        let rho = datum.rho();
        for s in &datum.simple {
            if dot(&rho, s) <= 0.0 {
                return Err(Error::Construction("rho is not in the open positive chamber".into()));
            }
        }
        Ok(datum)
    }

    pub fn from_abstract(a: &AbstractDatum) -> Result<Self> {
        Self::new(a.rank, a.roots.clone(), a.mult.iter().map(|m| (m[0], m[1])).collect())
    }

    /// Every positive root, including doubles 2α with m_{2α} > 0,
    /// paired with its multiplicity.
    pub fn all_positive(&self) -> Vec<(Vec<f64>, u32)> {
        let mut out = Vec::new();
        for (r, &(m1, m2)) in self.roots.iter().zip(&self.mult) {
            out.push((r.clone(), m1));
            if m2 > 0 {
                out.push((r.iter().map(|x| 2.0 * x).collect(), m2));
            }
        }
        out
    }

    pub fn rho(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.rank];
        for (r, &(m1, m2)) in self.roots.iter().zip(&self.mult) {
            let w = 0.5 * (m1 as f64 + 2.0 * m2 as f64);
            for i in 0..self.rank {
                rho[i] += w * r[i];
            }
        }
        rho
    }

    pub fn rho0(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.rank];
        for r in &self.roots {
            for i in 0..self.rank {
                rho[i] += 0.5 * r[i];
            }
        }
        rho
    }

    fn check_invariance(&self) -> Result<()> {
        let mut full: Vec<Vec<f64>> = Vec::new();
        for (r, _) in self.all_positive() {
            full.push(r.iter().map(|x| -x).collect());
            full.push(r);
        }
        for w in &self.weyl {
            for r in &full {
                let img = w.apply(r);
                if !full.iter().any(|s| s.iter().zip(&img).all(|(a, b)| (a - b).abs() < 1e-9)) {
                    return Err(Error::Construction(format!(
                        "root set is not Weyl invariant (image {img:?})"
                    )));
                }
            }
        }
        // Multiplicities must be constant on Weyl orbits.
        for w in &self.weyl {
            for (r, m) in self.roots.iter().zip(&self.mult) {
                let img = w.apply(r);
                for (s, n) in self.roots.iter().zip(&self.mult) {
                    let same = s.iter().zip(&img).all(|(a, b)| (a - b).abs() < 1e-9)
                        || s.iter().zip(&img).all(|(a, b)| (a + b).abs() < 1e-9);
                    if same && m != n {
                        return Err(Error::Construction("multiplicities are not Weyl invariant".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Positive roots that are not sums of two positive roots.
fn simple_roots(roots: &[Vec<f64>]) -> Vec<Vec<f64>> {
    roots
        .iter()
        .filter(|r| {
            !roots.iter().any(|a| {
                roots.iter().any(|b| {
                    r.iter().zip(a.iter().zip(b)).all(|(x, (y, z))| (x - y - z).abs() < 1e-9)
                })
            })
        })
        .cloned()
        .collect()
}

fn weyl_closure(rank: usize, simple: &[Vec<f64>], roots: &[Vec<f64>]) -> Result<Vec<Matrix>> {
    let npos = roots.len();
    let expected = if rank <= 2 {
        2 * npos
    } else {
        (1..=rank + 1).product::<usize>() * (1usize << rank)
    };
    let cap = 10 * expected;
    let gens: Vec<Matrix> = simple.iter().map(|a| Matrix::reflection(a)).collect();
    let mut group = vec![Matrix::identity(rank)];
    let mut frontier = vec![Matrix::identity(rank)];
    while let Some(g) = frontier.pop() {
        for s in &gens {
            let h = s.mul(&g);
            if !group.iter().any(|x| x.close_to(&h)) {
                if group.len() >= cap {
                    return Err(Error::Construction(format!(
                        "Weyl group closure exceeded {cap} elements"
                    )));
                }
                group.push(h.clone());
                frontier.push(h);
            }
        }
    }
    Ok(group)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceName {
    RealHyperbolic(u32),
    ComplexHyperbolic(u32),
    QuaternionicHyperbolic(u32),
    ComplexA2,
    Abstract,
}

impl fmt::Display for SpaceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceName::RealHyperbolic(n) => write!(f, "Hr:{n}"),
            SpaceName::ComplexHyperbolic(n) => write!(f, "Hc:{n}"),
            SpaceName::QuaternionicHyperbolic(n) => write!(f, "Hq:{n}"),
            SpaceName::ComplexA2 => write!(f, "A2c"),
            SpaceName::Abstract => write!(f, "abstract"),
        }
    }
}

/// Parameters of the rank-one radial operator
/// u'' + ((2a+1)coth r + (2b+1)tanh r)u' + (λ²+ρ²)u = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
}

impl JacobiParams {
    pub fn new(m_alpha: u32, m_2alpha: u32) -> Self {
        let (m1, m2) = (m_alpha as f64, m_2alpha as f64);
        JacobiParams { a: (m1 + m2 - 1.0) / 2.0, b: (m2 - 1.0) / 2.0, rho: m1 / 2.0 + m2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub name: SpaceName,
    pub datum: RootDatum,
    pub n: u32,
    pub nu: u32,
    pub rho: Vec<f64>,
    pub rho0: Vec<f64>,
    pub l_plus_sr: u32,
}

impl SpaceSpec {
    pub fn from_datum(name: SpaceName, datum: RootDatum) -> Self {
        let l = datum.rank as u32;
        let sr = datum.roots.len() as u32;
        let msum: u32 = datum.mult.iter().map(|&(a, b)| a + b).sum();
        SpaceSpec {
            name,
            n: l + msum,
            nu: l + 2 * sr,
            rho: datum.rho(),
            rho0: datum.rho0(),
            l_plus_sr: l + sr,
            datum,
        }
    }

    pub fn real_hyperbolic(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Construction(format!("Hr:{n} needs n >= 2")));
        }
        Self::rank_one(SpaceName::RealHyperbolic(n), n - 1, 0)
    }

    pub fn complex_hyperbolic(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Construction("Hc:n needs n >= 1".into()));
        }
        // Hc:1 is the real hyperbolic plane.
        if n == 1 {
            return Self::rank_one(SpaceName::ComplexHyperbolic(1), 1, 0);
        }
        Self::rank_one(SpaceName::ComplexHyperbolic(n), 2 * n - 2, 1)
    }

    pub fn quaternionic_hyperbolic(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Construction("Hq:n needs n >= 2".into()));
        }
        Self::rank_one(SpaceName::QuaternionicHyperbolic(n), 4 * n - 4, 3)
    }

    fn rank_one(name: SpaceName, m1: u32, m2: u32) -> Result<Self> {
        let datum = RootDatum::new(1, vec![vec![1.0]], vec![(m1, m2)])?;
        Ok(Self::from_datum(name, datum))
    }

    pub fn complex_a2() -> Self {
        let s = 0.5f64.sqrt();
        let h = 1.5f64.sqrt();
        let roots = vec![vec![2.0 * s, 0.0], vec![-s, h], vec![s, h]];
        let datum = RootDatum::new(2, roots, vec![(2, 0); 3]).expect("A2 root datum");
        Self::from_datum(SpaceName::ComplexA2, datum)
    }

    pub fn abstract_space(a: &AbstractDatum) -> Result<Self> {
        Ok(Self::from_datum(SpaceName::Abstract, RootDatum::from_abstract(a)?))
    }

    /// Parses a catalog tag: `Hr:n`, `Hc:n`, `Hq:n` or `A2c`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        if tag == "A2c" {
            return Ok(Self::complex_a2());
        }
        let (fam, n) = tag
            .split_once(':')
            .ok_or_else(|| Error::Construction(format!("unknown space tag {tag:?}")))?;
        let n: u32 = n
            .parse()
            .map_err(|_| Error::Construction(format!("bad dimension in space tag {tag:?}")))?;
        match fam {
            "Hr" => Self::real_hyperbolic(n),
            "Hc" => Self::complex_hyperbolic(n),
            "Hq" => Self::quaternionic_hyperbolic(n),
            _ => Err(Error::Construction(format!("unknown space tag {tag:?}"))),
        }
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn is_rank_one(&self) -> bool {
        self.datum.rank == 1
    }

    pub fn rho_sq(&self) -> f64 {
        dot(&self.rho, &self.rho)
    }

    pub fn jacobi(&self) -> Option<JacobiParams> {
        if !self.is_rank_one() {
            return None;
        }
        let (m1, m2) = self.datum.mult[0];
        Some(JacobiParams::new(m1, m2))
    }

    /// Real hyperbolic dimension when the space is Hr:n (or Hc:1).
    pub fn real_hyperbolic_dim(&self) -> Option<u32> {
        match self.name {
            SpaceName::RealHyperbolic(n) => Some(n),
            SpaceName::ComplexHyperbolic(1) => Some(2),
            _ => None,
        }
    }

    /// True when all multiplicities are (2, 0), the complex-group case.
    pub fn is_complex_type(&self) -> bool {
        self.datum.mult.iter().all(|&m| m == (2, 0))
    }

    pub fn weyl_order(&self) -> usize {
        self.datum.weyl.len()
    }

    /// Geometric normalization: radial integrals are c·∫_{a⁺} δ f.
    /// Rank one uses the unit-sphere area; complex A₂ the value fixed by
    /// the small-time Euclidean limit. Other data default to 1.
    pub fn measure_constant(&self) -> f64 {
        if self.is_rank_one() && norm(&self.datum.roots[0]) == 1.0 {
            let n = self.n as f64;
            let (_, m2) = self.datum.mult[0];
            let omega = 2.0 * PI.powf(n / 2.0) / gamma_real(n / 2.0).unwrap_or(f64::NAN);
            return omega * 2f64.powi(-(m2 as i32));
        }
        if self.name == SpaceName::ComplexA2 {
            return 4.0 * PI.powi(3);
        }
        1.0
    }

    pub fn chamber_point(&self, h: Vec<f64>) -> Result<ChamberPoint> {
        ChamberPoint::new(self, h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChamberPoint {
    pub h: Vec<f64>,
}

impl ChamberPoint {
    pub fn new(space: &SpaceSpec, h: Vec<f64>) -> Result<Self> {
        if h.len() != space.rank() {
            return Err(Error::Domain(format!("point {h:?} has wrong dimension")));
        }
        for s in &space.datum.simple {
            if dot(s, &h) < -WALL_TOL {
                return Err(Error::Domain(format!("point {h:?} lies outside the positive chamber")));
            }
        }
        Ok(ChamberPoint { h })
    }

    pub fn radial(r: f64) -> Self {
        ChamberPoint { h: vec![r] }
    }
}

/// log δ(H); −∞ on walls.
pub fn log_density(space: &SpaceSpec, h: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (r, m) in space.datum.all_positive() {
        let x = dot(&r, h).abs();
        if x <= WALL_TOL {
            return f64::NEG_INFINITY;
        }
        acc += m as f64 * log_sinh(x);
    }
    acc
}

/// δ(H) = ∏_{α∈Σ⁺} sinh⟨α,H⟩^{m_α}.
pub fn density_delta(space: &SpaceSpec, h: &ChamberPoint) -> f64 {
    log_density(space, &h.h).exp()
}

/// Right-hand side of the comparability δ ≍ ∏(x/(1+x))^{m} e^{2⟨ρ,H⟩}, in log form.
pub fn log_density_envelope(space: &SpaceSpec, h: &[f64]) -> f64 {
    let mut acc = 2.0 * dot(&space.rho, h);
    for (r, m) in space.datum.all_positive() {
        let x = dot(&r, h).abs();
        if x <= WALL_TOL {
            return f64::NEG_INFINITY;
        }
        acc += m as f64 * (x / (1.0 + x)).ln();
    }
    acc
}

pub fn log_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// μ(H) = min over positive roots of ⟨α,H⟩.
pub fn mu_min(space: &SpaceSpec, h: &[f64]) -> f64 {
    space
        .datum
        .all_positive()
        .iter()
        .map(|(r, _)| dot(r, h))
        .fold(f64::INFINITY, f64::min)
}

/// 𝛑(H) = ∏_{α∈Σ_r⁺}⟨α,H⟩.
pub fn pi_prod(space: &SpaceSpec, h: &[f64]) -> f64 {
    space.datum.roots.iter().map(|r| dot(r, h)).product()
}

pub fn cartan_distance(h1: &ChamberPoint, h2: &ChamberPoint) -> f64 {
    h1.h.iter().zip(&h2.h).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// The Weyl orbit of λ without duplicates.
pub fn weyl_orbit(space: &SpaceSpec, lambda: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for w in &space.datum.weyl {
        let v = w.apply(lambda);
        if !out.iter().any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-10)) {
            out.push(v);
        }
    }
    out
}

/// The element sending the positive chamber to the negative one.
pub fn longest_element(space: &SpaceSpec) -> Matrix {
    let rho = &space.rho;
    space
        .datum
        .weyl
        .iter()
        .find(|w| {
            let v = w.apply(rho);
            v.iter().zip(rho).all(|(a, b)| (a + b).abs() < 1e-9)
        })
        .cloned()
        .expect("finite Weyl group contains w0")
}

/// Representative of the W-orbit of H in the closed positive chamber.
pub fn to_chamber(space: &SpaceSpec, h: &[f64]) -> Vec<f64> {
    let rho = &space.rho;
    space
        .datum
        .weyl
        .iter()
        .map(|w| w.apply(h))
        .max_by(|a, b| dot(a, rho).total_cmp(&dot(b, rho)))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_dimensions() {
        let h3 = SpaceSpec::from_tag("Hr:3").unwrap();
        assert_eq!((h3.n, h3.nu, h3.rank()), (3, 3, 1));
        assert_eq!(h3.rho, vec![1.0]);
        let a2 = SpaceSpec::complex_a2();
        assert_eq!((a2.n, a2.nu, a2.l_plus_sr, a2.weyl_order()), (8, 8, 5, 6));
        assert!((a2.rho_sq() - 8.0).abs() < 1e-12);
        let hc = SpaceSpec::from_tag("Hc:2").unwrap();
        assert_eq!((hc.n, hc.rho[0]), (4, 2.0));
        let hq = SpaceSpec::from_tag("Hq:2").unwrap();
        assert_eq!((hq.n, hq.rho[0]), (8, 5.0));
    }

    #[test]
    fn normal_real_form() {
        let a2 = SpaceSpec::complex_a2();
        let d = AbstractDatum {
            rank: 2,
            roots: a2.datum.roots.clone(),
            mult: vec![[1, 0]; 3],
        };
        let s = SpaceSpec::abstract_space(&d).unwrap();
        assert_eq!(s.l_plus_sr, 5);
        assert_eq!(s.n, 5);
        assert_eq!(s.nu, 8);
    }

    #[test]
    fn invalid_multiplicities() {
        let bad = RootDatum::new(1, vec![vec![1.0]], vec![(0, 1)]);
        assert!(matches!(bad, Err(Error::Construction(_))));
        assert!(SpaceSpec::from_tag("Hx:3").is_err());
        assert!(SpaceSpec::from_tag("Hr:1").is_err());
    }

    #[test]
    fn density_values() {
        let h2 = SpaceSpec::from_tag("Hr:2").unwrap();
        assert_eq!(density_delta(&h2, &ChamberPoint::radial(0.0)), 0.0);
        assert!((density_delta(&h2, &ChamberPoint::radial(1.0)) - 1.175201193643801).abs() < 1e-12);
    }

    #[test]
    fn walls_and_pi() {
        let a2 = SpaceSpec::complex_a2();
        let wall = vec![0.0, 1.0];
        assert!(mu_min(&a2, &wall).abs() < 1e-12);
        assert!(pi_prod(&a2, &wall).abs() < 1e-12);
        assert!(ChamberPoint::new(&a2, wall).is_ok());
        assert!(ChamberPoint::new(&a2, vec![0.0, -1.0]).is_err());
        let h = SpaceSpec::from_tag("Hr:5").unwrap();
        assert_eq!(mu_min(&h, &[2.0]), 2.0);
        assert_eq!(pi_prod(&h, &[2.0]), 2.0);
    }

    #[test]
    fn weyl_data() {
        let h = SpaceSpec::from_tag("Hr:2").unwrap();
        assert_eq!(weyl_orbit(&h, &[3.0]).len(), 2);
        assert_eq!(longest_element(&h).entries, vec![-1.0]);
        let a2 = SpaceSpec::complex_a2();
        assert_eq!(weyl_orbit(&a2, &[0.3, 0.7]).len(), 6);
        let w0 = longest_element(&a2);
        let v = w0.apply(&a2.rho);
        assert!(v.iter().zip(&a2.rho).all(|(a, b)| (a + b).abs() < 1e-12));
    }
}
