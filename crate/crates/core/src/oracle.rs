//! Finite-difference eigenvalues that never call a special function.
//!
//! The radial solver discretises
//! −(r^{N−1}R′)′ + l(l+N−2) r^{N−3} R = λ r^{N−1} R on (ε, 1), R = 0 at both
//! ends, with flux weights at the half nodes. The polar solver discretises
//! −Δ on the planar sector {ε < r < 1, |θ| < β}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConeGeometry;

pub const ITERATION_CAP: usize = 500;
pub const ITERATION_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub radial_nodes: usize,
    /// Used by the polar solver only.
    pub angular_nodes: usize,
    pub richardson: bool,
    /// Spectral shift for inverse iteration.
    pub shift: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 4096,
            angular_nodes: 64,
            richardson: false,
            shift: 0.0,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 64 || self.angular_nodes < 16 {
            return Err(Error::Parameter(format!(
                "need radial_nodes >= 64 and angular_nodes >= 16 (got {}, {})",
                self.radial_nodes, self.angular_nodes
            )));
        }
        if self.richardson && !self.radial_nodes.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "Richardson extrapolation halves the grid: radial_nodes must be a power of two, got {}",
                self.radial_nodes
            )));
        }
        if !self.shift.is_finite() {
            return Err(Error::Parameter("shift must be finite".into()));
        }
        Ok(())
    }
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples i and i + 1.
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiag {
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = v.len();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// Solves (T − shift) x = b by the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0] - shift;
        if piv == 0.0 {
            return Err(Error::Domain("shift hits a discrete eigenvalue".into()));
        }
        c[0] = if n > 1 { self.off[0] / piv } else { 0.0 };
        d[0] = b[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if piv == 0.0 {
                return Err(Error::Domain("shift hits a discrete eigenvalue".into()));
            }
            if i + 1 < n {
                c[i] = self.off[i] / piv;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// k-th smallest eigenvalue of a symmetric tridiagonal matrix by inverse
/// iteration, deflating the k − 1 eigenvectors found before it.
fn kth_eigen(t: &Tridiag, k: usize, shift: f64) -> Result<f64> {
    let n = t.diag.len();
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut value = 0.0;
    let mut tv = vec![0.0; n];
    // rounding floor for ‖Tv − μv‖, reached well before 1e-10·μ on fine grids
    let norm = (0..n)
        .map(|i| {
            t.diag[i].abs()
                + if i > 0 { t.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { t.off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max);
    let floor = 16.0 * f64::EPSILON * norm;
    for _ in 0..k {
        // deterministic start with components along every low mode
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64)
            .collect();
        let deflate = |v: &mut Vec<f64>, found: &[Vec<f64>]| {
            for u in found {
                let c = dot(v, u);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        };
        deflate(&mut v, &found);
        normalize(&mut v);
        let mut converged = false;
        let mut res = f64::INFINITY;
        for _ in 0..ITERATION_CAP {
            let mut w = t.solve_shifted(shift, &v)?;
            deflate(&mut w, &found);
            normalize(&mut w);
            t.apply(&w, &mut tv);
            value = dot(&w, &tv);
            res = tv
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            v = w;
            if res <= ITERATION_RESIDUAL * value.abs().max(1.0) + floor {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::EigenNonConvergence {
                iterations: ITERATION_CAP,
                residual: res,
            });
        }
        found.push(v);
    }
    Ok(value)
}

fn radial_matrix(dim: usize, l: f64, eps: f64, nodes: usize) -> Tridiag {
    let n = dim as f64;
    let h = (1.0 - eps) / nodes as f64;
    let r = |i: f64| eps + i * h;
    let q = l * (l + n - 2.0);
    let m = nodes - 1;
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    let weight = |i: f64| r(i).powf(n - 1.0);
    for i in 1..nodes {
        let fi = i as f64;
        let a = (weight(fi - 0.5) + weight(fi + 0.5)) / (h * h) + q * r(fi).powf(n - 3.0);
        // conjugation by r^{(N−1)/2}
        diag.push(a / weight(fi));
        if i + 1 < nodes {
            let b = -weight(fi + 0.5) / (h * h);
            off.push(b / (weight(fi) * weight(fi + 1.0)).sqrt());
        }
    }
    Tridiag { diag, off }
}

/// Raw and extrapolated values from one radial solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    /// Extrapolated value when Richardson is on, else the fine-grid value.
    pub value: f64,
    pub fine: f64,
    pub coarse: Option<f64>,
    pub nodes: usize,
}

fn check_common(l: f64, eps: f64, k: usize) -> Result<()> {
    if !(l >= 0.0) {
        return Err(Error::Parameter(format!("l must be >= 0, got {l}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Parameter(format!(
            "eps must lie in [0, 1), got {eps}"
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("radial index starts at 1".into()));
    }
    Ok(())
}

/// k-th eigenvalue of the radial problem for angular parameter `l`.
pub fn radial_fd_detail(
    g: &ConeGeometry,
    l: f64,
    eps: f64,
    k: usize,
    cfg: &FdConfig,
) -> Result<FdEstimate> {
    cfg.validate()?;
    check_common(l, eps, k)?;
    if k >= cfg.radial_nodes / 4 {
        return Err(Error::Parameter(format!(
            "radial index {k} too large for {} nodes",
            cfg.radial_nodes
        )));
    }
    let solve = |nodes| kth_eigen(&radial_matrix(g.dim(), l, eps, nodes), k, cfg.shift);
    let fine = solve(cfg.radial_nodes)?;
    if !cfg.richardson {
        return Ok(FdEstimate {
            value: fine,
            fine,
            coarse: None,
            nodes: cfg.radial_nodes,
        });
    }
    let coarse = solve(cfg.radial_nodes / 2)?;
    Ok(FdEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        fine,
        coarse: Some(coarse),
        nodes: cfg.radial_nodes,
    })
}

pub fn radial_fd_eigen(
    g: &ConeGeometry,
    l: f64,
    eps: f64,
    k: usize,
    cfg: &FdConfig,
) -> Result<f64> {
    Ok(radial_fd_detail(g, l, eps, k, cfg)?.value)
}

/// log₂ of successive error ratios from values on grids n, n/2, n/4
/// (fine first); ≈ 2 for a second-order scheme on a smooth problem.
pub fn observed_order(fine: f64, mid: f64, coarse: f64) -> f64 {
    ((coarse - mid) / (mid - fine)).log2()
}

/// Lower triangle of a symmetric positive-definite band matrix with `p`
/// subdiagonals, stored row-wise; entry (i, j), i − p ≤ j ≤ i, at
/// i(p + 1) + j − i + p.
struct Band {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            data: vec![0.0; n * (p + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.p + 1) + j + self.p - i
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn cholesky(mut self) -> Result<Self> {
        let p = self.p;
        for i in 0..self.n {
            let j0 = i.saturating_sub(p);
            for j in j0..=i {
                let mut s = self.data[self.idx(i, j)];
                let k0 = j0.max(j.saturating_sub(p));
                for k in k0..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                let ij = self.idx(i, j);
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::Domain(
                            "shifted polar operator is not positive definite".into(),
                        ));
                    }
                    self.data[ij] = s.sqrt();
                } else {
                    self.data[ij] = s / self.data[self.idx(j, j)];
                }
            }
        }
        Ok(self)
    }

    fn solve(&self, b: &mut [f64]) {
        let p = self.p;
        for i in 0..self.n {
            let k0 = i.saturating_sub(p);
            let s = b[k0..i]
                .iter()
                .enumerate()
                .fold(b[i], |s, (d, bk)| s - self.data[self.idx(i, k0 + d)] * bk);
            b[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..self.n).rev() {
            let k1 = (i + p + 1).min(self.n);
            let s = b[i + 1..k1].iter().enumerate().fold(b[i], |s, (d, bk)| {
                s - self.data[self.idx(i + 1 + d, i)] * bk
            });
            b[i] = s / self.data[self.idx(i, i)];
        }
    }
}

/// Smallest Dirichlet eigenvalue of the planar sector {ε < r < 1, |θ| < β}
/// from the five-point polar scheme (radial_nodes × angular_nodes cells).
pub fn polar_fd_eigen(beta: f64, eps: f64, cfg: &FdConfig) -> Result<f64> {
    cfg.validate()?;
    if !(beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(Error::Parameter(format!(
            "beta must lie in (0, pi), got {beta}"
        )));
    }
    check_common(1.0, eps, 1)?;
    let nr = cfg.radial_nodes;
    let nt = cfg.angular_nodes;
    let hr = (1.0 - eps) / nr as f64;
    let ht = 2.0 * beta / nt as f64;
    let mr = nr - 1;
    let mt = nt - 1;
    let n = mr * mt;
    let at = |i: usize, j: usize| i * mt + j;
    let r = |i: f64| eps + i * hr;

    // r·(−Δ) is symmetric: radial fluxes r_{i±1/2}/h_r², angular 1/(r h_θ²)
    let mut a = Band::new(n, mt);
    let mut w = vec![0.0; n];
    for i in 0..mr {
        let ri = r(i as f64 + 1.0);
        let up = r(i as f64 + 1.5) / (hr * hr);
        let down = r(i as f64 + 0.5) / (hr * hr);
        let ang = 1.0 / (ri * ht * ht);
        for j in 0..mt {
            let row = at(i, j);
            w[row] = ri;
            a.add(row, row, up + down + 2.0 * ang - cfg.shift * ri);
            if i + 1 < mr {
                a.add(at(i + 1, j), row, -up);
            }
            if j + 1 < mt {
                a.add(at(i, j + 1), row, -ang);
            }
        }
    }
    let chol = a.cholesky()?;

    // inverse iteration on the pencil (A, W); Rayleigh quotient for λ
    let mut v: Vec<f64> = (0..n).map(|k| 1.0 + 0.01 * (k % 7) as f64).collect();
    let mut value = f64::NAN;
    for _ in 0..ITERATION_CAP {
        let mut x: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
        chol.solve(&mut x);
        // ‖x‖_W normalisation; λ − shift ≈ vᵀWv / vᵀWx
        let num: f64 = v.iter().zip(&w).map(|(a, b)| a * a * b).sum();
        let den: f64 = v.iter().zip(&x).zip(&w).map(|((a, b), c)| a * b * c).sum();
        let next = num / den + cfg.shift;
        let norm = x.iter().zip(&w).map(|(a, b)| a * a * b).sum::<f64>().sqrt();
        v = x.into_iter().map(|a| a / norm).collect();
        if (next - value).abs() <= ITERATION_RESIDUAL * next.abs() {
            return Ok(next);
        }
        value = next;
    }
    Err(Error::EigenNonConvergence {
        iterations: ITERATION_CAP,
        residual: f64::NAN,
    })
}
