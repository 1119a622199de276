//! Dirichlet eigenvalues of the cone and of the cone with the vertex ball
//! removed, obtained from zeros of J_ν(√λ) and of the cross product
//! J_ν(√λ)Y_ν(ε√λ) − Y_ν(√λ)J_ν(ε√λ), one angular mode at a time.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charval::{sigma_beta, AngularMode};
use crate::error::{Error, Result};
use crate::geometry::ConeGeometry;
use crate::quad::integrate;
use crate::specfun::{bessel_jy, find_zero_newton, RootOptions};

/// Largest radial index accepted by the eigenvalue routines.
pub const MAX_RADIAL_INDEX: usize = 64;
/// Largest ε accepted by [`cross_product_eigen`].
pub const EPS_MAX: f64 = 0.95;
pub const MERGE_MAX: usize = 64;
/// Residual bound for records and profile endpoints.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub mode: AngularMode,
    pub radial_index: usize,
    pub eps: f64,
    pub lambda: f64,
    /// λ* of the branch this record was tracked along.
    pub limit_lambda: Option<f64>,
}

fn root_opts(x: f64) -> RootOptions {
    // √λ is resolved to a few ulps; gaps λ(ε) − λ* near 1e−9 λ* must survive
    RootOptions::with_tol(4.0 * f64::EPSILON * x.max(1.0))
}

fn check_index(k: usize) -> Result<()> {
    if k == 0 || k > MAX_RADIAL_INDEX {
        return Err(Error::Parameter(format!(
            "radial index must lie in 1..={MAX_RADIAL_INDEX}, got {k}"
        )));
    }
    Ok(())
}

fn j_and_derivative(nu: f64, x: f64) -> Result<(f64, f64)> {
    let b = bessel_jy(nu, x)?;
    Ok((b.j, b.jp))
}

/// Cross product at x = √λ divided by √(J_ν(εx)² + Y_ν(εx)²), with its
/// x-derivative divided by the same factor.
fn cross(nu: f64, eps: f64, x: f64) -> Result<(f64, f64)> {
    let outer = bessel_jy(nu, x)?;
    let inner = bessel_jy(nu, eps * x)?;
    let scale = inner.j.hypot(inner.y);
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::Domain(format!(
            "Bessel functions of order {nu} overflow at the inner radius (eps x = {})",
            eps * x
        )));
    }
    let (ji, yi) = (inner.j / scale, inner.y / scale);
    let (jpi, ypi) = (inner.jp / scale, inner.yp / scale);
    let f = outer.j * yi - outer.y * ji;
    let df = outer.jp * yi + eps * outer.j * ypi - outer.yp * ji - eps * outer.y * jpi;
    Ok((f, df))
}

/// Scans `f` upward from `start` in steps of `step` and returns the bracket
/// of the `k`-th sign change.
fn kth_bracket<F>(f: F, start: f64, step: f64, k: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    // generous budget: zeros are at least ~π/2 apart in every use here
    let max_steps = ((k as f64 + 4.0) * 8.0 * PI / step).ceil() as usize + 64;
    let mut lo = start;
    let mut flo = f(lo)?;
    let mut seen = 0;
    for i in 1..=max_steps {
        let hi = start + i as f64 * step;
        let fhi = f(hi)?;
        if flo * fhi < 0.0 || (fhi == 0.0 && flo != 0.0) {
            seen += 1;
            if seen == k {
                return Ok((lo, hi));
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::Bracketing {
        index: k,
        lo: start,
        hi: start + max_steps as f64 * step,
    })
}

/// λ = j²_{ν,k}, the k-th eigenvalue of the uncut cone in this mode.
pub fn unperturbed_eigen(mode: &AngularMode, k: usize) -> Result<EigenvalueRecord> {
    check_index(k)?;
    let nu = mode.nu;
    // j_{ν,1} > ν, and consecutive zeros are close to π apart
    let start = nu.max(1e-3);
    let (lo, hi) = kth_bracket(|x| Ok(bessel_jy(nu, x)?.j), start, PI / 8.0, k)?;
    let x = find_zero_newton(|x| j_and_derivative(nu, x), lo, hi, &root_opts(hi))?;
    Ok(EigenvalueRecord {
        mode: *mode,
        radial_index: k,
        eps: 0.0,
        lambda: x * x,
        limit_lambda: None,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(Error::Parameter(format!(
            "cross-product eigenvalues need 0 < eps <= {EPS_MAX}, got {eps}"
        )));
    }
    Ok(())
}

fn cross_step(eps: f64) -> f64 {
    (PI / 4.0).min(PI * (1.0 - eps) / 8.0)
}

/// k-th eigenvalue of the cut cone Ω_β(ε) in this mode.
pub fn cross_product_eigen(mode: &AngularMode, eps: f64, k: usize) -> Result<EigenvalueRecord> {
    check_index(k)?;
    check_eps(eps)?;
    let nu = mode.nu;
    // every zero lies above j_{ν,1} > ν
    let start = nu.max(1e-3);
    let (lo, hi) = kth_bracket(|x| Ok(cross(nu, eps, x)?.0), start, cross_step(eps), k)?;
    let x = find_zero_newton(|x| cross(nu, eps, x), lo, hi, &root_opts(hi))?;
    Ok(EigenvalueRecord {
        mode: *mode,
        radial_index: k,
        eps,
        lambda: x * x,
        limit_lambda: None,
    })
}

/// Eigenvalue for any ε in [0, EPS_MAX].
pub fn eigen(mode: &AngularMode, eps: f64, k: usize) -> Result<EigenvalueRecord> {
    if eps == 0.0 {
        unperturbed_eigen(mode, k)
    } else {
        cross_product_eigen(mode, eps, k)
    }
}

/// Value of the defining equation at the record, in the normalised form
/// used by the solvers.
pub fn residual(rec: &EigenvalueRecord) -> Result<f64> {
    let x = rec.lambda.sqrt();
    if rec.eps == 0.0 {
        Ok(bessel_jy(rec.mode.nu, x)?.j)
    } else {
        Ok(cross(rec.mode.nu, rec.eps, x)?.0)
    }
}

/// Follows the k-th branch from λ* through `eps_grid` (strictly decreasing,
/// positive, below 1). The grid is walked from its smallest value upward;
/// at each ε the single cross-product zero within half a zero spacing of
/// the previous √λ is taken. Records come back in grid order.
pub fn track_branch(
    mode: &AngularMode,
    k: usize,
    eps_grid: &[f64],
) -> Result<Vec<EigenvalueRecord>> {
    if eps_grid.is_empty() {
        return Ok(Vec::new());
    }
    for w in eps_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Parameter(
                "eps grid must be strictly decreasing".into(),
            ));
        }
    }
    for &e in eps_grid {
        check_eps(e)?;
    }
    let limit = unperturbed_eigen(mode, k)?.lambda;
    let nu = mode.nu;
    let mut prev = limit.sqrt();
    let mut out = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid.iter().rev() {
        let half = 0.5 * PI / (1.0 - eps);
        let lo_w = (prev - half).max(1e-3);
        let hi_w = prev + half;
        let f = |x: f64| Ok(cross(nu, eps, x)?.0);
        let fine = (hi_w - lo_w) / 32.0;
        let mut brackets = Vec::new();
        let mut a = lo_w;
        let mut fa = f(a)?;
        for i in 1..=32 {
            let b = lo_w + i as f64 * fine;
            let fb = f(b)?;
            if fa * fb < 0.0 || (fb == 0.0 && fa != 0.0) {
                brackets.push((a, b));
            }
            a = b;
            fa = fb;
        }
        let (lo, hi) = match brackets.as_slice() {
            [one] => *one,
            [] => {
                return Err(Error::Bracketing {
                    index: k,
                    lo: lo_w,
                    hi: hi_w,
                })
            }
            many => {
                return Err(Error::BranchJump {
                    count: many.len(),
                    lo: lo_w,
                    hi: hi_w,
                })
            }
        };
        let x = find_zero_newton(|x| cross(nu, eps, x), lo, hi, &root_opts(hi))?;
        out.push(EigenvalueRecord {
            mode: *mode,
            radial_index: k,
            eps,
            lambda: x * x,
            limit_lambda: Some(limit),
        });
        prev = x;
    }
    out.reverse();
    Ok(out)
}

/// Which part of the spectrum a merged list covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumSector {
    /// Every eigenvalue (N = 2).
    Complete,
    /// Eigenvalues of the axisymmetric angular family only (N ≥ 3).
    Axisymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedSpectrum {
    pub sector: SpectrumSector,
    pub records: Vec<EigenvalueRecord>,
}

struct Pending(EigenvalueRecord, usize);

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    // reversed so the max-heap pops the smallest λ; ties by (mode, k)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .lambda
            .total_cmp(&self.0.lambda)
            .then(other.1.cmp(&self.1))
            .then(other.0.radial_index.cmp(&self.0.radial_index))
    }
}

/// The `n` smallest eigenvalues over all modes and radial indices, sorted.
/// Coincident values from different (l, k) are listed separately.
pub fn spectrum_merge(g: &ConeGeometry, eps: f64, n: usize) -> Result<MergedSpectrum> {
    if n > MERGE_MAX {
        return Err(Error::Parameter(format!(
            "at most {MERGE_MAX} eigenvalues, requested {n}"
        )));
    }
    if eps != 0.0 {
        check_eps(eps)?;
    }
    let sector = if g.dim() == 2 {
        SpectrumSector::Complete
    } else {
        SpectrumSector::Axisymmetric
    };
    if n == 0 {
        return Ok(MergedSpectrum {
            sector,
            records: Vec::new(),
        });
    }
    // λ grows with l at fixed k and with k at fixed l, so n values involve
    // at most n modes and each mode is entered through its k = 1 value
    let modes = sigma_beta(g, n.min(crate::charval::SIGMA_MAX_COUNT))?;
    let mut heap = BinaryHeap::new();
    heap.push(Pending(eigen(&modes[0], eps, 1)?, 0));
    let mut records = Vec::with_capacity(n);
    while records.len() < n {
        let Some(Pending(rec, mi)) = heap.pop() else {
            break;
        };
        if rec.radial_index < MAX_RADIAL_INDEX {
            heap.push(Pending(eigen(&modes[mi], eps, rec.radial_index + 1)?, mi));
        }
        if rec.radial_index == 1 && mi + 1 < modes.len() {
            heap.push(Pending(eigen(&modes[mi + 1], eps, 1)?, mi + 1));
        }
        records.push(rec);
    }
    Ok(MergedSpectrum { sector, records })
}

/// Radial factor R(r) of an eigenfunction sampled on a uniform interior grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub mode: AngularMode,
    pub eps: f64,
    pub lambda: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// |R| at r = ε (ε > 0) and r = 1 after normalisation.
    pub endpoint_residuals: (f64, f64),
}

/// R(r) = r^{1−N/2}(C₁J_ν + C₂Y_ν)(r√λ), with (C₁, C₂) = (1, 0) on the
/// uncut cone and the null vector of the inner boundary row otherwise.
fn radial_combination(rec: &EigenvalueRecord) -> Result<impl Fn(f64) -> Result<(f64, f64)>> {
    let x = rec.lambda.sqrt();
    let nu = rec.mode.nu;
    let (c1, c2) = if rec.eps == 0.0 {
        (1.0, 0.0)
    } else {
        let inner = bessel_jy(nu, rec.eps * x)?;
        let s = inner.j.hypot(inner.y);
        (inner.y / s, -inner.j / s)
    };
    let power = 1.0 - rec.mode.dim as f64 / 2.0;
    // returns (R, R′)
    Ok(move |r: f64| {
        let b = bessel_jy(nu, r * x)?;
        let z = c1 * b.j + c2 * b.y;
        let zp = x * (c1 * b.jp + c2 * b.yp);
        let rp = r.powf(power);
        Ok((rp * z, power * rp / r * z + rp * zp))
    })
}

pub fn radial_profile(rec: &EigenvalueRecord, grid_size: usize) -> Result<RadialProfile> {
    if grid_size < 16 {
        return Err(Error::Parameter(format!(
            "grid_size must be >= 16, got {grid_size}"
        )));
    }
    let r_of = radial_combination(rec)?;
    let h = (1.0 - rec.eps) / (grid_size as f64 + 1.0);
    let grid: Vec<f64> = (1..=grid_size).map(|i| rec.eps + i as f64 * h).collect();
    let mut values = grid
        .iter()
        .map(|&r| Ok(r_of(r)?.0))
        .collect::<Result<Vec<f64>>>()?;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return Err(Error::InconsistentRecord(
            "radial profile vanishes on the grid".into(),
        ));
    }
    values.iter_mut().for_each(|v| *v /= peak);
    let at_one = (r_of(1.0)?.0 / peak).abs();
    let at_eps = if rec.eps > 0.0 {
        (r_of(rec.eps)?.0 / peak).abs()
    } else {
        0.0
    };
    if at_one > RESIDUAL_TOL || at_eps > RESIDUAL_TOL {
        return Err(Error::InconsistentRecord(format!(
            "boundary residuals |R(eps)| = {at_eps:e}, |R(1)| = {at_one:e} exceed {RESIDUAL_TOL:e}"
        )));
    }
    Ok(RadialProfile {
        mode: rec.mode,
        eps: rec.eps,
        lambda: rec.lambda,
        grid,
        values,
        endpoint_residuals: (at_eps, at_one),
    })
}

/// Growth exponent of ∂R/∂r at the vertex: R′ ∼ r^{l−1}.
pub fn gradient_exponent(mode: &AngularMode) -> f64 {
    mode.l - 1.0
}

/// Supremum of the p for which the gradient lies in L^p: +∞ for l ≥ 1 and
/// N/(1 − l) otherwise (the endpoint itself excluded).
pub fn integrability_threshold(g: &ConeGeometry, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Parameter(format!("l must be > 0, got {l}")));
    }
    Ok(if l >= 1.0 {
        f64::INFINITY
    } else {
        g.dim() as f64 / (1.0 - l)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrability {
    Finite,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub class: Integrability,
    /// Estimated decay rate κ of the dyadic shell contributions,
    /// Δ_{m+1}/Δ_m ≈ 2^{−κ}; the integral is finite iff κ > 0.
    pub decay_rate: f64,
    pub analytic_threshold: f64,
    pub shells: usize,
}

const SHELLS: usize = 30;
const DECAY_SETTLE: f64 = 1e-3;
const DECAY_ZERO: f64 = 1e-6;

/// Classifies ∫₀¹ |R′(r)|^p r^{N−1} dr from the decay of its contributions
/// over the shells [2^{−m}, 2^{−m+1}], m = 1..30.
pub fn verify_integrability(
    mode: &AngularMode,
    g: &ConeGeometry,
    p: f64,
    rec: &EigenvalueRecord,
) -> Result<IntegrabilityReport> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::Parameter(format!(
            "p must be a finite value >= 2, got {p}"
        )));
    }
    if rec.eps != 0.0 {
        return Err(Error::Parameter(
            "integrability is checked on the uncut cone (eps = 0)".into(),
        ));
    }
    if mode.dim != g.dim() || (mode.l - rec.mode.l).abs() > 1e-12 {
        return Err(Error::Parameter(
            "mode, geometry and record disagree".into(),
        ));
    }
    let n = g.dim() as f64;
    let rp = radial_combination(rec)?;
    // ln Δ_m with r = 2^{−m} t, t ∈ [1, 2], and the integrand scaled by
    // |R′(2^{−m})|^p so nothing overflows
    let log_shell = |m: usize| -> Result<f64> {
        let base = 0.5f64.powi(m as i32);
        let s = rp(base)?.1.abs();
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Inconclusive(format!(
                "R' degenerate at r = {base:e}"
            )));
        }
        let mut err = None;
        let integral = integrate(
            |t| match rp(base * t) {
                Ok((_, d)) => (d.abs() / s).powf(p) * t.powf(n - 1.0),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            1.0,
            2.0,
            0.0,
            1e-10,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(p * s.ln() + n * base.ln() + integral.ln())
    };
    let mut rates = Vec::with_capacity(SHELLS);
    let mut prev = log_shell(1)?;
    for m in 2..=SHELLS {
        let cur = log_shell(m)?;
        rates.push(-(cur - prev) / std::f64::consts::LN_2);
        prev = cur;
    }
    let last = rates[rates.len() - 1];
    let before = rates[rates.len() - 2];
    if (last - before).abs() > DECAY_SETTLE {
        return Err(Error::Inconclusive(format!(
            "shell decay rate has not settled: {before} then {last}"
        )));
    }
    let class = if last > DECAY_ZERO {
        Integrability::Finite
    } else {
        Integrability::Divergent
    };
    Ok(IntegrabilityReport {
        class,
        decay_rate: last,
        analytic_threshold: integrability_threshold(g, mode.l)?,
        shells: SHELLS,
    })
}
