//! Small-ε behaviour of a branch λ(ε) → λ*.
//!
//! With x = √λ and F(ε, λ) = J_ν(x)/Y_ν(x) − J_ν(εx)/Y_ν(εx), the cut-cone
//! eigenvalues are the zeros of F. Substituting δ = ε^{2ν} gives
//! G(δ, λ) = F(δ^{1/(2ν)}, λ), which is C¹ up to δ = 0, and the implicit
//! function theorem yields λ(ε) − λ* ≈ a·V(ε)^{(N+2l−2)/N} with V the
//! removed volume σ_β ε^N/N.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charval::{characteristic_value_auto, AngularMode, CharMethod};
use crate::error::{Error, Result};
use crate::geometry::{ConeGeometry, PerturbedCone};
use crate::specfun::{bessel_jy, gamma};
use crate::spectrum::{track_branch, unperturbed_eigen, EigenvalueRecord};

/// Relative gap below which a branch point is treated as round-off.
pub const NOISE_FLOOR: f64 = 1e-9;
/// Smallest predicted relative gap on a default grid (ten times the floor).
pub const GRID_FLOOR: f64 = 1e-8;
pub const GRID_EPS_MAX: f64 = 0.05;
pub const GRID_POINTS: usize = 8;
/// Slope agreement required by the sharpness report.
pub const SLOPE_TOLERANCE: f64 = 0.02;
/// |Y| below this fraction of √(J² + Y²) counts as a zero of Y.
const Y_ZERO_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub nu: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl BranchPoint {
    pub fn new(nu: f64, delta: f64, lambda: f64) -> Result<Self> {
        if !(nu > 0.0) || !(delta >= 0.0) || !(lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "branch point needs nu > 0, delta >= 0, lambda > 0 (got {nu}, {delta}, {lambda})"
            )));
        }
        Ok(Self { nu, delta, lambda })
    }

    /// δ = ε^{2ν}.
    pub fn from_eps(nu: f64, eps: f64, lambda: f64) -> Result<Self> {
        Self::new(nu, eps.powf(2.0 * nu), lambda)
    }

    pub fn eps(&self) -> f64 {
        self.delta.powf(1.0 / (2.0 * self.nu))
    }
}

fn ratio_jy(nu: f64, t: f64) -> Result<(f64, f64)> {
    let b = bessel_jy(nu, t)?;
    if b.y.abs() < Y_ZERO_GUARD * b.j.hypot(b.y) {
        return Err(Error::Domain(format!("Y_{nu} vanishes near t = {t}")));
    }
    Ok((b.j / b.y, b.y))
}

/// F(ε, λ) = J_ν(√λ)/Y_ν(√λ) − J_ν(ε√λ)/Y_ν(ε√λ).
pub fn eval_f(nu: f64, eps: f64, lambda: f64) -> Result<f64> {
    if !(eps > 0.0) || !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "F needs eps > 0 and lambda > 0 (got {eps}, {lambda})"
        )));
    }
    let x = lambda.sqrt();
    Ok(ratio_jy(nu, x)?.0 - ratio_jy(nu, eps * x)?.0)
}

/// G(δ, λ) = F(δ^{1/(2ν)}, λ).
pub fn eval_g(p: &BranchPoint) -> Result<f64> {
    eval_f(p.nu, p.eps(), p.lambda)
}

/// (∂G/∂λ, ∂G/∂δ) at δ > 0:
/// ∂G/∂λ = (1/(πλ))(−1/Y²(√λ) + 1/Y²(ε√λ)),
/// ∂G/∂δ = 1/(νπδ Y²(ε√λ)).
pub fn eval_g_partials(p: &BranchPoint) -> Result<(f64, f64)> {
    if !(p.delta > 0.0) {
        return Err(Error::Parameter(
            "delta must be > 0; use eval_g_limits at delta = 0".into(),
        ));
    }
    let x = p.lambda.sqrt();
    let (_, y_out) = ratio_jy(p.nu, x)?;
    let (_, y_in) = ratio_jy(p.nu, p.eps() * x)?;
    let inv_in = 1.0 / (y_in * y_in);
    let d_lambda = (-1.0 / (y_out * y_out) + inv_in) / (PI * p.lambda);
    let d_delta = inv_in / (p.nu * PI * p.delta);
    Ok((d_lambda, d_delta))
}

/// Limits of the partials as δ → 0 at λ = λ*:
/// (−1/(πλ* Y²(√λ*)), π(λ*/4)^ν/(νΓ²(ν))).
pub fn eval_g_limits(nu: f64, limit_lambda: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0) || !(limit_lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "limits need nu > 0 and lambda > 0 (got {nu}, {limit_lambda})"
        )));
    }
    let y = bessel_jy(nu, limit_lambda.sqrt())?.y;
    let g = gamma(nu)?;
    Ok((
        -1.0 / (PI * limit_lambda * y * y),
        PI * (limit_lambda / 4.0).powf(nu) / (nu * g * g),
    ))
}

/// Whether the coefficient belongs to the first eigenvalue branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    /// Any branch (l, k).
    General,
    /// l = l_β and k = 1, the branch of λ₁.
    FirstEigenvalue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionData {
    pub mode: AngularMode,
    pub limit_lambda: f64,
    pub coefficient: f64,
    pub kind: CoefficientKind,
    /// (N + 2l − 2)/N.
    pub exponent: f64,
    pub cap_measure: f64,
}

fn coefficient_parts(dim: usize, sigma: f64, nu: f64, limit: f64) -> Result<f64> {
    let n = dim as f64;
    let y = bessel_jy(nu, limit.sqrt())?.y;
    let g = gamma(nu)?;
    let s = 2.0 * nu / n;
    Ok(PI * PI * n.powf(s) * limit.powf(nu + 1.0) * y * y
        / (nu * 4f64.powf(nu) * sigma.powf(s) * g * g))
}

/// a = π² N^{2ν/N} λ*^{ν+1} Y_ν²(√λ*) / (ν 4^ν σ_β^{2ν/N} Γ²(ν)).
pub fn coefficient_a(
    g: &ConeGeometry,
    mode: &AngularMode,
    limit_lambda: f64,
) -> Result<ExpansionData> {
    if mode.dim != g.dim() {
        return Err(Error::Parameter(
            "mode and geometry dimensions differ".into(),
        ));
    }
    if !(limit_lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "limit lambda must be > 0, got {limit_lambda}"
        )));
    }
    let sigma = g.cap_measure();
    let coefficient = coefficient_parts(g.dim(), sigma, mode.nu, limit_lambda)?;
    let first = mode.index == 1 && {
        let j1 = unperturbed_eigen(mode, 1)?.lambda;
        (limit_lambda - j1).abs() <= 1e-8 * j1
    };
    Ok(ExpansionData {
        mode: *mode,
        limit_lambda,
        coefficient,
        kind: if first {
            CoefficientKind::FirstEigenvalue
        } else {
            CoefficientKind::General
        },
        exponent: 2.0 * mode.nu / g.dim() as f64,
        cap_measure: sigma,
    })
}

fn exact_volume(dim: usize, sigma: f64, eps: f64) -> f64 {
    let n = dim as f64;
    sigma * eps.powf(n) / n
}

/// a·V(ε)^{(N+2l−2)/N} with V(ε) = σ_β ε^N/N.
pub fn predicted_gap(data: &ExpansionData, eps: f64) -> f64 {
    data.coefficient * exact_volume(data.mode.dim, data.cap_measure, eps).powf(data.exponent)
}

/// Geometric grid of `points` values from 0.05 down to the ε whose
/// predicted gap is 1e−8 λ*, in decreasing order. When that ε is not
/// well below 0.05 the grid is shifted up so it still spans a factor 20.
pub fn default_eps_grid(data: &ExpansionData, points: usize) -> Result<Vec<f64>> {
    if points < 4 {
        return Err(Error::Parameter(format!(
            "a rate fit needs >= 4 points, got {points}"
        )));
    }
    let n = data.mode.dim as f64;
    // a (σ ε^N / N)^s = floor·λ*  ⇒  ε = (N/σ (floor·λ*/a)^{1/s})^{1/N}
    let target = GRID_FLOOR * data.limit_lambda / data.coefficient;
    let eps_min = (n / data.cap_measure * target.powf(1.0 / data.exponent)).powf(1.0 / n);
    let (lo, hi) = if eps_min < GRID_EPS_MAX / 20.0 {
        (eps_min, GRID_EPS_MAX)
    } else {
        (eps_min, (20.0 * eps_min).min(crate::spectrum::EPS_MAX))
    };
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Domain(format!(
            "no resolvable eps range: smallest eps {lo:e}, largest {hi:e}"
        )));
    }
    let ratio = (lo / hi).powf(1.0 / (points as f64 - 1.0));
    Ok((0..points).map(|i| hi * ratio.powi(i as i32)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// (ln V, ln gap) pairs in input order.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl RateFit {
    /// e^{intercept}, the fitted coefficient of V^{slope}.
    pub fn coefficient(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Least-squares line through (ln V, ln(λ(ε) − λ*)).
pub fn rate_fit(branch: &[EigenvalueRecord], volumes: &[f64]) -> Result<RateFit> {
    if branch.len() != volumes.len() {
        return Err(Error::Parameter(format!(
            "{} records but {} volumes",
            branch.len(),
            volumes.len()
        )));
    }
    if branch.len() < 4 {
        return Err(Error::Parameter(format!(
            "a rate fit needs >= 4 points, got {}",
            branch.len()
        )));
    }
    let mut noisy = Vec::new();
    let mut points = Vec::with_capacity(branch.len());
    for (i, (rec, &v)) in branch.iter().zip(volumes).enumerate() {
        let limit = rec
            .limit_lambda
            .ok_or_else(|| Error::Parameter(format!("record {i} carries no limit eigenvalue")))?;
        if !(v > 0.0) {
            return Err(Error::Parameter(format!("volume {i} must be > 0, got {v}")));
        }
        let gap = rec.lambda - limit;
        if !(gap > NOISE_FLOOR * limit) {
            noisy.push(i);
            continue;
        }
        points.push((v.ln(), gap.ln()));
    }
    if !noisy.is_empty() {
        return Err(Error::NoiseFloor { indices: noisy });
    }
    let (slope, intercept) = least_squares(&points);
    let max_residual = points
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        points,
        slope,
        intercept,
        max_residual,
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// A tracked branch with its volumes, fit and analytic expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudy {
    pub expansion: ExpansionData,
    pub eps_grid: Vec<f64>,
    pub records: Vec<EigenvalueRecord>,
    pub volumes: Vec<f64>,
    pub fit: RateFit,
    /// |slope − exponent| ≤ SLOPE_TOLERANCE.
    pub slope_match: bool,
    /// fitted coefficient / analytic coefficient.
    pub coefficient_ratio: f64,
}

/// Tracks branch (mode, k) over `eps_grid` (default grid when `None`) and
/// fits the gap against the exact removed volume.
pub fn rate_study(
    g: &ConeGeometry,
    mode: &AngularMode,
    k: usize,
    eps_grid: Option<Vec<f64>>,
) -> Result<RateStudy> {
    let limit = unperturbed_eigen(mode, k)?.lambda;
    let mut expansion = coefficient_a(g, mode, limit)?;
    if k != 1 {
        expansion.kind = CoefficientKind::General;
    }
    let eps_grid = match eps_grid {
        Some(grid) => grid,
        None => default_eps_grid(&expansion, GRID_POINTS)?,
    };
    let records = track_branch(mode, k, &eps_grid)?;
    let volumes = eps_grid
        .iter()
        .map(|&e| PerturbedCone::exact(*g, e)?.removed_volume())
        .collect::<Result<Vec<f64>>>()?;
    let fit = rate_fit(&records, &volumes)?;
    Ok(RateStudy {
        slope_match: (fit.slope - expansion.exponent).abs() <= SLOPE_TOLERANCE,
        coefficient_ratio: fit.coefficient() / expansion.coefficient,
        expansion,
        eps_grid,
        records,
        volumes,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub dim: usize,
    pub beta: f64,
    pub l_beta: f64,
    pub l_beta_method: CharMethod,
    /// N/(1 − l_β): gradients lie in L^p exactly for p below this.
    pub p_sup: f64,
    /// lim_{p → p_sup}(1 − 2/p) = (N + 2l_β − 2)/N.
    pub exponent_limit: f64,
    pub study: RateStudy,
    pub slope_tolerance: f64,
    pub slope_match: bool,
    /// 1/N, the β → π limit of the exponent (N = 2, 3 only).
    pub beta_to_pi_limit: Option<f64>,
    /// Exponent threshold known for Lipschitz domains (1/2 for N = 2,
    /// 1/3 for N = 3), for comparison with `beta_to_pi_limit`.
    pub lipschitz_threshold: Option<f64>,
}

/// (N + 2l − 2)/N.
pub fn exponent_for(dim: usize, l: f64) -> f64 {
    (dim as f64 + 2.0 * l - 2.0) / dim as f64
}

/// Compares the analytic stability exponent at the characteristic mode
/// with the slope fitted on the tracked first-eigenvalue branch.
pub fn sharpness_report(g: &ConeGeometry) -> Result<SharpnessReport> {
    let beta = g.half_angle();
    if beta <= PI / 2.0 {
        return Err(Error::Refused(format!(
            "beta = {beta} <= pi/2: the vertex is not singular (l_beta >= 1, gradients bounded), \
             so there is no exponent to test"
        )));
    }
    let n = g.dim();
    let (l_beta, method) = characteristic_value_auto(g)?;
    let mode = AngularMode::new(n, l_beta, 1)?;
    let study = rate_study(g, &mode, 1, None)?;
    let exponent_limit = exponent_for(n, l_beta);
    let (beta_to_pi_limit, lipschitz_threshold) = match n {
        2 => (Some(0.5), Some(0.5)),
        3 => (Some(1.0 / 3.0), Some(1.0 / 3.0)),
        _ => (None, None),
    };
    Ok(SharpnessReport {
        dim: n,
        beta,
        l_beta,
        l_beta_method: method,
        p_sup: n as f64 / (1.0 - l_beta),
        exponent_limit,
        slope_match: (study.fit.slope - exponent_limit).abs() <= SLOPE_TOLERANCE,
        slope_tolerance: SLOPE_TOLERANCE,
        study,
        beta_to_pi_limit,
        lipschitz_threshold,
    })
}
