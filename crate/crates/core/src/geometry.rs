//! Spherical cones in ℝ^N, their cuts near the vertex and removed volumes.
//!
//! A point is written x = (x₁, x̄) with the cone axis along x₁. The polar
//! angle is θ = atan2(|x̄|, x₁) ∈ [0, π], so for N = 2 the two arcs
//! |θ₁| < β collapse into the single predicate θ < β.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::specfun::gamma;

/// Ω_β: the part of the unit ball with polar angle below β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeGeometry {
    dim: usize,
    half_angle: f64,
    mu: f64,
}

impl ConeGeometry {
    pub fn new(dim: usize, half_angle: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!(
                "dimension must be >= 2, got {dim}"
            )));
        }
        if !(half_angle > 0.0 && half_angle < PI) {
            return Err(Error::Parameter(format!(
                "half-angle must lie in (0, pi), got {half_angle}"
            )));
        }
        Ok(Self {
            dim,
            half_angle,
            mu: (dim as f64 - 3.0) / 2.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// (N − 3)/2, the Legendre order offset.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// σ_β, the (N−1)-measure of the cap cut out of the unit sphere.
    /// For N = 2 this is the total arc length 2β.
    pub fn cap_measure(&self) -> f64 {
        cap_measure(self.dim, self.half_angle)
    }
}

fn sphere_area(dim_minus_one: usize) -> f64 {
    // |S^k| = 2 π^{(k+1)/2} / Γ((k+1)/2)
    let h = (dim_minus_one as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h).expect("positive argument")
}

fn cap_measure(dim: usize, beta: f64) -> f64 {
    if dim == 2 {
        return 2.0 * beta;
    }
    let k = (dim - 2) as i32;
    let scale = sphere_area(dim - 2);
    let tol = 1e-13 * scale.recip().max(1.0);
    let theta = integrate(|t: f64| t.sin().powi(k), 0.0, beta, tol, 0.0)
        .expect("smooth integrand on a finite interval");
    scale * theta
}

/// How the vertex is cut away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutVariant {
    /// Ω_β(ε): remove the ball of radius ε.
    ExactCut,
    /// Ω̃_β(ε): cut below the graph x₁ = g(x̄), which agrees with the
    /// cone boundary away from the vertex and is a straight chord near it.
    LipschitzCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedCone {
    pub base: ConeGeometry,
    pub eps: f64,
    pub variant: CutVariant,
}

impl PerturbedCone {
    pub fn new(base: ConeGeometry, eps: f64, variant: CutVariant) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::Parameter(format!(
                "eps must lie in [0, 1), got {eps}"
            )));
        }
        if variant == CutVariant::LipschitzCut && eps >= 0.5 {
            return Err(Error::Parameter(format!(
                "the Lipschitz cut requires eps < 1/2, got {eps}"
            )));
        }
        Ok(Self { base, eps, variant })
    }

    pub fn exact(base: ConeGeometry, eps: f64) -> Result<Self> {
        Self::new(base, eps, CutVariant::ExactCut)
    }

    pub fn lipschitz(base: ConeGeometry, eps: f64) -> Result<Self> {
        Self::new(base, eps, CutVariant::LipschitzCut)
    }

    /// |Ω_β ∖ Ω_β(ε)| = σ_β ε^N / N. Only defined in closed form for the
    /// exact cut; use [`mc_removed_volume`] for the Lipschitz one.
    pub fn removed_volume(&self) -> Result<f64> {
        match self.variant {
            CutVariant::ExactCut => {
                let n = self.base.dim as f64;
                Ok(self.base.cap_measure() * self.eps.powf(n) / n)
            }
            CutVariant::LipschitzCut => Err(Error::Parameter(
                "no closed-form removed volume for the Lipschitz cut; use mc_removed_volume".into(),
            )),
        }
    }

    /// Membership in the open set; boundary points are outside.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        if x.coords.len() != self.base.dim {
            return Err(Error::Parameter(format!(
                "point has {} coordinates, domain dimension is {}",
                x.coords.len(),
                self.base.dim
            )));
        }
        let x1 = x.coords[0];
        let rbar = x.coords[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(self.contains_split(x1, rbar))
    }

    fn contains_split(&self, x1: f64, rbar: f64) -> bool {
        let r = x1.hypot(rbar);
        let beta = self.base.half_angle;
        match self.variant {
            CutVariant::ExactCut => r > self.eps && r < 1.0 && rbar.atan2(x1) < beta,
            CutVariant::LipschitzCut => r < 1.0 && x1 > lipschitz_floor(beta, self.eps, rbar),
        }
    }
}

/// g(x̄) as a function of |x̄|.
fn lipschitz_floor(beta: f64, eps: f64, rbar: f64) -> f64 {
    if rbar <= eps * beta.sin() {
        eps - rbar * (0.5 * beta).tan()
    } else {
        rbar / beta.tan()
    }
}

/// A = sin β / √(2(1 − cos β)), so that Ω̃_β(ε) ⊂ Ω_β(Aε).
pub fn inclusion_constant(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < PI) {
        return Err(Error::Parameter(format!(
            "half-angle must lie in (0, pi), got {beta}"
        )));
    }
    // 2(1 − cos β) = 4 sin²(β/2), written this way to avoid cancellation
    Ok(beta.sin() / (2.0 * (0.5 * beta).sin()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

/// Monte Carlo estimate with its one-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

pub const MC_MIN_SAMPLES: usize = 10_000;
const MC_CHUNK: usize = 4096;

/// |Ω_β ∖ Ω̃_β(ε)| by seeded Monte Carlo.
///
/// The removed set contains the cone part of the ball of radius Aε and sits
/// inside the ball of radius ε, so the inner part is added exactly and only
/// the shell Aε < |x| < ε is sampled. Chunk `i` draws from the ChaCha8
/// stream `i` of `seed`; the result does not depend on thread count.
pub fn mc_removed_volume(p: &PerturbedCone, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if p.variant != CutVariant::LipschitzCut {
        return Err(Error::Parameter(
            "mc_removed_volume expects the Lipschitz cut".into(),
        ));
    }
    if samples < MC_MIN_SAMPLES {
        return Err(Error::Parameter(format!(
            "Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if p.eps == 0.0 {
        return Ok(VolumeEstimate {
            estimate: 0.0,
            std_error: 0.0,
        });
    }
    let dim = p.base.dim;
    let n = dim as f64;
    let a = inclusion_constant(p.base.half_angle)?;
    let inner_frac = a.powf(n);
    let inner = p.base.cap_measure() * (a * p.eps).powf(n) / n;
    // |B_1| = |S^{N−1}| / N
    let shell = sphere_area(dim - 1) / n * p.eps.powf(n) * (1.0 - inner_frac);

    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut dir = vec![0.0f64; dim];
            let mut hits = 0u64;
            for _ in 0..count {
                let norm = loop {
                    for d in dir.iter_mut() {
                        *d = rng.sample(StandardNormal);
                    }
                    let s = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if s > 0.0 {
                        break s;
                    }
                };
                let u: f64 = rng.random();
                let r = p.eps * (inner_frac + u * (1.0 - inner_frac)).powf(1.0 / n);
                let x1 = r * dir[0] / norm;
                let rbar = r * dir[1..].iter().map(|v| v * v).sum::<f64>().sqrt() / norm;
                let in_cone = rbar.atan2(x1) < p.base.half_angle;
                if in_cone && !p.contains_split(x1, rbar) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let frac = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        estimate: inner + shell * frac,
        std_error: shell * (frac * (1.0 - frac) / samples as f64).sqrt(),
    })
}
