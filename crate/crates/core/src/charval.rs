//! Angular parameters of the spherical cap.
//!
//! For N ≥ 3 the admissible l are the positive zeros of
//! l ↦ P^{−μ}_{l+μ}(cos β) with μ = (N − 3)/2; for N = 2 they are
//! kπ/(2β). The smallest one, l_β, fixes the vertex behaviour of every
//! eigenfunction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConeGeometry;
use crate::specfun::{find_zero, gamma, legendre_p, RootOptions};

/// Largest half-angle handled by the Legendre root; beyond it only the
/// asymptotic formula is available.
pub const DIRECT_BETA_MAX: f64 = PI - 0.05;
/// Smallest half-angle accepted by [`characteristic_asymptotic`].
pub const ASYMPTOTIC_BETA_MIN: f64 = PI - 0.2;
pub const SCAN_STEP: f64 = 0.05;
pub const SCAN_LIMIT: f64 = 50.0;
pub const SIGMA_MAX_COUNT: usize = 32;
pub const ROOT_TOL: f64 = 1e-12;
const N4_SELF_CHECK: f64 = 1e-6;

/// One element l of Σ_β together with its Bessel order ν = (N + 2l − 2)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMode {
    pub dim: usize,
    pub l: f64,
    pub nu: f64,
    /// 1-based position within Σ_β; 0 for modes built by hand.
    pub index: usize,
}

impl AngularMode {
    pub fn new(dim: usize, l: f64, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!(
                "dimension must be >= 2, got {dim}"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Parameter(format!(
                "angular parameter l must be > 0, got {l}"
            )));
        }
        Ok(Self {
            dim,
            l,
            nu: (dim as f64 + 2.0 * l - 2.0) / 2.0,
            index,
        })
    }

    /// Mode with a prescribed Bessel order.
    pub fn from_nu(dim: usize, nu: f64, index: usize) -> Result<Self> {
        let l = nu - (dim as f64 - 2.0) / 2.0;
        let mut m = Self::new(dim, l, index)?;
        m.nu = nu;
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharMethod {
    ClosedForm,
    LegendreRoot,
    Asymptotic,
}

fn legendre_in_l(mu: f64, x: f64) -> impl Fn(f64) -> Result<f64> {
    move |l| legendre_p(-mu, l + mu, x)
}

/// First `count` positive zeros of l ↦ P^{−μ}_{l+μ}(cos β), scanning from
/// l = 0 in steps of [`SCAN_STEP`] up to `limit`.
fn legendre_zeros(mu: f64, beta: f64, count: usize, limit: f64) -> Result<Vec<f64>> {
    let f = legendre_in_l(mu, beta.cos());
    let opts = RootOptions::with_tol(ROOT_TOL);
    let mut zeros = Vec::with_capacity(count);
    let mut lo = 0.0;
    let mut flo = f(lo)?;
    let mut i = 0usize;
    while zeros.len() < count {
        i += 1;
        let hi = i as f64 * SCAN_STEP;
        if hi > limit + 1e-12 {
            return Err(Error::ScanExhausted { limit });
        }
        let fhi = f(hi)?;
        if flo == 0.0 && lo > 0.0 {
            zeros.push(lo);
        } else if flo * fhi < 0.0 {
            zeros.push(find_zero(&f, lo, hi, &opts)?);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(zeros)
}

fn check_direct_range(g: &ConeGeometry) -> Result<()> {
    if g.half_angle() > DIRECT_BETA_MAX + 1e-12 {
        return Err(Error::Domain(format!(
            "beta = {} exceeds pi - 0.05; use characteristic_asymptotic",
            g.half_angle()
        )));
    }
    Ok(())
}

/// l_β located as the first zero of the Legendre function, for any N ≥ 2.
/// For N = 2 this runs the order-1/2 reduction instead of the closed form.
pub fn characteristic_value_legendre(g: &ConeGeometry) -> Result<f64> {
    check_direct_range(g)?;
    Ok(legendre_zeros(g.mu(), g.half_angle(), 1, SCAN_LIMIT)?[0])
}

/// l_β = min Σ_β.
///
/// N = 2 uses π/(2β). N ≥ 3 uses the Legendre root; for N = 4 the root is
/// checked against (π − β)/β and a disagreement above 1e−6 is an error.
pub fn characteristic_value(g: &ConeGeometry) -> Result<f64> {
    let beta = g.half_angle();
    if g.dim() == 2 {
        return Ok(PI / (2.0 * beta));
    }
    let l = characteristic_value_legendre(g)?;
    if g.dim() == 4 {
        let closed = (PI - beta) / beta;
        if (l - closed).abs() > N4_SELF_CHECK {
            return Err(Error::SelfCheck(format!(
                "N = 4 Legendre root {l} disagrees with (pi - beta)/beta = {closed}"
            )));
        }
    }
    Ok(l)
}

/// l_β together with the method used: the closed form for N = 2, the
/// Legendre root up to β = π − 0.05 and the β → π asymptotic beyond.
pub fn characteristic_value_auto(g: &ConeGeometry) -> Result<(f64, CharMethod)> {
    if g.dim() == 2 {
        Ok((characteristic_value(g)?, CharMethod::ClosedForm))
    } else if g.half_angle() <= DIRECT_BETA_MAX + 1e-12 {
        Ok((characteristic_value(g)?, CharMethod::LegendreRoot))
    } else {
        Ok((characteristic_asymptotic(g)?, CharMethod::Asymptotic))
    }
}

/// The first `count` elements of Σ_β in increasing order. For N ≥ 3 only
/// the axisymmetric family (zeros of the single Legendre function) is
/// produced.
pub fn sigma_beta(g: &ConeGeometry, count: usize) -> Result<Vec<AngularMode>> {
    if count > SIGMA_MAX_COUNT {
        return Err(Error::Parameter(format!(
            "at most {SIGMA_MAX_COUNT} angular modes, requested {count}"
        )));
    }
    let beta = g.half_angle();
    let ls: Vec<f64> = if g.dim() == 2 {
        (1..=count).map(|k| k as f64 * PI / (2.0 * beta)).collect()
    } else {
        check_direct_range(g)?;
        // consecutive zeros are roughly π/β apart
        let limit = SCAN_LIMIT.max(2.0 * (count as f64 + 2.0) * PI / beta);
        let mut ls = legendre_zeros(g.mu(), beta, count, limit)?;
        if g.dim() == 4 && count > 0 {
            let closed = (PI - beta) / beta;
            if (ls[0] - closed).abs() > N4_SELF_CHECK {
                return Err(Error::SelfCheck(format!(
                    "N = 4 Legendre root {} disagrees with (pi - beta)/beta = {closed}",
                    ls[0]
                )));
            }
        }
        ls.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        ls
    };
    ls.into_iter()
        .enumerate()
        .map(|(i, l)| AngularMode::new(g.dim(), l, i + 1))
        .collect()
}

/// Leading-order behaviour of l_β as β → π (N ≥ 3, β > π − 0.2).
pub fn characteristic_asymptotic(g: &ConeGeometry) -> Result<f64> {
    let n = g.dim();
    if n == 2 {
        return Err(Error::Parameter(
            "no asymptotic formula for N = 2: l_beta = pi/(2 beta) exactly".into(),
        ));
    }
    let beta = g.half_angle();
    if beta <= ASYMPTOTIC_BETA_MIN {
        return Err(Error::Domain(format!(
            "asymptotic formula needs beta > pi - 0.2, got {beta}"
        )));
    }
    let gap = PI - beta;
    if n == 3 {
        return Ok(1.0 / (2.0 * (2.0 / gap).ln()));
    }
    let nf = n as f64;
    let c = gamma(nf - 2.0)? / (gamma((nf - 1.0) / 2.0)? * gamma((nf - 3.0) / 2.0)?);
    Ok(c * (0.5 * gap).powi(n as i32 - 3))
}
