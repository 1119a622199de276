//! Real-parameter special functions.
//!
//! | Function | Description |
//! |----------|-------------|
//! | [`gamma`] | Γ(x), Lanczos with reflection |
//! | [`hyp2f1`] | Gauss series ₂F₁(a, b; c; z) for 0 ≤ z < 1 |
//! | [`bessel_jy`] | J_ν, Y_ν and their derivatives for real ν ≥ 0 |
//! | [`jy_ratio_h`] | t^(−2ν) J_ν(t)/Y_ν(t), continuous at t = 0 |
//! | [`legendre_p`] | Ferrers function P^m_d(x) of real degree and order |
//! | [`find_zero`] | bracketed root finding with Newton/secant polish |

mod bessel;
mod gamma;
mod hyp;
mod legendre;
mod roots;

pub use bessel::{bessel_j, bessel_jy, bessel_y, jy_ratio_h, BesselJY};
pub use gamma::{gamma, ln_gamma};
pub use hyp::hyp2f1;
pub use legendre::legendre_p;
pub use roots::{find_zero, find_zero_newton, RootOptions};

use crate::error::{Error, Result};

/// Truncation controls shared by the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Argument above which Bessel functions may use the Hankel expansion.
    pub asymptotic_switch: f64,
    /// Largest argument accepted by the hypergeometric series.
    pub max_z: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 500,
            asymptotic_switch: 30.0,
            max_z: 0.999,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize, asymptotic_switch: f64) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms < 50 || !(asymptotic_switch > 0.0) {
            return Err(Error::Parameter(format!(
                "series control requires rel_tol > 0, max_terms >= 50, asymptotic_switch > 0 \
                 (got {rel_tol}, {max_terms}, {asymptotic_switch})"
            )));
        }
        Ok(Self {
            rel_tol,
            max_terms,
            asymptotic_switch,
            ..Self::default()
        })
    }

    /// Same tolerances with a larger term budget, for series evaluated close
    /// to the edge of their disc of convergence.
    pub fn with_max_terms(self, max_terms: usize) -> Self {
        Self {
            max_terms: max_terms.max(50),
            ..self
        }
    }

    /// Same controls with a different cap on the hypergeometric argument.
    pub fn with_max_z(self, max_z: f64) -> Self {
        Self {
            max_z: max_z.clamp(0.0, 1.0 - 1e-6),
            ..self
        }
    }
}
