use super::SeriesControl;
use crate::error::{Error, Result};

/// Gauss hypergeometric series ₂F₁(a, b; c; z) for 0 ≤ z ≤ `ctrl.max_z`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    if c <= 0.0 && c == c.round() {
        return Err(Error::Parameter(format!(
            "hyp2f1: c = {c} is a nonpositive integer"
        )));
    }
    if !(0.0..=ctrl.max_z).contains(&z) {
        return Err(Error::Domain(format!(
            "hyp2f1: z = {z} outside [0, {}]",
            ctrl.max_z
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }

    // Past this index the term ratio is monotone and below 1 in modulus.
    let settle = a.abs().max(b.abs()).max(c.abs()) + 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // geometric bound on the remaining tail
        let r = ratio.abs().max(z);
        let tail = if r < 1.0 {
            term.abs() * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        if kf > settle && tail <= ctrl.rel_tol * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        function: "hyp2f1",
        terms: ctrl.max_terms,
    })
}
