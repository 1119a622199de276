//! Bracketed scalar root finding: bisection until the bracket is narrow,
//! then Newton (when a derivative is supplied) or Illinois false position,
//! with every step kept inside the current bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Root of `f` in `[lo, hi]`; requires `f(lo)·f(hi) < 0` (or an exact zero
/// at an endpoint).
pub fn find_zero<F>(mut f: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    solve(|x| Ok((f(x)?, None)), lo, hi, opts)
}

/// As [`find_zero`], polishing with Newton steps from the supplied
/// `(f, f')` pair.
pub fn find_zero_newton<F>(mut fdf: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    solve(
        |x| {
            let (v, d) = fdf(x)?;
            Ok((v, Some(d)))
        },
        lo,
        hi,
        opts,
    )
}

fn solve<F>(mut eval: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, Option<f64>)>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut fa, da) = eval(a)?;
    let (mut fb, db) = eval(b)?;
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Domain(format!(
            "find_zero: non-finite value at bracket end ({fa}, {fb})"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }

    // most recent evaluation, used for Newton steps
    let (mut xl, mut fl, mut dl) = if fa.abs() < fb.abs() {
        (a, fa, da)
    } else {
        (b, fb, db)
    };
    // Illinois bookkeeping: which side was kept last time
    let mut stale_side = 0i8;
    let safety = 1e-2 * (1.0 + a.abs().max(b.abs()));

    for _ in 0..opts.max_iter {
        let width = b - a;
        if width <= opts.abs_tol {
            return Ok(0.5 * (a + b));
        }
        let mid = 0.5 * (a + b);
        let candidate = if width > safety {
            mid
        } else {
            let step = match dl {
                Some(d) if d != 0.0 && d.is_finite() => xl - fl / d,
                _ => (a * fb - b * fa) / (fb - fa),
            };
            if step.is_finite() && step > a && step < b {
                step
            } else {
                mid
            }
        };

        let (fc, dc) = eval(candidate)?;
        if !fc.is_finite() {
            return Err(Error::Domain(format!(
                "find_zero: non-finite value at x = {candidate}"
            )));
        }
        let moved = (candidate - xl).abs();
        xl = candidate;
        fl = fc;
        dl = dc;
        if fc == 0.0 {
            return Ok(candidate);
        }
        if fc.signum() == fa.signum() {
            a = candidate;
            fa = fc;
            if stale_side == 1 && dl.is_none() {
                fb *= 0.5;
            }
            stale_side = 1;
        } else {
            b = candidate;
            fb = fc;
            if stale_side == -1 && dl.is_none() {
                fa *= 0.5;
            }
            stale_side = -1;
        }
        if width <= safety && moved <= opts.abs_tol {
            return Ok(candidate);
        }
    }
    Err(Error::MaxIterations { last: xl })
}
