//! Bessel functions of the first and second kind for real order ν ≥ 0 and
//! real argument x > 0.
//!
//! J and Y are produced together. For moderate x the ratio J'/J comes from
//! the continued fraction CF1 and downward recurrence in the order; the
//! normalisation and Y come from Temme's series (x < 2) or Steed's complex
//! continued fraction CF2 (x ≥ 2). Both work on the reduced order
//! μ = ν − n and need no special treatment at integer ν. For large x the
//! Hankel expansion is used whenever its terms shrink below tolerance.

use std::f64::consts::PI;

use super::{gamma, ln_gamma, SeriesControl};
use crate::error::{Error, Result};

/// J_ν(x), Y_ν(x) and their x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselJY {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-30;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;
const RESCALE: f64 = 1e250;

// Taylor coefficients of 1/Γ(1+x) about 0.
const RGAMMA_TAYLOR: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
];

/// Temme's auxiliary gammas for |μ| ≤ 1/2:
/// (γ₁, γ₂, 1/Γ(1+μ), 1/Γ(1−μ)) with
/// γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ)) / 2μ and γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut pow = 1.0;
    for (k, &c) in RGAMMA_TAYLOR.iter().enumerate() {
        if k % 2 == 0 {
            even += c * pow;
        } else {
            // c_k μ^(k−1)
            odd += c * pow;
            pow *= mu * mu;
        }
    }
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel order must be >= 0, got {nu}"
        )));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument must be > 0, got {x}"
        )));
    }
    Ok(())
}

/// Hankel asymptotic expansion, returning (J, Y) or `None` when the terms do
/// not fall below tolerance before they start to grow.
fn hankel(nu: f64, x: f64, ctrl: &SeriesControl) -> Option<(f64, f64)> {
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut converged = false;
    for k in 1..=40usize {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu4 - odd * odd) / (8.0 * kf * x);
        if next.abs() > term.abs() && k > 1 {
            break;
        }
        term = next;
        // signs: P = a0 − a2 + a4 − …, Q = a1 − a3 + …
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() <= ctrl.rel_tol * (p.abs() + q.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    Some((amp * (p * c - q * s), amp * (p * s + q * c)))
}

fn steed_temme(nu: f64, x: f64) -> Result<BesselJY> {
    let nl = if x < XMIN {
        (nu + 0.5).floor() as usize
    } else {
        (nu - x + 1.5).floor().max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν/J_ν by modified Lentz.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            function: "bessel CF1",
            terms: MAXIT,
        });
    }

    // Downward recurrence from ν to μ on an unnormalised solution.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > RESCALE {
            rjl /= RESCALE;
            rjpl /= RESCALE;
            rjl1 /= RESCALE;
            rjp1 /= RESCALE;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, rymu, ry1_init);
    if x < XMIN {
        // Temme's series for Y_μ and Y_{μ+1}.
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let dl = -x2.ln();
        let e = xmu * dl;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * dl);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut cc = 1.0;
        let dd = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * (ff + r * q);
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence {
                function: "bessel Temme series",
                terms: MAXIT,
            });
        }
        let ymu = -sum;
        let y1 = -sum1 * xi2;
        let ymup = xmu * xi * ymu - y1;
        rjmu = w / (ymup - f * ymu);
        rymu = ymu;
        ry1_init = y1;
    } else {
        // CF2: p + iq = (H'_μ/H_μ) by Steed's algorithm.
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fct = a * xi / (p * p + q * q);
        let mut cr = br + q * fct;
        let mut ci = bi + p * fct;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence {
                function: "bessel CF2",
                terms: MAXIT,
            });
        }
        let gam = (p - f) / q;
        let mut jmu = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            jmu = -jmu;
        }
        let ymu = jmu * gam;
        let ymup = ymu * (p + q / gam);
        rjmu = jmu;
        rymu = ymu;
        ry1_init = xmu * xi * ymu - ymup;
    }

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;

    // Upward recurrence for Y from μ to ν.
    let mut ymu = rymu;
    let mut y1 = ry1_init;
    for i in 1..=nl {
        let ytemp = (xmu + i as f64) * xi2 * y1 - ymu;
        ymu = y1;
        y1 = ytemp;
    }
    let y = ymu;
    let yp = nu * xi * ymu - y1;
    Ok(BesselJY { j, y, jp, yp })
}

/// J_ν and J'_ν from the ascending series. Used below [`XMIN`], where the
/// Wronskian route J = W/(Y' − fY) cancels its leading terms.
fn ascending_j(nu: f64, x: f64) -> Result<(f64, f64)> {
    let lead = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)?).exp();
    let q = -0.25 * x * x;
    let mut term = lead;
    let mut j = term;
    let mut jp = nu * term;
    for k in 1..MAXIT {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        j += term;
        jp += (nu + 2.0 * kf) * term;
        if term.abs() <= EPS * j.abs() {
            return Ok((j, jp / x));
        }
    }
    Err(Error::NonConvergence {
        function: "bessel ascending series",
        terms: MAXIT,
    })
}

/// J_ν, Y_ν, J'_ν, Y'_ν at x with explicit series control.
pub fn bessel_jy_with(nu: f64, x: f64, ctrl: &SeriesControl) -> Result<BesselJY> {
    check_args(nu, x)?;
    if x >= ctrl.asymptotic_switch {
        if let (Some((j, y)), Some((j1, y1))) = (hankel(nu, x, ctrl), hankel(nu + 1.0, x, ctrl)) {
            let t = nu / x;
            return Ok(BesselJY {
                j,
                y,
                jp: t * j - j1,
                yp: t * y - y1,
            });
        }
    }
    let mut v = steed_temme(nu, x)?;
    if x < XMIN {
        (v.j, v.jp) = ascending_j(nu, x)?;
    }
    Ok(v)
}

/// J_ν, Y_ν, J'_ν, Y'_ν at x.
pub fn bessel_jy(nu: f64, x: f64) -> Result<BesselJY> {
    bessel_jy_with(nu, x, &SeriesControl::default())
}

pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_jy(nu, x)?.j)
}

pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_jy(nu, x)?.y)
}

/// h(t) = t^(−2ν) J_ν(t)/Y_ν(t) on the small-argument side of the first zero
/// of Y_ν, extended to t = 0 by its limit −π / (4^ν Γ(ν) Γ(ν+1)).
pub fn jy_ratio_h(nu: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "jy_ratio_h requires nu > 0, got {nu}"
        )));
    }
    if t == 0.0 {
        return Ok(-PI / (4f64.powf(nu) * gamma(nu)? * gamma(nu + 1.0)?));
    }
    let ctrl = SeriesControl::default();
    if !(t > 0.0) || t >= ctrl.asymptotic_switch {
        return Err(Error::Domain(format!(
            "jy_ratio_h: t = {t} outside the small-argument regime"
        )));
    }
    let v = bessel_jy(nu, t)?;
    // Y_ν < 0 up to its first zero
    if !(v.y < 0.0) || v.y.abs() < f64::MIN_POSITIVE {
        return Err(Error::Domain(format!(
            "jy_ratio_h: Y_{nu}({t}) = {} is not on the negative branch before its first zero",
            v.y
        )));
    }
    Ok(v.j / v.y * (-2.0 * nu * t.ln()).exp())
}
