use super::{gamma, hyp2f1, SeriesControl};
use crate::error::{Error, Result};

/// Term budget for the hypergeometric representation; near x = −1 the
/// series argument approaches 1 and needs tens of thousands of terms.
pub const LEGENDRE_MAX_TERMS: usize = 200_000;

/// Largest series argument (1 − x)/2 accepted on the Legendre path. Covers
/// cos β for β ≤ π − 0.05.
pub const LEGENDRE_MAX_Z: f64 = 0.9995;

/// Degrees above this are reached by upward recurrence from two seeds.
const DIRECT_DEGREE_MAX: f64 = 2.5;

fn direct(order: f64, degree: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    let c = 1.0 - order;
    if c <= 0.0 && c == c.round() {
        return Err(Error::Parameter(format!(
            "legendre_p: 1 - order = {c} is a nonpositive integer"
        )));
    }
    let pre = ((1.0 + x) / (1.0 - x)).powf(0.5 * order) / gamma(c)?;
    let f = hyp2f1(-degree, degree + 1.0, c, 0.5 * (1.0 - x), ctrl)?;
    Ok(pre * f)
}

/// Ferrers function of the first kind P^order_degree(x) on −1 < x < 1.
pub fn legendre_p_with(order: f64, degree: f64, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "legendre_p: x = {x} outside (-1, 1)"
        )));
    }
    if !order.is_finite() || !degree.is_finite() {
        return Err(Error::Parameter(
            "legendre_p: non-finite order or degree".into(),
        ));
    }
    // P_d = P_{−d−1}
    let degree = if degree < -0.5 { -degree - 1.0 } else { degree };
    if degree <= DIRECT_DEGREE_MAX {
        return direct(order, degree, x, ctrl);
    }

    // seeds at d0 ∈ [1.5, 2.5) and d0 − 1, then
    // (d − m + 1) P_{d+1} = (2d + 1) x P_d − (d + m) P_{d−1}
    let steps = (degree - 1.5).floor();
    let d0 = degree - steps;
    let mut prev = direct(order, d0 - 1.0, x, ctrl)?;
    let mut cur = direct(order, d0, x, ctrl)?;
    let mut d = d0;
    for _ in 0..steps as usize {
        let denom = d - order + 1.0;
        if denom == 0.0 {
            return Err(Error::Parameter(format!(
                "legendre_p: recurrence breaks down at degree {d} for order {order}"
            )));
        }
        let next = ((2.0 * d + 1.0) * x * cur - (d + order) * prev) / denom;
        prev = cur;
        cur = next;
        d += 1.0;
    }
    Ok(cur)
}

/// Ferrers function of the first kind with the extended term budget.
pub fn legendre_p(order: f64, degree: f64, x: f64) -> Result<f64> {
    legendre_p_with(
        order,
        degree,
        x,
        &SeriesControl::default()
            .with_max_terms(LEGENDRE_MAX_TERMS)
            .with_max_z(LEGENDRE_MAX_Z),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_cases() {
        assert!(legendre_p(0.0, 1.0, 0.0).unwrap().abs() < 1e-15);
        for &x in &[-0.7, -0.1, 0.3, 0.9] {
            let p2 = legendre_p(0.0, 2.0, x).unwrap();
            assert!((p2 - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-14);
            let p5 = legendre_p(0.0, 5.0, x).unwrap();
            let exact = (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0;
            assert!((p5 - exact).abs() < 1e-13, "P5({x})");
        }
    }

    #[test]
    fn half_order_trig_form() {
        // P^{1/2}_ν(cos θ) = √(2/(π sin θ)) cos((ν + 1/2) θ)
        for &theta in &[0.4, 1.1, 2.0, 2.9] {
            for &nu in &[0.2, 1.7, 3.3, 7.9, 15.25] {
                let v = legendre_p(0.5, nu, f64::cos(theta)).unwrap();
                let exact = (2.0 / (PI * f64::sin(theta))).sqrt() * ((nu + 0.5) * theta).cos();
                assert!(
                    (v - exact).abs() < 1e-11,
                    "theta={theta} nu={nu}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn minus_half_order_trig_form() {
        // P^{−1/2}_ν(cos θ) = √(2/(π sin θ)) sin((ν + 1/2) θ) / (ν + 1/2)
        for &theta in &[0.4, 1.1, 2.0, 2.9] {
            for &nu in &[0.2, 1.7, 3.3, 9.1] {
                let v = legendre_p(-0.5, nu, f64::cos(theta)).unwrap();
                let exact =
                    (2.0 / (PI * f64::sin(theta))).sqrt() * ((nu + 0.5) * theta).sin() / (nu + 0.5);
                assert!((v - exact).abs() < 1e-11, "theta={theta} nu={nu}");
            }
        }
    }

    #[test]
    fn vanishes_at_origin_for_first_characteristic_degree() {
        for &mu in &[-0.5, 0.0, 0.5, 1.0] {
            let v = legendre_p(-mu, 1.0 + mu, 0.0).unwrap();
            assert!(v.abs() < 1e-14, "mu = {mu}: {v}");
        }
    }

    #[test]
    fn zero_when_cosine_vanishes() {
        // order 1/2, degree l − 1/2 at cos β vanishes iff cos(lβ) = 0
        let beta = 0.75 * PI;
        let l = PI / (2.0 * beta);
        assert!(legendre_p(0.5, l - 0.5, beta.cos()).unwrap().abs() < 1e-13);
    }

    #[test]
    fn near_minus_one_needs_wide_budget() {
        let x = (PI - 0.3).cos();
        let narrow = legendre_p_with(0.0, 0.3, x, &SeriesControl::default());
        assert!(matches!(narrow, Err(Error::NonConvergence { .. })));
        assert!(legendre_p(0.0, 0.3, x).is_ok());
        // β = π − 0.05 is inside the extended cap, β = π − 0.02 is not
        assert!(legendre_p(0.0, 0.3, (PI - 0.05).cos()).is_ok());
        assert!(matches!(
            legendre_p(0.0, 0.3, (PI - 0.02).cos()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rejects_endpoints() {
        assert!(legendre_p(0.0, 1.0, 1.0).is_err());
        assert!(legendre_p(0.0, 1.0, -1.0).is_err());
    }
}
