//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use conespec::asymptotics::{
    eval_g, eval_g_limits, eval_g_partials, exponent_for, rate_study, sharpness_report, BranchPoint,
};
use conespec::charval::{
    characteristic_asymptotic, characteristic_value, characteristic_value_legendre, AngularMode,
};
use conespec::geometry::{
    inclusion_constant, mc_removed_volume, ConeGeometry, PerturbedCone, Point,
};
use conespec::oracle::{polar_fd_eigen, radial_fd_eigen, FdConfig};
use conespec::spectrum::{
    cross_product_eigen, eigen, integrability_threshold, unperturbed_eigen, verify_integrability,
    Integrability,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!(
            "{what} took {:.2} s (limit {limit_s} s)",
            elapsed.as_secs_f64()
        )
    })
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn characteristic_values() -> Check {
    let (l, t) = timed(|| characteristic_value(&ConeGeometry::new(2, 0.75 * PI).unwrap()));
    let l = l.map_err(e)?;
    ensure((l - 2.0 / 3.0).abs() <= 1e-12, || format!("N=2: {l}"))?;
    within(t, 1.0, "N=2")?;
    let (l3, t) = timed(|| characteristic_value_legendre(&ConeGeometry::new(3, PI / 2.0).unwrap()));
    let l3 = l3.map_err(e)?;
    ensure((l3 - 1.0).abs() <= 1e-8, || format!("N=3: {l3}"))?;
    within(t, 1.0, "N=3")?;
    let beta = 2.0 * PI / 3.0;
    let (l4, t) = timed(|| characteristic_value_legendre(&ConeGeometry::new(4, beta).unwrap()));
    let l4 = l4.map_err(e)?;
    ensure((l4 - (PI - beta) / beta).abs() <= 1e-6, || {
        format!("N=4: {l4}")
    })?;
    within(t, 1.0, "N=4")?;
    Ok(format!("l = {l:.15}, {l3:.12}, {l4:.10}"))
}

fn half_integer_closed_forms() -> Check {
    let start = Instant::now();
    let mode = AngularMode::from_nu(2, 0.5, 0).map_err(e)?;
    let mut worst = 0.0f64;
    for eps in [0.1, 0.5] {
        for k in 1..=5 {
            let v = cross_product_eigen(&mode, eps, k).map_err(e)?.lambda;
            let exact = (k as f64 * PI / (1.0 - eps)).powi(2);
            worst = worst.max(((v - exact) / exact).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("worst relative error {worst:e}"))?;
    within(start.elapsed(), 1.0, "closed forms")?;
    Ok(format!("worst relative error {worst:.1e}"))
}

/// J₁ from its ascending series, independent of the library.
fn j1_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..200 {
        term *= q / (m as f64 * (m as f64 + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn unperturbed_first_eigenvalue() -> Check {
    let start = Instant::now();
    let (mut lo, mut hi) = (3.0, 4.2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if j1_series(lo) * j1_series(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let oracle = (0.5 * (lo + hi)).powi(2);
    let v = unperturbed_eigen(&AngularMode::new(2, 1.0, 1).map_err(e)?, 1)
        .map_err(e)?
        .lambda;
    ensure((v - oracle).abs() <= 1e-8, || {
        format!("{v} vs oracle {oracle}")
    })?;
    within(start.elapsed(), 1.0, "eigenvalue")?;
    Ok(format!("lambda = {v:.12}, oracle {oracle:.12}"))
}

fn rate_sharpness() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (dim, beta) in [(2, 0.75 * PI), (3, 0.75 * PI), (4, 2.0 * PI / 3.0)] {
        let g = ConeGeometry::new(dim, beta).map_err(e)?;
        let l = characteristic_value(&g).map_err(e)?;
        let mode = AngularMode::new(dim, l, 1).map_err(e)?;
        let s = rate_study(&g, &mode, 1, None).map_err(e)?;
        let target = exponent_for(dim, l);
        ensure((s.fit.slope - target).abs() <= 0.02, || {
            format!("N={dim}: slope {} vs {target}", s.fit.slope)
        })?;
        ensure((s.coefficient_ratio - 1.0).abs() <= 0.05, || {
            format!("N={dim}: coefficient ratio {}", s.coefficient_ratio)
        })?;
        parts.push(format!(
            "N={dim} slope {:.4}/{target:.4} coef x{:.3}",
            s.fit.slope, s.coefficient_ratio
        ));
    }
    within(start.elapsed(), 30.0, "rate studies")?;
    Ok(parts.join("; "))
}

fn implicit_function_derivatives() -> Check {
    let start = Instant::now();
    let lam1 = |nu: f64| -> Result<f64, String> {
        Ok(
            unperturbed_eigen(&AngularMode::from_nu(2, nu, 0).map_err(e)?, 1)
                .map_err(e)?
                .lambda,
        )
    };
    let mut worst = 0.0f64;
    for nu in [0.6, 1.2, 2.0] {
        let base = lam1(nu)?;
        for delta in [1e-4, 1e-3, 1e-2] {
            for shift in [0.25, 0.5, 1.0] {
                let lambda = base + shift;
                let p = BranchPoint::new(nu, delta, lambda).map_err(e)?;
                let (gl, gd) = eval_g_partials(&p).map_err(e)?;
                let g = |d: f64, l: f64| eval_g(&BranchPoint::new(nu, d, l).unwrap()).unwrap();
                let (hl, hd) = (1e-6 * lambda, 1e-6 * delta);
                let fl = (g(delta, lambda + hl) - g(delta, lambda - hl)) / (2.0 * hl);
                let fd = (g(delta + hd, lambda) - g(delta - hd, lambda)) / (2.0 * hd);
                worst = worst
                    .max(((fl - gl) / gl).abs())
                    .max(((fd - gd) / gd).abs());
            }
        }
    }
    ensure(worst <= 1e-5, || {
        format!("finite differences off by {worst:e}")
    })?;
    let mut worst_limit = 0.0f64;
    for nu in [0.5, 0.8, 1.0, 1.5, 2.3] {
        let lambda = lam1(nu)?;
        let (gl, gd) =
            eval_g_partials(&BranchPoint::new(nu, 1e-8, lambda).map_err(e)?).map_err(e)?;
        let (ll, ld) = eval_g_limits(nu, lambda).map_err(e)?;
        worst_limit = worst_limit
            .max(((gl - ll) / ll).abs())
            .max(((gd - ld) / ld).abs());
    }
    ensure(worst_limit <= 1e-2, || {
        format!("limits off by {worst_limit:e}")
    })?;
    within(start.elapsed(), 5.0, "derivative checks")?;
    Ok(format!("27-point FD {worst:.1e}, limits {worst_limit:.1e}"))
}

fn oracle_equivalence() -> Check {
    let rich = FdConfig {
        richardson: true,
        ..FdConfig::default()
    };
    let mut worst = 0.0f64;
    for (dim, beta, l) in [
        (2, PI / 2.0, 1.0),
        (3, PI / 2.0, 1.0),
        (2, 0.75 * PI, 2.0 / 3.0),
    ] {
        let g = ConeGeometry::new(dim, beta).map_err(e)?;
        let mode = AngularMode::new(dim, l, 1).map_err(e)?;
        for eps in [0.0, 0.3] {
            let s = eigen(&mode, eps, 1).map_err(e)?.lambda;
            let f = radial_fd_eigen(&g, l, eps, 1, &rich).map_err(e)?;
            worst = worst.max(((f - s) / s).abs());
        }
    }
    ensure(worst <= 1e-4, || {
        format!("radial extrapolated off by {worst:e}")
    })?;
    let desk = FdConfig {
        radial_nodes: 128,
        angular_nodes: 64,
        ..FdConfig::default()
    };
    let mut worst_polar = 0.0f64;
    for (beta, l) in [(PI / 2.0, 1.0), (0.75 * PI, 2.0 / 3.0)] {
        let mode = AngularMode::new(2, l, 1).map_err(e)?;
        for eps in [0.0, 0.3] {
            let s = eigen(&mode, eps, 1).map_err(e)?.lambda;
            let (f, t) = timed(|| polar_fd_eigen(beta, eps, &desk));
            let f = f.map_err(e)?;
            within(t, 60.0, "polar solve")?;
            worst_polar = worst_polar.max(((f - s) / s).abs());
        }
    }
    ensure(worst_polar <= 1e-2, || {
        format!("polar off by {worst_polar:e}")
    })?;
    Ok(format!("radial {worst:.1e}, polar {worst_polar:.1e}"))
}

fn geometry_sandwich() -> Check {
    let mut violations = 0;
    let mut points = 0;
    for dim in 2..=4 {
        for beta in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 0.75 * PI] {
            for eps in [0.1, 0.3] {
                let g = ConeGeometry::new(dim, beta).map_err(e)?;
                let a = inclusion_constant(beta).map_err(e)?;
                let exact = PerturbedCone::exact(g, eps).map_err(e)?;
                let lip = PerturbedCone::lipschitz(g, eps).map_err(e)?;
                let inner = PerturbedCone::exact(g, a * eps).map_err(e)?;
                let mut rng = ChaCha8Rng::seed_from_u64(
                    1000 * dim as u64 + (100.0 * beta) as u64 + (10.0 * eps) as u64,
                );
                for i in 0..10_000 {
                    let scale = if i % 2 == 0 { 1.0 } else { 1.5 * eps };
                    let x = Point::new(
                        (0..dim)
                            .map(|_| scale * rng.random_range(-1.0..1.0))
                            .collect(),
                    );
                    let (a1, b1, c1) = (
                        exact.contains(&x).map_err(e)?,
                        lip.contains(&x).map_err(e)?,
                        inner.contains(&x).map_err(e)?,
                    );
                    if (a1 && !b1) || (b1 && !c1) {
                        violations += 1;
                    }
                    points += 1;
                }
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    let mut exps = Vec::new();
    for (dim, beta) in [(2, 2.0 * PI / 3.0), (3, 0.75 * PI), (4, PI / 2.0)] {
        let g = ConeGeometry::new(dim, beta).map_err(e)?;
        let big = mc_removed_volume(&PerturbedCone::lipschitz(g, 0.2).map_err(e)?, 200_000, 1)
            .map_err(e)?;
        let small = mc_removed_volume(&PerturbedCone::lipschitz(g, 0.1).map_err(e)?, 200_000, 2)
            .map_err(e)?;
        let p = (big.estimate / small.estimate).log2();
        let sigma = ((big.std_error / big.estimate).powi(2)
            + (small.std_error / small.estimate).powi(2))
        .sqrt()
            / std::f64::consts::LN_2;
        ensure((p - dim as f64).abs() <= 3.0 * sigma, || {
            format!("N={dim}: exponent {p} ± {sigma}")
        })?;
        exps.push(format!("{p:.4}±{sigma:.4}"));
    }
    let mut worst_a = 0.0f64;
    for i in 1..=100 {
        let beta = PI * i as f64 / 101.0;
        worst_a = worst_a.max((inclusion_constant(beta).map_err(e)? - (0.5 * beta).cos()).abs());
    }
    ensure(worst_a <= 1e-14, || format!("A off by {worst_a:e}"))?;
    Ok(format!(
        "0/{points} violations; MC exponents {}; A err {worst_a:.0e}",
        exps.join(", ")
    ))
}

fn integrability_endpoint() -> Check {
    let start = Instant::now();
    let g = ConeGeometry::new(2, 0.75 * PI).map_err(e)?;
    let mode = AngularMode::new(2, 2.0 / 3.0, 1).map_err(e)?;
    let rec = unperturbed_eigen(&mode, 1).map_err(e)?;
    let four = verify_integrability(&mode, &g, 4.0, &rec).map_err(e)?;
    let six = verify_integrability(&mode, &g, 6.0, &rec).map_err(e)?;
    ensure(four.class == Integrability::Finite, || {
        format!("p=4: {four:?}")
    })?;
    ensure(six.class == Integrability::Divergent, || {
        format!("p=6: {six:?}")
    })?;
    let mut compared = 0;
    for (dim, beta) in [
        (2, 0.75 * PI),
        (3, 0.75 * PI),
        (4, 2.0 * PI / 3.0),
        (2, 0.9 * PI),
    ] {
        let g = ConeGeometry::new(dim, beta).map_err(e)?;
        let l = characteristic_value(&g).map_err(e)?;
        let mode = AngularMode::new(dim, l, 1).map_err(e)?;
        let rec = unperturbed_eigen(&mode, 1).map_err(e)?;
        let edge = integrability_threshold(&g, l).map_err(e)?;
        for p in [2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 14.0, 20.0] {
            if (p - edge).abs() < 0.5 {
                continue;
            }
            let r = verify_integrability(&mode, &g, p, &rec).map_err(e)?;
            let want = if p < edge {
                Integrability::Finite
            } else {
                Integrability::Divergent
            };
            ensure(r.class == want, || {
                format!("N={dim} beta={beta} p={p}: {:?}", r.class)
            })?;
            compared += 1;
        }
    }
    within(start.elapsed(), 10.0, "integrability")?;
    Ok(format!(
        "p=4 finite, p=6 divergent, {compared} off-edge pairs agree"
    ))
}

fn sharpness_limits() -> Check {
    let start = Instant::now();
    let gaps: Vec<f64> = (1..=10).map(|j| 10f64.powf(-0.8 * j as f64)).collect();
    let mut n2 = Vec::new();
    let mut n3 = Vec::new();
    for &d in &gaps {
        let beta = PI - d;
        let g2 = ConeGeometry::new(2, beta).map_err(e)?;
        n2.push(exponent_for(2, characteristic_value(&g2).map_err(e)?));
        let g3 = ConeGeometry::new(3, beta).map_err(e)?;
        n3.push(exponent_for(3, characteristic_asymptotic(&g3).map_err(e)?));
    }
    let monotone =
        |v: &[f64], lim: f64| v.windows(2).all(|w| w[1] < w[0]) && v.iter().all(|&x| x > lim);
    ensure(monotone(&n2, 0.5), || format!("N=2 exponents {n2:?}"))?;
    ensure(monotone(&n3, 1.0 / 3.0), || format!("N=3 exponents {n3:?}"))?;
    ensure((n2[n2.len() - 1] - 0.5).abs() < 1e-6, || {
        format!("N=2 ends at {}", n2[n2.len() - 1])
    })?;
    let r2 = sharpness_report(&ConeGeometry::new(2, 0.9 * PI).map_err(e)?).map_err(e)?;
    let r3 = sharpness_report(&ConeGeometry::new(3, 0.9 * PI).map_err(e)?).map_err(e)?;
    ensure(
        r2.beta_to_pi_limit == Some(0.5) && r3.beta_to_pi_limit == Some(1.0 / 3.0),
        || "report limits".into(),
    )?;
    within(start.elapsed(), 5.0, "limits")?;
    Ok(format!(
        "N=2 {:.6} -> {:.6}, N=3 {:.4} -> {:.4}",
        n2[0],
        n2[n2.len() - 1],
        n3[0],
        n3[n3.len() - 1]
    ))
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_conespec");
    let runs: [&[&str]; 3] = [
        &[
            "volume", "--dim", "3", "--beta", "0.75pi", "--eps", "0.2", "--seed", "17",
        ],
        &["rate", "--dim", "2", "--beta", "0.75pi", "--seed", "17"],
        &[
            "eigen", "--dim", "3", "--beta", "2pi/3", "--eps", "0.1", "--count", "4", "--format",
            "csv",
        ],
    ];
    for args in runs {
        let once = || {
            Command::new(bin)
                .args(args)
                .env_remove("CONESPEC_FORMAT")
                .output()
                .map_err(e)
        };
        let (a, b) = (once()?, once()?);
        ensure(a.status.success(), || format!("{args:?} failed"))?;
        ensure(a.stdout == b.stdout, || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} commands byte-identical over two runs",
        runs.len()
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("characteristic values", characteristic_values),
        ("half-integer closed forms", half_integer_closed_forms),
        ("unperturbed first eigenvalue", unperturbed_first_eigenvalue),
        ("rate sharpness", rate_sharpness),
        (
            "implicit-function derivatives",
            implicit_function_derivatives,
        ),
        ("oracle equivalence", oracle_equivalence),
        ("geometry sandwich", geometry_sandwich),
        ("integrability endpoint", integrability_endpoint),
        ("sharpness limits", sharpness_limits),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (res, t) = timed(check);
        match res {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{:.2} s]",
                i + 1,
                t.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {why} [{:.2} s]",
                    i + 1,
                    t.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
