use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ExperimentReport, Verdict};
use crate::asymptotics::{AsymptoticCache, AsymptoticError};
use crate::scattering::CondensateSpec;
use crate::specfun::{ellip_k, theta3, CutFamily, Side, I};

const EDGE_POINTS: usize = 20;
const GRID_SIDE: usize = 40;

fn relative(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

/// Errors become NaN so the verdict fails instead of aborting.
fn or_nan(value: Result<f64, AsymptoticError>) -> f64 {
    value.unwrap_or(f64::NAN)
}

fn max_over(mut values: impl Iterator<Item = Result<f64, AsymptoticError>>) -> Result<f64, AsymptoticError> {
    values.try_fold(0.0_f64, |acc, v| v.map(|v| acc.max(v)))
}

fn interior_fractions() -> impl Iterator<Item = f64> {
    (1..EDGE_POINTS + 1).map(|i| i as f64 / (EDGE_POINTS + 1) as f64)
}

/// Every algebraic, elliptic and g-function identity the asymptotic
/// construction relies on, as verdicts. Evaluation failures show up as
/// failing verdicts with a NaN measurement.
pub fn identity_suite(spec: &CondensateSpec) -> ExperimentReport {
    let mut report = ExperimentReport::new("identities", &["check", "measured", "expected", "tolerance", "pass"]);
    report.parameter("a", spec.a);
    report.parameter("b", spec.b);
    let cache = match AsymptoticCache::new(spec) {
        Ok(cache) => cache,
        Err(e) => {
            report.parameter("error", e.to_string());
            report.verdict(Verdict::new("asymptotic constants available", f64::NAN, 0.0, 0.0));
            return finish(report);
        }
    };
    let (a, b, r, theta) = (cache.a(), cache.b(), cache.modulus, cache.theta);
    report.parameter("modulus", r);
    report.parameter("angle", theta);
    let tau = cache.tau;

    // Elliptic integrals and the period lattice.
    report.verdict(Verdict::new("tau purely imaginary", tau.re.abs(), 0.0, 1e-15));
    report.verdict(Verdict::holds("tau in upper half plane", tau.im > 0.0));
    let upper = cache.upper_cut_period();
    let left = cache.left_edge_period();
    report.verdict(Verdict::new(
        "upper cut integral of 1/R+ vs -K(cos)/|A| (rel)",
        or_nan(upper.clone().map(|p| relative(p, Complex64::new(-cache.kc / r, 0.0)))),
        0.0,
        1e-10,
    ));
    report.verdict(Verdict::new(
        "left edge integral of 1/R+ vs -iK(sin)/|A| (rel)",
        or_nan(left.clone().map(|q| relative(q, Complex64::new(0.0, -cache.ks / r)))),
        0.0,
        1e-10,
    ));
    let ratio = upper.and_then(|p| left.map(|q| relative(tau, q / p)));
    report.verdict(Verdict::new("tau vs period ratio (rel)", or_nan(ratio), 0.0, 1e-10));
    report.verdict(Verdict::holds("c negative", cache.c < 0.0));
    let half = theta / 2.0;
    let m = half.tan().powi(2);
    let landen = ellip_k((1.0 - m * m).sqrt())
        .and_then(|lhs| ellip_k(theta.cos()).map(|k| (lhs - 2.0 * half.cos().powi(2) * k).abs() / lhs));
    report.verdict(Verdict::new("Landen transform of K (rel)", landen.unwrap_or(f64::NAN), 0.0, 1e-12));

    // The radical.
    let radical = cache.radical;
    let a2 = cache.endpoint * cache.endpoint;
    let probes = [
        Complex64::new(0.3 * a, 0.4 * b),
        Complex64::new(1.7 * r, 0.2 * r),
        Complex64::new(-0.9 * r, 1.6 * r),
        Complex64::new(0.1 * r, -2.5 * r),
    ];
    let mut square = 0.0_f64;
    let mut schwarz = 0.0_f64;
    let mut even = 0.0_f64;
    for z in probes {
        let eval =
            |s: Complex64| radical.eval(s, CutFamily::Horizontal, Side::Off).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let value = eval(z);
        let target = (z * z - a2) * (z * z - a2.conj());
        square = square.max(relative(value * value, target));
        schwarz = schwarz.max(relative(eval(z.conj()), value.conj()));
        even = even.max(relative(eval(-z), value));
    }
    report.verdict(Verdict::new("R squared equals the quartic (rel)", square, 0.0, 1e-13));
    report.verdict(Verdict::new("R Schwarz symmetric (rel)", schwarz, 0.0, 1e-13));
    report.verdict(Verdict::new("R even (rel)", even, 0.0, 1e-13));

    // Integral table and Abel values.
    match cache.integral_table() {
        Ok([first, second, third]) => {
            report.verdict(Verdict::new("table: g-period entry", (first - 1.0).norm(), 0.0, 1e-9));
            report.verdict(Verdict::new("table: 1/tau entry", (second - 1.0 / tau).norm(), 0.0, 1e-9));
            report.verdict(Verdict::new("table: 1/(2 tau) - 1/2 entry", (third - (0.5 / tau - 0.5)).norm(), 0.0, 1e-9));
        }
        Err(_) => {
            for name in ["table: g-period entry", "table: 1/tau entry", "table: 1/(2 tau) - 1/2 entry"] {
                report.verdict(Verdict::new(name, f64::NAN, 0.0, 1e-9));
            }
        }
    }
    let abel = [
        ("Abel map at conjugate endpoint = tau/2", cache.abel_at_conjugate_endpoint(), tau / 2.0),
        ("Abel map at reflected endpoint = 1/2", cache.abel_at_reflected_endpoint(), Complex64::new(0.5, 0.0)),
        ("Abel map at infinity = (tau-1)/4", cache.abel_at_infinity(), (tau - 1.0) / 4.0),
    ];
    for (name, got, want) in abel {
        report.verdict(Verdict::new(name, or_nan(got.map(|v| (v - want).norm())), 0.0, 1e-9));
    }

    // g-function jumps and bounds.
    let g = |z, side| cache.g_function(z, side);
    let upper_jump = max_over(interior_fractions().map(|f| {
        let z = Complex64::new(-a + 2.0 * a * f, b);
        Ok((g(z, Side::Plus)? + g(z, Side::Minus)? - 1.0).norm())
    }));
    report.verdict(Verdict::new("g+ + g- = 1 on upper cut", or_nan(upper_jump), 0.0, 1e-9));
    let lower_jump = max_over(interior_fractions().map(|f| {
        let z = Complex64::new(-a + 2.0 * a * f, -b);
        Ok((g(z, Side::Plus)? + g(z, Side::Minus)? + 1.0).norm())
    }));
    report.verdict(Verdict::new("g+ + g- = -1 on lower cut", or_nan(lower_jump), 0.0, 1e-9));
    let edge_jump = max_over(interior_fractions().map(|f| {
        let z = Complex64::new(-a, -b + 2.0 * b * f);
        Ok((g(z, Side::Plus)? - g(z, Side::Minus)? + 2.0 / tau).norm())
    }));
    report.verdict(Verdict::new("g+ - g- = -2/tau on left edge", or_nan(edge_jump), 0.0, 1e-9));
    let far = Complex64::from_polar(1e6 * r, 0.7);
    report.verdict(Verdict::new(
        "g at infinity = 1/(2 tau)",
        or_nan(g(far, Side::Off).map(|v| (v - cache.g_inf).norm())),
        0.0,
        1e-5,
    ));

    let mut violations = 0usize;
    let mut evaluated = true;
    for i in 0..GRID_SIDE {
        for j in 0..GRID_SIDE {
            let x = -2.0 * r + 4.0 * r * (i as f64 + 0.5) / GRID_SIDE as f64;
            let y = 2.0 * r * (j as f64 + 0.5) / GRID_SIDE as f64;
            let z = Complex64::new(x, y);
            match g(z, Side::Off) {
                Ok(v) => {
                    let ok = if cache.in_upper_lens(z) {
                        (0.5 - 1e-12..1.0).contains(&v.re)
                    } else {
                        (-1e-12..=0.5 + 1e-12).contains(&v.re)
                    };
                    violations += usize::from(!ok);
                }
                Err(_) => evaluated = false,
            }
        }
    }
    let count = if evaluated { violations as f64 } else { f64::NAN };
    report.verdict(Verdict::new("Re g bounds violations on 40x40 grid", count, 0.0, 0.0));

    // u on the arc and inside the lens, and the reflection for u-tilde.
    let arc = max_over(interior_fractions().map(|f| {
        let z = Complex64::from_polar(r, theta + (PI - 2.0 * theta) * f);
        Ok(cache.u_function(z)?.re.abs())
    }));
    report.verdict(Verdict::new("Re u = 0 on the arc", or_nan(arc), 0.0, 1e-10));
    let inside = interior_fractions()
        .filter_map(|f| {
            let z = Complex64::new(-0.8 * a + 1.6 * a * f, b + 0.5 * (r - b));
            cache.in_upper_lens(z).then(|| cache.u_function(z).map(|u| u.re < 0.0))
        })
        .collect::<Result<Vec<bool>, _>>();
    let bad = inside.map(|flags| flags.iter().filter(|ok| !**ok).count() as f64);
    report.verdict(Verdict::new("Re u < 0 inside the lens (violations)", or_nan(bad), 0.0, 0.0));
    let reflection = max_over(
        [Complex64::new(0.2 * a, -0.3 * b), Complex64::new(1.5 * r, -0.4 * r), Complex64::new(-1.7 * r, -1.2 * r)]
            .into_iter()
            .map(|z| {
                let sign = if cache.in_rectangle(z) { 1.0 } else { -1.0 };
                Ok((cache.u_tilde_function(z)? - (sign * 2.0 / tau - cache.u_function(-z)?)).norm())
            }),
    );
    report.verdict(Verdict::new("u-tilde reflection", or_nan(reflection), 0.0, 1e-10));

    // Theta function and the two wave representations.
    let z0 = Complex64::new(0.23, 0.11);
    let quasi = theta3(z0 + tau, tau).and_then(|shifted| {
        theta3(z0, tau).map(|base| relative(shifted, base * (-I * PI * tau - 2.0 * I * PI * z0).exp()))
    });
    report.verdict(Verdict::new("theta quasi-periodicity (rel)", quasi.unwrap_or(f64::NAN), 0.0, 1e-12));
    let cross =
        max_over([(-0.7, 0.0, 50), (0.3, 0.2, 200), (1.1, -0.4, 1000)].into_iter().map(|(x, t, n)| {
            Ok((cache.psi_theta_representation(x, t, n)? - cache.psi_leading_order(x, t, n)?).norm())
        }));
    report.verdict(Verdict::new("theta form = sd form", or_nan(cross), 0.0, 1e-8));
    let imaginary = cache.phase_state(0.4, 0.1, 100).map(|p| p.delta.re.abs().max(p.zeta.re.abs()));
    report.verdict(Verdict::new("phase constants purely imaginary", or_nan(imaginary), 0.0, 1e-12));

    finish(report)
}

fn finish(mut report: ExperimentReport) -> ExperimentReport {
    let rows = report
        .verdicts
        .iter()
        .map(|v| {
            vec![
                v.check.clone().into(),
                v.measured.into(),
                v.expected.into(),
                v.tolerance.into(),
                (if v.pass { "true" } else { "false" }).into(),
            ]
        })
        .collect();
    report.rows = rows;
    report
}
