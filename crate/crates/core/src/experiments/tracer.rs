use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{linear_fit, ExperimentError, ExperimentReport, Verdict};
use crate::asymptotics::AsymptoticCache;
use crate::exactsolver::{solve_grid, solve_pointwise_with, SolverOptions};
use crate::field::FieldGrid;
use crate::scattering::{add_tracer, galilean_boost, generate, CondensateSpec};
use crate::specfun::Side;

/// The tracer peak must exceed the condensate maximum 2a by this factor.
pub const PROMINENCE_FACTOR: f64 = 1.2;

/// Slope margin for a stationary tracer: 10% of the speed at |Re λ| = 0.5.
pub const ZERO_VELOCITY_MARGIN: f64 = 0.2;

const RELATIVE_SLOPE_TOLERANCE: f64 = 0.1;
const GOLDEN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TracerSetup {
    #[serde(with = "crate::numfmt::complex_pair")]
    pub lambda: Complex64,
    pub amplitude: f64,
    /// Galilean boost applied to the whole configuration.
    #[serde(default)]
    pub boost: f64,
}

fn golden_maximum(
    mut lo: f64,
    mut hi: f64,
    mut f: impl FnMut(f64) -> Result<f64, ExperimentError>,
) -> Result<(f64, f64), ExperimentError> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut left = hi - ratio * (hi - lo);
    let mut right = lo + ratio * (hi - lo);
    let mut f_left = f(left)?;
    let mut f_right = f(right)?;
    while hi - lo > GOLDEN_TOLERANCE {
        if f_left >= f_right {
            hi = right;
            right = left;
            f_right = f_left;
            left = hi - ratio * (hi - lo);
            f_left = f(left)?;
        } else {
            lo = left;
            left = right;
            f_left = f_right;
            right = lo + ratio * (hi - lo);
            f_right = f(right)?;
        }
    }
    Ok(if f_left >= f_right { (left, f_left) } else { (right, f_right) })
}

/// Track the tracer peak over `grid.t_values` and fit x_peak(t) by a line.
pub fn tracer_velocity(
    spec: &CondensateSpec,
    setup: &TracerSetup,
    grid: &FieldGrid,
    workers: usize,
) -> Result<ExperimentReport, ExperimentError> {
    grid.validate()?;
    if setup.lambda.im < 1.5 * spec.b {
        return Err(ExperimentError::Invalid {
            field: "lambdaO",
            reason: format!("imaginary part must be at least 1.5 b = {}", 1.5 * spec.b),
        });
    }
    if grid.t_values.len() < 2 {
        return Err(ExperimentError::Invalid {
            field: "grid.tValues",
            reason: "need at least two times to fit a slope".into(),
        });
    }
    let cache = AsymptoticCache::new(spec)?;
    let g = cache.g_function(setup.lambda, Side::Off)?;
    let base = add_tracer(&generate(spec, 0.0)?, setup.lambda, setup.amplitude, g)?;
    let data = galilean_boost(&base, setup.boost);
    let tracer = data.tracer.map(|t| t.lambda).unwrap_or(setup.lambda);
    let options = SolverOptions::default();
    let required = PROMINENCE_FACTOR * 2.0 * spec.a;

    let mut report = ExperimentReport::new("tracer", &["t", "x_peak", "abs_peak", "fit_residual"]);
    report.parameter("a", spec.a);
    report.parameter("b", spec.b);
    report.parameter("N", spec.n);
    report.parameter("lambda_re", setup.lambda.re);
    report.parameter("lambda_im", setup.lambda.im);
    report.parameter("amplitude", setup.amplitude);
    report.parameter("boost", setup.boost);
    report.parameter("grid", grid);

    let xs = grid.x_values();
    let step = xs[1] - xs[0];
    let mut peaks = Vec::with_capacity(grid.t_values.len());
    for &t in &grid.t_values {
        let slice = FieldGrid { t_values: vec![t], ..grid.clone() };
        let mut best = (0, f64::NEG_INFINITY);
        for (i, outcome) in solve_grid(&data, &slice, &options, workers).into_iter().enumerate() {
            let value = outcome.map_err(|f| f.error)?.psi.norm();
            if value > best.1 {
                best = (i, value);
            }
        }
        let centre = xs[best.0];
        let lo = (centre - step).max(grid.x_min);
        let hi = (centre + step).min(grid.x_max);
        let (x_peak, peak) = golden_maximum(lo, hi, |x| Ok(solve_pointwise_with(&data, x, t, &options)?.psi.norm()))?;
        if peak < required {
            return Err(ExperimentError::PeakAmbiguity { t, peak, required });
        }
        peaks.push((t, x_peak, peak));
    }

    let ts: Vec<f64> = peaks.iter().map(|p| p.0).collect();
    let positions: Vec<f64> = peaks.iter().map(|p| p.1).collect();
    let (slope, intercept) = linear_fit(&ts, &positions);
    let mut sum_sq = 0.0;
    for &(t, x, peak) in &peaks {
        let residual = x - (slope * t + intercept);
        sum_sq += residual * residual;
        report.push_row(vec![t.into(), x.into(), peak.into(), residual.into()]);
    }
    let rms = (sum_sq / peaks.len() as f64).sqrt();
    report.parameter("slope", slope);
    report.parameter("intercept", intercept);
    report.parameter("residual_rms", rms);

    let expected = -4.0 * tracer.re + 0.0;
    let tolerance = if expected == 0.0 { ZERO_VELOCITY_MARGIN } else { RELATIVE_SLOPE_TOLERANCE * expected.abs() };
    report.verdict(Verdict::new("tracer slope vs -4 Re(lambda)", slope, expected, tolerance));
    Ok(report)
}
