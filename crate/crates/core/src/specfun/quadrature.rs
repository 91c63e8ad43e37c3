use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::{Side, SpecfunError, I};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Cached n-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("rule cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

/// Integration path shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    Line {
        start: Complex64,
        end: Complex64,
    },
    /// Circle |z| = radius from angle `from` to angle `to`.
    Arc {
        radius: f64,
        from: f64,
        to: f64,
    },
    /// start + direction·[0, ∞).
    Ray {
        start: Complex64,
        direction: Complex64,
    },
}

/// A path together with the boundary side its integrand should use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub path: Path,
    pub side: Side,
}

impl Segment {
    pub fn line(start: Complex64, end: Complex64) -> Self {
        Self { path: Path::Line { start, end }, side: Side::Off }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn start(&self) -> Complex64 {
        match self.path {
            Path::Line { start, .. } | Path::Ray { start, .. } => start,
            Path::Arc { radius, from, .. } => radius * (I * from).exp(),
        }
    }

    fn validate(&self) -> Result<(), SpecfunError> {
        let bad = match self.path {
            Path::Line { start, end } => start == end,
            Path::Arc { radius, from, to } => radius <= 0.0 || from == to,
            Path::Ray { direction, .. } => direction.norm() == 0.0,
        };
        if bad {
            let end = match self.path {
                Path::Line { end, .. } => end,
                Path::Arc { radius, to, .. } => radius * (I * to).exp(),
                Path::Ray { start, direction } => start + direction,
            };
            return Err(SpecfunError::DegeneratePath(self.start(), end));
        }
        Ok(())
    }

    /// Point and Jacobian ds/dx for x in (-1, 1), after s = mid + half·sin(πx/2).
    fn map(&self, x: f64) -> (Complex64, Complex64) {
        let sigma = (FRAC_PI_2 * x).sin();
        let dsigma = FRAC_PI_2 * (FRAC_PI_2 * x).cos();
        match self.path {
            Path::Line { start, end } => {
                let mid = (start + end) * 0.5;
                let half = (end - start) * 0.5;
                (mid + half * sigma, half * dsigma)
            }
            Path::Arc { radius, from, to } => {
                let mid = 0.5 * (from + to);
                let half = 0.5 * (to - from);
                let s = radius * (I * (mid + half * sigma)).exp();
                (s, I * s * half * dsigma)
            }
            Path::Ray { start, direction } => {
                // u = (1+σ)/2 ∈ (0,1), s = start + direction·u/(1-u)
                let one_minus_sigma = 2.0 * (PI * (1.0 - x) / 4.0).sin().powi(2);
                let one_minus_u = 0.5 * one_minus_sigma;
                let u = 1.0 - one_minus_u;
                let s = start + direction * (u / one_minus_u);
                let du = 0.5 * dsigma;
                (s, direction * (du / (one_minus_u * one_minus_u)))
            }
        }
    }
}

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-11, max_nodes: 4096 }
    }
}

/// Integral value with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub nodes: usize,
}

fn apply_rule<F>(f: &F, seg: &Segment, n: usize) -> Result<(Complex64, f64), SpecfunError>
where
    F: Fn(Complex64) -> Complex64,
{
    let rule = gauss_legendre(n);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (s, ds) = seg.map(x);
        let term = f(s) * ds * w;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(SpecfunError::NonFinite(s));
        }
        sum += term;
        magnitude += term.norm();
    }
    Ok((sum, magnitude))
}

/// Integrate f along the segment with node doubling from `nodes` (at least 8).
///
/// The sine substitution clusters nodes at both ends, which restores fast
/// convergence for inverse square-root endpoint behaviour.
pub fn contour_integrate<F>(f: F, seg: &Segment, nodes: usize, opts: QuadOptions) -> Result<Quadrature, SpecfunError>
where
    F: Fn(Complex64) -> Complex64,
{
    seg.validate()?;
    let mut n = nodes.max(8);
    let (mut prev, _) = apply_rule(&f, seg, n)?;
    let mut estimate = f64::INFINITY;
    while 2 * n <= opts.max_nodes {
        n *= 2;
        let (cur, magnitude) = apply_rule(&f, seg, n)?;
        estimate = (cur - prev).norm();
        let scale = cur.norm().max(1e-3 * magnitude);
        if estimate <= opts.rel_tol * scale || estimate <= 1e-15 * magnitude {
            return Ok(Quadrature { value: cur, error: estimate / scale.max(f64::MIN_POSITIVE), nodes: n });
        }
        prev = cur;
    }
    Err(SpecfunError::NoConvergence { estimate, nodes: n })
}
