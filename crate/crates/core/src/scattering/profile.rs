//! Real-coefficient polynomial profiles used for the eigenvalue density and
//! the norming-constant sampler.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ScatteringError;

/// Shape of a profile: a constant or a polynomial in (Re z - offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Uniform,
    Constant,
    Polynomial,
}

/// Density ρ on the upper segment. `Uniform` ignores the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub kind: ProfileKind,
    #[serde(default)]
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl DensitySpec {
    pub fn uniform() -> Self {
        Self { kind: ProfileKind::Uniform, coeffs: Vec::new(), offset: 0.0 }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { kind: ProfileKind::Polynomial, coeffs, offset: 0.0 }
    }
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Norming-constant sampler h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub kind: ProfileKind,
    #[serde(default)]
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl SamplerSpec {
    pub fn constant(value: f64) -> Self {
        Self { kind: ProfileKind::Constant, coeffs: vec![value], offset: 0.0 }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { kind: ProfileKind::Polynomial, coeffs, offset: 0.0 }
    }
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self::constant(1.0)
    }
}

/// Polynomial Σ c_k ξ^k in ξ = z - i·height - offset, continued to the
/// lower half plane by Schwarz reflection.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly {
    coeffs: Vec<f64>,
    offset: f64,
    height: f64,
}

impl Poly {
    fn local(&self, z: Complex64) -> (Complex64, bool) {
        let reflect = z.im < 0.0;
        let z = if reflect { z.conj() } else { z };
        (z - Complex64::new(self.offset, self.height), reflect)
    }

    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        let (xi, reflect) = self.local(z);
        let v = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * xi + c);
        if reflect {
            v.conj()
        } else {
            v
        }
    }

    pub(crate) fn derivative(&self, z: Complex64) -> Complex64 {
        let (xi, reflect) = self.local(z);
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * xi + c * k as f64);
        if reflect {
            v.conj()
        } else {
            v
        }
    }

    pub(crate) fn eval_real(&self, t: f64) -> f64 {
        let xi = t - self.offset;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * xi + c)
    }

    /// ∫ from `lo` to t of the polynomial on the segment.
    fn antiderivative(&self, lo: f64, t: f64) -> f64 {
        let f = |x: f64| {
            let xi = x - self.offset;
            self.coeffs.iter().enumerate().rev().fold(0.0, |acc, (k, &c)| acc * xi + c / (k + 1) as f64) * xi
        };
        f(t) - f(lo)
    }
}

fn coefficients(kind: ProfileKind, coeffs: &[f64], field: &'static str) -> Result<Vec<f64>, ScatteringError> {
    let out = match kind {
        ProfileKind::Uniform => vec![1.0],
        ProfileKind::Constant => match coeffs {
            [v] => vec![*v],
            _ => return Err(ScatteringError::invalid(field, "constant profile takes exactly one coefficient")),
        },
        ProfileKind::Polynomial => {
            if coeffs.is_empty() {
                return Err(ScatteringError::invalid(field, "polynomial profile needs coefficients"));
            }
            coeffs.to_vec()
        }
    };
    if out.iter().any(|c| !c.is_finite()) {
        return Err(ScatteringError::invalid(field, "coefficients must be finite"));
    }
    Ok(out)
}

const POSITIVITY_SAMPLES: usize = 2000;

/// Normalized density on [-a, a] at height b.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    poly: Poly,
    a: f64,
}

impl Density {
    pub fn new(spec: &DensitySpec, a: f64, b: f64) -> Result<Self, ScatteringError> {
        if spec.kind == ProfileKind::Constant {
            return Err(ScatteringError::invalid("density", "use kind \"uniform\" for a constant density"));
        }
        let coeffs = coefficients(spec.kind, &spec.coeffs, "density")?;
        let offset = if spec.kind == ProfileKind::Uniform { 0.0 } else { spec.offset };
        let raw = Poly { coeffs, offset, height: b };
        let mass = raw.antiderivative(-a, a);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ScatteringError::invalid("density", "total mass must be positive"));
        }
        let poly = Poly { coeffs: raw.coeffs.iter().map(|c| c / mass).collect(), ..raw };
        let density = Self { poly, a };
        for i in 1..POSITIVITY_SAMPLES {
            let t = -a + 2.0 * a * i as f64 / POSITIVITY_SAMPLES as f64;
            if density.poly.eval_real(t) <= 0.0 {
                return Err(ScatteringError::invalid("density", "must be positive on the open segment"));
            }
        }
        Ok(density)
    }

    /// ρ at a complex point (analytic continuation of the segment profile).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.poly.eval(z)
    }

    /// ρ(t + ib) for real t.
    pub fn on_segment(&self, t: f64) -> f64 {
        self.poly.eval_real(t)
    }

    /// ∫_{-a}^{t} ρ(s + ib) ds.
    pub fn cdf(&self, t: f64) -> f64 {
        self.poly.antiderivative(-self.a, t)
    }

    /// Solve cdf(t) = level by bisection to 1e-3 and Newton to 1e-13.
    pub fn quantile(&self, level: f64) -> Result<f64, ScatteringError> {
        let (mut lo, mut hi) = (-self.a, self.a);
        while hi - lo > 1e-3 * self.a {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..60 {
            let step = (self.cdf(t) - level) / self.on_segment(t);
            let next = (t - step).clamp(lo, hi);
            let moved = (next - t).abs();
            t = next;
            if moved <= 1e-13 * self.a.max(1.0) {
                return Ok(t);
            }
        }
        Err(ScatteringError::RootFinding { level })
    }
}

/// Norming-constant sampler h.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    poly: Poly,
    scale: f64,
}

impl Sampler {
    pub fn new(spec: &SamplerSpec, b: f64) -> Result<Self, ScatteringError> {
        if spec.kind == ProfileKind::Uniform {
            return Err(ScatteringError::invalid("sampler", "use kind \"constant\" for a constant sampler"));
        }
        let coeffs = coefficients(spec.kind, &spec.coeffs, "sampler")?;
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return Err(ScatteringError::invalid("sampler", "must not vanish identically"));
        }
        Ok(Self { poly: Poly { coeffs, offset: spec.offset, height: b }, scale })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.poly.eval(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.poly.derivative(z)
    }

    /// Treat |h| below this as a zero of the sampler.
    pub(crate) fn vanishes(&self, value: Complex64) -> bool {
        value.norm() <= 1e-13 * self.scale
    }
}
