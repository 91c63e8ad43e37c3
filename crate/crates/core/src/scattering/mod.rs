//! Condensate scattering data: eigenvalue sampling, norming constants,
//! time evolution, Galilean boosts and tracer injection.

mod profile;

pub use profile::{Density, DensitySpec, ProfileKind, Sampler, SamplerSpec};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::{self, complex_list, complex_pair};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("eigenvalue placement did not converge at level {level}")]
    RootFinding { level: f64 },
    #[error("sampler vanishes at {0}")]
    SamplerVanishes(Complex64),
    #[error("tracer at {lambda} is {distance:.3e} from the segment, margin is {margin:.3e}")]
    TracerPlacement { lambda: Complex64, distance: f64, margin: f64 },
    #[error("malformed scattering data: {0}")]
    Malformed(String),
}

impl ScatteringError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Self::Invalid { field, reason: reason.into() }
    }

    /// Config key the error refers to.
    pub fn field(&self) -> &'static str {
        match self {
            Self::Invalid { field, .. } => field,
            Self::RootFinding { .. } | Self::SamplerVanishes(_) => "density",
            Self::TracerPlacement { .. } => "lambdaO",
            Self::Malformed(_) => "data",
        }
    }
}

/// Generative recipe for a condensate: endpoint A = a + ib, N, ρ and h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensateSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub density: DensitySpec,
    pub sampler: SamplerSpec,
}

impl CondensateSpec {
    /// Uniform density and h ≡ 1.
    pub fn uniform(a: f64, b: f64, n: usize) -> Self {
        Self { a, b, n, density: DensitySpec::uniform(), sampler: SamplerSpec::constant(1.0) }
    }

    /// Endpoint given by modulus and angle.
    pub fn from_polar(modulus: f64, angle: f64, n: usize) -> Self {
        Self::uniform(modulus * angle.cos(), modulus * angle.sin(), n)
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn endpoint(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    pub fn validate(&self) -> Result<(), ScatteringError> {
        for (field, v) in [("a", self.a), ("b", self.b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ScatteringError::invalid(field, "must be a positive number"));
            }
        }
        Ok(())
    }

    pub fn density(&self) -> Result<Density, ScatteringError> {
        self.validate()?;
        Density::new(&self.density, self.a, self.b)
    }

    pub fn sampler(&self) -> Result<Sampler, ScatteringError> {
        self.validate()?;
        Sampler::new(&self.sampler, self.b)
    }
}

/// The extra eigenvalue and its norming constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tracer {
    #[serde(with = "complex_pair")]
    pub lambda: Complex64,
    #[serde(with = "complex_pair")]
    pub norming: Complex64,
}

/// Reflectionless data in the upper half plane; conjugate poles are implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringData {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "complex_list")]
    pub eigenvalues: Vec<Complex64>,
    #[serde(with = "complex_list")]
    pub norming: Vec<Complex64>,
    pub tracer: Option<Tracer>,
    pub time: f64,
}

impl ScatteringData {
    /// All poles (condensate first, tracer last) with their norming constants.
    pub fn poles(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .zip(self.norming.iter().copied())
            .chain(self.tracer.iter().map(|t| (t.lambda, t.norming)))
    }

    pub fn pole_count(&self) -> usize {
        self.eigenvalues.len() + usize::from(self.tracer.is_some())
    }

    /// Lower-half-plane poles λ̄ with residue constants -c̄.
    pub fn conjugate_poles(&self) -> Vec<(Complex64, Complex64)> {
        self.poles().map(|(l, c)| (l.conj(), -c.conj())).collect()
    }

    /// Rebuild upper-half data from the conjugate poles.
    pub fn from_conjugate_poles(&self, lower: &[(Complex64, Complex64)]) -> Self {
        let mut out = self.clone();
        let (cond, tracer) = lower.split_at(self.eigenvalues.len());
        out.eigenvalues = cond.iter().map(|(l, _)| l.conj()).collect();
        out.norming = cond.iter().map(|(_, c)| -c.conj()).collect();
        out.tracer = tracer.first().map(|(l, c)| Tracer { lambda: l.conj(), norming: -c.conj() });
        out
    }

    pub fn validate(&self) -> Result<(), ScatteringError> {
        if self.eigenvalues.len() != self.norming.len() {
            return Err(ScatteringError::Malformed("eigenvalue and norming lists differ in length".into()));
        }
        if self.n != self.eigenvalues.len() {
            return Err(ScatteringError::Malformed("N does not match the eigenvalue count".into()));
        }
        if self.poles().any(|(l, c)| !(l.im > 0.0) || !(c.norm() > 0.0) || !c.norm().is_finite()) {
            return Err(ScatteringError::Malformed(
                "poles must lie in the upper half plane with non-zero norming constants".into(),
            ));
        }
        if self.eigenvalues.windows(2).any(|w| !(w[0].re < w[1].re)) {
            return Err(ScatteringError::Malformed("eigenvalues must be strictly increasing in real part".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        numfmt::to_json(self).expect("scattering data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScatteringError> {
        let data: Self = serde_json::from_str(text).map_err(|e| ScatteringError::Malformed(e.to_string()))?;
        data.validate()?;
        Ok(data)
    }
}

/// Place λ_j on the segment so that ∫_{-a}^{Re λ_j} ρ = (2j-1)/(2N).
pub fn sample_eigenvalues(spec: &CondensateSpec) -> Result<Vec<Complex64>, ScatteringError> {
    let density = spec.density()?;
    let n = spec.n as f64;
    (1..=spec.n)
        .map(|j| {
            let level = (2.0 * j as f64 - 1.0) / (2.0 * n);
            density.quantile(level).map(|re| Complex64::new(re, spec.b))
        })
        .collect()
}

/// c_j(t) = h(λ_j) exp(2i t λ_j²).
pub fn assign_norming_constants(
    spec: &CondensateSpec,
    eigenvalues: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>, ScatteringError> {
    let h = spec.sampler()?;
    // h must not vanish anywhere near the segment, not just at the nodes.
    let probes = 10 * eigenvalues.len().max(1);
    for i in 0..=probes {
        let z = Complex64::new(-spec.a + 2.0 * spec.a * i as f64 / probes as f64, spec.b);
        if h.vanishes(h.eval(z)) {
            return Err(ScatteringError::SamplerVanishes(z));
        }
    }
    eigenvalues
        .iter()
        .map(|&l| {
            let v = h.eval(l);
            if h.vanishes(v) {
                return Err(ScatteringError::SamplerVanishes(l));
            }
            Ok(v * (2.0 * Complex64::i() * t * l * l).exp())
        })
        .collect()
}

/// Eigenvalues and norming constants at time t.
pub fn generate(spec: &CondensateSpec, t: f64) -> Result<ScatteringData, ScatteringError> {
    let eigenvalues = sample_eigenvalues(spec)?;
    let norming = assign_norming_constants(spec, &eigenvalues, t)?;
    Ok(ScatteringData { a: spec.a, b: spec.b, n: spec.n, eigenvalues, norming, tracer: None, time: t })
}

/// Shift every eigenvalue by -v/2; the field picks up the factor exp(ivx) at t = 0.
pub fn galilean_boost(data: &ScatteringData, v: f64) -> ScatteringData {
    let shift = Complex64::new(0.5 * v, 0.0);
    ScatteringData {
        eigenvalues: data.eigenvalues.iter().map(|l| l - shift).collect(),
        tracer: data.tracer.map(|t| Tracer { lambda: t.lambda - shift, ..t }),
        ..data.clone()
    }
}

/// Distance from z to the segment [-a + ib, a + ib].
pub fn distance_to_segment(z: Complex64, a: f64, b: f64) -> f64 {
    let nearest = Complex64::new(z.re.clamp(-a, a), b);
    (z - nearest).norm()
}

/// Relative margin the tracer must keep from the segment, in units of |A|.
pub const TRACER_MARGIN: f64 = 0.15;

/// Append a tracer pole with c_o = amplitude · exp(2 ln N · Re g(λ_o)).
pub fn add_tracer(
    data: &ScatteringData,
    lambda: Complex64,
    amplitude: f64,
    g_at_tracer: Complex64,
) -> Result<ScatteringData, ScatteringError> {
    let margin = TRACER_MARGIN * Complex64::new(data.a, data.b).norm();
    let distance = distance_to_segment(lambda, data.a, data.b);
    if !(lambda.im > 0.0) || distance < margin {
        return Err(ScatteringError::TracerPlacement { lambda, distance, margin });
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(ScatteringError::invalid("amplitude", "must be a positive number"));
    }
    let log_n = (data.n.max(1) as f64).ln();
    let norming = Complex64::new(amplitude * (2.0 * log_n * g_at_tracer.re).exp(), 0.0);
    Ok(ScatteringData { tracer: Some(Tracer { lambda, norming }), ..data.clone() })
}
