use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::field::FieldGrid;
use crate::scattering::{CondensateSpec, DensitySpec, SamplerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Generate,
    Exact,
    Asymptotic,
    Compare,
    Tracer,
    Identities,
    Q1rate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Generate => "generate",
            Self::Exact => "exact",
            Self::Asymptotic => "asymptotic",
            Self::Compare => "compare",
            Self::Tracer => "tracer",
            Self::Identities => "identities",
            Self::Q1rate => "q1rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A run configuration. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<f64>,
    /// Radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub density: DensitySpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<FieldGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(rename = "Ns", default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    /// Tracer eigenvalue as [re, im].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_o: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<f64>,
    /// q₁ probe points as [re, im] pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<[f64; 2]>>,
    /// Position and time for `generate` and `q1rate`.
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_n() -> usize {
    100
}

fn invalid(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Validation { field: field.to_string(), reason: reason.into() }
}

/// Pull the offending key out of a serde message such as
/// "unknown field `foo`, expected one of ...".
fn offending_key(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .filter(|_| message.starts_with("unknown field") || message.starts_with("missing field"))
        .unwrap_or("config")
        .to_string()
}

impl RunConfig {
    /// Parse and validate a JSON document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            let reason = message.split(" at line ").next().unwrap_or(&message).to_string();
            CliError::Parse { field: offending_key(&message), reason }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        crate::numfmt::to_json(self).expect("config serializes")
    }

    /// Endpoint from either (a, b) or (modulus, angle).
    pub fn endpoint(&self) -> Result<(f64, f64), CliError> {
        match (self.a, self.b, self.modulus, self.angle) {
            (Some(a), Some(b), None, None) => Ok((a, b)),
            (None, None, Some(r), Some(angle)) => Ok((r * angle.cos(), r * angle.sin())),
            (None, None, None, None) => Err(invalid("a", "give either a and b, or modulus and angle")),
            (Some(_), Some(_), _, _) => Err(invalid("modulus", "cannot be combined with a and b")),
            (Some(_), None, _, _) => Err(invalid("b", "required together with a")),
            (None, Some(_), _, _) => Err(invalid("a", "required together with b")),
            (None, None, Some(_), None) => Err(invalid("angle", "required together with modulus")),
            (None, None, None, Some(_)) => Err(invalid("modulus", "required together with angle")),
        }
    }

    pub fn spec(&self) -> Result<CondensateSpec, CliError> {
        let (a, b) = self.endpoint()?;
        let spec = CondensateSpec { a, b, n: self.n, density: self.density.clone(), sampler: self.sampler.clone() };
        spec.validate().map_err(|e| invalid(e.field(), e.to_string()))?;
        spec.density().map_err(|e| invalid("density", e.to_string()))?;
        spec.sampler().map_err(|e| invalid("sampler", e.to_string()))?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<&FieldGrid, CliError> {
        let grid = self.grid.as_ref().ok_or_else(|| invalid("grid", "required for this command"))?;
        grid.validate().map_err(|e| invalid(e.field(), e.to_string()))?;
        Ok(grid)
    }

    pub fn ns(&self) -> Result<&[usize], CliError> {
        match self.ns.as_deref() {
            None | Some([]) => Err(invalid("Ns", "a non-empty list is required for this command")),
            Some(ns) => Ok(ns),
        }
    }

    pub fn tracer_lambda(&self) -> Result<Complex64, CliError> {
        let [re, im] = self.lambda_o.ok_or_else(|| invalid("lambdaO", "required for this command"))?;
        if !(re.is_finite() && im.is_finite() && im > 0.0) {
            return Err(invalid("lambdaO", "must be finite with positive imaginary part"));
        }
        Ok(Complex64::new(re, im))
    }

    pub fn probes(&self) -> Result<Vec<Complex64>, CliError> {
        match self.probes.as_deref() {
            None | Some([]) => Err(invalid("probes", "a non-empty list is required for this command")),
            Some(list) => Ok(list.iter().map(|&[re, im]| Complex64::new(re, im)).collect()),
        }
    }

    /// Check that every key the command needs is present and in range.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.x.is_finite() && self.t.is_finite()) {
            return Err(invalid("x", "x and t must be finite"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        if let Some(amplitude) = self.amplitude {
            if !(amplitude.is_finite() && amplitude > 0.0) {
                return Err(invalid("amplitude", "must be a positive number"));
            }
        }
        match self.command {
            Command::Generate | Command::Identities => {}
            Command::Exact => {
                self.grid()?;
                if self.lambda_o.is_some() {
                    self.tracer_lambda()?;
                }
            }
            Command::Asymptotic => {
                self.grid()?;
                if self.n < 2 {
                    return Err(invalid("N", "the asymptotic formula needs N of at least 2"));
                }
            }
            Command::Compare => {
                self.grid()?;
                if self.ns()?.iter().any(|&n| n < 2) {
                    return Err(invalid("Ns", "every N must be at least 2"));
                }
            }
            Command::Tracer => {
                self.grid()?;
                self.tracer_lambda()?;
            }
            Command::Q1rate => {
                self.ns()?;
                self.probes()?;
            }
        }
        self.spec()?;
        Ok(())
    }
}
