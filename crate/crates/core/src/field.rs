//! Evaluation grids and field samples shared by the solvers and the CLI.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::fmt17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("xSteps must be at least 2, got {0}")]
    TooFewSteps(usize),
    #[error("xMin must be below xMax")]
    EmptyRange,
    #[error("tValues must not be empty")]
    NoTimes,
    #[error("grid values must be finite")]
    NonFinite,
}

impl GridError {
    /// Config key the error refers to.
    pub fn field(&self) -> &'static str {
        match self {
            Self::TooFewSteps(_) => "grid.xSteps",
            Self::EmptyRange => "grid.xMin",
            Self::NoTimes => "grid.tValues",
            Self::NonFinite => "grid",
        }
    }
}

/// Uniform x grid crossed with a list of times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct FieldGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub x_steps: usize,
    pub t_values: Vec<f64>,
}

impl FieldGrid {
    pub fn new(x_min: f64, x_max: f64, x_steps: usize, t_values: Vec<f64>) -> Result<Self, GridError> {
        let grid = Self { x_min, x_max, x_steps, t_values };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) || self.t_values.iter().any(|t| !t.is_finite()) {
            return Err(GridError::NonFinite);
        }
        if self.x_steps < 2 {
            return Err(GridError::TooFewSteps(self.x_steps));
        }
        if !(self.x_min < self.x_max) {
            return Err(GridError::EmptyRange);
        }
        if self.t_values.is_empty() {
            return Err(GridError::NoTimes);
        }
        Ok(())
    }

    pub fn x_values(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / (self.x_steps - 1) as f64;
        (0..self.x_steps).map(|i| if i + 1 == self.x_steps { self.x_max } else { self.x_min + h * i as f64 }).collect()
    }

    /// Points in row-major order: t outer, x inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = self.x_values();
        self.t_values.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect()
    }

    pub fn len(&self) -> usize {
        self.x_steps * self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which evaluator produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Asymptotic,
    Theta,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Asymptotic => "asymptotic",
            Self::Theta => "theta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub t: f64,
    pub psi: Complex64,
    pub method: Method,
    pub cond_estimate: Option<f64>,
}

/// Column header of field CSV files.
pub const FIELD_CSV_HEADER: &str = "x,t,re_psi,im_psi,abs_psi,method,cond_estimate";

impl FieldSample {
    pub fn csv_row(&self) -> String {
        let cond = self.cond_estimate.map(fmt17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            fmt17(self.x),
            fmt17(self.t),
            fmt17(self.psi.re),
            fmt17(self.psi.im),
            fmt17(self.psi.norm()),
            self.method.as_str(),
            cond
        )
    }
}

/// Render samples as CSV with a header line and LF endings.
pub fn field_csv(samples: &[FieldSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(FIELD_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_t_major() {
        let g = FieldGrid::new(-1.0, 1.0, 3, vec![0.0, 0.5]).unwrap();
        let p = g.points();
        assert_eq!(p, vec![(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (-1.0, 0.5), (0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn invalid_grids() {
        assert_eq!(FieldGrid::new(0.0, 1.0, 1, vec![0.0]), Err(GridError::TooFewSteps(1)));
        assert_eq!(FieldGrid::new(1.0, 1.0, 4, vec![0.0]), Err(GridError::EmptyRange));
        assert_eq!(FieldGrid::new(0.0, 1.0, 4, vec![]), Err(GridError::NoTimes));
    }

    #[test]
    fn csv_layout() {
        let s =
            FieldSample { x: 0.5, t: 0.0, psi: Complex64::new(3.0, 4.0), method: Method::Exact, cond_estimate: None };
        let csv = field_csv(&[s]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(FIELD_CSV_HEADER));
        let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[4].parse::<f64>().unwrap(), 5.0);
        assert_eq!(cols[5], "exact");
        assert_eq!(cols[6], "");
    }
}
