use std::f64::consts::PI;

use num_complex::Complex64;

use super::{SpecfunError, I};

/// Largest index allowed in the truncated series.
const MAX_TERMS: usize = 500;
/// ln(1e17): terms below this fraction of the peak term are dropped.
const TAIL_LOG: f64 = 39.143_947_5;

fn check_tau(tau: Complex64) -> Result<(), SpecfunError> {
    if tau.im <= 0.0 || !tau.im.is_finite() {
        return Err(SpecfunError::ThetaParameter(tau));
    }
    Ok(())
}

/// Index window [lo, hi] outside of which every term is below 1e-17 of the largest.
fn window(z: Complex64, tau: Complex64) -> Result<(i64, i64), SpecfunError> {
    // |term n| = exp(-2π n Im z - π n² Im τ), peaked at n* = -Im z / Im τ
    let centre = -z.im / tau.im;
    let half = (TAIL_LOG / (PI * tau.im)).sqrt() + 1.0;
    let lo = (centre - half).floor();
    let hi = (centre + half).ceil();
    if lo.abs().max(hi.abs()) > MAX_TERMS as f64 {
        return Err(SpecfunError::ThetaTruncation { z, cap: MAX_TERMS });
    }
    Ok((lo as i64, hi as i64))
}

fn series(z: Complex64, tau: Complex64, derivative: bool) -> Result<Complex64, SpecfunError> {
    check_tau(tau)?;
    let (lo, hi) = window(z, tau)?;
    // Sum from the smallest terms outwards in a fixed order for reproducibility.
    let mut acc = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        let nf = n as f64;
        let term = (2.0 * PI * I * nf * z + PI * I * nf * nf * tau).exp();
        acc += if derivative { 2.0 * PI * I * nf * term } else { term };
    }
    Ok(acc)
}

/// Θ(z; τ) = Σ_n exp(2πi n z + πi n² τ).
pub fn theta3(z: Complex64, tau: Complex64) -> Result<Complex64, SpecfunError> {
    series(z, tau, false)
}

/// dΘ/dz.
pub fn theta3_derivative(z: Complex64, tau: Complex64) -> Result<Complex64, SpecfunError> {
    series(z, tau, true)
}

/// z = reduced + n + m τ with the reduced point in the fundamental cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeShift {
    pub reduced: Complex64,
    pub n: i64,
    pub m: i64,
}

/// Reduce z modulo ℤ + τℤ so that |Im reduced| ≤ Im τ / 2 and |Re(reduced - shift)| ≤ 1/2.
pub fn reduce_lattice(z: Complex64, tau: Complex64) -> Result<LatticeShift, SpecfunError> {
    check_tau(tau)?;
    let m = (z.im / tau.im).round();
    let w = z - m * tau;
    let n = w.re.round();
    Ok(LatticeShift { reduced: w - n, n: n as i64, m: m as i64 })
}

/// Θ evaluated through lattice reduction: Θ(z) = exp(log_factor) · value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTheta {
    pub value: Complex64,
    pub log_factor: Complex64,
}

impl ReducedTheta {
    pub fn to_complex(self) -> Complex64 {
        self.value * self.log_factor.exp()
    }
}

/// Θ(z + n + mτ) = exp(-πi m² τ - 2πi m z) Θ(z), applied to the reduced point.
pub fn theta3_reduced(z: Complex64, tau: Complex64) -> Result<ReducedTheta, SpecfunError> {
    let shift = reduce_lattice(z, tau)?;
    let mf = shift.m as f64;
    let log_factor = -PI * I * mf * mf * tau - 2.0 * PI * I * mf * shift.reduced;
    Ok(ReducedTheta { value: theta3(shift.reduced, tau)?, log_factor })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_periodicity() {
        let tau = c(0.0, 2.0);
        let z = c(0.3, 0.1);
        let a = theta3(z + 1.0, tau).unwrap();
        let b = theta3(z, tau).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn simple_zero_at_half_period() {
        let tau = c(0.0, 2.0);
        assert!(theta3((tau + 1.0) / 2.0, tau).unwrap().norm() < 1e-12);
    }

    #[test]
    fn quasi_periodicity() {
        let tau = c(0.1, 1.3);
        let z = c(-0.2, 0.35);
        let lhs = theta3(z + tau, tau).unwrap();
        let rhs = (-PI * I * tau - 2.0 * PI * I * z).exp() * theta3(z, tau).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn reduced_matches_direct() {
        let tau = c(0.0, 0.8);
        for z in [c(3.7, 2.9), c(-1.2, -3.3), c(0.4, 0.0)] {
            let direct = theta3(z, tau).unwrap();
            let red = theta3_reduced(z, tau).unwrap().to_complex();
            assert!((direct - red).norm() < 1e-11 * direct.norm(), "{z}");
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let tau = c(0.0, 1.1);
        let z = c(0.21, 0.13);
        let h = 1e-6;
        let fd = (theta3(z + h, tau).unwrap() - theta3(z - h, tau).unwrap()) / (2.0 * h);
        assert!((fd - theta3_derivative(z, tau).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn rejects_lower_half_plane_tau() {
        assert!(theta3(c(0.0, 0.0), c(0.0, -1.0)).is_err());
        assert!(theta3(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn truncation_cap() {
        let tau = c(0.0, 1.0);
        assert!(matches!(theta3(c(0.0, 900.0), tau), Err(SpecfunError::ThetaTruncation { .. })));
        assert!(theta3_reduced(c(0.0, 900.0), tau).is_ok());
    }
}
