//! Large-N description of the condensate: constants, the g-function, the
//! leading-order sd wave and its theta-function form, and the finite-N
//! correction q₁.

mod gfunction;
mod q1;

pub use q1::{q1_bruteforce, Q1_PROXIMITY};

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::scattering::{CondensateSpec, Density, Sampler, ScatteringError};
use crate::specfun::{
    contour_integrate, ellip_k, jacobi_sd, theta3_derivative, theta3_reduced, BranchedRadical, CutFamily, QuadOptions,
    Segment, Side, SpecfunError, I,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error("N must be at least 2, got {0}")]
    TooFewSolitons(usize),
    #[error("{0} is a branch point")]
    BranchPoint(Complex64),
    #[error("{z} must lie in the {} half plane", if *.upper { "upper" } else { "lower" })]
    HalfPlane { z: Complex64, upper: bool },
    #[error("probe {z} is {distance:.3e} from the segment, at least {required:.3e} is required")]
    Proximity { z: Complex64, distance: f64, required: f64 },
    #[error("theta argument {argument} needs {shift} period shifts, cap is {cap}")]
    ThetaReduction { argument: Complex64, shift: i64, cap: i64 },
}

/// Largest lattice shift accepted when reducing theta arguments.
pub const MAX_LATTICE_SHIFT: i64 = 1 << 40;

/// Condensate constants shared by every large-N evaluator.
#[derive(Debug, Clone)]
pub struct AsymptoticCache {
    pub endpoint: Complex64,
    pub theta: f64,
    pub modulus: f64,
    /// K(cos θ).
    pub kc: f64,
    /// K(sin θ).
    pub ks: f64,
    /// −|A|/(2 K(cos θ)).
    pub c: f64,
    /// Period ratio i K(sin θ)/K(cos θ).
    pub tau: Complex64,
    /// Re ∫_{η₁} log(2π h ρ)/R₊ ds.
    pub ilog: f64,
    /// Re ∫_{η₁} s log(2π h ρ)/R₊ ds.
    pub jlog: f64,
    /// g at infinity, 1/(2τ).
    pub g_inf: Complex64,
    pub(crate) radical: BranchedRadical,
    pub(crate) density: Density,
    pub(crate) sampler: Sampler,
}

/// x- and N-dependent constants of the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub t: f64,
    pub n: usize,
    /// −(2c/τ)(2πx + 2 Ilog), purely imaginary.
    pub delta: Complex64,
    /// i(4cπx + 2 ln N + 4c Ilog), purely imaginary.
    pub zeta: Complex64,
    /// ln N · K(cos θ)/K(sin θ) + Jlog.
    pub phi0: f64,
}

impl PhaseState {
    /// Real theta-function argument w = −iζ/(2π); the sd argument is 2K(cos θ)·w.
    pub fn theta_argument(&self) -> f64 {
        (-I * self.zeta).re / (2.0 * PI)
    }
}

impl AsymptoticCache {
    pub fn new(spec: &CondensateSpec) -> Result<Self, AsymptoticError> {
        spec.validate()?;
        let endpoint = spec.endpoint();
        let radical = BranchedRadical::new(endpoint)?;
        let density = spec.density()?;
        let sampler = spec.sampler()?;
        let theta = spec.b.atan2(spec.a);
        let modulus = endpoint.norm();
        let kc = ellip_k(theta.cos())?;
        let ks = ellip_k(theta.sin())?;
        let c = -modulus / (2.0 * kc);
        let tau = Complex64::new(0.0, ks / kc);
        let upper = Segment::line(endpoint, -endpoint.conj()).with_side(Side::Plus);
        let weight = |s: Complex64| (2.0 * PI * sampler.eval(s) * density.eval(s)).ln();
        let reciprocal = |s: Complex64| {
            radical
                .eval(s, CutFamily::Horizontal, Side::Plus)
                .map(|r| 1.0 / r)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
        let ilog = contour_integrate(|s| weight(s) * reciprocal(s), &upper, 32, opts)?.value.re;
        let jlog = contour_integrate(|s| s * weight(s) * reciprocal(s), &upper, 32, opts)?.value.re;
        Ok(Self { endpoint, theta, modulus, kc, ks, c, tau, ilog, jlog, g_inf: 0.5 / tau, radical, density, sampler })
    }

    pub fn a(&self) -> f64 {
        self.endpoint.re
    }

    pub fn b(&self) -> f64 {
        self.endpoint.im
    }

    /// 2c/τ = i|A|/K(sin θ).
    pub fn two_c_over_tau(&self) -> Complex64 {
        2.0 * self.c / self.tau
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    pub fn phase_state(&self, x: f64, t: f64, n: usize) -> Result<PhaseState, AsymptoticError> {
        if n < 2 {
            return Err(AsymptoticError::TooFewSolitons(n));
        }
        let log_n = (n as f64).ln();
        let delta = -self.two_c_over_tau() * (2.0 * PI * x + 2.0 * self.ilog);
        let zeta = I * (4.0 * self.c * PI * x + 2.0 * log_n + 4.0 * self.c * self.ilog);
        let phi0 = log_n * self.kc / self.ks + self.jlog;
        Ok(PhaseState { x, t, n, delta, zeta, phi0 })
    }

    /// Argument of sd in the leading-order wave.
    pub fn sd_argument(&self, x: f64, n: usize) -> f64 {
        -2.0 * self.modulus * x + 2.0 * self.kc / PI * (n as f64).ln() - 2.0 * self.modulus / PI * self.ilog
    }

    /// exp(i t (A² + Ā²) + i φ₀).
    fn carrier(&self, t: f64, phi0: f64) -> Complex64 {
        let a2 = self.endpoint * self.endpoint;
        (I * (t * (a2 + a2.conj()).re + phi0)).exp()
    }

    /// −2i (ab/|A|) sd(u; cos θ) exp(i t(A²+Ā²) + iφ₀).
    pub fn psi_leading_order(&self, x: f64, t: f64, n: usize) -> Result<Complex64, AsymptoticError> {
        let phase = self.phase_state(x, t, n)?;
        let amplitude = self.a() * self.b() / self.modulus;
        let sd = jacobi_sd(self.sd_argument(x, n), self.theta.cos())?;
        Ok(-2.0 * I * amplitude * sd * self.carrier(t, phase.phi0))
    }

    /// log Θ(z; τ) with the lattice shift tracked exactly.
    fn log_theta(&self, z: Complex64) -> Result<Complex64, AsymptoticError> {
        let reduced = theta3_reduced(z, self.tau)?;
        let shift = (z.im / self.tau.im).round();
        if shift.abs() > MAX_LATTICE_SHIFT as f64 {
            return Err(AsymptoticError::ThetaReduction { argument: z, shift: shift as i64, cap: MAX_LATTICE_SHIFT });
        }
        Ok(reduced.value.ln() + reduced.log_factor)
    }

    /// Normalizing constant Z₂ of the model solution for theta shift w.
    fn z2(&self, w: f64) -> Result<Complex64, AsymptoticError> {
        let tau = self.tau;
        let log = self.log_theta(Complex64::new(0.0, 0.0))? + self.log_theta(Complex64::new(-w, 0.0))?
            - self.log_theta((3.0 - tau) / 4.0)?
            - self.log_theta((1.0 + tau) / 4.0)?;
        Ok(log.exp())
    }

    /// 2i lim_{z→∞} z Π(z), using 𝒜(z) − 𝒜(∞₁) ≈ −c/z on the first sheet.
    pub fn theta_limit(&self, w: f64, abel_infinity: Complex64) -> Result<Complex64, AsymptoticError> {
        let tau = self.tau;
        let at = abel_infinity;
        let shift = Complex64::new(w, 0.0);
        let vanishing = theta3_derivative(reduce_mod_one(at + (3.0 + tau) / 4.0), tau)?;
        let log_rest = self.log_theta(at + shift + (tau - 1.0) / 4.0)?
            - self.log_theta(at + 0.5)?
            - self.log_theta(at + tau / 2.0)?;
        Ok(2.0 * I * (-self.c) * vanishing * log_rest.exp() / self.z2(w)?)
    }

    /// Theta-function form of the leading-order wave.
    pub fn psi_theta_representation(&self, x: f64, t: f64, n: usize) -> Result<Complex64, AsymptoticError> {
        let phase = self.phase_state(x, t, n)?;
        let w = phase.theta_argument();
        let limit = self.theta_limit(w.rem_euclid(2.0), self.abel_at_infinity()?)?;
        // exp(−2 ln N g∞ − 2y∞ + 2iν₀) collapsed to the carrier times exp(iπ(w + 1/2))
        let parity = (I * PI * (w.rem_euclid(2.0) + 0.5)).exp();
        Ok(limit * parity * self.carrier(t, phase.phi0))
    }

    /// Closed-form q₁(z) at (x, t).
    pub fn q1_correction(&self, z: Complex64, x: f64, t: f64) -> Result<Complex64, AsymptoticError> {
        q1::closed_form(self, z, x, t)
    }
}

/// Shift by an integer so the real part lies in [−1/2, 1/2); Θ is 1-periodic.
fn reduce_mod_one(z: Complex64) -> Complex64 {
    Complex64::new(z.re - z.re.round(), z.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn symmetric_angle_constants() {
        let c = AsymptoticCache::new(&CondensateSpec::from_polar(1.0, FRAC_PI_4, 10)).unwrap();
        assert!((c.tau - I).norm() < 1e-15);
        assert!(c.c < 0.0);
        assert!(c.two_c_over_tau().re.abs() < 1e-15 && c.two_c_over_tau().im > 0.0);
        assert!(c.g_inf.re.abs() < 1e-15);
    }

    #[test]
    fn log_integrals_vanish_for_balanced_sampler() {
        // h = 1/(2πρ) with ρ = 1/(2a)
        let a = 0.6;
        let mut spec = CondensateSpec::uniform(a, 0.9, 10);
        spec.sampler = crate::scattering::SamplerSpec::constant(a / PI);
        let c = AsymptoticCache::new(&spec).unwrap();
        assert!(c.ilog.abs() < 1e-14 && c.jlog.abs() < 1e-14);
    }

    #[test]
    fn c_against_elliptic_oracle() {
        let c = AsymptoticCache::new(&CondensateSpec::from_polar(1.0, PI / 3.0, 10)).unwrap();
        // K(1/2) by the arithmetic-geometric mean, written out independently
        let (mut x, mut y) = (1.0_f64, (0.75_f64).sqrt());
        for _ in 0..8 {
            let (nx, ny) = (0.5 * (x + y), (x * y).sqrt());
            x = nx;
            y = ny;
        }
        let k_half = PI / (2.0 * x);
        assert!((c.c + 1.0 / (2.0 * k_half)).abs() < 1e-13);
    }

    #[test]
    fn phase_constants_are_imaginary() {
        let c = AsymptoticCache::new(&CondensateSpec::from_polar(1.2, 0.5, 10)).unwrap();
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let p = c.phase_state(x, 0.0, 50).unwrap();
            assert!(p.delta.re.abs() <= 1e-12 * p.delta.norm());
            assert!(p.zeta.re.abs() <= 1e-12 * p.zeta.norm());
            let q = c.phase_state(x, 0.0, 5).unwrap();
            assert!((p.zeta - q.zeta - 2.0 * I * 10f64.ln()).norm() < 1e-12);
        }
        assert!(c.phase_state(0.0, 0.0, 1).is_err());
    }

    #[test]
    fn theta_form_matches_sd_form() {
        for &theta in &[PI / 6.0, FRAC_PI_4, PI / 3.0] {
            let c = AsymptoticCache::new(&CondensateSpec::from_polar(1.3, theta, 10)).unwrap();
            for &(x, t, n) in &[(0.1, 0.0, 10), (-0.7, 0.3, 100), (1.9, 1.0, 1000)] {
                let lead = c.psi_leading_order(x, t, n).unwrap();
                let th = c.psi_theta_representation(x, t, n).unwrap();
                assert!((lead - th).norm() < 1e-8, "θ={theta} x={x}: {lead} vs {th}");
            }
        }
    }

    #[test]
    fn modulus_is_time_independent_and_peaks_at_2a() {
        let c = AsymptoticCache::new(&CondensateSpec::from_polar(1.0, FRAC_PI_4, 100)).unwrap();
        let mut peak: f64 = 0.0;
        for i in 0..2000 {
            let x = -2.0 + 4.0 * i as f64 / 2000.0;
            let p0 = c.psi_leading_order(x, 0.0, 100).unwrap().norm();
            let p1 = c.psi_leading_order(x, 0.7, 100).unwrap().norm();
            assert!((p0 - p1).abs() < 1e-13);
            peak = peak.max(p0);
        }
        assert!((peak - 2.0 * c.a()).abs() < 1e-3);
    }
}
