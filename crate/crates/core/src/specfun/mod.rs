//! Special functions and contour quadrature used by the rest of the crate.
//!
//! Everything here is a pure function of its inputs.

mod elliptic;
mod quadrature;
mod radical;
mod theta;

pub use elliptic::{ellip_k, jacobi_sd, jacobi_sn_cn_dn};
pub use quadrature::{contour_integrate, gauss_legendre, Path, QuadOptions, Quadrature, Segment};
pub use radical::{BranchedRadical, CutFamily, Side};
pub use theta::{reduce_lattice, theta3, theta3_derivative, theta3_reduced, LatticeShift, ReducedTheta};

use num_complex::Complex64;
use thiserror::Error;

/// Failures of the special-function layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("modulus {0} outside [0, 1)")]
    Modulus(f64),
    #[error("theta parameter must have positive imaginary part, got {0}")]
    ThetaParameter(Complex64),
    #[error("theta series needs more than {cap} terms at z = {z}")]
    ThetaTruncation { z: Complex64, cap: usize },
    #[error("endpoint must lie in the open first quadrant, got {0}")]
    Endpoint(Complex64),
    #[error("point {0} lies on a branch cut and no side was given")]
    OnCut(Complex64),
    #[error("degenerate path from {0} to {1}")]
    DegeneratePath(Complex64, Complex64),
    #[error("quadrature did not converge: estimate {estimate:e} with {nodes} nodes")]
    NoConvergence { estimate: f64, nodes: usize },
    #[error("integrand is not finite at {0}")]
    NonFinite(Complex64),
}

/// Shorthand for the imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
