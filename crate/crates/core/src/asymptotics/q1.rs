//! q₁(z; N): the N-scaled gap between the pole sum and its contour-integral
//! limit, and its closed two-endpoint leading term.

use num_complex::Complex64;

use super::{AsymptoticCache, AsymptoticError};
use crate::scattering::{distance_to_segment, generate, CondensateSpec};
use crate::specfun::{contour_integrate, QuadOptions, Segment, I};

/// Probes must stay this far from the segment, in units of |A|.
pub const Q1_PROXIMITY: f64 = 0.1;

fn check_probe(cache: &AsymptoticCache, z: Complex64) -> Result<(), AsymptoticError> {
    let distance = distance_to_segment(z, cache.a(), cache.b());
    let required = Q1_PROXIMITY * cache.modulus;
    if distance < required {
        return Err(AsymptoticError::Proximity { z, distance, required });
    }
    Ok(())
}

fn phase(p: Complex64, x: f64, t: f64) -> Complex64 {
    (2.0 * I * (p * x + p * p * t)).exp()
}

/// d/dp of h(p) e^{2iθ(p)}/(z − p) divided by ρ(p).
fn endpoint_term(cache: &AsymptoticCache, z: Complex64, p: Complex64, x: f64, t: f64) -> Complex64 {
    let h = cache.sampler.eval(p);
    let dh = cache.sampler.derivative(p);
    let dtheta = x + 2.0 * p * t;
    let e = phase(p, x, t);
    let gap = z - p;
    ((dh + 2.0 * I * h * dtheta) * e / gap + h * e / (gap * gap)) / cache.density.eval(p)
}

pub(super) fn closed_form(cache: &AsymptoticCache, z: Complex64, x: f64, t: f64) -> Result<Complex64, AsymptoticError> {
    check_probe(cache, z)?;
    let left = -cache.endpoint.conj();
    let right = cache.endpoint;
    Ok((endpoint_term(cache, z, left, x, t) - endpoint_term(cache, z, right, x, t)) / 24.0)
}

/// N(Σ_j c_j e^{2iθ(λ_j)}/(z − λ_j) + N ∫_{η₁} h ρ e^{2iθ}/(z − λ) dλ) with
/// c_j = h(λ_j) and η₁ running from A to −Ā.
pub fn q1_bruteforce(spec: &CondensateSpec, z: Complex64, x: f64, t: f64) -> Result<Complex64, AsymptoticError> {
    let cache = AsymptoticCache::new(spec)?;
    check_probe(&cache, z)?;
    let data = generate(spec, 0.0)?;
    let n = spec.n as f64;
    let sum: Complex64 = data.eigenvalues.iter().zip(&data.norming).map(|(&l, &c)| c * phase(l, x, t) / (z - l)).sum();
    let integrand = |s: Complex64| cache.sampler.eval(s) * cache.density.eval(s) * phase(s, x, t) / (z - s);
    let path = Segment::line(cache.endpoint, -cache.endpoint.conj());
    let opts = QuadOptions { rel_tol: 1e-15, max_nodes: 1 << 14 };
    let integral = contour_integrate(integrand, &path, 64, opts)?.value;
    Ok(n * (sum + n * integral))
}
