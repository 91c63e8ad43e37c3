use num_complex::Complex64;

use super::{SpecfunError, I};

/// Which pair of cuts carries the sign change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutFamily {
    /// The horizontal segments between ±Ā and A, and between -A and Ā.
    Horizontal,
    /// The arcs of |z| = |A| above and below those segments.
    Circular,
}

/// Boundary side on an oriented cut. `Plus` is the left of the orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Off,
}

/// R(z) = (z-A)^½ (z+Ā)^½ (z+A)^½ (z-Ā)^½ with principal square roots.
///
/// Orientation of the cuts: the upper segment runs from A to -Ā (so its
/// plus side is below it), the lower one from -A to Ā (plus side above).
/// Both arcs run counterclockwise and have their plus side inside the disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedRadical {
    endpoint: Complex64,
}

const CUT_TOL: f64 = 1e-13;

/// Principal square root, except that a point on the negative real axis is
/// resolved as the limit from above (`from_above`) or from below.
fn sqrt_limit(w: Complex64, from_above: bool) -> Complex64 {
    if w.im == 0.0 && w.re < 0.0 {
        let r = (-w.re).sqrt();
        return if from_above { Complex64::new(0.0, r) } else { Complex64::new(0.0, -r) };
    }
    w.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cut {
    Upper,
    Lower,
}

impl BranchedRadical {
    pub fn new(endpoint: Complex64) -> Result<Self, SpecfunError> {
        if !(endpoint.re > 0.0 && endpoint.im > 0.0 && endpoint.norm().is_finite()) {
            return Err(SpecfunError::Endpoint(endpoint));
        }
        Ok(Self { endpoint })
    }

    pub fn endpoint(&self) -> Complex64 {
        self.endpoint
    }

    pub fn a(&self) -> f64 {
        self.endpoint.re
    }

    pub fn b(&self) -> f64 {
        self.endpoint.im
    }

    pub fn modulus(&self) -> f64 {
        self.endpoint.norm()
    }

    fn scale(&self) -> f64 {
        self.modulus()
    }

    fn horizontal_cut(&self, z: Complex64) -> Option<Cut> {
        let tol = CUT_TOL * self.scale();
        if z.re.abs() >= self.a() {
            return None;
        }
        if (z.im - self.b()).abs() <= tol {
            Some(Cut::Upper)
        } else if (z.im + self.b()).abs() <= tol {
            Some(Cut::Lower)
        } else {
            None
        }
    }

    /// True inside the lens regions between a segment and its arc.
    pub fn in_lens(&self, z: Complex64) -> bool {
        z.norm() < self.modulus() && z.im.abs() > self.b()
    }

    fn on_arc(&self, z: Complex64) -> bool {
        (z.norm() - self.modulus()).abs() <= CUT_TOL * self.scale() && z.im.abs() > self.b()
    }

    /// Principal-branch product, with factors on their own cut taken from the
    /// side selected by `upper_from_above` / `lower_from_above`.
    fn product(&self, z: Complex64, upper_from_above: bool, lower_from_above: bool) -> Complex64 {
        let a = self.endpoint;
        let ab = a.conj();
        sqrt_limit(z - a, upper_from_above)
            * sqrt_limit(z + ab, upper_from_above)
            * sqrt_limit(z + a, lower_from_above)
            * sqrt_limit(z - ab, lower_from_above)
    }

    /// R(z) off the horizontal cuts (limit from above if z lies on one).
    pub fn eval_principal(&self, z: Complex64) -> Complex64 {
        self.product(z, true, true)
    }

    fn horizontal_boundary(&self, z: Complex64, cut: Cut, side: Side) -> Result<Complex64, SpecfunError> {
        let (snapped, from_above) = match (cut, side) {
            (_, Side::Off) => return Err(SpecfunError::OnCut(z)),
            (Cut::Upper, s) => (Complex64::new(z.re, self.b()), s == Side::Minus),
            (Cut::Lower, s) => (Complex64::new(z.re, -self.b()), s == Side::Plus),
        };
        Ok(self.product(snapped, from_above, from_above))
    }

    /// Evaluate R (horizontal family) or S (circular family) at z.
    ///
    /// On a cut of the chosen family the boundary value for `side` is
    /// returned; `Side::Off` there is an error. Off the cuts `side` is ignored.
    pub fn eval(&self, z: Complex64, family: CutFamily, side: Side) -> Result<Complex64, SpecfunError> {
        match family {
            CutFamily::Horizontal => match self.horizontal_cut(z) {
                Some(cut) => self.horizontal_boundary(z, cut, side),
                None => Ok(self.eval_principal(z)),
            },
            CutFamily::Circular => {
                if let Some(cut) = self.horizontal_cut(z) {
                    // S is continuous across the segments and equals R from outside the lens.
                    return self.horizontal_boundary(z, cut, Side::Plus);
                }
                let r = self.eval_principal(z);
                if self.on_arc(z) {
                    return match side {
                        Side::Plus => Ok(-r),
                        Side::Minus => Ok(r),
                        Side::Off => Err(SpecfunError::OnCut(z)),
                    };
                }
                Ok(if self.in_lens(z) { -r } else { r })
            }
        }
    }

    /// Point on the upper segment at horizontal coordinate `re`.
    pub fn upper_point(&self, re: f64) -> Complex64 {
        Complex64::new(re, self.b())
    }

    /// Point on the upper arc at polar angle `angle`.
    pub fn arc_point(&self, angle: f64) -> Complex64 {
        self.modulus() * (I * angle).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn radical() -> BranchedRadical {
        BranchedRadical::new(Complex64::from_polar(1.0, FRAC_PI_4)).unwrap()
    }

    #[test]
    fn schwarz_and_even_symmetry() {
        let r = radical();
        let z = Complex64::new(0.3, 0.9);
        let v = r.eval(z, CutFamily::Horizontal, Side::Off).unwrap();
        let vc = r.eval(z.conj(), CutFamily::Horizontal, Side::Off).unwrap();
        let vm = r.eval(-z, CutFamily::Horizontal, Side::Off).unwrap();
        assert!((vc - v.conj()).norm() < 1e-14);
        assert!((vm - v).norm() < 1e-14);
    }

    #[test]
    fn large_z_expansion() {
        let r = radical();
        let a = r.endpoint();
        let z = Complex64::from_polar(1e3, 0.3);
        let v = r.eval(z, CutFamily::Horizontal, Side::Off).unwrap();
        let rest = v - z * z + (a * a + a.conj() * a.conj()) / 2.0;
        assert!(rest.norm() < 1e-6);
    }

    #[test]
    fn boundary_values_are_one_sided_limits() {
        let r = radical();
        for &x in &[-0.6, -0.1, 0.0, 0.4] {
            let z = r.upper_point(x);
            let plus = r.eval(z, CutFamily::Horizontal, Side::Plus).unwrap();
            let minus = r.eval(z, CutFamily::Horizontal, Side::Minus).unwrap();
            let below = r.eval_principal(z - Complex64::new(0.0, 1e-10));
            let above = r.eval_principal(z + Complex64::new(0.0, 1e-10));
            assert!((plus + minus).norm() < 1e-15);
            assert!((plus - below).norm() < 1e-8);
            assert!((minus - above).norm() < 1e-8);
            let zl = z.conj();
            let lp = r.eval(zl, CutFamily::Horizontal, Side::Plus).unwrap();
            let la = r.eval_principal(zl + Complex64::new(0.0, 1e-10));
            assert!((lp - la).norm() < 1e-8);
        }
    }

    #[test]
    fn on_cut_without_side_is_error() {
        let r = radical();
        assert!(r.eval(r.upper_point(0.1), CutFamily::Horizontal, Side::Off).is_err());
        assert!(r.eval(r.arc_point(1.5), CutFamily::Circular, Side::Off).is_err());
    }

    #[test]
    fn circular_family_jumps_on_the_arc() {
        let r = radical();
        let z = r.arc_point(1.9);
        let plus = r.eval(z, CutFamily::Circular, Side::Plus).unwrap();
        let inside = r.eval(z * 0.999_999_999, CutFamily::Circular, Side::Off).unwrap();
        let outside = r.eval(z * 1.000_000_001, CutFamily::Circular, Side::Off).unwrap();
        assert!((plus - inside).norm() < 1e-7);
        assert!((plus + outside).norm() < 1e-7);
        // continuous across the segment
        let up = r.eval(r.upper_point(0.2) + Complex64::new(0.0, 1e-11), CutFamily::Circular, Side::Off).unwrap();
        let dn = r.eval(r.upper_point(0.2) - Complex64::new(0.0, 1e-11), CutFamily::Circular, Side::Off).unwrap();
        assert!((up - dn).norm() < 1e-8);
    }

    #[test]
    fn rejects_bad_endpoint() {
        assert!(BranchedRadical::new(Complex64::new(-1.0, 1.0)).is_err());
        assert!(BranchedRadical::new(Complex64::new(1.0, 0.0)).is_err());
    }
}
