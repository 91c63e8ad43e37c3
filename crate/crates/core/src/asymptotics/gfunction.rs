//! The g-function, the exponents u and ũ, and the Abel map values.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{AsymptoticCache, AsymptoticError};
use crate::specfun::{contour_integrate, CutFamily, Path, QuadOptions, Segment, Side};

const START_NODES: usize = 16;

/// Where a point sits relative to the rectangle spanned by ±A, ±Ā.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Interior,
    Exterior,
}

impl AsymptoticCache {
    fn edge_tolerance(&self) -> f64 {
        1e-13 * self.modulus
    }

    fn is_branch_point(&self, z: Complex64) -> bool {
        let a = self.endpoint;
        [a, -a, a.conj(), -a.conj()].iter().any(|&p| (z - p).norm() <= self.edge_tolerance())
    }

    /// Interior or exterior path for z, resolving boundary points through
    /// the requested side. The right edge carries no jump.
    fn region(&self, z: Complex64, side: Side) -> Result<Region, AsymptoticError> {
        let (a, b, tol) = (self.a(), self.b(), self.edge_tolerance());
        let inside_x = z.re.abs() < a - tol;
        let inside_y = z.im.abs() < b - tol;
        let on_horizontal = (z.im.abs() - b).abs() <= tol && z.re.abs() <= a + tol;
        let on_left = (z.re + a).abs() <= tol && z.im.abs() <= b + tol;
        let on_right = (z.re - a).abs() <= tol && z.im.abs() <= b + tol;
        if on_horizontal || on_left {
            // plus side of every cut is the rectangle interior
            return match side {
                Side::Plus => Ok(Region::Interior),
                Side::Minus => Ok(Region::Exterior),
                Side::Off => Err(AsymptoticError::Specfun(crate::specfun::SpecfunError::OnCut(z))),
            };
        }
        if on_right || (inside_x && inside_y) {
            Ok(Region::Interior)
        } else {
            Ok(Region::Exterior)
        }
    }

    fn integrate_reciprocal(&self, segment: &Segment) -> Result<Complex64, AsymptoticError> {
        let radical = self.radical;
        let side = segment.side;
        let f = move |s: Complex64| {
            radical.eval(s, CutFamily::Horizontal, side).map(|r| 1.0 / r).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        Ok(contour_integrate(f, segment, START_NODES, QuadOptions::default())?.value)
    }

    /// ∫_start^z ds/R(s) along a path that avoids the horizontal cuts and
    /// the left edge of the rectangle. `start` must be A or Ā.
    pub(crate) fn reciprocal_radical_integral(
        &self,
        start: Complex64,
        z: Complex64,
        side: Side,
    ) -> Result<Complex64, AsymptoticError> {
        if (z - start).norm() <= self.edge_tolerance() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.is_branch_point(z) {
            return Err(AsymptoticError::BranchPoint(z));
        }
        match self.region(z, side)? {
            Region::Interior => self.integrate_reciprocal(&Segment::line(start, z).with_side(side)),
            Region::Exterior => {
                // Both rays stay outside the rectangle and the arc joining
                // them at infinity contributes nothing since 1/R ~ 1/s².
                let from_start = Segment { path: Path::Ray { start, direction: start }, side: Side::Off };
                let from_z = Segment { path: Path::Ray { start: z, direction: z }, side };
                Ok(self.integrate_reciprocal(&from_start)? - self.integrate_reciprocal(&from_z)?)
            }
        }
    }

    /// g(z) = 1/2 − (2c/τ) ∫_A^z ds/R(s). On η₁, η₂ and the left edge
    /// `side` selects the boundary value.
    pub fn g_function(&self, z: Complex64, side: Side) -> Result<Complex64, AsymptoticError> {
        let integral = self.reciprocal_radical_integral(self.endpoint, z, side)?;
        Ok(0.5 - self.two_c_over_tau() * integral)
    }

    /// u(z) = 1 − 2g(z), defined in the upper half plane.
    pub fn u_function(&self, z: Complex64) -> Result<Complex64, AsymptoticError> {
        if !(z.im > 0.0) {
            return Err(AsymptoticError::HalfPlane { z, upper: true });
        }
        let integral = self.reciprocal_radical_integral(self.endpoint, z, Side::Off)?;
        Ok(2.0 * self.two_c_over_tau() * integral)
    }

    /// ũ(z) = (4c/τ) ∫_Ā^z ds/R(s), defined in the lower half plane.
    pub fn u_tilde_function(&self, z: Complex64) -> Result<Complex64, AsymptoticError> {
        if !(z.im < 0.0) {
            return Err(AsymptoticError::HalfPlane { z, upper: false });
        }
        let integral = self.reciprocal_radical_integral(self.endpoint.conj(), z, Side::Off)?;
        Ok(2.0 * self.two_c_over_tau() * integral)
    }

    /// u on the upper half plane and ũ on the lower one.
    pub fn u_functions(&self, z: Complex64) -> Result<(Option<Complex64>, Option<Complex64>), AsymptoticError> {
        let u = if z.im > 0.0 { Some(self.u_function(z)?) } else { None };
        let ut = if z.im < 0.0 { Some(self.u_tilde_function(z)?) } else { None };
        Ok((u, ut))
    }

    /// True when z is in the closed rectangle with corners ±A, ±Ā.
    pub fn in_rectangle(&self, z: Complex64) -> bool {
        z.re.abs() <= self.a() && z.im.abs() <= self.b()
    }

    /// True in the lens between η₁ and the upper arc.
    pub fn in_upper_lens(&self, z: Complex64) -> bool {
        z.im > self.b() && z.norm() < self.modulus
    }

    fn abel_integral(&self, segment: &Segment) -> Result<Complex64, AsymptoticError> {
        let radical = self.radical;
        let side = segment.side;
        let c = self.c;
        let f = move |s: Complex64| {
            radical.eval(s, CutFamily::Circular, side).map(|r| c / r).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        Ok(contour_integrate(f, segment, START_NODES, QuadOptions::default())?.value)
    }

    /// 𝒜(Ā): straight down the right edge.
    pub fn abel_at_conjugate_endpoint(&self) -> Result<Complex64, AsymptoticError> {
        self.abel_integral(&Segment::line(self.endpoint, self.endpoint.conj()))
    }

    /// 𝒜(−Ā): along the upper arc on its inner side.
    pub fn abel_at_reflected_endpoint(&self) -> Result<Complex64, AsymptoticError> {
        let arc = Path::Arc { radius: self.modulus, from: self.theta, to: PI - self.theta };
        self.abel_integral(&Segment { path: arc, side: Side::Plus })
    }

    /// 𝒜(∞₁): radially outward from A.
    pub fn abel_at_infinity(&self) -> Result<Complex64, AsymptoticError> {
        let ray = Path::Ray { start: self.endpoint, direction: self.endpoint };
        self.abel_integral(&Segment { path: ray, side: Side::Off })
    }

    /// The three entries of the integral table, each expected to be
    /// (1, 1/τ, 1/(2τ) − 1/2).
    pub fn integral_table(&self) -> Result<[Complex64; 3], AsymptoticError> {
        let a = self.endpoint;
        let k = self.two_c_over_tau();
        let gamma = self.integrate_reciprocal(&Segment::line(-a.conj(), -a))?;
        let upper = self.integrate_reciprocal(&Segment::line(a, -a.conj()).with_side(Side::Plus))?;
        let ray = Segment { path: Path::Ray { start: a, direction: a }, side: Side::Off };
        let tail = self.integrate_reciprocal(&ray)?;
        Ok([k * gamma, k * upper, -k * tail])
    }

    /// ∫_{η₁} ds/R₊(s), expected −K(cos θ)/|A|.
    pub fn upper_cut_period(&self) -> Result<Complex64, AsymptoticError> {
        self.integrate_reciprocal(&Segment::line(self.endpoint, -self.endpoint.conj()).with_side(Side::Plus))
    }

    /// ∫_γ ds/R(s) from −Ā to −A, expected −i K(sin θ)/|A|.
    pub fn left_edge_period(&self) -> Result<Complex64, AsymptoticError> {
        self.integrate_reciprocal(&Segment::line(-self.endpoint.conj(), -self.endpoint))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::CondensateSpec;
    use std::f64::consts::FRAC_PI_4;

    fn cache(theta: f64, modulus: f64) -> AsymptoticCache {
        AsymptoticCache::new(&CondensateSpec::from_polar(modulus, theta, 100)).unwrap()
    }

    #[test]
    fn periods_match_elliptic_integrals() {
        for &theta in &[PI / 6.0, FRAC_PI_4, PI / 3.0] {
            for &r in &[0.5, 1.0, 2.0] {
                let c = cache(theta, r);
                let p = c.upper_cut_period().unwrap();
                assert!((p - Complex64::new(-c.kc / r, 0.0)).norm() < 1e-10 * c.kc / r);
                let q = c.left_edge_period().unwrap();
                assert!((q - Complex64::new(0.0, -c.ks / r)).norm() < 1e-10 * c.ks / r);
            }
        }
    }

    #[test]
    fn jump_conditions() {
        let c = cache(PI / 3.0, 1.3);
        let (a, b) = (c.a(), c.b());
        for i in 1..20 {
            let s = -a + 2.0 * a * i as f64 / 20.0;
            let z = Complex64::new(s, b);
            let sum = c.g_function(z, Side::Plus).unwrap() + c.g_function(z, Side::Minus).unwrap();
            assert!((sum - 1.0).norm() < 1e-9, "upper {s}: {sum}");
            let z = Complex64::new(s, -b);
            let sum = c.g_function(z, Side::Plus).unwrap() + c.g_function(z, Side::Minus).unwrap();
            assert!((sum + 1.0).norm() < 1e-9, "lower {s}: {sum}");
            let y = -b + 2.0 * b * i as f64 / 20.0;
            let z = Complex64::new(-a, y);
            let jump = c.g_function(z, Side::Plus).unwrap() - c.g_function(z, Side::Minus).unwrap();
            assert!((jump + 2.0 / c.tau).norm() < 1e-9, "left {y}: {jump}");
        }
    }

    #[test]
    fn g_at_infinity() {
        let c = cache(FRAC_PI_4, 1.0);
        // g − g∞ decays like (2c/τ)/z
        let z = Complex64::from_polar(1e3, 0.7);
        let g = c.g_function(z, Side::Off).unwrap();
        assert!((g - c.g_inf - c.two_c_over_tau() / z).norm() < 1e-9);
        let far = c.g_function(Complex64::from_polar(1e6, -2.0), Side::Off).unwrap();
        assert!((far - c.g_inf).norm() < 1e-5);
    }

    #[test]
    fn abel_values() {
        for &theta in &[PI / 6.0, FRAC_PI_4, PI / 3.0] {
            let c = cache(theta, 1.7);
            let t = c.tau;
            assert!((c.abel_at_conjugate_endpoint().unwrap() - t / 2.0).norm() < 1e-10);
            assert!((c.abel_at_reflected_endpoint().unwrap() - 0.5).norm() < 1e-10);
            assert!((c.abel_at_infinity().unwrap() - (t - 1.0) / 4.0).norm() < 1e-10);
        }
    }

    #[test]
    fn table_entries() {
        let c = cache(PI / 6.0, 0.8);
        let [g, u, r] = c.integral_table().unwrap();
        assert!((g - 1.0).norm() < 1e-10);
        assert!((u - 1.0 / c.tau).norm() < 1e-10);
        assert!((r - (0.5 / c.tau - 0.5)).norm() < 1e-10);
    }

    #[test]
    fn u_is_imaginary_on_the_arc() {
        let c = cache(FRAC_PI_4, 1.0);
        for i in 1..=20 {
            let phi = c.theta + (PI - 2.0 * c.theta) * i as f64 / 21.0;
            let u = c.u_function(Complex64::from_polar(c.modulus, phi)).unwrap();
            assert!(u.re.abs() < 1e-10, "{phi}: {u}");
        }
    }

    #[test]
    fn real_part_bounds_on_upper_grid() {
        let c = cache(PI / 3.0, 1.0);
        let r = c.modulus;
        for i in 0..40 {
            for j in 0..40 {
                let z = Complex64::new(-2.0 * r + 4.0 * r * (i as f64 + 0.5) / 40.0, 2.0 * r * (j as f64 + 0.5) / 40.0);
                let g = c.g_function(z, Side::Off).unwrap().re;
                if c.in_upper_lens(z) {
                    assert!((0.5 - 1e-12..1.0).contains(&g), "{z}: {g}");
                } else {
                    assert!((-1e-12..=0.5 + 1e-12).contains(&g), "{z}: {g}");
                }
            }
        }
    }

    #[test]
    fn u_tilde_reflection() {
        let c = cache(FRAC_PI_4, 1.1);
        let probes = [
            Complex64::new(0.2, -0.3),
            Complex64::new(-0.5, -0.1),
            Complex64::new(0.1, -2.0),
            Complex64::new(1.5, -0.4),
            Complex64::new(-1.7, -1.2),
        ];
        for z in probes {
            let ut = c.u_tilde_function(z).unwrap();
            let u = c.u_function(-z).unwrap();
            let sign = if c.in_rectangle(z) { 1.0 } else { -1.0 };
            assert!((ut - (sign * 2.0 / c.tau - u)).norm() < 1e-10, "{z}: {ut} vs {}", sign * 2.0 / c.tau - u);
        }
    }
}
