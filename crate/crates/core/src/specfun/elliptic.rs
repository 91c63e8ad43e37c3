use std::f64::consts::PI;

use super::SpecfunError;

const AGM_MAX_ITER: usize = 64;

fn check_modulus(k: f64) -> Result<(), SpecfunError> {
    if !(0.0..1.0).contains(&k) {
        return Err(SpecfunError::Modulus(k));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind K(k), modulus convention.
///
/// ```text
/// K(k) = ∫₀^{π/2} dφ / sqrt(1 - k² sin² φ) = π / (2 agm(1, sqrt(1 - k²)))
/// ```
pub fn ellip_k(k: f64) -> Result<f64, SpecfunError> {
    check_modulus(k)?;
    let mut a = 1.0_f64;
    let mut g = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - g).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    Ok(PI / (2.0 * a))
}

/// Jacobi sn, cn, dn by the descending AGM scale (A&S 16.4).
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64), SpecfunError> {
    check_modulus(k)?;
    let m = k * k;
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    // sn and cn have period 4K; reducing first keeps 2^n a_n u moderate.
    let quarter = ellip_k(k)?;
    let u = u - 4.0 * quarter * (u / (4.0 * quarter)).round();

    let mut a = [0.0_f64; AGM_MAX_ITER + 1];
    let mut c = [0.0_f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = k;
    let mut n = 0;
    while c[n].abs() > f64::EPSILON && n < AGM_MAX_ITER {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// Jacobi sd(u; k) = sn/dn.
pub fn jacobi_sd(u: f64, k: f64) -> Result<f64, SpecfunError> {
    let (sn, _, dn) = jacobi_sn_cn_dn(u, k)?;
    Ok(sn / dn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(ellip_k(0.0).unwrap(), PI / 2.0);
    }

    #[test]
    fn k_matches_hypergeometric_series() {
        // K(k) = π/2 Σ [(2n)!/(2^{2n} n!²)]² k^{2n}
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let m = k * k;
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..400 {
            let r = (2 * n - 1) as f64 / (2 * n) as f64;
            term *= r * r * m;
            sum += term;
        }
        let series = PI / 2.0 * sum;
        let agm = ellip_k(k).unwrap();
        assert!((agm - series).abs() < 1e-13 * series);
        assert!((agm - 1.854_074_677_301_372).abs() < 1e-14);
    }

    #[test]
    fn k_rejects_bad_modulus() {
        assert!(ellip_k(1.0).is_err());
        assert!(ellip_k(-0.1).is_err());
        assert!(jacobi_sd(0.3, 1.2).is_err());
    }

    #[test]
    fn landen_identity() {
        let theta = PI / 3.0;
        let m = (theta / 2.0).tan().powi(2);
        let lhs = ellip_k((1.0 - m * m).sqrt()).unwrap();
        let rhs = 2.0 * (theta / 2.0).cos().powi(2) * ellip_k(theta.cos()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn sd_special_values() {
        assert_eq!(jacobi_sd(0.0, 0.4).unwrap(), 0.0);
        assert!((jacobi_sd(0.7, 0.0).unwrap() - 0.7_f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn sd_derivative_matches_finite_difference() {
        // d/du sd = cn / dn²
        let (u, k) = (0.5, 0.6);
        let (_, cn, dn) = jacobi_sn_cn_dn(u, k).unwrap();
        let h = 1e-5;
        let fd = (jacobi_sd(u + h, k).unwrap() - jacobi_sd(u - h, k).unwrap()) / (2.0 * h);
        assert!((fd - cn / (dn * dn)).abs() < 1e-7);
    }

    #[test]
    fn sn_cn_dn_identities() {
        for &k in &[0.2, 0.7, 0.95] {
            for i in 0..40 {
                let u = -7.0 + 0.37 * i as f64;
                let (sn, cn, dn) = jacobi_sn_cn_dn(u, k).unwrap();
                assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14);
                assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-14);
            }
        }
    }
}
