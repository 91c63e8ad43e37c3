use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use proptest::prelude::*;

use condensate_lab::asymptotics::AsymptoticCache;
use condensate_lab::cli::RunConfig;
use condensate_lab::exactsolver::{single_soliton, single_soliton_data, solve_pointwise};
use condensate_lab::experiments::Verdict;
use condensate_lab::numfmt::fmt17;
use condensate_lab::scattering::{galilean_boost, generate, sample_eigenvalues, CondensateSpec, DensitySpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_flag_is_the_tolerance_test(measured in -10.0..10.0f64, expected in -10.0..10.0f64, tol in 0.0..5.0f64) {
        let v = Verdict::new("p", measured, expected, tol);
        prop_assert_eq!(v.pass, (measured - expected).abs() <= tol);
    }

    #[test]
    fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn single_soliton_matches_closed_form(
        xi in -1.0..1.0f64, eta in 0.3..1.5f64, x0 in -1.0..1.0f64, phase in 0.0..std::f64::consts::TAU,
        x in -3.0..3.0f64, t in 0.0..1.0f64,
    ) {
        let got = solve_pointwise(&single_soliton_data(xi, eta, x0, phase), x, t).unwrap().psi;
        let want = single_soliton(xi, eta, x0, phase, x, t);
        prop_assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn boost_multiplies_by_plane_wave(v in -2.0..2.0f64, x in -2.0..2.0f64) {
        let data = generate(&CondensateSpec::from_polar(1.0, FRAC_PI_4, 12), 0.0).unwrap();
        let rest = solve_pointwise(&data, x, 0.0).unwrap().psi;
        let moved = solve_pointwise(&galilean_boost(&data, v), x, 0.0).unwrap().psi;
        prop_assert!((moved - rest * Complex64::new(0.0, v * x).exp()).norm() < 1e-9);
    }

    #[test]
    fn uniform_eigenvalues_are_ordered_and_symmetric(a in 0.2..2.0f64, b in 0.2..2.0f64, n in 1usize..60) {
        let ev = sample_eigenvalues(&CondensateSpec::uniform(a, b, n)).unwrap();
        prop_assert_eq!(ev.len(), n);
        prop_assert!(ev.iter().all(|z| z.im == b && z.re.abs() < a));
        prop_assert!(ev.windows(2).all(|w| w[0].re < w[1].re));
        for (lo, hi) in ev.iter().zip(ev.iter().rev()) {
            prop_assert!((lo.re + hi.re).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_density_follows_its_cdf(c1 in -0.5..0.5f64, n in 4usize..40) {
        let spec = CondensateSpec { density: DensitySpec::polynomial(vec![1.0, c1]), ..CondensateSpec::uniform(1.0, 0.8, n) };
        let density = spec.density().unwrap();
        let ev = sample_eigenvalues(&spec).unwrap();
        for (j, z) in ev.iter().enumerate() {
            let level = (2.0 * j as f64 + 1.0) / (2.0 * n as f64);
            prop_assert!((density.cdf(z.re) - level).abs() < 1e-10);
        }
    }

    #[test]
    fn theta_and_sd_forms_agree(theta in 0.3..1.3f64, modulus in 0.5..2.0f64, x in -3.0..3.0f64, t in -1.0..1.0f64, n in 2usize..5000) {
        let cache = AsymptoticCache::new(&CondensateSpec::from_polar(modulus, theta, 100)).unwrap();
        let sd = cache.psi_leading_order(x, t, n).unwrap();
        let th = cache.psi_theta_representation(x, t, n).unwrap();
        prop_assert!((sd - th).norm() < 1e-8, "{sd} vs {th}");
        // the leading-order modulus never exceeds 2a
        prop_assert!(sd.norm() <= 2.0 * cache.a() * (1.0 + 1e-12));
    }

    #[test]
    fn config_round_trip_is_a_fixed_point(
        a in 0.1..3.0f64, b in 0.1..3.0f64, n in 2usize..500,
        x_min in -5.0..0.0f64, width in 0.1..5.0f64, steps in 2usize..300,
    ) {
        let text = format!(
            r#"{{"command":"exact","a":{a},"b":{b},"N":{n},"grid":{{"xMin":{x_min},"xMax":{},"xSteps":{steps},"tValues":[0,0.5]}}}}"#,
            x_min + width
        );
        let config = RunConfig::parse(&text).unwrap();
        let once = config.to_json();
        let again = RunConfig::parse(&once).unwrap();
        prop_assert_eq!(&again, &config);
        prop_assert_eq!(again.to_json(), once);
    }
}
