use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use condensate_lab::exactsolver::{
    solve_grid, solve_pointwise_with, solve_residue_system, unimodularity_check, Assembly, Precision, SolverOptions,
};
use condensate_lab::field::FieldGrid;
use condensate_lab::scattering::{generate, CondensateSpec};

#[test]
fn determinant_is_one_for_fifty_poles() {
    let data = generate(&CondensateSpec::from_polar(1.0, FRAC_PI_4, 50), 0.0).unwrap();
    let probes =
        [Complex64::new(0.3, 2.0), Complex64::new(-1.5, 0.2), Complex64::new(2.0, -1.0), Complex64::new(0.0, -0.4)];
    for (x, t) in [(0.0, 0.0), (0.7, 0.3), (-1.2, -0.5)] {
        let deviation = unimodularity_check(&data, x, t, &probes).unwrap();
        assert!(deviation < 1e-8, "({x}, {t}): {deviation}");
    }
}

#[test]
fn mass_is_four_times_total_imaginary_part() {
    let data = generate(&CondensateSpec::uniform(1.0, 0.5, 3), 0.0).unwrap();
    let want = 4.0 * data.eigenvalues.iter().map(|l| l.im).sum::<f64>();
    let options = SolverOptions::default();
    for t in [0.0, 0.5] {
        let step = 0.01;
        let mass: f64 = (-2500..=2500)
            .map(|i| {
                let psi = solve_pointwise_with(&data, i as f64 * step, t, &options).unwrap().psi;
                psi.norm_sqr() * step
            })
            .sum();
        assert!((mass - want).abs() < 1e-6, "t = {t}: {mass} vs {want}");
    }
}

#[test]
fn grid_output_is_independent_of_workers() {
    let data = generate(&CondensateSpec::from_polar(1.0, 1.0, 80), 0.0).unwrap();
    let grid = FieldGrid::new(-1.5, 1.5, 31, vec![0.0, 0.4]).unwrap();
    let options = SolverOptions::default();
    let serial = solve_grid(&data, &grid, &options, 1);
    let parallel = solve_grid(&data, &grid, &options, 4);
    assert_eq!(serial.len(), grid.len());
    for (s, p) in serial.iter().zip(&parallel) {
        let (s, p) = (s.as_ref().unwrap(), p.as_ref().unwrap());
        assert_eq!((s.x.to_bits(), s.t.to_bits()), (p.x.to_bits(), p.t.to_bits()));
        assert_eq!((s.psi.re.to_bits(), s.psi.im.to_bits()), (p.psi.re.to_bits(), p.psi.im.to_bits()));
    }
}

#[test]
fn assemblies_and_precisions_agree() {
    let data = generate(&CondensateSpec::from_polar(1.0, 0.9, 40), 0.0).unwrap();
    for (x, t) in [(0.2, 0.0), (-0.8, 0.6)] {
        let base = solve_residue_system(&data, x, t, &SolverOptions::default()).unwrap();
        for options in [
            SolverOptions::default().with_assembly(Assembly::Full),
            SolverOptions::default().with_precision(Precision::DoubleDouble),
        ] {
            let other = solve_residue_system(&data, x, t, &options).unwrap();
            assert!((other.psi - base.psi).norm() < 1e-9, "{options:?}");
        }
        assert!(base.recovery_mismatch() < 1e-9);
    }
}
