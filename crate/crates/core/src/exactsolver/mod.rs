//! Exact reflectionless N-soliton solutions from the residue conditions.
//!
//! With C_j = c_j exp(2i(λ_j x + λ_j² t)) the sectionally meromorphic
//! solution has the form
//!
//! M₁₁(z) = 1 + Σ C_j α_j/(z − λ_j),   M₁₂(z) = −Σ C̄_k v_k/(z − λ̄_k),
//! M₂₁(z) = Σ C_j β_j/(z − λ_j),       M₂₂(z) = 1 − Σ C̄_k γ_k/(z − λ̄_k),
//!
//! and closing the residue conditions gives
//! `[[I, B], [−D, I]] (α, v; β, γ) = (0, 1; 1, 0)` with
//! B_jk = C̄_k/(λ_j − λ̄_k) and D_kl = C_l/(λ̄_k − λ_l).
//! Eliminating the second block gives the N×N system (I + BD).
//! The field is ψ = 2i lim z M₁₂ and, independently, conj ψ = 2i lim z M₂₁.

mod dd;
mod lu;

pub use dd::{ComplexDD, DoubleDouble};
pub use lu::{Field, Lu, Matrix, SingularPivot};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldGrid, FieldSample, Method};
use crate::scattering::ScatteringData;

/// Largest supported pole count.
pub const MAX_POLES: usize = 4096;

/// Default bound on |Re log C_j|; beyond it products of weights overflow.
pub const DEFAULT_EXPONENT_BUDGET: f64 = 150.0;

/// Weight spread (as a log) above which double-double is selected.
pub const COMPENSATED_SPREAD: f64 = 27.631_021_115_928_547; // ln 1e12

/// Relative disagreement between the two recovery formulas that triggers a
/// compensated retry in automatic mode.
const RECOVERY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("residue system is singular (pivot {pivot:.3e} at step {step})")]
    Singular { step: usize, pivot: f64 },
    #[error("poles {first} and {second} coincide")]
    CoincidentPoles { first: usize, second: usize },
    #[error("(x, t) = ({x}, {t}) is outside the exponent window: |log C| = {exponent:.1} exceeds {budget}")]
    OutOfWindow { x: f64, t: f64, exponent: f64, budget: f64 },
    #[error("{count} poles exceed the solver cap of {MAX_POLES}")]
    TooLarge { count: usize },
    #[error("solution is not finite")]
    NonFinite,
}

impl From<SingularPivot> for SolverError {
    fn from(p: SingularPivot) -> Self {
        Self::Singular { step: p.step, pivot: p.magnitude }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assembly {
    /// N×N system in the second-column unknowns.
    #[default]
    Reduced,
    /// 2N×2N block system, kept for cross-validation.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Double, switching to double-double for wide weight spreads or when
    /// the two recovery formulas disagree.
    #[default]
    Auto,
    Double,
    DoubleDouble,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub assembly: Assembly,
    pub precision: Precision,
    pub exponent_budget: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { assembly: Assembly::Reduced, precision: Precision::Auto, exponent_budget: DEFAULT_EXPONENT_BUDGET }
    }
}

impl SolverOptions {
    pub fn with_assembly(self, assembly: Assembly) -> Self {
        Self { assembly, ..self }
    }

    pub fn with_precision(self, precision: Precision) -> Self {
        Self { precision, ..self }
    }
}

/// Solved residue system at one (x, t).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub x: f64,
    pub t: f64,
    pub poles: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    alpha: Vec<Complex64>,
    v: Vec<Complex64>,
    beta: Vec<Complex64>,
    gamma: Vec<Complex64>,
    /// ψ from the 12 entry.
    pub psi: Complex64,
    /// ψ from the conjugated 21 entry.
    pub psi_conjugate_path: Complex64,
    /// 1-norm condition estimate of the equilibrated system.
    pub cond_estimate: f64,
    pub compensated: bool,
}

impl ExactSolution {
    /// M(z) as [[M11, M12], [M21, M22]].
    pub fn matrix_at(&self, z: Complex64) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let mut m = [[one, Complex64::default()], [Complex64::default(), one]];
        for (j, (&l, &c)) in self.poles.iter().zip(&self.weights).enumerate() {
            let upper = c / (z - l);
            let lower = c.conj() / (z - l.conj());
            m[0][0] += upper * self.alpha[j];
            m[1][0] += upper * self.beta[j];
            m[0][1] -= lower * self.v[j];
            m[1][1] -= lower * self.gamma[j];
        }
        m
    }

    /// Relative disagreement of the two recovery formulas.
    pub fn recovery_mismatch(&self) -> f64 {
        (self.psi - self.psi_conjugate_path).norm() / self.psi.norm().max(1.0)
    }

    pub fn sample(&self) -> FieldSample {
        FieldSample {
            x: self.x,
            t: self.t,
            psi: self.psi,
            method: Method::Exact,
            cond_estimate: Some(self.cond_estimate),
        }
    }
}

/// C_j(x, t) for every pole, with the largest |Re log C_j| and the spread.
fn weights(data: &ScatteringData, x: f64, t: f64, budget: f64) -> Result<(Vec<Complex64>, f64), SolverError> {
    let dt = t - data.time;
    let i2 = Complex64::new(0.0, 2.0);
    let logs: Vec<Complex64> = data.poles().map(|(l, c)| c.ln() + i2 * (l * x + l * l * dt)).collect();
    let (lo, hi) = logs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w.re), hi.max(w.re)));
    let exponent = lo.abs().max(hi.abs());
    if !logs.is_empty() && !(exponent <= budget) {
        return Err(SolverError::OutOfWindow { x, t, exponent, budget });
    }
    let spread = if logs.is_empty() { 0.0 } else { hi - lo };
    Ok((logs.into_iter().map(Complex64::exp).collect(), spread))
}

fn power_of_two_below(m: f64) -> f64 {
    if m > 0.0 && m.is_finite() {
        (-m.log2().round()).exp2()
    } else {
        1.0
    }
}

/// Row then column scaling by powers of two so every row and column has
/// maximum entry near one.
fn equilibrate<T: Field>(m: &mut Matrix<T>) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let rows: Vec<f64> =
        (0..n).map(|i| power_of_two_below((0..n).map(|j| m.get(i, j).magnitude()).fold(0.0, f64::max))).collect();
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..n {
            m.set(i, j, m.get(i, j).scale(r));
        }
    }
    let cols: Vec<f64> =
        (0..n).map(|j| power_of_two_below((0..n).map(|i| m.get(i, j).magnitude()).fold(0.0, f64::max))).collect();
    for i in 0..n {
        for (j, &c) in cols.iter().enumerate() {
            m.set(i, j, m.get(i, j).scale(c));
        }
    }
    (rows, cols)
}

/// Solve the equilibrated system for two right-hand sides.
fn solve_two<T: Field>(mut m: Matrix<T>, rhs: [Vec<T>; 2]) -> Result<([Vec<T>; 2], f64), SolverError> {
    let (rows, cols) = equilibrate(&mut m);
    let norm = m.norm_one();
    let lu = Lu::factor(m)?;
    let cond = norm * lu.inverse_norm_one();
    let solve = |b: &[T]| -> Vec<T> {
        let scaled: Vec<T> = b.iter().zip(&rows).map(|(&v, &r)| v.scale(r)).collect();
        lu.solve(&scaled).into_iter().zip(&cols).map(|(v, &c)| v.scale(c)).collect()
    };
    let [first, second] = rhs;
    Ok(([solve(&first), solve(&second)], cond))
}

struct Kernels<T> {
    b: Matrix<T>,
    d: Matrix<T>,
}

fn kernels<T: Field>(poles: &[Complex64], weights: &[Complex64]) -> Kernels<T> {
    let n = poles.len();
    let mut b = Matrix::zeros(n);
    let mut d = Matrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let cross = poles[j] - poles[k].conj();
            b.set(j, k, T::from_c64(weights[k].conj()) / T::from_c64(cross));
            d.set(j, k, T::from_c64(weights[k]) / T::from_c64(cross.conj()));
        }
    }
    Kernels { b, d }
}

struct Unknowns {
    alpha: Vec<Complex64>,
    v: Vec<Complex64>,
    beta: Vec<Complex64>,
    gamma: Vec<Complex64>,
    psi: Complex64,
    psi_conjugate_path: Complex64,
    cond: f64,
}

fn solve_in<T: Field>(poles: &[Complex64], weights: &[Complex64], assembly: Assembly) -> Result<Unknowns, SolverError> {
    let n = poles.len();
    let Kernels { b, d } = kernels::<T>(poles, weights);
    let ones = vec![T::one(); n];
    let zeros = vec![T::zero(); n];
    let (alpha, v, beta, gamma, cond) = match assembly {
        Assembly::Reduced => {
            let mut m = b.matmul(&d);
            for i in 0..n {
                m.set(i, i, m.get(i, i) + T::one());
            }
            let minus_b_ones: Vec<T> = b.matvec(&ones).into_iter().map(|x| -x).collect();
            let ([alpha, beta], cond) = solve_two(m, [minus_b_ones, ones.clone()])?;
            let v: Vec<T> = d.matvec(&alpha).into_iter().map(|x| x + T::one()).collect();
            let gamma = d.matvec(&beta);
            (alpha, v, beta, gamma, cond)
        }
        Assembly::Full => {
            let mut m = Matrix::identity(2 * n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, n + j, b.get(i, j));
                    m.set(n + i, j, -d.get(i, j));
                }
            }
            let first = [zeros.clone(), ones.clone()].concat();
            let second = [ones, zeros].concat();
            let ([x1, x2], cond) = solve_two(m, [first, second])?;
            let (alpha, v) = x1.split_at(n);
            let (beta, gamma) = x2.split_at(n);
            (alpha.to_vec(), v.to_vec(), beta.to_vec(), gamma.to_vec(), cond)
        }
    };
    let two_i = T::from_c64(Complex64::new(0.0, 2.0));
    let psi = weights.iter().zip(&v).fold(T::zero(), |acc, (&c, &vk)| acc - T::from_c64(c.conj()) * vk);
    let psi21 = weights.iter().zip(&beta).fold(T::zero(), |acc, (&c, &bj)| acc + T::from_c64(c) * bj);
    let down = |xs: Vec<T>| xs.into_iter().map(Field::to_c64).collect::<Vec<_>>();
    Ok(Unknowns {
        psi: (two_i * psi).to_c64(),
        psi_conjugate_path: (two_i * psi21).to_c64().conj(),
        alpha: down(alpha),
        v: down(v),
        beta: down(beta),
        gamma: down(gamma),
        cond,
    })
}

fn check_poles(poles: &[Complex64]) -> Result<(), SolverError> {
    if poles.len() > MAX_POLES {
        return Err(SolverError::TooLarge { count: poles.len() });
    }
    let scale = poles.iter().fold(1.0_f64, |m, p| m.max(p.norm()));
    for (i, p) in poles.iter().enumerate() {
        for (j, q) in poles.iter().enumerate().skip(i + 1) {
            if (p - q).norm() <= 1e-14 * scale {
                return Err(SolverError::CoincidentPoles { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Full solution object at one (x, t).
pub fn solve_residue_system(
    data: &ScatteringData,
    x: f64,
    t: f64,
    options: &SolverOptions,
) -> Result<ExactSolution, SolverError> {
    let poles: Vec<Complex64> = data.poles().map(|(l, _)| l).collect();
    check_poles(&poles)?;
    let (weights, spread) = weights(data, x, t, options.exponent_budget)?;
    let compensated_first = match options.precision {
        Precision::Double => false,
        Precision::DoubleDouble => true,
        Precision::Auto => spread > COMPENSATED_SPREAD,
    };
    let run = |compensated: bool| {
        if compensated {
            solve_in::<ComplexDD>(&poles, &weights, options.assembly)
        } else {
            solve_in::<Complex64>(&poles, &weights, options.assembly)
        }
    };
    let mut compensated = compensated_first;
    let mut unknowns = run(compensated)?;
    let mismatch = (unknowns.psi - unknowns.psi_conjugate_path).norm() / unknowns.psi.norm().max(1.0);
    if options.precision == Precision::Auto && !compensated && !(mismatch <= RECOVERY_TOLERANCE) {
        unknowns = run(true)?;
        compensated = true;
    }
    if !(unknowns.psi.re.is_finite() && unknowns.psi.im.is_finite()) {
        return Err(SolverError::NonFinite);
    }
    Ok(ExactSolution {
        x,
        t,
        poles,
        weights,
        alpha: unknowns.alpha,
        v: unknowns.v,
        beta: unknowns.beta,
        gamma: unknowns.gamma,
        psi: unknowns.psi,
        psi_conjugate_path: unknowns.psi_conjugate_path,
        cond_estimate: unknowns.cond,
        compensated,
    })
}

/// ψ_N(x, t) with its condition estimate.
pub fn solve_pointwise(data: &ScatteringData, x: f64, t: f64) -> Result<FieldSample, SolverError> {
    solve_pointwise_with(data, x, t, &SolverOptions::default())
}

pub fn solve_pointwise_with(
    data: &ScatteringData,
    x: f64,
    t: f64,
    options: &SolverOptions,
) -> Result<FieldSample, SolverError> {
    solve_residue_system(data, x, t, options).map(|s| s.sample())
}

/// A grid point whose solve failed.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at (x, t) = ({x}, {t}): {error}")]
pub struct FailedSample {
    pub x: f64,
    pub t: f64,
    pub error: SolverError,
}

pub type GridOutcome = Result<FieldSample, FailedSample>;

/// Solve every grid point, t outer and x inner. Each point is independent,
/// so the output is identical for any worker count.
pub fn solve_grid(
    data: &ScatteringData,
    grid: &FieldGrid,
    options: &SolverOptions,
    workers: usize,
) -> Vec<GridOutcome> {
    let points = grid.points();
    let solve =
        |&(x, t): &(f64, f64)| solve_pointwise_with(data, x, t, options).map_err(|error| FailedSample { x, t, error });
    if workers <= 1 {
        return points.iter().map(solve).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(solve).collect()),
        Err(_) => points.iter().map(solve).collect(),
    }
}

/// max over probes of |det M(z) − 1|.
pub fn unimodularity_check(data: &ScatteringData, x: f64, t: f64, probes: &[Complex64]) -> Result<f64, SolverError> {
    let solution = solve_residue_system(data, x, t, &SolverOptions::default())?;
    Ok(probes
        .iter()
        .map(|&z| {
            let m = solution.matrix_at(z);
            (m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0).norm()
        })
        .fold(0.0, f64::max))
}

/// Pole and norming constant of the single soliton
/// 2η sech(2η(x + 2ξt − x₀)) exp(−2i(ξx + (ξ² − η²)t) − iφ).
pub fn single_soliton_data(xi: f64, eta: f64, x0: f64, phase: f64) -> ScatteringData {
    let lambda = Complex64::new(xi, eta);
    let modulus = 2.0 * eta * (2.0 * eta * x0).exp();
    let norming = Complex64::from_polar(modulus, phase - std::f64::consts::FRAC_PI_2);
    ScatteringData { a: 0.0, b: 0.0, n: 1, eigenvalues: vec![lambda], norming: vec![norming], tracer: None, time: 0.0 }
}

/// Closed-form single soliton matching [`single_soliton_data`].
pub fn single_soliton(xi: f64, eta: f64, x0: f64, phase: f64, x: f64, t: f64) -> Complex64 {
    let envelope = 2.0 * eta / (2.0 * eta * (x + 2.0 * xi * t - x0)).cosh();
    envelope * Complex64::new(0.0, -2.0 * (xi * x + (xi * xi - eta * eta) * t) - phase).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{generate, CondensateSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_data_gives_zero_field() {
        let d = generate(&CondensateSpec::uniform(1.0, 1.0, 0), 0.0).unwrap();
        let s = solve_pointwise(&d, 0.3, 0.1).unwrap();
        assert_eq!(s.psi, c(0.0, 0.0));
        assert_eq!(unimodularity_check(&d, 0.0, 0.0, &[c(1.0, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn single_soliton_matches_closed_form() {
        let (xi, eta, x0, phase) = (0.3, 0.7, 0.4, 1.1);
        let d = single_soliton_data(xi, eta, x0, phase);
        for &t in &[0.0, 0.5] {
            for i in 0..=30 {
                let x = -3.0 + 0.2 * i as f64;
                let got = solve_pointwise(&d, x, t).unwrap().psi;
                let want = single_soliton(xi, eta, x0, phase, x, t);
                assert!((got - want).norm() < 1e-12, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn assemblies_and_precisions_agree() {
        let d = generate(&CondensateSpec::uniform(0.8, 0.6, 12), 0.0).unwrap();
        let base = solve_residue_system(&d, 0.4, 0.2, &SolverOptions::default()).unwrap();
        for assembly in [Assembly::Reduced, Assembly::Full] {
            for precision in [Precision::Double, Precision::DoubleDouble] {
                let o = SolverOptions::default().with_assembly(assembly).with_precision(precision);
                let s = solve_residue_system(&d, 0.4, 0.2, &o).unwrap();
                assert!((s.psi - base.psi).norm() < 1e-10, "{assembly:?} {precision:?}");
            }
        }
        assert!(base.recovery_mismatch() < 1e-10);
    }

    #[test]
    fn determinant_is_one() {
        let d = single_soliton_data(0.2, 0.5, 0.0, 0.0);
        assert!(unimodularity_check(&d, 0.3, 0.1, &[c(5.0, 5.0)]).unwrap() < 1e-12);
    }

    #[test]
    fn out_of_window_is_an_error() {
        let d = generate(&CondensateSpec::uniform(1.0, 1.0, 4), 0.0).unwrap();
        assert!(matches!(solve_pointwise(&d, 500.0, 0.0), Err(SolverError::OutOfWindow { .. })));
    }

    #[test]
    fn coincident_poles_are_rejected() {
        let mut d = single_soliton_data(0.2, 0.5, 0.0, 0.0);
        d.eigenvalues.push(d.eigenvalues[0]);
        d.norming.push(d.norming[0]);
        assert!(matches!(solve_pointwise(&d, 0.0, 0.0), Err(SolverError::CoincidentPoles { .. })));
    }
}
