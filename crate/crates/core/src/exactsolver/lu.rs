//! Dense full-pivot LU, generic over the working precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::dd::ComplexDD;

/// Arithmetic needed by the factorization.
pub trait Field:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn conj(self) -> Self;
    /// Multiply by a real factor (exact for powers of two).
    fn scale(self, factor: f64) -> Self;
    /// |z|² to double precision, used for pivot search.
    fn abs_sqr(self) -> f64 {
        self.to_c64().norm_sqr()
    }
    /// |z| to double precision.
    fn magnitude(self) -> f64 {
        self.abs_sqr().sqrt()
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
}

impl Field for ComplexDD {
    fn zero() -> Self {
        ComplexDD::default()
    }
    fn one() -> Self {
        ComplexDD::from_c64(Complex64::new(1.0, 0.0))
    }
    fn from_c64(z: Complex64) -> Self {
        ComplexDD::from_c64(z)
    }
    fn to_c64(self) -> Complex64 {
        ComplexDD::to_c64(self)
    }
    fn conj(self) -> Self {
        ComplexDD::conj(self)
    }
    fn scale(self, factor: f64) -> Self {
        ComplexDD::scale(self, factor)
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// self · other.
    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(other_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j).magnitude()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// The pivot at `step` was (numerically) zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub step: usize,
    pub magnitude: f64,
}

/// P A Q = L U with unit lower L.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    row_swaps: Vec<usize>,
    col_swaps: Vec<usize>,
}

impl<T: Field> Lu<T> {
    pub fn factor(matrix: Matrix<T>) -> Result<Self, SingularPivot> {
        let n = matrix.n;
        let mut a = matrix.data;
        let mut row_swaps = vec![0; n];
        let mut col_swaps = vec![0; n];
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs_sqr()));
        for k in 0..n {
            let (mut p, mut q, mut best) = (k, k, -1.0);
            for i in k..n {
                for j in k..n {
                    let m = a[i * n + j].abs_sqr();
                    if m > best {
                        best = m;
                        p = i;
                        q = j;
                    }
                }
            }
            if !(best > scale * 1e-300) || !best.is_finite() {
                return Err(SingularPivot { step: k, magnitude: best.max(0.0).sqrt() });
            }
            row_swaps[k] = p;
            col_swaps[k] = q;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            if q != k {
                for i in 0..n {
                    a.swap(i * n + k, i * n + q);
                }
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / pivot;
                a[i * n + k] = l;
                let (upper, lower) = a.split_at_mut(i * n);
                let pivot_row = &upper[k * n + k + 1..k * n + n];
                for (x, &u) in lower[k + 1..n].iter_mut().zip(pivot_row) {
                    *x = *x - l * u;
                }
            }
        }
        Ok(Self { n, lu: a, row_swaps, col_swaps })
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.row_swaps[k]);
        }
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            y[i] = row.iter().zip(&y[..i]).fold(y[i], |s, (&l, &v)| s - l * v);
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = row.iter().zip(&y[i + 1..]).fold(y[i], |s, (&u, &v)| s - u * v);
            y[i] = s / self.lu[i * n + i];
        }
        for k in (0..n).rev() {
            y.swap(k, self.col_swaps[k]);
        }
        y
    }

    /// Solve Aᴴ x = b.
    pub fn solve_adjoint(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.col_swaps[k]);
        }
        // Uᴴ w = y
        for i in 0..n {
            let s = (0..i).fold(y[i], |s, j| s - self.lu[j * n + i].conj() * y[j]);
            y[i] = s / self.lu[i * n + i].conj();
        }
        // Lᴴ v = w
        for i in (0..n).rev() {
            y[i] = (i + 1..n).fold(y[i], |s, j| s - self.lu[j * n + i].conj() * y[j]);
        }
        for k in (0..n).rev() {
            y.swap(k, self.row_swaps[k]);
        }
        y
    }

    /// Hager–Higham estimate of ‖A⁻¹‖₁.
    pub fn inverse_norm_one(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![T::from_c64(Complex64::new(1.0 / n as f64, 0.0)); n];
        let mut estimate = 0.0;
        let mut last_index = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.magnitude()).sum::<f64>();
            let signs: Vec<T> = y
                .iter()
                .map(|v| {
                    let c = v.to_c64();
                    let m = c.norm();
                    T::from_c64(if m > 0.0 { c / m } else { Complex64::new(1.0, 0.0) })
                })
                .collect();
            let z = self.solve_adjoint(&signs);
            let (j, zmax) = z.iter().enumerate().map(|(i, v)| (i, v.magnitude())).fold((0, -1.0), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * *b).to_c64().re).sum();
            if zmax <= ztx || j == last_index {
                break;
            }
            last_index = j;
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> Matrix<Complex64> {
        let vals = [
            c(0.1, 0.0),
            c(2.0, 1.0),
            c(-1.0, 0.5),
            c(3.0, -1.0),
            c(0.0, 0.2),
            c(1.0, 1.0),
            c(0.5, 0.5),
            c(-2.0, 0.0),
            c(4.0, -3.0),
        ];
        Matrix { n: 3, data: vals.to_vec() }
    }

    #[test]
    fn solves_and_adjoint_solves() {
        let a = sample();
        let lu = Lu::factor(a.clone()).unwrap();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5)];
        let x = lu.solve(&b);
        let r = a.matvec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
        let mut ah = Matrix::<Complex64>::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                ah.set(i, j, a.get(j, i).conj());
            }
        }
        let y = lu.solve_adjoint(&b);
        let r = ah.matvec(&y);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn condition_estimate_matches_exact_for_small_matrix() {
        let a = sample();
        let lu = Lu::factor(a.clone()).unwrap();
        // exact ‖A⁻¹‖₁ from the explicit inverse
        let mut inv_norm: f64 = 0.0;
        for j in 0..3 {
            let mut e = vec![c(0.0, 0.0); 3];
            e[j] = c(1.0, 0.0);
            let col = lu.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.norm()).sum());
        }
        let est = lu.inverse_norm_one();
        assert!(est <= inv_norm * (1.0 + 1e-12));
        assert!(est >= 0.3 * inv_norm);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = Matrix { n: 2, data: vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)] };
        assert!(Lu::factor(m).is_err());
    }

    #[test]
    fn double_double_path_agrees() {
        let a = sample();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5)];
        let x = Lu::factor(a.clone()).unwrap().solve(&b);
        let add = Matrix { n: 3, data: a.data.iter().map(|&z| ComplexDD::from_c64(z)).collect() };
        let bdd: Vec<ComplexDD> = b.iter().map(|&z| ComplexDD::from_c64(z)).collect();
        let xdd = Lu::factor(add).unwrap().solve(&bdd);
        for (u, v) in x.iter().zip(&xdd) {
            assert!((u - v.to_c64()).norm() < 1e-13);
        }
    }
}
