//! Matrix-valued polynomials over `[0, 1]` with entries in `Complex<R>`.
//!
//! `R` is any numeric ring: `f64` for numerics, `Rational64` when identities
//! such as `(A^t)^t = A` must hold exactly.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::CMat;
use crate::scalar::Real;

/// Coefficient ring of the polynomial tables.
pub trait Ring: Clone + Num + Neg<Output = Self> + PartialEq + Debug {}

impl<R: Clone + Num + Neg<Output = R> + PartialEq + Debug> Ring for R {}

/// Integer `n` as an element of `R`.
pub fn int<R: Ring>(n: i64) -> R {
    let mut acc = R::zero();
    for _ in 0..n.unsigned_abs() {
        acc = acc + R::one();
    }
    if n < 0 {
        -acc
    } else {
        acc
    }
}

pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut out: i64 = 1;
    for i in 0..k {
        out = out * (n - i) as i64 / (i + 1) as i64;
    }
    out
}

fn czero<R: Ring>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

/// Dense `rows x cols` matrix of `Complex<R>`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<R>>,
}

impl<R: Ring> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(R::one(), R::zero());
        }
        m
    }

    pub fn scalar(n: usize, value: Complex<R>) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = value.clone();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<R>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re.is_zero() && z.im.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, k: &Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * k.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = czero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(f(&z.re), f(&z.im)))
                .collect(),
        }
    }
}

impl<R: Ring + ToPrimitive> Mat<R> {
    pub fn to_cmat<T: Real>(&self) -> CMat<T> {
        CMat::from_fn(self.rows, self.cols, |i, j| {
            let z = self.get(i, j);
            Complex::new(
                T::lit(z.re.to_f64().unwrap_or(f64::NAN)),
                T::lit(z.im.to_f64().unwrap_or(f64::NAN)),
            )
        })
    }
}

/// `sum_i c_i x^i` with matrix coefficients of a fixed shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatPoly<R> {
    pub rows: usize,
    pub cols: usize,
    /// Coefficient of `x^i` at index `i`.
    pub coeffs: Vec<Mat<R>>,
}

impl<R: Ring> MatPoly<R> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Mat<R>) -> Self {
        Self {
            rows: c.rows,
            cols: c.cols,
            coeffs: vec![c],
        }
        .trimmed()
    }

    pub fn from_coeffs(rows: usize, cols: usize, coeffs: Vec<Mat<R>>) -> Result<Self> {
        if coeffs.iter().any(|c| c.rows != rows || c.cols != cols) {
            return Err(LabError::Invalid("coefficient shape mismatch".into()));
        }
        Ok(Self { rows, cols, coeffs }.trimmed())
    }

    /// Scalar polynomial `sum c_i x^i` times the `n x n` identity.
    pub fn scalar(n: usize, coeffs: &[Complex<R>]) -> Self {
        Self {
            rows: n,
            cols: n,
            coeffs: coeffs.iter().map(|c| Mat::scalar(n, c.clone())).collect(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Complex::new(int(i as i64), R::zero())))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            coeffs,
        }
        .trimmed()
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = Mat::zeros(self.rows, self.cols);
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&z)
                    .add(other.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            coeffs,
        }
        .trimmed()
    }

    pub fn scale(&self, k: &Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
        }
        .trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.rows, other.cols);
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Mat::zeros(self.rows, other.cols); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self {
            rows: self.rows,
            cols: other.cols,
            coeffs,
        }
        .trimmed()
    }

    /// Entrywise conjugate transpose of every coefficient (`x` is real).
    pub fn adjoint(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(Mat::adjoint).collect(),
        }
    }

    /// Horner evaluation at a ring element.
    pub fn eval_exact(&self, x: &R) -> Mat<R> {
        let mut acc = Mat::zeros(self.rows, self.cols);
        let xc = Complex::new(x.clone(), R::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(&xc).add(c);
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S + Copy) -> MatPoly<S> {
        MatPoly {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| c.map(f)).collect(),
        }
        .trimmed()
    }
}

impl<R: Ring + ToPrimitive> MatPoly<R> {
    /// Horner evaluation in floating point.
    pub fn eval<T: Real>(&self, x: T) -> CMat<T> {
        let mut acc = CMat::zeros(self.rows, self.cols);
        let xc = Complex::new(x, T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * xc + c.to_cmat::<T>();
        }
        acc
    }

    pub fn to_real<T: Real + Ring>(&self) -> MatPoly<T> {
        self.map(|r| T::lit(r.to_f64().unwrap_or(f64::NAN)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn product_rule_exact() {
        // p = 1 + x/2, q = x^2 - 3 (as 1x1 complex polys with imaginary parts)
        let p = MatPoly::scalar(1, &[Complex::new(r(1, 1), r(0, 1)), Complex::new(r(1, 2), r(1, 3))]);
        let q = MatPoly::scalar(1, &[Complex::new(r(-3, 1), r(0, 1)), czero(), Complex::new(r(1, 1), r(0, 1))]);
        let lhs = p.mul(&q).derivative();
        let rhs = p.derivative().mul(&q).add(&p.mul(&q.derivative()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_agrees() {
        let p = MatPoly::scalar(2, &[Complex::new(1.0f64, 0.0), Complex::new(2.0, -1.0), Complex::new(0.5, 0.0)]);
        let v = p.eval(0.5f64);
        let expected = Complex::new(1.0 + 1.0 + 0.125, -0.5);
        assert!((v[(0, 0)] - expected).norm() < 1e-15);
        assert_eq!(v[(0, 1)], Complex::new(0.0, 0.0));
        assert_eq!(p.eval_exact(&0.5).get(1, 1).clone(), expected);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(int::<Rational64>(-4), r(-4, 1));
    }

    #[test]
    fn zero_is_trimmed() {
        let p = MatPoly::scalar(1, &[Complex::new(0.0f64, 0.0), Complex::new(0.0, 0.0)]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert!(p.derivative().is_zero());
    }
}
