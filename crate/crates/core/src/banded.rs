//! Banded LU factorization with partial pivoting.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialEq
    + std::fmt::Debug
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square matrix with `lower` sub- and `upper` super-diagonals.
///
/// Rows are stored with room for `lower` extra super-diagonals so that the
/// pivoted factorization can fill in without reallocation.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self { n, lower, upper, width, data: vec![T::zero(); n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        // row i keeps columns [i - lower, i + upper + lower]
        let off = j as isize - i as isize + self.lower as isize;
        if off < 0 || off as usize >= self.width || j >= self.n {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |k| self.data[k])
    }

    /// Panics when (i, j) lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let in_band = j + self.lower >= i && j <= i + self.upper;
        assert!(in_band, "entry ({i}, {j}) outside band ({}, {})", self.lower, self.upper);
        let k = self.slot(i, j).expect("in band");
        self.data[k] = value;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// In-place LU with row pivoting.
    pub fn factor(mut self) -> Result<BandedLu<T>> {
        let n = self.n;
        let mut piv = vec![0usize; n];
        let reach = self.upper + self.lower;
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).modulus();
            for i in k + 1..=last_row {
                let m = self.get(i, k).modulus();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            piv[k] = p;
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    self.put(k, j, b);
                    self.put(p, j, a);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                self.put(i, k, l);
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let akj = self.get(k, j);
                    if akj != T::zero() {
                        let v = self.get(i, j) - l * akj;
                        self.put(i, j, v);
                    }
                }
            }
        }
        Ok(BandedLu { m: self, piv })
    }

    fn put(&mut self, i: usize, j: usize, value: T) {
        if let Some(k) = self.slot(i, j) {
            self.data[k] = value;
        } else {
            debug_assert!(value == T::zero(), "fill outside storage at ({i}, {j})");
        }
    }
}

/// Factorization produced by [`BandedMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    m: BandedMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> BandedLu<T> {
    pub fn n(&self) -> usize {
        self.m.n
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.m.n;
        assert_eq!(b.len(), n);
        let lower = self.m.lower;
        let reach = self.m.upper + lower;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + lower).min(n - 1) {
                b[i] = b[i] - self.m.get(i, k) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s = s - self.m.get(k, j) * b[j];
            }
            b[k] = s / self.m.get(k, k);
        }
    }
}
