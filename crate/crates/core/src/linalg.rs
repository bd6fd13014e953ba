//! Small dense complex linear algebra on top of `nalgebra`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or(Error::SingularMatrix)
}

/// `½(M + M*)`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|x| x.conj())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::NAN)
}

/// Cholesky test on the Hermitian part. `nalgebra::Cholesky` takes complex square roots of
/// negative pivots, so the pivots are checked here.
pub fn is_positive_definite(m: &CMatrix) -> bool {
    let a = hermitize(m);
    let n = a.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (a[(i, j)] - s) / djj;
        }
    }
    true
}

/// Largest entry modulus; NaN propagates.
pub fn max_abs(m: &CMatrix) -> f64 {
    max_abs_slice(m.as_slice())
}

pub fn max_abs_slice(xs: &[C64]) -> f64 {
    xs.iter().fold(0.0, |acc, x| {
        let a = x.norm();
        if a.is_nan() || acc.is_nan() {
            f64::NAN
        } else if a > acc {
            a
        } else {
            acc
        }
    })
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

pub fn max_abs_diff_slice(a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    max_abs_slice(&d)
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Dense `n×n×n` complex array indexed `(a, b, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![C64::new(0.0, 0.0); n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut t = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    t[(a, b, c)] = f(a, b, c);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_slice(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        max_abs_diff_slice(&self.data, &other.data)
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = C64;
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &C64 {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut C64 {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_hermitian_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!(is_positive_definite(&m));
    }

    #[test]
    fn indefinite_matrix_is_not_positive_definite() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(!is_positive_definite(&m));
        assert!((min_hermitian_eigenvalue(&m) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_abs_propagates_nan() {
        assert!(max_abs_slice(&[c(1.0, 0.0), c(f64::NAN, 0.0)]).is_nan());
    }

    #[test]
    fn tensor_indexing_is_row_major() {
        let t = Tensor3::from_fn(2, |a, b, c| C64::new((4 * a + 2 * b + c) as f64, 0.0));
        assert_eq!(t.as_slice()[5], t[(1, 0, 1)]);
    }
}
