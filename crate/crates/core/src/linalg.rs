//! Small dense linear algebra over [`Scalar`], enough for chart dimensions up to ~10.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Mat {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_columns(columns: &[Vec<S>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// `u vᵀ`
    pub fn outer(u: &[S], v: &[S]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Mat<S>) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc += self[(i, j)] * *vj;
                }
                acc
            })
            .collect()
    }

    /// `uᵀ A v`
    pub fn bilinear(&self, u: &[S], v: &[S]) -> S {
        dot(u, &self.matvec(v))
    }

    pub fn add(&self, rhs: &Mat<S>) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|a| a * s)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip_with(&self, rhs: &Mat<S>, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Primal parts.
    pub fn values(&self) -> Mat<f64> {
        self.map(|a| a.value())
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    /// Largest absolute primal entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.value().abs()))
    }

    /// LU factorisation with partial pivoting (pivots chosen on primal parts).
    /// Returns `None` when a pivot falls below `1e-13 · max|A|`.
    pub fn lu(&self) -> Option<Lu<S>> {
        assert_eq!(self.rows, self.cols, "LU of a non-square matrix");
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, a[(i, k)].value().abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= 1e-13 * scale {
                return None;
            }
            if pivot_row != k {
                for j in 0..n {
                    a.data.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let inv = a[(k, k)].recip();
            for i in k + 1..n {
                let factor = a[(i, k)] * inv;
                a[(i, k)] = factor;
                for j in k + 1..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        Some(Lu { factors: a, perm })
    }

    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        Some(self.lu()?.solve(b))
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let columns: Vec<Vec<S>> = (0..n)
            .map(|j| {
                let mut e = vec![S::zero(); n];
                e[j] = S::one();
                lu.solve(&e)
            })
            .collect();
        Some(Self::from_columns(&columns))
    }
}

impl Mat<f64> {
    pub fn lift<S: Scalar>(&self) -> Mat<S> {
        self.map(S::from_f64)
    }

    /// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi sweeps).
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let n = self.rows;
        let mut a = self.clone();
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[(i, i)]).fold(f64::INFINITY, f64::min)
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed LU factors; `perm[k]` is the original row placed at position `k`.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    factors: Mat<S>,
    perm: Vec<usize>,
}

impl<S: Scalar> Lu<S> {
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.factors.rows;
        let mut x: Vec<S> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            for k in 0..i {
                let lik = self.factors[(i, k)];
                let xk = x[k];
                x[i] -= lik * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let uik = self.factors[(i, k)];
                let xk = x[k];
                x[i] -= uik * xk;
            }
            x[i] = x[i] / self.factors[(i, i)];
        }
        x
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<S: Scalar>(a: &[S], s: S) -> Vec<S> {
    a.iter().map(|&x| x * s).collect()
}

/// `a + s·b`
pub fn axpy<S: Scalar>(a: &[S], s: S, b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn values<S: Scalar>(a: &[S]) -> Vec<f64> {
    a.iter().map(Scalar::value).collect()
}

pub fn lift<S: Scalar>(a: &[f64]) -> Vec<S> {
    a.iter().map(|&x| S::from_f64(x)).collect()
}

pub fn basis<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut e = vec![S::zero(); n];
    e[i] = S::one();
    e
}

/// Euclidean norm of the primal parts.
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Serialized as a list of rows.
impl Serialize for Mat<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (0..self.rows()).map(|i| self.row(i)).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        if rows.iter().any(|r| r.len() != rows.first().map_or(0, Vec::len)) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(Mat::from_rows(&rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_with_pivoting() {
        let a = Mat::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let x = [1.0, -2.0, 0.5];
        let b = a.matvec(&x);
        let solved = a.solve(&b).unwrap();
        for (s, e) in solved.iter().zip(x) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.lu().is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]);
        let prod = a.matmul(&a.inverse().unwrap());
        assert!(prod.sub(&Mat::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_smallest_eigenvalue() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((a.min_symmetric_eigenvalue() - 1.0).abs() < 1e-12);
    }
}
