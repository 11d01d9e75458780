//! Small dense linear algebra: LU with partial pivoting, a 1-norm condition
//! estimate, and Householder least squares.

#![allow(clippy::needless_range_loop)]

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization `P A = L U` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    norm_one: T,
}

/// Returned when a pivot vanishes exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularMatrix;

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self, SingularMatrix> {
        assert_eq!(a.rows, a.cols, "LU of non-square matrix");
        let n = a.rows;
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, max) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |acc, v| if v.1 > acc.1 { v } else { acc });
            if max <= T::zero() || !max.is_finite() {
                return Err(SingularMatrix);
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        // U^T z = b
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.lu[(j, i)] * z[j];
            }
            z[i] = s / self.lu[(i, i)];
        }
        // L^T y = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)] * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }

    /// Hager's estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::one();
        }
        let mut x = vec![T::one() / T::from_usize_lossy(n); n];
        let mut est = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm: T = y.iter().map(|v| v.abs()).sum();
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let s: Vec<T> = y
                .iter()
                .map(|&v| if v >= T::zero() { T::one() } else { -T::one() })
                .collect();
            let z = self.solve_transpose(&s);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.abs()))
                .fold((0, -T::one()), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: T = z.iter().zip(&x).map(|(&a, &b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        est * self.norm_one
    }
}

/// Least-squares solution of `A X = B` (A is `m x n`, `m >= n`, full column
/// rank) for several right-hand sides. Returns the solution columns and the
/// max-abs residual over all entries.
pub fn least_squares<T: Scalar>(
    a: &Matrix<T>,
    rhs: &[Vec<T>],
) -> Result<(Vec<Vec<T>>, T), SingularMatrix> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "least squares needs at least as many rows as columns");
    let mut r = a.clone();
    let mut bs: Vec<Vec<T>> = rhs.to_vec();
    let scale = a.norm_inf().max(T::min_positive_value());
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)].powi(2)).sum::<T>().sqrt();
        if norm <= T::epsilon() * scale {
            return Err(SingularMatrix);
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|x| x.powi(2)).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * r[(k + t, j)]).sum();
            let f = two * dot / vnorm2;
            for (t, &vi) in v.iter().enumerate() {
                r[(k + t, j)] -= f * vi;
            }
        }
        for b in bs.iter_mut() {
            let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * b[k + t]).sum();
            let f = two * dot / vnorm2;
            for (t, &vi) in v.iter().enumerate() {
                b[k + t] -= f * vi;
            }
        }
    }
    let mut sols = Vec::with_capacity(bs.len());
    for b in &bs {
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= r[(i, j)] * x[j];
            }
            x[i] = s / r[(i, i)];
        }
        sols.push(x);
    }
    let mut residual = T::zero();
    for (x, b) in sols.iter().zip(rhs) {
        let ax = a.mul_vec(x);
        for (p, q) in ax.iter().zip(b) {
            residual = residual.max((*p - *q).abs());
        }
    }
    Ok((sols, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = Matrix::<f64>::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[3.0, 2.0, 4.0]);
        for (got, want) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let xt = lu.solve_transpose(&[4.0, 3.0, 2.0]);
        let back: Vec<f64> = (0..3).map(|j| (0..3).map(|i| a[(i, j)] * xt[i]).sum()).collect();
        for (got, want) in back.iter().zip([4.0, 3.0, 2.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(Lu::factor(&a).is_err());
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let a = Matrix::<f64>::from_rows(&[vec![1e-3, 0.0], vec![0.0, 10.0]]);
        let c = Lu::factor(&a).unwrap().condition_estimate();
        assert!((c - 1e4).abs() < 1e-6);
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let a = Matrix::from_rows(&xs.iter().map(|&x| vec![1.0, x]).collect::<Vec<_>>());
        let b: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let (sol, res) = least_squares(&a, &[b]).unwrap();
        assert!((sol[0][0] - 2.0).abs() < 1e-13 && (sol[0][1] + 0.5).abs() < 1e-13);
        assert!(res < 1e-13);
    }
}
