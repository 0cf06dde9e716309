//! Small dense complex linear algebra: scaled determinants, LU solves and
//! Householder least squares.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn row_norm(&self, i: usize) -> T {
        (0..self.cols).fold(T::zero(), |a, j| a.max(self[(i, j)].norm()))
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(C::zero(), |a, j| a + self[(i, j)] * x[j]))
            .collect()
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant together with its log-magnitude.
#[derive(Clone, Copy, Debug)]
pub struct Determinant<T: Real> {
    pub value: C<T>,
    pub log_abs: T,
    /// Product of the row norms of the input (the natural scale of `value`).
    pub log_row_scale: T,
}

/// Determinant by partial-pivot elimination after scaling each row to unit
/// max-norm. The row scales are tracked in log form so moderate overflow in
/// the raw product does not destroy the result.
pub fn determinant<T: Real>(a: &Matrix<T>) -> Determinant<T> {
    assert_eq!(a.rows, a.cols, "determinant of non-square matrix");
    let n = a.rows;
    if n == 0 {
        return Determinant { value: C::one(), log_abs: T::zero(), log_row_scale: T::zero() };
    }
    let mut m = a.clone();
    let mut log_scale = T::zero();
    for i in 0..n {
        let s = m.row_norm(i);
        if s.is_zero() {
            return Determinant {
                value: C::zero(),
                log_abs: T::neg_infinity(),
                log_row_scale: T::neg_infinity(),
            };
        }
        log_scale += s.ln();
        for j in 0..n {
            m[(i, j)] = m[(i, j)] / s;
        }
    }
    let mut phase = C::<T>::one();
    let mut log_abs = log_scale;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[(x, k)].norm().partial_cmp(&m[(y, k)].norm()).unwrap())
            .unwrap();
        let piv = m[(p, k)];
        if piv.is_zero() {
            return Determinant { value: C::zero(), log_abs: T::neg_infinity(), log_row_scale: log_scale };
        }
        if p != k {
            for j in 0..n {
                m.data.swap(p * n + j, k * n + j);
            }
            phase = -phase;
        }
        log_abs += piv.norm().ln();
        phase = phase * (piv / piv.norm());
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] = m[(i, j)] - f * t;
            }
        }
    }
    Determinant { value: phase * log_abs.exp(), log_abs, log_row_scale: log_scale }
}

/// Solve the square system `a x = b` by LU with partial pivoting.
pub fn solve<T: Real>(a: &Matrix<T>, b: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = (0..n).fold(T::zero(), |s, i| s.max(a.row_norm(i)));
    let tiny = T::epsilon() * scale * T::from_usize(n.max(1)).unwrap();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().partial_cmp(&m[(j, k)].norm()).unwrap())
            .unwrap();
        if m[(p, k)].norm() <= tiny {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                m.data.swap(p * n + j, k * n + j);
            }
            x.swap(p, k);
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] = m[(i, j)] - f * t;
            }
            let t = x[k];
            x[i] = x[i] - f * t;
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in k + 1..n {
            acc = acc - m[(k, j)] * x[j];
        }
        x[k] = acc / m[(k, k)];
    }
    Ok(x)
}

/// Least-squares solution of an `m x n` system with `m >= n`.
#[derive(Clone, Debug)]
pub struct LeastSquares<T: Real> {
    pub x: Vec<C<T>>,
    /// 2-norm of `a x - b`.
    pub residual: T,
    /// `min |R_ii| / max |R_ii|` of the column-scaled triangular factor.
    pub rcond: T,
}

/// Householder QR least squares with column equilibration.
///
/// Returns `Error::Singular` when the column-scaled triangular factor has a
/// diagonal entry below `rank_tol` relative to its largest one.
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &[C<T>], rank_tol: T) -> Result<LeastSquares<T>> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "least squares needs rows >= cols");
    assert_eq!(b.len(), m);
    if n == 0 {
        let residual = b.iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt();
        return Ok(LeastSquares { x: Vec::new(), residual, rcond: T::one() });
    }
    // column equilibration
    let col_scale: Vec<T> = (0..n)
        .map(|j| {
            let s = (0..m).fold(T::zero(), |s, i| s + a[(i, j)].norm_sqr()).sqrt();
            if s.is_zero() { T::one() } else { s }
        })
        .collect();
    let mut r = Matrix::from_fn(m, n, |i, j| a[(i, j)] / col_scale[j]);
    let mut qb = b.to_vec();
    for k in 0..n {
        let norm = (k..m).fold(T::zero(), |s, i| s + r[(i, k)].norm_sqr()).sqrt();
        if norm.is_zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.is_zero() { C::one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x - alpha e1
        let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        if vnorm2.is_zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot = v.iter().enumerate().fold(C::zero(), |s, (t, vi)| s + vi.conj() * r[(k + t, j)]);
            let f = dot * two / vnorm2;
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] = r[(k + t, j)] - f * vi;
            }
        }
        let dot = v.iter().enumerate().fold(C::zero(), |s, (t, vi)| s + vi.conj() * qb[k + t]);
        let f = dot * two / vnorm2;
        for (t, vi) in v.iter().enumerate() {
            qb[k + t] = qb[k + t] - f * vi;
        }
    }
    let diag: Vec<T> = (0..n).map(|k| r[(k, k)].norm()).collect();
    let dmax = diag.iter().fold(T::zero(), |a, &b| a.max(b));
    let dmin = diag.iter().fold(T::infinity(), |a, &b| a.min(b));
    let rcond = if dmax.is_zero() { T::zero() } else { dmin / dmax };
    if rcond <= rank_tol {
        return Err(Error::Singular);
    }
    let mut y = vec![C::zero(); n];
    for k in (0..n).rev() {
        let mut acc = qb[k];
        for j in k + 1..n {
            acc = acc - r[(k, j)] * y[j];
        }
        y[k] = acc / r[(k, k)];
    }
    let x: Vec<C<T>> = y.iter().zip(&col_scale).map(|(v, s)| v / cr(*s)).collect();
    let ax = a.mul_vec(&x);
    let residual = ax.iter().zip(b).fold(T::zero(), |s, (u, v)| s + (u - v).norm_sqr()).sqrt();
    Ok(LeastSquares { x, residual, rcond })
}
