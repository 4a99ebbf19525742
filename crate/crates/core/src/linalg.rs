//! Dense real matrices, partially pivoted LU, and a 2-norm condition
//! estimate by power and inverse iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QspError, Result};

/// Pivots smaller than this in magnitude count as singular.
pub const SINGULAR_PIVOT: f64 = 1e-300;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QspError::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(col) = columns.iter().find(|c| c.len() != rows) {
            return Err(QspError::LengthMismatch {
                expected: rows,
                actual: col.len(),
            });
        }
        Ok(Self::from_rows(columns.len(), rows, columns.concat())?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        // Blocked so that both the reads and the strided writes stay in cache.
        const BLOCK: usize = 32;
        let (rows, cols) = (self.rows, self.cols);
        let mut data = vec![0.0; rows * cols];
        for i0 in (0..rows).step_by(BLOCK) {
            for j0 in (0..cols).step_by(BLOCK) {
                for i in i0..(i0 + BLOCK).min(rows) {
                    let src = &self.data[i * cols + j0..i * cols + (j0 + BLOCK).min(cols)];
                    for (dj, &v) in src.iter().enumerate() {
                        data[(j0 + dj) * rows + i] = v;
                    }
                }
            }
        }
        Self {
            rows: cols,
            cols: rows,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ v`.
    pub fn mul_vec_transposed(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(
            v.len(),
            self.rows,
            "dimension mismatch in mul_vec_transposed"
        );
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖_F / ‖other‖_F`.
    pub fn relative_frobenius_error(&self, reference: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (reference.rows, reference.cols));
        let diff: f64 = self
            .data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        diff.sqrt() / reference.frobenius_norm()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` with unit lower-triangular `L`, stored packed.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: Matrix,
    /// Row `i` of `PA` is row `perm[i]` of `A`.
    perm: Vec<usize>,
}

impl LuFactorization {
    pub fn new(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(QspError::InvalidInput(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot >= SINGULAR_PIVOT) {
                return Err(QspError::SingularMatrix { column: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (top, bottom) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n..];
            let diag = pivot_row[k];
            for row in bottom.chunks_exact_mut(n) {
                let factor = row[k] / diag;
                row[k] = factor;
                if factor != 0.0 {
                    for (r, &p) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= factor * p;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_rhs(n, b)?;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_rhs(n, b)?;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ z = b, then Lᵀ y = z, then x = Pᵀ y.
        let mut z = b.to_vec();
        for i in 0..n {
            let zi = z[i] / self.lu[(i, i)];
            z[i] = zi;
            for (zj, u) in z[i + 1..].iter_mut().zip(&self.lu.row(i)[i + 1..]) {
                *zj -= u * zi;
            }
        }
        for i in (0..n).rev() {
            let yi = z[i];
            for (zj, l) in z[..i].iter_mut().zip(&self.lu.row(i)[..i]) {
                *zj -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Ok(x)
    }

    /// `(P, L, U)` unpacked, with `P` as a permutation matrix.
    pub fn unpack(&self) -> (Matrix, Matrix, Matrix) {
        let n = self.dim();
        let mut p = Matrix::zeros(n, n);
        let mut l = Matrix::identity(n);
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            p[(i, self.perm[i])] = 1.0;
            for j in 0..n {
                if j < i {
                    l[(i, j)] = self.lu[(i, j)];
                } else {
                    u[(i, j)] = self.lu[(i, j)];
                }
            }
        }
        (p, l, u)
    }
}

fn check_rhs(n: usize, b: &[f64]) -> Result<()> {
    if b.len() != n {
        return Err(QspError::LengthMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    Ok(())
}

pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    LuFactorization::new(a)?.solve(b)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Estimates `κ₂(A) = σ_max / σ_min`.
///
/// `σ_max` comes from power iteration on `AᵀA` and `σ_min` from inverse
/// iteration on `AᵀA` using one LU of `A`. A singular `A` gives `+∞`.
pub fn condition_estimate(a: &Matrix, iterations: usize, seed: u64) -> f64 {
    assert!(a.is_square(), "condition estimate needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return 1.0;
    }
    let lu = match LuFactorization::new(a) {
        Ok(lu) => lu,
        Err(_) => return f64::INFINITY,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let iterations = iterations.max(1);

    let mut v = start.clone();
    normalize(&mut v);
    for _ in 0..iterations {
        let w = a.mul_vec(&v);
        v = a.mul_vec_transposed(&w);
        if normalize(&mut v) == 0.0 {
            return f64::INFINITY;
        }
    }
    let sigma_max = norm2(&a.mul_vec(&v));

    let mut v = start;
    normalize(&mut v);
    for _ in 0..iterations {
        let y = match lu.solve_transpose(&v) {
            Ok(y) => y,
            Err(_) => return f64::INFINITY,
        };
        v = match lu.solve(&y) {
            Ok(z) => z,
            Err(_) => return f64::INFINITY,
        };
        let n = normalize(&mut v);
        if !n.is_finite() {
            return f64::INFINITY;
        }
    }
    let sigma_min = norm2(&a.mul_vec(&v));
    if sigma_min == 0.0 || !sigma_min.is_finite() {
        return f64::INFINITY;
    }
    sigma_max / sigma_min
}
