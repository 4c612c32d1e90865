//! Small dense complex linear algebra.
//!
//! The determinant and square solves used by the Padé engine are a
//! hand-written row-pivoted LU so the Hankel test sees exactly the
//! factorization it reports. Least squares and eigenvalues go through
//! nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{PadeError, Result};
use crate::series::Complex;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m.data[r * n + c] = f(r, c);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex {
        self.data[r * self.n + c]
    }

    pub fn rows(&self) -> Vec<Vec<Complex>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// Product of the row 2-norms, the Hadamard bound on `|det|`.
    pub fn row_norm_product(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| self.get(r, c).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .product()
    }

    pub fn lu(&self) -> LuFactors {
        LuFactors::new(self)
    }

    pub fn determinant(&self) -> Complex {
        self.lu().determinant()
    }
}

/// `P A = L U` with partial (row) pivoting; `L` has a unit diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex>,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactors {
    fn new(a: &SquareMatrix) -> Self {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .unwrap_or(k);
            if pivot_row != k {
                for c in 0..n {
                    lu.swap(k * n + c, pivot_row * n + c);
                }
                perm.swap(k, pivot_row);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            if pivot == Complex::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for c in k + 1..n {
                    let upper = lu[k * n + c];
                    lu[i * n + c] -= factor * upper;
                }
            }
        }
        Self { n, lu, perm, swaps }
    }

    pub fn determinant(&self) -> Complex {
        let diag: Complex = (0..self.n).map(|k| self.lu[k * self.n + k]).product();
        if self.swaps % 2 == 1 {
            -diag
        } else {
            diag
        }
    }

    /// Solves `A x = b`; fails on an exactly zero pivot.
    pub fn solve(&self, b: &[Complex]) -> Result<Vec<Complex>> {
        let n = self.n;
        if b.len() != n {
            return Err(PadeError::Numerical(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let mut y: Vec<Complex> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                let yk = y[k];
                y[i] -= l * yk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                let yk = y[k];
                y[i] -= u * yk;
            }
            let pivot = self.lu[i * n + i];
            if pivot == Complex::new(0.0, 0.0) {
                return Err(PadeError::Numerical("zero pivot in triangular solve".into()));
            }
            y[i] /= pivot;
        }
        Ok(y)
    }
}

/// Minimum-norm least-squares solution of `A x ≈ b` (row-major `a`,
/// `cols` columns) via SVD, discarding singular values below
/// `rcond * sigma_max`.
pub fn least_squares(a: &[Complex], cols: usize, b: &[Complex], rcond: f64) -> Result<Vec<Complex>> {
    let rows = b.len();
    if cols == 0 || rows == 0 || a.len() != rows * cols {
        return Err(PadeError::Numerical("malformed least-squares system".into()));
    }
    let m = DMatrix::from_row_slice(rows, cols, a);
    let rhs = DVector::from_column_slice(b);
    let svd = m
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| PadeError::Numerical("SVD did not converge".into()))?;
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(&rhs, rcond * sigma_max)
        .map_err(|e| PadeError::Numerical(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

/// Eigenvalues of a complex square matrix through its complex Schur form.
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex>> {
    let n = m.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dm = DMatrix::from_row_slice(n, n, &m.data);
    let schur = dm
        .try_schur(f64::EPSILON, 0)
        .ok_or_else(|| PadeError::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}
