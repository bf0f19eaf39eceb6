//! Minimal dense complex matrix kernel: multiply, conjugate transpose,
//! inverse, trace. Everything the rest of the crate needs and nothing more —
//! the largest matrices inverted here are K×K with K ≤ 32, so Gaussian
//! elimination with partial pivoting beats pulling in a decomposition
//! library.
//!
//! All arithmetic is `Complex64` (two f64s). Storage is row-major.

use num_complex::Complex64;
use thiserror::Error;

/// Relative pivot threshold below which elimination reports a singular matrix.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left_rows}x{left_cols} incompatible with {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular: pivot magnitude {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix dimensions must be at least 1x1, got {rows}x{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {actual}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty { rows, cols });
        }
        Ok(Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        })
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        Ok(m)
    }

    /// Build from a flat row-major entry vector. Rejects NaN/Inf entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::BadEntryCount {
                rows,
                cols,
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested row slices.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::BadEntryCount {
                rows: r,
                cols: c,
                expected: r * c,
                actual: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::from_vec(r, c, rows.concat())
    }

    /// Build entry-wise from a function of (row, col). Rejects non-finite
    /// entries.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.saturating_mul(cols));
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[Complex64] {
        assert!(i < self.rows, "row index out of bounds");
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied into a new vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        assert!(j < self.cols, "column index out of bounds");
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Standard complex matrix product.
    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMatrix {
        let mut out = CMatrix {
            rows: self.cols,
            cols: self.rows,
            data: vec![Complex64::ZERO; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// A pivot smaller than [`SINGULAR_PIVOT_RTOL`] times the largest entry
    /// magnitude of the input reports [`LinalgError::Singular`].
    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let threshold = SINGULAR_PIVOT_RTOL * scale;

        let mut a = self.clone();
        let mut inv = CMatrix::identity(n)?;
        for col in 0..n {
            // partial pivot: largest magnitude in this column at or below the diagonal
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a.data[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= threshold {
                return Err(LinalgError::Singular {
                    pivot: pivot_mag,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot_inv = Complex64::ONE / a.data[col * n + col];
            for j in 0..n {
                a.data[col * n + j] *= pivot_inv;
                inv.data[col * n + j] *= pivot_inv;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.data[row * n + col];
                if factor == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let p = a.data[col * n + j];
                    let q = inv.data[col * n + j];
                    a.data[row * n + j] -= factor * p;
                    inv.data[row * n + j] -= factor * q;
                }
            }
        }
        Ok(inv)
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Result<Complex64, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.data[i * self.cols + i]).sum())
    }

    /// Entry-wise scaling by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise absolute difference to another matrix of the same
    /// shape. Panics on shape mismatch (test helper).
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
