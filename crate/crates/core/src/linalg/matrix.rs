//! Dense matrix storage: a general rectangular matrix and a symmetric
//! square matrix whose constructor enforces (and then exactly restores)
//! symmetry.

use crate::error::{Error, Result};

/// Relative tolerance on `|m[i][j] - m[j][i]|` accepted by the symmetric
/// constructor, measured against `max(1, max |entry|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRect {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseRect {
    /// Builds a matrix from row-major data. Every entry must be finite and
    /// both dimensions positive.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::BadDataLength {
                len: data.len(),
                rows,
                cols,
            });
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite {
                context: "rectangular matrix",
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty);
        }
        let cols = rows[0].len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "row lengths",
                    left: cols,
                    right: r.len(),
                });
            }
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
    }

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
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> DenseRect {
        let mut out = DenseRect::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Plain triple-loop product `self · other`.
    pub fn matmul(&self, other: &DenseRect) -> Result<DenseRect> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = DenseRect::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let row = k * other.cols;
                let out_row = i * other.cols;
                for j in 0..other.cols {
                    out.data[out_row + j] += aik * other.data[row + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseRect) -> Result<DenseRect> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseRect) -> Result<DenseRect> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &DenseRect, f: impl Fn(f64, f64) -> f64) -> Result<DenseRect> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "entrywise combination",
                left: self.rows * self.cols,
                right: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(DenseRect {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: f64) -> DenseRect {
        DenseRect {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Matrix-vector product `self · x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = i * self.cols;
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.data[row + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Dense real symmetric matrix. Stored full, row-major; the constructor
/// checks the symmetry residual and then stores the exact symmetrization
/// `(m + mᵀ)/2`, so `get(i, j) == get(j, i)` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    size: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    /// Builds an `n × n` symmetric matrix from row-major data.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        let rect = DenseRect::new(n, n, data)?;
        Self::from_rect(&rect)
    }

    /// Validates symmetry of a square matrix and stores its symmetrization.
    pub fn from_rect(m: &DenseRect) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                context: "symmetric matrix",
                left: m.rows(),
                right: m.cols(),
            });
        }
        let n = m.rows();
        let tolerance = SYMMETRY_TOLERANCE * m.max_abs().max(1.0);
        let mut residual = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                residual = residual.max((m.get(i, j) - m.get(j, i)).abs());
            }
        }
        if residual > tolerance {
            return Err(Error::NotSymmetric {
                residual,
                tolerance,
            });
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = m.get(i, i);
            for j in (i + 1)..n {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self { size: n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rect(&DenseRect::from_rows(rows)?)
    }

    /// Builds an exactly symmetric matrix by evaluating `f(i, j)` only for
    /// `i ≤ j` and mirroring. The closure must return finite values.
    pub fn from_fn_symmetric(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let value = f(i, j);
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        context: "symmetric matrix entries",
                    });
                }
                data[i * n + j] = value;
                data[j * n + i] = value;
            }
        }
        Ok(Self { size: n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            size: n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut data = vec![0.0; n * n];
        for (i, &x) in entries.iter().enumerate() {
            data[i * n + i] = x;
        }
        Self { size: n, data }
    }

    /// Direct sum `diag(blocks…)`.
    pub fn block_diagonal(blocks: &[&DenseSymmetric]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut data = vec![0.0; n * n];
        let mut offset = 0;
        for b in blocks {
            let k = b.dim();
            for i in 0..k {
                for j in 0..k {
                    data[(offset + i) * n + (offset + j)] = b.get(i, j);
                }
            }
            offset += k;
        }
        Self { size: n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rect(&self) -> DenseRect {
        DenseRect {
            rows: self.size,
            cols: self.size,
            data: self.data.clone(),
        }
    }

    /// Entrywise sum; exact symmetry is preserved bit-for-bit.
    pub fn add(&self, other: &DenseSymmetric) -> Result<DenseSymmetric> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseSymmetric) -> Result<DenseSymmetric> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &DenseSymmetric,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseSymmetric> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                context: "symmetric combination",
                left: self.size,
                right: other.size,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(DenseSymmetric {
            size: self.size,
            data,
        })
    }

    pub fn scale(&self, factor: f64) -> DenseSymmetric {
        DenseSymmetric {
            size: self.size,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size, "vector length mismatch");
        let n = self.size;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = i * n;
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.data[row + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mx = self.apply(x);
        x.iter().zip(&mx).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}
