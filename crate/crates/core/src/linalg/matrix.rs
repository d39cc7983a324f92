//! Dense complex matrices, row-major.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix with entries stored in row-major order.
///
/// All constructors reject non-finite entries; every downstream norm and
/// decomposition relies on that.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Fails on shape mismatch or non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::BadShape {
                context: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    entries.len()
                ),
            });
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { position: i });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Convenience constructor from real row slices (mostly for tests).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must match");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius distance to the adjoint; zero for hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Replace by the hermitian part (m + m*)/2.
    pub fn hermitize(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Copy `block` into self with top-left corner at (row, col).
    pub fn set_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = ComplexMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::NonFinite { position: 0 })));
    }

    #[test]
    fn rejects_bad_shape() {
        let err = ComplexMatrix::new(2, 2, vec![Complex64::ZERO; 3]);
        assert!(matches!(err, Err(Error::BadShape { .. })));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::new(
            1,
            2,
            vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, -4.0)],
        )
        .unwrap();
        let a = m.adjoint();
        assert_eq!(a[(0, 0)], Complex64::new(1.0, -2.0));
        assert_eq!(a[(1, 0)], Complex64::new(3.0, 4.0));
    }

    #[test]
    fn mul_matches_hand_product() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[5.0, 6.0], &[7.0, 8.0]]);
        let c = a.mul(&b);
        assert_eq!(c[(0, 0)].re, 19.0);
        assert_eq!(c[(0, 1)].re, 22.0);
        assert_eq!(c[(1, 0)].re, 43.0);
        assert_eq!(c[(1, 1)].re, 50.0);
    }

    #[test]
    fn hermitian_deviation_detects_skew() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 3.0]]);
        assert_eq!(h.hermitian_deviation(), 0.0);
        let s = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[-2.0, 3.0]]);
        assert!(s.hermitian_deviation() > 1.0);
    }
}
