//! Dense row-major tensors and the strided matrix views used by the layers.

use crate::error::{shape_err, Result};

/// Row-major array of `f64` with an explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(shape_err("Tensor::from_vec", &[len], &[data.len()]));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    /// Rows of a matrix; a 1-D tensor counts as a single row.
    pub fn rows(&self) -> usize {
        match self.shape.len() {
            0 => 0,
            1 => 1,
            _ => self.shape[..self.shape.len() - 1].iter().product(),
        }
    }

    pub fn cols(&self) -> usize {
        self.shape.last().copied().unwrap_or(0)
    }

    pub(crate) fn view(&self) -> View<'_> {
        View::new(&self.data, self.rows(), self.cols())
    }
}

/// Borrowed matrix with arbitrary row/column strides, so transposes and
/// "every W-th row" selections cost nothing.
#[derive(Debug, Clone, Copy)]
pub(crate) struct View<'a> {
    data: &'a [f64],
    pub rows: usize,
    pub cols: usize,
    row_stride: usize,
    col_stride: usize,
}

impl<'a> View<'a> {
    pub fn new(data: &'a [f64], rows: usize, cols: usize) -> Self {
        Self::strided(data, rows, cols, cols)
    }

    pub fn strided(data: &'a [f64], rows: usize, cols: usize, row_stride: usize) -> Self {
        let v = Self {
            data,
            rows,
            cols,
            row_stride,
            col_stride: 1,
        };
        v.check();
        v
    }

    pub fn t(self) -> Self {
        Self {
            data: self.data,
            rows: self.cols,
            cols: self.rows,
            row_stride: self.col_stride,
            col_stride: self.row_stride,
        }
    }

    fn check(&self) {
        if self.rows > 0 && self.cols > 0 {
            let last = (self.rows - 1) * self.row_stride + (self.cols - 1) * self.col_stride;
            assert!(last < self.data.len(), "view exceeds its backing slice");
        }
    }

    #[cfg(test)]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.row_stride + c * self.col_stride]
    }
}

/// `out = a · b` (or `out += a · b` when `accumulate`), with `out` a dense
/// row-major `a.rows × b.cols` buffer.
pub(crate) fn matmul_into(a: View<'_>, b: View<'_>, out: &mut [f64], accumulate: bool) {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    assert_eq!(out.len(), a.rows * b.cols, "output buffer has wrong size");
    let beta = if accumulate { 1.0 } else { 0.0 };
    if a.rows == 0 || b.cols == 0 {
        return;
    }
    if a.cols == 0 {
        if !accumulate {
            out.iter_mut().for_each(|v| *v = 0.0);
        }
        return;
    }
    // SAFETY: `View::check` guarantees every strided index of `a` and `b`
    // stays inside its slice, and `out` is exactly rows × cols.
    unsafe {
        matrixmultiply::dgemm(
            a.rows,
            a.cols,
            b.cols,
            1.0,
            a.data.as_ptr(),
            a.row_stride as isize,
            a.col_stride as isize,
            b.data.as_ptr(),
            b.row_stride as isize,
            b.col_stride as isize,
            beta,
            out.as_mut_ptr(),
            b.cols as isize,
            1,
        );
    }
}

/// Adds the column sums of a `rows × cols` buffer into `acc`.
pub(crate) fn add_column_sums(src: &[f64], cols: usize, acc: &mut [f64]) {
    debug_assert_eq!(acc.len(), cols);
    for row in src.chunks_exact(cols) {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: View<'_>, b: View<'_>) -> Vec<f64> {
        let mut out = vec![0.0; a.rows * b.cols];
        for i in 0..a.rows {
            for j in 0..b.cols {
                out[i * b.cols + j] = (0..a.cols).map(|k| a.get(i, k) * b.get(k, j)).sum();
            }
        }
        out
    }

    #[test]
    fn matmul_matches_naive_with_transpose_and_stride() {
        let a: Vec<f64> = (0..24).map(|v| v as f64 * 0.5 - 3.0).collect();
        let b: Vec<f64> = (0..12).map(|v| (v as f64).sin()).collect();
        // every other row of a 6x4 matrix
        let av = View::strided(&a[4..], 2, 4, 8);
        let bv = View::new(&b, 3, 4).t();
        let mut out = vec![0.0; 2 * 3];
        matmul_into(av, bv, &mut out, false);
        let expect = naive(av, bv);
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-12);
        }
        matmul_into(av, bv, &mut out, true);
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - 2.0 * y).abs() < 1e-12);
        }
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 5]).is_err());
        let t = Tensor::from_vec(&[2, 3], vec![1.0; 6]).unwrap();
        assert_eq!((t.rows(), t.cols()), (2, 3));
    }
}
