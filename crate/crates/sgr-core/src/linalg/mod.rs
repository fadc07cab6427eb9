//! Sparse and dense linear algebra.
//!
//! The central type is [`SparseMatrix`], a compressed-sparse-row matrix with
//! sorted column indices. It stores the system operator `A` of a linearized
//! PDE system as well as Jacobians of nonlinear residuals. Construction goes
//! through coordinate triplets; duplicate entries are summed so that stencil
//! assembly can emit contributions independently.
//!
//! Products use a fixed row-major summation order so repeated runs are
//! bitwise reproducible. Normal equations are never formed explicitly:
//! `AᵀA·x` is always two chained products (see [`crate::iterative::LinearOp`]).

mod eig;
mod spectrum;

pub use eig::{dense_eig, dense_eig_with_cap, sym_tridiag_eigenvalues, DEFAULT_DENSE_CAP};
pub use spectrum::{
    condition_number_spd, eta_max_bound, eta_max_bound_with_cap, ConditionEstimateError, Spectrum,
};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors from matrix construction and products.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// A vector length does not conform to the matrix shape.
    DimensionMismatch { expected: usize, got: usize },
    /// CSR invariants are violated (offsets, column order, index bounds).
    InvalidStructure(String),
    /// An eigenvalue with non-positive real part was detected where a
    /// positive-definite operator was required.
    NotPositiveDefinite { lambda_re: f64 },
    /// A dense decomposition was requested above the configured cap.
    DenseCapExceeded { n: usize, cap: usize },
    /// The QR/QL iteration did not converge.
    EigDidNotConverge,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::InvalidStructure(msg) => write!(f, "invalid matrix structure: {msg}"),
            LinalgError::NotPositiveDefinite { lambda_re } => {
                write!(f, "not positive definite: eigenvalue real part {lambda_re}")
            }
            LinalgError::DenseCapExceeded { n, cap } => {
                write!(f, "dense decomposition of order {n} exceeds cap {cap}")
            }
            LinalgError::EigDidNotConverge => write!(f, "eigenvalue iteration did not converge"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Compressed-sparse-row matrix with strictly increasing column indices per
/// row. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from coordinate triplets. Duplicate `(row, col)`
    /// entries are summed; columns within each row end up sorted.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(LinalgError::InvalidStructure(format!(
                    "entry ({i}, {j}) outside {nrows}x{ncols}"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(j);
                values.push(v);
                last = Some((i, j));
            }
            row_offsets[i + 1] = col_indices.len();
        }
        // rows without entries inherit the previous offset
        for i in 1..=nrows {
            if row_offsets[i] < row_offsets[i - 1] {
                row_offsets[i] = row_offsets[i - 1];
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix directly from CSR arrays, validating the invariants:
    /// `row_offsets[0] = 0`, non-decreasing offsets ending at `len(values)`,
    /// and strictly increasing in-bounds columns within each row.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        if row_offsets.len() != nrows + 1 {
            return Err(LinalgError::InvalidStructure(format!(
                "row_offsets length {} != nrows + 1 = {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets[nrows] != values.len() {
            return Err(LinalgError::InvalidStructure(String::from(
                "row_offsets must start at 0 and end at nnz",
            )));
        }
        if col_indices.len() != values.len() {
            return Err(LinalgError::InvalidStructure(String::from(
                "col_indices and values lengths differ",
            )));
        }
        for i in 0..nrows {
            if row_offsets[i] > row_offsets[i + 1] {
                return Err(LinalgError::InvalidStructure(String::from(
                    "row_offsets must be non-decreasing",
                )));
            }
            let row = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(LinalgError::InvalidStructure(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= ncols {
                    return Err(LinalgError::InvalidStructure(format!(
                        "column {last} out of bounds in row {i}"
                    )));
                }
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    /// Entry `(i, j)`, zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `y = A·x` with row-major accumulation order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// `y = Aᵀ·x` without forming the transpose, scattering row by row.
    pub fn transpose_matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.nrows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.nrows,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let xi = x[i];
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    /// Materialized transpose.
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts;
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut cursor = row_offsets.clone();
        // rows of the transpose fill in increasing original-row order, so
        // columns come out sorted
        for (i, j, v) in self.triplets() {
            let slot = cursor[j];
            col_indices[slot] = i;
            values[slot] = v;
            cursor[j] += 1;
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Exact entry-wise symmetry check.
    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let t = self.transpose();
        self.row_offsets == t.row_offsets
            && self.col_indices == t.col_indices
            && self.values == t.values
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }
}

/// Row-major dense matrix. Used for small oracles (eigendecompositions) and
/// test fixtures, not for production solves.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    /// Builds from row-major data.
    pub fn from_rows(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != nrows * ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: nrows * ncols,
                got: data.len(),
            });
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, lo: f64, d: f64, up: f64) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, lo));
            }
            t.push((i, i, d));
            if i + 1 < n {
                t.push((i, i + 1, up));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn identity_matvec() {
        let a = SparseMatrix::identity(3);
        let y = a.matvec(&[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(y, vec![4.0, 5.0, 6.0]);
    }

    #[test]
    fn laplacian_stencil_matvec() {
        // tridiag(-1, 2, -1) on [1, 1, 1] -> [1, 0, 1]
        let a = tridiag(3, -1.0, 2.0, -1.0);
        let y = a.matvec(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(y, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn matvec_dimension_mismatch_rejected() {
        let a = SparseMatrix::identity(3);
        assert!(matches!(
            a.matvec(&[1.0, 2.0]),
            Err(LinalgError::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            a.transpose_matvec(&[1.0; 4]),
            Err(LinalgError::DimensionMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn transpose_matvec_hand_case() {
        // [[1,2],[3,4]]^T · [1,1] = [4,6]
        let a =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)])
                .unwrap();
        let y = a.transpose_matvec(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![4.0, 6.0]);
    }

    #[test]
    fn transpose_matvec_matches_matvec_for_symmetric() {
        let a = tridiag(5, -1.0, 2.0, -1.0);
        assert!(a.is_symmetric());
        let x = [0.5, -1.0, 2.0, 3.0, -0.25];
        assert_eq!(a.matvec(&x).unwrap(), a.transpose_matvec(&x).unwrap());
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.5), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.get(0, 0), 3.5);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn from_csr_validates_invariants() {
        // descending columns in a row
        let r = SparseMatrix::from_csr(1, 3, vec![0, 2], vec![2, 0], vec![1.0, 1.0]);
        assert!(matches!(r, Err(LinalgError::InvalidStructure(_))));
        // offsets not ending at nnz
        let r = SparseMatrix::from_csr(1, 3, vec![0, 1], vec![0, 1], vec![1.0, 1.0]);
        assert!(matches!(r, Err(LinalgError::InvalidStructure(_))));
    }

    #[test]
    fn transpose_roundtrip() {
        let a = SparseMatrix::from_triplets(
            3,
            2,
            &[(0, 1, 2.0), (1, 0, -1.0), (2, 1, 4.0), (2, 0, 0.5)],
        )
        .unwrap();
        let tt = a.transpose().transpose();
        assert_eq!(a, tt);
    }

    #[test]
    fn nonsquare_is_not_symmetric() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0)]).unwrap();
        assert!(!a.is_symmetric());
    }
}
