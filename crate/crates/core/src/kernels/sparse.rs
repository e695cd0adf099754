//! Compressed sparse row storage for complex matrices.

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Complex sparse matrix in compressed row storage.
///
/// Column indices are sorted and unique within each row, and no explicit
/// zeros are stored once built through [`TripletBuilder::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

/// Coordinate-format accumulator; duplicate entries are summed on build.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Adds `value` to entry `(row, col)`.
    ///
    /// Panics if the index is out of bounds.
    pub fn push(&mut self, row: usize, col: usize, value: impl Into<C64>) {
        assert!(
            row < self.nrows && col < self.ncols,
            "triplet ({row}, {col}) out of bounds for {}x{}",
            self.nrows,
            self.ncols
        );
        self.entries.push((row, col, value.into()));
    }

    /// Appends every entry of `block` shifted by `(row_offset, col_offset)`.
    pub fn push_block(&mut self, row_offset: usize, col_offset: usize, block: &SparseMatrix) {
        for (i, j, v) in block.triplets() {
            self.push(row_offset + i, col_offset + j, v);
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(self.entries.len());
        let mut rows = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            if let (Some(&last_i), Some(&last_j)) = (rows.last(), col_idx.last()) {
                if last_i == i && last_j == j {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(i);
            col_idx.push(j);
            values.push(v);
        }
        // drop entries that cancelled exactly
        let mut k = 0;
        for t in 0..values.len() {
            if values[t] != C64::new(0.0, 0.0) {
                rows[k] = rows[t];
                col_idx[k] = col_idx[t];
                values[k] = values[t];
                k += 1;
            }
        }
        rows.truncate(k);
        col_idx.truncate(k);
        values.truncate(k);
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut b = TripletBuilder::with_capacity(diag.len(), diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.push(i, i, d);
        }
        b.build()
    }

    /// Builds a sparse matrix from a dense one, dropping exact zeros.
    pub fn from_dense(dense: &DMatrix<C64>) -> Self {
        let mut b = TripletBuilder::new(dense.nrows(), dense.ncols());
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let v = dense[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
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

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols, "matvec input length");
        assert_eq!(y.len(), self.nrows, "matvec output length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.triplets() {
            b.push(j, i, v);
        }
        b.build()
    }

    pub fn scale(&self, alpha: C64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out.prune();
        out
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: C64, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                got: other.nrows * other.ncols,
            });
        }
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for (i, j, v) in self.triplets() {
            b.push(i, j, v);
        }
        for (i, j, v) in other.triplets() {
            b.push(i, j, alpha * v);
        }
        Ok(b.build())
    }

    /// Extracts the submatrix with the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_map[j] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                let c = col_map[j];
                if c != usize::MAX {
                    b.push(r, c, v);
                }
            }
        }
        b.build()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] += v;
        }
        d
    }

    fn prune(&mut self) {
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz());
        for (i, j, v) in self.triplets() {
            b.push(i, j, v);
        }
        *self = b.build();
    }
}
