//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Columns are preordered by approximate minimum degree on the pattern of
//! `A + A^T`; rows are chosen by partial pivoting, preferring the diagonal
//! entry whenever it is within [`DIAGONAL_PREFERENCE`] of the column maximum.
//! Zero diagonal blocks (saddle-point systems) are handled by the row pivoting.

use crate::kernels::sparse::SparseMatrix;
use crate::{Error, Result, C64};

/// A diagonal candidate is accepted when `|a_kk| >= DIAGONAL_PREFERENCE * max_i |a_ik|`.
pub const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Pivots smaller than this times the largest matrix entry are rejected.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

/// Factors `P A Q = L U` with unit lower triangular `L`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<C64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<C64>,
    /// original row -> pivot position
    pinv: Vec<usize>,
    /// pivot position -> original column
    q: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

/// Compressed-column copy of a square matrix.
struct Csc {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<C64>,
}

fn to_csc(a: &SparseMatrix) -> Csc {
    let n = a.ncols();
    let mut count = vec![0usize; n + 1];
    for &j in a.col_idx() {
        count[j + 1] += 1;
    }
    for j in 0..n {
        count[j + 1] += count[j];
    }
    let ptr = count.clone();
    let mut next = count;
    let mut idx = vec![0usize; a.nnz()];
    let mut val = vec![C64::new(0.0, 0.0); a.nnz()];
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            idx[next[j]] = i;
            val[next[j]] = v;
            next[j] += 1;
        }
    }
    Csc { ptr, idx, val }
}

/// Fill-reducing column order from the symmetric pattern of `A + A^T`.
fn column_order(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        adj[j].push(i);
        adj[i].push(j);
    }
    for (j, col) in adj.iter_mut().enumerate() {
        col.push(j);
        col.sort_unstable();
        col.dedup();
    }
    let mut ap = Vec::with_capacity(n + 1);
    let mut ai = Vec::new();
    ap.push(0usize);
    for col in &adj {
        ai.extend_from_slice(col);
        ap.push(ai.len());
    }
    match amd::order::<usize>(n, &ap, &ai, &amd::Control::default()) {
        Ok((perm, _, _)) => perm,
        Err(_) => (0..n).collect(),
    }
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U` together.
    pub fn fill(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    /// Ratio of largest to smallest pivot magnitude, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        if self.n == 0 {
            1.0
        } else {
            self.max_pivot / self.min_pivot
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n, "lu solve: right-hand side length");
        let n = self.n;
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let yj = y[j];
            if yj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                y[self.l_idx[p]] -= self.l_val[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            y[j] /= self.u_val[last];
            let yj = y[j];
            if yj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in self.u_ptr[j]..last {
                y[self.u_idx[p]] -= self.u_val[p] * yj;
            }
        }
        for k in 0..n {
            b[self.q[k]] = y[k];
        }
    }
}

const UNSET: usize = usize::MAX;

/// Nonzero pattern of `L \ A(:, col)` in topological order, written to
/// `xi[top..n]`. `xi[n..2n]` is used as the DFS pointer stack.
fn reach(
    n: usize,
    l_ptr: &[usize],
    l_idx: &[usize],
    b_rows: &[usize],
    pinv: &[usize],
    xi: &mut [usize],
    marked: &mut [bool],
) -> usize {
    let mut top = n;
    for &start in b_rows {
        if marked[start] {
            continue;
        }
        // iterative depth-first search
        let mut head = 0usize;
        xi[0] = start;
        loop {
            let j = xi[head];
            let jnew = pinv[j];
            if !marked[j] {
                marked[j] = true;
                xi[n + head] = if jnew == UNSET { 0 } else { l_ptr[jnew] };
            }
            let end = if jnew == UNSET { 0 } else { l_ptr[jnew + 1] };
            let mut descended = false;
            let mut p = xi[n + head];
            while p < end {
                let i = l_idx[p];
                p += 1;
                if marked[i] {
                    continue;
                }
                xi[n + head] = p;
                head += 1;
                xi[head] = i;
                descended = true;
                break;
            }
            if !descended {
                top -= 1;
                xi[top] = j;
                if head == 0 {
                    break;
                }
                head -= 1;
            }
        }
    }
    for &j in &xi[top..n] {
        marked[j] = false;
    }
    top
}

/// Factors a square complex sparse matrix.
pub fn lu_factor(a: &SparseMatrix) -> Result<LuFactorization> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    let csc = to_csc(a);
    let q = column_order(a);
    let max_entry = a.max_abs();
    let threshold = SINGULAR_THRESHOLD * max_entry;

    let mut l_ptr = Vec::with_capacity(n + 1);
    let mut l_idx: Vec<usize> = Vec::with_capacity(4 * a.nnz() + n);
    let mut l_val: Vec<C64> = Vec::with_capacity(4 * a.nnz() + n);
    let mut u_ptr = Vec::with_capacity(n + 1);
    let mut u_idx: Vec<usize> = Vec::with_capacity(4 * a.nnz() + n);
    let mut u_val: Vec<C64> = Vec::with_capacity(4 * a.nnz() + n);
    let mut pinv = vec![UNSET; n];
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut xi = vec![0usize; 2 * n];
    let mut marked = vec![false; n];
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot = 0.0f64;

    for k in 0..n {
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
        let col = q[k];
        let range = csc.ptr[col]..csc.ptr[col + 1];
        let b_rows = &csc.idx[range.clone()];

        // pivoted rows have pinv < k, so l_ptr[pinv + 1] is always set
        let top = reach(n, &l_ptr, &l_idx, b_rows, &pinv, &mut xi, &mut marked);
        for &i in &xi[top..n] {
            x[i] = C64::new(0.0, 0.0);
        }
        for (&i, &v) in b_rows.iter().zip(&csc.val[range]) {
            x[i] = v;
        }
        for px in top..n {
            let j = xi[px];
            let jnew = pinv[j];
            if jnew == UNSET {
                continue;
            }
            let xj = x[j];
            for p in l_ptr[jnew] + 1..l_ptr[jnew + 1] {
                x[l_idx[p]] -= l_val[p] * xj;
            }
        }

        // choose the pivot among rows not yet pivotal
        let mut ipiv = UNSET;
        let mut amax = -1.0f64;
        for &i in &xi[top..n] {
            if pinv[i] == UNSET {
                let t = x[i].norm();
                if t > amax {
                    amax = t;
                    ipiv = i;
                }
            } else {
                u_idx.push(pinv[i]);
                u_val.push(x[i]);
            }
        }
        if ipiv == UNSET || amax <= threshold {
            return Err(Error::Singular {
                column: k,
                pivot: amax.max(0.0),
                max_entry,
            });
        }
        if pinv[col] == UNSET && x[col].norm() >= amax * DIAGONAL_PREFERENCE && x[col].norm() > threshold {
            ipiv = col;
        }
        let pivot = x[ipiv];
        min_pivot = min_pivot.min(pivot.norm());
        max_pivot = max_pivot.max(pivot.norm());
        u_idx.push(k);
        u_val.push(pivot);
        pinv[ipiv] = k;
        l_idx.push(ipiv);
        l_val.push(C64::new(1.0, 0.0));
        for &i in &xi[top..n] {
            if pinv[i] == UNSET {
                l_idx.push(i);
                l_val.push(x[i] / pivot);
            }
            x[i] = C64::new(0.0, 0.0);
        }
    }
    l_ptr.push(l_idx.len());
    u_ptr.push(u_idx.len());
    for i in l_idx.iter_mut() {
        *i = pinv[*i];
    }
    Ok(LuFactorization {
        n,
        l_ptr,
        l_idx,
        l_val,
        u_ptr,
        u_idx,
        u_val,
        pinv,
        q,
        min_pivot,
        max_pivot,
    })
}
