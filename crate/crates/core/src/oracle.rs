//! Dense reference computations for small cases.
//!
//! Everything here is built from explicit dense matrices with nalgebra and
//! shares no code path with the iterative operators beyond the assembled
//! local matrices and the boolean maps.

use nalgebra::DMatrix;

use crate::kernels::SparseMatrix;
use crate::mesh_partition::Decomposition;
use crate::solvers::SkeletonProblem;
use crate::{Error, Result, C64, I};

/// Largest edge count accepted by the dense oracles.
pub const EDGE_CAP: usize = 500;

const SINGULAR: f64 = 1e-12;

fn lu_solve(m: &DMatrix<C64>, rhs: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let lu = m.clone().full_piv_lu();
    let scale = m.camax().max(f64::MIN_POSITIVE);
    let u = lu.u();
    let pivot = (0..u.nrows()).map(|k| u[(k, k)].norm()).fold(f64::INFINITY, f64::min);
    if m.nrows() > 0 && pivot < SINGULAR * scale {
        return Err(Error::Singular {
            column: 0,
            pivot,
            max_entry: scale,
        });
    }
    lu.solve(rhs).ok_or(Error::Singular {
        column: 0,
        pivot,
        max_entry: scale,
    })
}

fn select(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in idx {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

fn check_size(n: usize) -> Result<()> {
    if n > EDGE_CAP {
        return Err(Error::TooLarge { size: n, cap: EDGE_CAP });
    }
    Ok(())
}

/// Solves `A x = f` densely.
pub fn dense_solve(a: &SparseMatrix, f: &[C64]) -> Result<Vec<C64>> {
    check_size(a.nrows())?;
    let x = lu_solve(&a.to_dense(), &DMatrix::from_column_slice(f.len(), 1, f))?;
    Ok(x.iter().copied().collect())
}

/// Schur complement `A_bb − A_bi A_ii⁻¹ A_ib` of the dense matrix `a` onto the
/// indices `b`; fails when `A_ii` is singular.
pub fn schur_complement(a: &DMatrix<C64>, b: &[usize]) -> Result<DMatrix<C64>> {
    check_size(a.nrows())?;
    let i = complement(a.nrows(), b);
    let abb = select(a, b, b);
    if i.is_empty() {
        return Ok(abb);
    }
    let x = lu_solve(&select(a, &i, &i), &select(a, &i, b))?;
    Ok(abb - select(a, b, &i) * x)
}

/// `S = Id + 2iB(A − iBᵀTB)⁻¹BᵀT` for one subdomain.
pub fn scattering_direct(a: &DMatrix<C64>, b: &[usize], t: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_size(a.nrows())?;
    let (n, m) = (a.nrows(), b.len());
    let bm = DMatrix::from_fn(m, n, |r, c| if b[r] == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let k = a - bm.transpose() * t * &bm * I;
    let x = lu_solve(&k, &(bm.transpose() * t))?;
    Ok(DMatrix::identity(m, m) + bm * x * (2.0 * I))
}

/// `S = (Ã − i)⁻¹(Ã + i)` with `Ã = T⁻¹(A_bb − A_bi A_ii⁻¹ A_ib)`.
pub fn scattering_cayley(a: &DMatrix<C64>, b: &[usize], t: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let schur = schur_complement(a, b)?;
    let at = lu_solve(t, &schur)?;
    let id = DMatrix::<C64>::identity(b.len(), b.len());
    lu_solve(&(&at - &id * I), &(&at + &id * I))
}

/// Cayley form when the interior block is invertible, otherwise the direct form.
pub fn scattering(a: &DMatrix<C64>, b: &[usize], t: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    match scattering_cayley(a, b, t) {
        Err(Error::Singular { .. }) => scattering_direct(a, b, t),
        other => other,
    }
}

/// Dense `Q` mapping single traces to multi-traces.
pub fn dense_lift(d: &Decomposition) -> DMatrix<C64> {
    let mut q = DMatrix::zeros(d.n_sys(), d.single_size());
    for (j, maps) in d.maps.iter().enumerate() {
        let offset = d.trace_range(j).start;
        for (r, &c) in maps.q.targets().iter().enumerate() {
            q[(offset + r, c)] = C64::new(1.0, 0.0);
        }
    }
    q
}

/// Dense `P = Q(QᵀTQ)⁻¹QᵀT`.
pub fn dense_projector(q: &DMatrix<C64>, t: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let qt = q.transpose();
    let gram = &qt * t * q;
    Ok(q * lu_solve(&gram, &(qt * t))?)
}

/// Block-diagonal dense scattering matrix of a skeleton problem.
pub fn dense_scattering(problem: &SkeletonProblem) -> Result<DMatrix<C64>> {
    let d = &problem.decomposition;
    let n = d.n_sys();
    let mut s = DMatrix::zeros(n, n);
    for (j, solver) in problem.scattering.solvers().iter().enumerate() {
        check_size(solver.num_edges())?;
        let r = d.trace_range(j);
        let sj = scattering(
            &solver.matrix().to_dense(),
            solver.trace_map().targets(),
            &problem.inductance.block(j).to_dense(),
        )?;
        s.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&sj);
    }
    Ok(s)
}

/// Dense `Id + ΠS` composed from the dense factors.
pub fn dense_skeleton_operator(problem: &SkeletonProblem) -> Result<DMatrix<C64>> {
    let d = &problem.decomposition;
    let t = crate::solvers::dense_inductance(problem);
    let p = dense_projector(&dense_lift(d), &t)?;
    let n = d.n_sys();
    let id = DMatrix::<C64>::identity(n, n);
    let pi = p * C64::new(2.0, 0.0) - &id;
    Ok(id + pi * dense_scattering(problem)?)
}
