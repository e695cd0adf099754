use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::problem::SkeletonProblem;
use crate::{Error, Result, C64};

/// Largest skeleton size for dense spectral work.
pub const DENSE_CAP: usize = 2000;

/// Which dense operator to diagonalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumOf {
    /// `Id + ΠS`.
    SkeletonOperator,
    /// `ΠS`.
    IterationOperator,
}

/// Dense `Id + ΠS`, built column by column.
pub fn dense_operator(problem: &SkeletonProblem) -> Result<DMatrix<C64>> {
    let n = problem.n_sys();
    if n > DENSE_CAP {
        return Err(Error::TooLarge { size: n, cap: DENSE_CAP });
    }
    let columns = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[k] = C64::new(1.0, 0.0);
            problem.apply_skeleton_operator(&e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(n, n, |r, c| columns[c][r]))
}

/// Dense `T` on the multi-trace space.
pub fn dense_inductance(problem: &SkeletonProblem) -> DMatrix<C64> {
    let n = problem.n_sys();
    let mut t = DMatrix::zeros(n, n);
    for (j, block) in problem.inductance.blocks().iter().enumerate() {
        let r = problem.decomposition.trace_range(j);
        t.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&block.to_dense());
    }
    t
}

/// Eigenvalues of the chosen operator, sorted by real then imaginary part.
pub fn spectrum(problem: &SkeletonProblem, which: SpectrumOf) -> Result<Vec<C64>> {
    let mut m = dense_operator(problem)?;
    if which == SpectrumOf::IterationOperator {
        for k in 0..m.nrows() {
            m[(k, k)] -= 1.0;
        }
    }
    let n = m.nrows();
    let schur = m
        .try_schur(1e-15, 1000 * n.max(1))
        .ok_or_else(|| Error::Unsupported("dense eigenvalue iteration did not converge".into()))?;
    let (_, triangular) = schur.unpack();
    let mut ev: Vec<C64> = triangular.diagonal().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Coercivity constant `α = min Re(p, Mp)_T / ‖p‖²_T` of `M = Id + ΠS`,
/// the smallest eigenvalue of `L⁻¹ ((MᴴT + TM)/2) L⁻ᴴ` with `T = LLᴴ`.
pub fn coercivity_constant(problem: &SkeletonProblem) -> Result<f64> {
    let m = dense_operator(problem)?;
    coercivity_of(&m, &dense_inductance(problem))
}

/// `α` for a dense operator `m` and inner product matrix `t`.
pub fn coercivity_of(m: &DMatrix<C64>, t: &DMatrix<C64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    let tm = t * m;
    let h = (tm.adjoint() + &tm) * C64::new(0.5, 0.0);
    let l = t
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Indefinite("inductance is not positive definite".into()))?
        .l();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(m.nrows(), m.nrows()))
        .ok_or_else(|| Error::Indefinite("inductance factor is singular".into()))?;
    let s = &linv * h * linv.adjoint();
    let s = (&s + s.adjoint()) * C64::new(0.5, 0.0);
    Ok(s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Summary figures of a spectrum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumSummary {
    pub size: usize,
    pub min_abs: f64,
    pub max_dist_from_one: f64,
}

impl SpectrumSummary {
    pub fn of(eigenvalues: &[C64]) -> Self {
        Self {
            size: eigenvalues.len(),
            min_abs: eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min),
            max_dist_from_one: eigenvalues.iter().map(|l| (1.0 - l).norm()).fold(0.0, f64::max),
        }
    }
}

/// `Re(p, Mp)_T / ‖p‖²_T` for one vector.
pub fn rayleigh_quotient(problem: &SkeletonProblem, p: &[C64]) -> Result<f64> {
    let mp = problem.apply_skeleton_operator(p)?;
    let num = problem.inductance.inner(&mp, p).re;
    let den = problem.inductance.inner(p, p).re;
    Ok(num / den)
}
