use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use super::inductance::Inductance;
use crate::kernels::{pcg_solve, PcgConfig, SparseMatrix, TripletBuilder};
use crate::mesh_partition::Decomposition;
use crate::{Error, Result, C64};

/// `T`-orthogonal projector `P = Q (QᵀTQ)⁻¹ QᵀT` onto single traces.
///
/// The Gram system is solved by conjugate gradients preconditioned with
/// `D (Σ_j Q_jᵀ T_j⁻¹ Q_j) D`, `D = diag(1/d_e)`.
#[derive(Debug)]
pub struct Projector {
    decomposition: Arc<Decomposition>,
    inductance: Arc<Inductance>,
    gram: Option<SparseMatrix>,
    inv_multiplicity: Vec<f64>,
    pcg: PcgConfig,
    last_iterations: AtomicUsize,
    max_iterations: AtomicUsize,
}

fn sum_in_order(parts: Vec<Vec<C64>>, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

impl Projector {
    pub fn new(decomposition: Arc<Decomposition>, inductance: Arc<Inductance>, pcg: PcgConfig) -> Result<Self> {
        if inductance.n_sys() != decomposition.n_sys() {
            return Err(Error::DimensionMismatch {
                expected: decomposition.n_sys(),
                got: inductance.n_sys(),
            });
        }
        let inv_multiplicity = decomposition
            .skeleton_multiplicities()
            .iter()
            .map(|&d| 1.0 / d as f64)
            .collect();
        let gram = if inductance.kind().is_implicit() {
            None
        } else {
            let n = decomposition.single_size();
            let mut b = TripletBuilder::new(n, n);
            for (j, maps) in decomposition.maps.iter().enumerate() {
                if let super::InductanceBlock::Explicit { t, .. } = inductance.block(j) {
                    let q = maps.q.targets();
                    for (r, c, v) in t.triplets() {
                        b.push(q[r], q[c], v);
                    }
                }
            }
            Some(b.build())
        };
        Ok(Self {
            decomposition,
            inductance,
            gram,
            inv_multiplicity,
            pcg,
            last_iterations: AtomicUsize::new(0),
            max_iterations: AtomicUsize::new(0),
        })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn inductance(&self) -> &Inductance {
        &self.inductance
    }

    pub fn pcg_config(&self) -> PcgConfig {
        self.pcg
    }

    /// Iterations of the most recent Gram solve.
    pub fn last_iterations(&self) -> usize {
        self.last_iterations.load(Ordering::Relaxed)
    }

    /// Largest Gram-solve iteration count since the last reset.
    pub fn max_iterations(&self) -> usize {
        self.max_iterations.load(Ordering::Relaxed)
    }

    pub fn reset_stats(&self) {
        self.last_iterations.store(0, Ordering::Relaxed);
        self.max_iterations.store(0, Ordering::Relaxed);
    }

    /// `Σ_j Q_jᵀ F_j(Q_j v)` for a per-subdomain operator `F_j`.
    fn reduce(&self, v: &[C64], f: impl Fn(usize, &[C64]) -> Vec<C64> + Sync) -> Vec<C64> {
        let d = &self.decomposition;
        let parts: Vec<Vec<C64>> = d
            .maps
            .par_iter()
            .enumerate()
            .map(|(j, maps)| maps.q.apply_transpose(&f(j, &maps.q.apply(v))))
            .collect();
        sum_in_order(parts, d.single_size())
    }

    /// `QᵀTQ v`.
    pub fn apply_gram(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.decomposition.single_size());
        match &self.gram {
            Some(g) => g.mul_vec(v),
            None => self.reduce(v, |j, x| self.inductance.block(j).apply(x)),
        }
    }

    /// `D (Σ_j Q_jᵀ T_j⁻¹ Q_j) D r`.
    pub fn nn_precondition(&self, r: &[C64]) -> Vec<C64> {
        let scaled: Vec<C64> = r.iter().zip(&self.inv_multiplicity).map(|(v, d)| v * d).collect();
        let mut out = self.reduce(&scaled, |j, x| self.inductance.block(j).apply_inverse(x));
        for (o, d) in out.iter_mut().zip(&self.inv_multiplicity) {
            *o *= d;
        }
        out
    }

    /// Solves `QᵀTQ v = rhs`.
    pub fn solve_gram(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let out = pcg_solve(|v| self.apply_gram(v), |r| self.nn_precondition(r), rhs, self.pcg)?;
        self.last_iterations.store(out.iterations, Ordering::Relaxed);
        self.max_iterations.fetch_max(out.iterations, Ordering::Relaxed);
        Ok(out.x)
    }

    /// `QᵀT u` for a multi-trace `u`.
    pub fn gram_rhs(&self, u: &[C64]) -> Vec<C64> {
        self.decomposition.lift_transpose(&self.inductance.apply(u))
    }

    /// Single-trace coefficients `v` with `P u = Q v`.
    pub fn project_coefficients(&self, u: &[C64]) -> Result<Vec<C64>> {
        self.solve_gram(&self.gram_rhs(u))
    }

    /// `P u`.
    pub fn project(&self, u: &[C64]) -> Result<Vec<C64>> {
        Ok(self.decomposition.lift(&self.project_coefficients(u)?))
    }

    /// `Π u = 2 P u − u`.
    pub fn communicate(&self, u: &[C64]) -> Result<Vec<C64>> {
        let pu = self.project(u)?;
        Ok(pu.iter().zip(u).map(|(p, x)| 2.0 * p - x).collect())
    }

    /// `P u` by averaging the copies of every edge, valid when the class
    /// blocks of `T` match and do not couple.
    pub fn project_explicit_diagonal(&self, u: &[C64]) -> Result<Vec<C64>> {
        if !self.inductance.kind().has_matched_blocks() {
            return Err(Error::Unsupported(format!(
                "explicit projection needs matched class blocks, inductance is {}",
                self.inductance.kind()
            )));
        }
        let mut v = self.decomposition.lift_transpose(u);
        for (x, d) in v.iter_mut().zip(&self.inv_multiplicity) {
            *x *= d;
        }
        Ok(self.decomposition.lift(&v))
    }
}
