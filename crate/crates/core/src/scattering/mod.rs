//! Factorized subdomain problems, the block-diagonal scattering operator
//! `S = Id + 2iB(A − iBᵀTB)⁻¹BᵀT` and the skeleton right-hand side.
//!
//! Broken fields are flat vectors over `E_⊕` with blocks given by
//! [`Decomposition::broken_range`](crate::mesh_partition::Decomposition::broken_range).

mod local;

use std::sync::Arc;

use rayon::prelude::*;

pub use local::{factor_local, impedance_matrix, LocalSolver, LocalSolverKind};

use crate::assembly::LocalSystem;
use crate::mesh_partition::Decomposition;
use crate::trace_algebra::{Inductance, Projector};
use crate::{Error, Result, C64, I};

/// Right-hand sides of the skeleton system.
#[derive(Debug, Clone)]
pub struct SkeletonRhs {
    /// `g = −2iΠB(A − iBᵀTB)⁻¹f`.
    pub g: Vec<C64>,
    /// `2iBu₀ − 2Qv` with `u₀ = (A − iBᵀTB)⁻¹f` and `v = (QᵀTQ)⁻¹QᵀT(2iBu₀)`.
    pub b: Vec<C64>,
    /// `u₀`.
    pub u0: Vec<C64>,
}

/// The local solvers of all subdomains.
#[derive(Debug)]
pub struct Scattering {
    decomposition: Arc<Decomposition>,
    solvers: Vec<LocalSolver>,
}

impl Scattering {
    /// Factorizes every subdomain against its inductance block.
    pub fn new(decomposition: Arc<Decomposition>, systems: Vec<LocalSystem>, inductance: &Inductance) -> Result<Self> {
        if systems.len() != decomposition.count() {
            return Err(Error::DimensionMismatch {
                expected: decomposition.count(),
                got: systems.len(),
            });
        }
        let solvers = systems
            .into_par_iter()
            .enumerate()
            .map(|(j, sys)| factor_local(sys, decomposition.maps[j].b.clone(), inductance.block(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { decomposition, solvers })
    }

    pub fn solvers(&self) -> &[LocalSolver] {
        &self.solvers
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    /// Broken field solving every subdomain with optional source and trace datum `p`.
    pub fn solve(&self, with_source: bool, p: Option<&[C64]>) -> Vec<C64> {
        let d = &self.decomposition;
        let parts: Vec<Vec<C64>> = self
            .solvers
            .par_iter()
            .enumerate()
            .map(|(j, s)| {
                let src = with_source.then(|| s.load());
                s.solve(src, p.map(|p| &p[d.trace_range(j)]))
            })
            .collect();
        parts.concat()
    }

    /// `(S p, v)` with `v = (A − iBᵀTB)⁻¹BᵀTp`.
    pub fn apply_s(&self, p: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let v = self.solve(false, Some(p));
        let bv = self.decomposition.trace(&v);
        let q = p.iter().zip(&bv).map(|(x, y)| x + 2.0 * I * y).collect();
        (q, v)
    }

    /// `P(v) = −Im(v̄ᵀAv)` over all subdomains.
    pub fn dissipation(&self, v: &[C64]) -> f64 {
        self.solvers
            .iter()
            .enumerate()
            .map(|(j, s)| s.dissipation(&v[self.decomposition.broken_range(j)]))
            .sum()
    }

    /// Both forms of the skeleton right-hand side.
    pub fn rhs(&self, projector: &Projector) -> Result<SkeletonRhs> {
        let d = &self.decomposition;
        let u0 = self.solve(true, None);
        let w: Vec<C64> = d.trace(&u0).iter().map(|x| 2.0 * I * x).collect();
        let minus_w: Vec<C64> = w.iter().map(|x| -x).collect();
        let g = projector.communicate(&minus_w)?;
        let qv = d.lift(&projector.project_coefficients(&w)?);
        let b = w.iter().zip(&qv).map(|(x, y)| x - 2.0 * y).collect();
        Ok(SkeletonRhs { g, b, u0 })
    }
}
