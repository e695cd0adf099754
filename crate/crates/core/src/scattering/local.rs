use crate::assembly::LocalSystem;
use crate::kernels::{lu_factor, LuFactorization, SparseMatrix, TripletBuilder};
use crate::mesh_partition::IndexMap;
use crate::trace_algebra::InductanceBlock;
use crate::{Error, Result, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalSolverKind {
    /// Factorization of `A_j − i B_jᵀ T_j B_j`.
    Plain,
    /// Factorization of `[[A_j, 0, B_jᵀ], [0, −iC_j, −B'_jᵀ], [B_j, −B'_j, 0]]`.
    Augmented,
}

/// Factorized subdomain problem with impedance `T_j` on `Γ_j`.
///
/// [`solve`](Self::solve) returns `u` with `(A_j − i B_jᵀ T_j B_j) u = s + B_jᵀ T_j p`
/// for both kinds.
pub struct LocalSolver {
    kind: LocalSolverKind,
    a: SparseMatrix,
    f: Vec<C64>,
    b: IndexMap,
    t: Option<SparseMatrix>,
    lu: LuFactorization,
    n_aux: usize,
}

impl std::fmt::Debug for LocalSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalSolver")
            .field("kind", &self.kind)
            .field("edges", &self.a.nrows())
            .field("traces", &self.b.codomain_size())
            .field("aux", &self.n_aux)
            .finish()
    }
}

/// `A − i Bᵀ T B`.
pub fn impedance_matrix(a: &SparseMatrix, b: &IndexMap, t: &SparseMatrix) -> SparseMatrix {
    let mut builder = TripletBuilder::with_capacity(a.nrows(), a.ncols(), a.nnz() + t.nnz());
    builder.push_block(0, 0, a);
    let idx = b.targets();
    for (r, c, v) in t.triplets() {
        builder.push(idx[r], idx[c], -I * v);
    }
    builder.build()
}

/// Factorizes subdomain `j`: plainly for an explicit `T_j`, through the
/// augmented saddle system for an implicit one.
pub fn factor_local(system: LocalSystem, b: IndexMap, block: &InductanceBlock) -> Result<LocalSolver> {
    if b.codomain_size() != block.dim() || b.domain_size() != system.a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: b.codomain_size(),
            got: block.dim(),
        });
    }
    match block {
        InductanceBlock::Explicit { t, .. } => {
            let lu = lu_factor(&impedance_matrix(&system.a, &b, t))?;
            Ok(LocalSolver {
                kind: LocalSolverKind::Plain,
                a: system.a,
                f: system.f,
                b,
                t: Some(t.clone()),
                lu,
                n_aux: 0,
            })
        }
        InductanceBlock::Implicit { aux, .. } => {
            let (ne, na, ng) = (system.a.nrows(), aux.c.nrows(), b.codomain_size());
            let mut builder = TripletBuilder::with_capacity(
                ne + na + ng,
                ne + na + ng,
                system.a.nnz() + aux.c.nnz() + 4 * ng,
            );
            builder.push_block(0, 0, &system.a);
            builder.push_block(ne, ne, &aux.c.scale(-I));
            for (r, &col) in b.targets().iter().enumerate() {
                builder.push(col, ne + na + r, 1.0);
                builder.push(ne + na + r, col, 1.0);
            }
            for (r, &col) in aux.bp.targets().iter().enumerate() {
                builder.push(ne + col, ne + na + r, -1.0);
                builder.push(ne + na + r, ne + col, -1.0);
            }
            let lu = lu_factor(&builder.build())?;
            Ok(LocalSolver {
                kind: LocalSolverKind::Augmented,
                a: system.a,
                f: system.f,
                b,
                t: None,
                lu,
                n_aux: na,
            })
        }
    }
}

impl LocalSolver {
    pub fn kind(&self) -> LocalSolverKind {
        self.kind
    }

    pub fn num_edges(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_traces(&self) -> usize {
        self.b.codomain_size()
    }

    /// `A_j`.
    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    /// `f_j`.
    pub fn load(&self) -> &[C64] {
        &self.f
    }

    /// `B_j`.
    pub fn trace_map(&self) -> &IndexMap {
        &self.b
    }

    /// Solves with volume source `s` (zero if `None`) and trace datum `p` (zero if `None`).
    pub fn solve(&self, s: Option<&[C64]>, p: Option<&[C64]>) -> Vec<C64> {
        let ne = self.a.nrows();
        let zero = C64::new(0.0, 0.0);
        match self.kind {
            LocalSolverKind::Plain => {
                let mut rhs = s.map(<[C64]>::to_vec).unwrap_or_else(|| vec![zero; ne]);
                if let Some(p) = p {
                    let tp = self.t.as_ref().expect("plain solver keeps T").mul_vec(p);
                    self.b.apply_transpose_add(&tp, &mut rhs);
                }
                self.lu.solve_in_place(&mut rhs);
                rhs
            }
            LocalSolverKind::Augmented => {
                let ng = self.b.codomain_size();
                let mut rhs = vec![zero; ne + self.n_aux + ng];
                if let Some(s) = s {
                    rhs[..ne].copy_from_slice(s);
                }
                if let Some(p) = p {
                    for (r, v) in rhs[ne + self.n_aux..].iter_mut().zip(p) {
                        *r = I * v;
                    }
                }
                self.lu.solve_in_place(&mut rhs);
                rhs.truncate(ne);
                rhs
            }
        }
    }

    /// `−Im(v̄ᵀ A_j v)`.
    pub fn dissipation(&self, v: &[C64]) -> f64 {
        let av = self.a.mul_vec(v);
        -v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum::<C64>().im
    }
}
