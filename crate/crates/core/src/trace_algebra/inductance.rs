use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::assembly::{assemble_auxiliary, assemble_despres, decouple_classes, AuxiliarySystem, Medium, OmegaPrime};
use crate::kernels::vector::dotc;
use crate::kernels::{lu_factor, LuFactorization, SparseMatrix, TripletBuilder};
use crate::mesh_partition::{Decomposition, Mesh};
use crate::{Error, Result, C64};

/// Choice of transmission operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InductanceKind {
    /// Weighted tangential-trace mass matrix on `Γ_j`.
    Despres { interface_decouple: bool },
    /// Schur complement of the auxiliary coercive matrix onto `Γ_j`.
    SchurSubdomain,
    /// Schur complement with couplings between different classes removed.
    SchurInterface,
    /// `a Id`.
    Scalar(f64),
}

impl InductanceKind {
    pub fn is_implicit(self) -> bool {
        matches!(self, Self::SchurSubdomain)
    }

    /// Whether every class block of `T_j` is the same for all `j` sharing it
    /// and blocks of different classes do not couple.
    pub fn has_matched_blocks(self) -> bool {
        matches!(self, Self::Scalar(_) | Self::Despres { interface_decouple: true })
    }
}

impl fmt::Display for InductanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Despres { interface_decouple: false } => write!(f, "despres"),
            Self::Despres { interface_decouple: true } => write!(f, "despres-decoupled"),
            Self::SchurSubdomain => write!(f, "schur"),
            Self::SchurInterface => write!(f, "schur-interface"),
            Self::Scalar(a) => write!(f, "scalar:{a}"),
        }
    }
}

impl FromStr for InductanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "despres" => Ok(Self::Despres { interface_decouple: false }),
            "despres-decoupled" => Ok(Self::Despres { interface_decouple: true }),
            "schur" | "schur-subdomain" => Ok(Self::SchurSubdomain),
            "schur-interface" => Ok(Self::SchurInterface),
            _ => {
                let a = s
                    .strip_prefix("scalar:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown inductance {s:?}")))?;
                if !(a > 0.0) {
                    return Err(Error::InvalidArgument(format!("scalar inductance must be positive, got {a}")));
                }
                Ok(Self::Scalar(a))
            }
        }
    }
}

/// `T_j` of one subdomain.
#[allow(clippy::large_enum_variant)]
pub enum InductanceBlock {
    /// Assembled `T_j` with its factorization.
    Explicit { t: SparseMatrix, lu: LuFactorization },
    /// `T_j` known through the auxiliary system: `T x = q` with
    /// `[[C, −B'ᵀ], [B', 0]] (v, q) = (0, x)` and `T⁻¹ = B' C⁻¹ B'ᵀ`.
    Implicit {
        aux: AuxiliarySystem,
        saddle: LuFactorization,
        c: LuFactorization,
    },
}

impl fmt::Debug for InductanceBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit { t, .. } => write!(f, "Explicit({}x{})", t.nrows(), t.ncols()),
            Self::Implicit { aux, .. } => write!(f, "Implicit(E' = {}, Γ = {})", aux.edges.len(), aux.bp.codomain_size()),
        }
    }
}

/// `[[C, −B'ᵀ], [B', 0]]`.
pub fn auxiliary_saddle(aux: &AuxiliarySystem) -> SparseMatrix {
    let n = aux.c.nrows();
    let m = aux.bp.codomain_size();
    let mut b = TripletBuilder::with_capacity(n + m, n + m, aux.c.nnz() + 2 * m);
    b.push_block(0, 0, &aux.c);
    for (r, &col) in aux.bp.targets().iter().enumerate() {
        b.push(col, n + r, -1.0);
        b.push(n + r, col, 1.0);
    }
    b.build()
}

impl InductanceBlock {
    pub fn explicit(t: SparseMatrix) -> Result<Self> {
        let lu = lu_factor(&t)?;
        Ok(Self::Explicit { t, lu })
    }

    pub fn implicit(aux: AuxiliarySystem) -> Result<Self> {
        let saddle = lu_factor(&auxiliary_saddle(&aux))?;
        let c = lu_factor(&aux.c)?;
        Ok(Self::Implicit { aux, saddle, c })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Explicit { t, .. } => t.nrows(),
            Self::Implicit { aux, .. } => aux.bp.codomain_size(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Self::Explicit { t, .. } => t.mul_vec(x),
            Self::Implicit { aux, saddle, .. } => {
                let n = aux.c.nrows();
                let mut rhs = vec![C64::new(0.0, 0.0); n];
                rhs.extend_from_slice(x);
                saddle.solve_in_place(&mut rhs);
                rhs.split_off(n)
            }
        }
    }

    pub fn apply_inverse(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Self::Explicit { lu, .. } => lu.solve(x),
            Self::Implicit { aux, c, .. } => aux.bp.apply(&c.solve(&aux.bp.apply_transpose(x))),
        }
    }

    /// Dense `T_j`, obtained column by column.
    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            Self::Explicit { t, .. } => t.to_dense(),
            Self::Implicit { .. } => {
                let n = self.dim();
                let mut out = DMatrix::zeros(n, n);
                let mut e = vec![C64::new(0.0, 0.0); n];
                for k in 0..n {
                    e[k] = C64::new(1.0, 0.0);
                    let col = self.apply(&e);
                    out.column_mut(k).copy_from_slice(&col);
                    e[k] = C64::new(0.0, 0.0);
                }
                out
            }
        }
    }
}

/// Block-diagonal inductance `T = diag(T_1, …, T_J)` on the multi-trace space.
#[derive(Debug)]
pub struct Inductance {
    kind: InductanceKind,
    blocks: Vec<InductanceBlock>,
    offsets: Vec<usize>,
}

impl Inductance {
    pub fn build(
        kind: InductanceKind,
        mesh: &Mesh,
        decomposition: &Decomposition,
        medium: &Medium,
        omega_prime: OmegaPrime,
    ) -> Result<Self> {
        let blocks = (0..decomposition.count())
            .into_par_iter()
            .map(|j| -> Result<InductanceBlock> {
                let gamma_j = decomposition.skeleton.gamma_j(j);
                match kind {
                    InductanceKind::Despres { interface_decouple } => {
                        InductanceBlock::explicit(assemble_despres(j, mesh, decomposition, medium, interface_decouple))
                    }
                    InductanceKind::Scalar(a) => InductanceBlock::explicit(
                        SparseMatrix::identity(gamma_j.len()).scale(C64::new(a, 0.0)),
                    ),
                    InductanceKind::SchurSubdomain => {
                        InductanceBlock::implicit(assemble_auxiliary(j, mesh, decomposition, medium, omega_prime)?)
                    }
                    InductanceKind::SchurInterface => {
                        let aux = assemble_auxiliary(j, mesh, decomposition, medium, omega_prime)?;
                        let dense = schur_dense(&aux)?;
                        let t = decouple_classes(&SparseMatrix::from_dense(&dense), gamma_j, decomposition);
                        InductanceBlock::explicit(t)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            blocks,
            offsets: decomposition.skeleton.offsets().to_vec(),
        })
    }

    /// Inductance from given blocks, laid out one after another.
    pub fn from_blocks(kind: InductanceKind, blocks: Vec<InductanceBlock>) -> Self {
        let mut offsets = vec![0];
        for b in &blocks {
            offsets.push(offsets.last().unwrap() + b.dim());
        }
        Self { kind, blocks, offsets }
    }

    /// Same operator with every block assembled explicitly.
    pub fn densified(&self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| InductanceBlock::explicit(SparseMatrix::from_dense(&b.to_dense())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: self.kind,
            blocks,
            offsets: self.offsets.clone(),
        })
    }

    pub fn kind(&self) -> InductanceKind {
        self.kind
    }

    pub fn block(&self, j: usize) -> &InductanceBlock {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[InductanceBlock] {
        &self.blocks
    }

    pub fn n_sys(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn blockwise(&self, x: &[C64], f: impl Fn(&InductanceBlock, &[C64]) -> Vec<C64> + Sync) -> Vec<C64> {
        assert_eq!(x.len(), self.n_sys());
        let parts: Vec<Vec<C64>> = self
            .blocks
            .par_iter()
            .enumerate()
            .map(|(j, b)| f(b, &x[self.offsets[j]..self.offsets[j + 1]]))
            .collect();
        parts.concat()
    }

    /// `T x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.blockwise(x, |b, xj| b.apply(xj))
    }

    /// `T⁻¹ x`.
    pub fn apply_inverse(&self, x: &[C64]) -> Vec<C64> {
        self.blockwise(x, |b, xj| b.apply_inverse(xj))
    }

    /// `(x, y)_T = xᵀ T ȳ`.
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        // T is real, so T ȳ is the conjugate of T y
        dotc(&self.apply(y), x)
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        self.inner(x, x).re.max(0.0).sqrt()
    }
}

/// Dense Schur complement `(B' C⁻¹ B'ᵀ)⁻¹` of the auxiliary system.
fn schur_dense(aux: &AuxiliarySystem) -> Result<DMatrix<C64>> {
    let m = aux.bp.codomain_size();
    if m == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let c = lu_factor(&aux.c)?;
    let mut x = DMatrix::<f64>::zeros(m, m);
    let mut e = vec![C64::new(0.0, 0.0); m];
    for k in 0..m {
        e[k] = C64::new(1.0, 0.0);
        let col = aux.bp.apply(&c.solve(&aux.bp.apply_transpose(&e)));
        for (i, v) in col.iter().enumerate() {
            x[(i, k)] = v.re;
        }
        e[k] = C64::new(0.0, 0.0);
    }
    let x = (&x + x.transpose()) / 2.0;
    let inv = x
        .cholesky()
        .ok_or_else(|| Error::Indefinite("B' C⁻¹ B'ᵀ is not positive definite".into()))?
        .inverse();
    let inv = (&inv + inv.transpose()) / 2.0;
    Ok(inv.map(|v| C64::new(v, 0.0)))
}
