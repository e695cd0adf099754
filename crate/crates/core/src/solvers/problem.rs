use std::sync::Arc;

use crate::assembly::{assemble_all_local, assemble_global, energy_gram, Medium, OmegaPrime, SourceSpec};
use crate::kernels::vector::{dotc, sub};
use crate::kernels::{lu_factor, PcgConfig, SparseMatrix};
use crate::mesh_partition::{Decomposition, Mesh};
use crate::scattering::{Scattering, SkeletonRhs};
use crate::trace_algebra::{Inductance, InductanceKind, Projector};
use crate::{Error, Result, C64, I};

/// Options fixed when the skeleton problem is set up.
#[derive(Debug, Clone, Copy)]
pub struct ProblemOptions {
    pub inductance: InductanceKind,
    pub omega_prime: OmegaPrime,
    pub pcg: PcgConfig,
    /// Factor the undecomposed system for error measurements.
    pub reference: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self {
            inductance: InductanceKind::Despres { interface_decouple: false },
            omega_prime: OmegaPrime::Whole,
            pcg: PcgConfig::default(),
            reference: true,
        }
    }
}

/// Everything needed to iterate on `(Id + ΠS) p = g`.
#[derive(Debug)]
pub struct SkeletonProblem {
    pub decomposition: Arc<Decomposition>,
    pub inductance: Arc<Inductance>,
    pub projector: Projector,
    pub scattering: Scattering,
    pub rhs: SkeletonRhs,
    /// Energy-norm Gram matrix on `E`.
    pub energy: SparseMatrix,
    /// Direct solution of the undecomposed system.
    pub reference: Option<Vec<C64>>,
    pub kappa: f64,
}

impl SkeletonProblem {
    pub fn build(
        mesh: &Mesh,
        decomposition: Arc<Decomposition>,
        medium: &Medium,
        source: &SourceSpec,
        options: ProblemOptions,
    ) -> Result<Self> {
        let inductance = Arc::new(Inductance::build(
            options.inductance,
            mesh,
            &decomposition,
            medium,
            options.omega_prime,
        )?);
        Self::with_inductance(mesh, decomposition, medium, source, inductance, options)
    }

    /// Set-up with a prebuilt inductance.
    pub fn with_inductance(
        mesh: &Mesh,
        decomposition: Arc<Decomposition>,
        medium: &Medium,
        source: &SourceSpec,
        inductance: Arc<Inductance>,
        options: ProblemOptions,
    ) -> Result<Self> {
        let projector = Projector::new(decomposition.clone(), inductance.clone(), options.pcg)?;
        let systems = assemble_all_local(mesh, &decomposition, medium, source)?;
        let scattering = Scattering::new(decomposition.clone(), systems, &inductance)?;
        let rhs = scattering.rhs(&projector)?;
        let reference = if options.reference {
            let global = assemble_global(mesh, medium, source)?;
            Some(lu_factor(&global.a)?.solve(&global.f))
        } else {
            None
        };
        Ok(Self {
            decomposition,
            inductance,
            projector,
            scattering,
            rhs,
            energy: energy_gram(mesh, medium.kappa)?,
            reference,
            kappa: medium.kappa,
        })
    }

    pub fn n_sys(&self) -> usize {
        self.decomposition.n_sys()
    }

    /// `(Id + ΠS) p`, evaluated as `−2iBu + 2Qv` with
    /// `u = (A − iBᵀTB)⁻¹BᵀTp` and `v = (QᵀTQ)⁻¹QᵀT(p + 2iBu)`.
    pub fn apply_skeleton_operator(&self, p: &[C64]) -> Result<Vec<C64>> {
        let d = &self.decomposition;
        let u = self.scattering.solve(false, Some(p));
        let bu = d.trace(&u);
        let w: Vec<C64> = p.iter().zip(&bu).map(|(x, y)| x + 2.0 * I * y).collect();
        let qv = d.lift(&self.projector.project_coefficients(&w)?);
        Ok(bu.iter().zip(&qv).map(|(y, z)| -2.0 * I * y + 2.0 * z).collect())
    }

    /// `p + Π(S p)`, composed from the individual operators.
    pub fn apply_skeleton_operator_composed(&self, p: &[C64]) -> Result<Vec<C64>> {
        let (sp, _) = self.scattering.apply_s(p);
        let pisp = self.projector.communicate(&sp)?;
        Ok(p.iter().zip(&pisp).map(|(x, y)| x + y).collect())
    }

    /// Broken volume field `u = (A − iBᵀTB)⁻¹(BᵀTp + f)` and its merge `(RᵀR)⁻¹Rᵀu`.
    pub fn recover_volume(&self, p: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let u = self.scattering.solve(true, Some(p));
        let merged = self.decomposition.merge(&u);
        (u, merged)
    }

    /// Relative energy-norm distance of a global field to the direct solution.
    pub fn error_vs_reference(&self, u: &[C64]) -> Result<f64> {
        let reference = self
            .reference
            .as_ref()
            .ok_or_else(|| Error::Unsupported("no reference solution was computed".into()))?;
        energy_norm_error(&self.energy, u, reference)
    }
}

/// `‖u − u_ref‖_G / ‖u_ref‖_G` for the energy Gram matrix `G`.
pub fn energy_norm_error(gram: &SparseMatrix, u: &[C64], u_ref: &[C64]) -> Result<f64> {
    if u.len() != u_ref.len() || gram.nrows() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: gram.nrows(),
            got: u.len(),
        });
    }
    let norm = |x: &[C64]| dotc(x, &gram.mul_vec(x)).re.max(0.0).sqrt();
    let denom = norm(u_ref);
    if denom == 0.0 {
        return Err(Error::InvalidArgument("reference field is zero".into()));
    }
    Ok(norm(&sub(u, u_ref)) / denom)
}
