//! Non-overlapping domain decomposition for 2D time-harmonic wave problems
//! discretized with lowest-order edge elements.
//!
//! The skeleton formulation `(Id + Π S) p = g` is posed on a (possibly thick)
//! skeleton of the partition. The communication operator `Π = 2P - Id` is the
//! symmetry about the single-trace space with respect to the scalar product
//! induced by an inductance operator `T`, so cross-points need no special
//! treatment.
//!
//! Module map:
//! - [`kernels`]: sparse storage, sparse LU, PCG and restarted GMRES.
//! - [`mesh_partition`]: meshes, partitions, edge sets, skeletons, boolean maps.
//! - [`assembly`]: edge-element matrices, sources, inductance building blocks.
//! - [`trace_algebra`]: inductances, projector onto single traces, `Π`.
//! - [`scattering`]: local factorizations and the scattering operator `S`.
//! - [`solvers`]: Richardson and GMRES on the skeleton, recovery, diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod error;
pub mod kernels;
pub mod mesh_partition;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod scattering;
pub mod solvers;
pub mod trace_algebra;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);
