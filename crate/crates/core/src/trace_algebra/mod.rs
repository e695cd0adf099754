//! The `T` scalar product on multi-traces, the `T`-orthogonal projector onto
//! single traces and the communication operator `Π = 2P − Id`.
//!
//! Multi-traces are flat vectors of length `n_sys` whose blocks follow
//! [`Decomposition::trace_range`](crate::mesh_partition::Decomposition::trace_range);
//! single traces are vectors over `Γ` in edge order.

mod inductance;
mod projector;

pub use inductance::{auxiliary_saddle, Inductance, InductanceBlock, InductanceKind};
pub use projector::Projector;
