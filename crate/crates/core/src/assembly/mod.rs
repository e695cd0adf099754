//! Lowest-order edge-element assembly on triangles: global and local
//! Galerkin matrices, loads, the Després inductance, the auxiliary coercive
//! matrices behind the Schur-complement inductance, and the energy norm.
//!
//! The sesquilinear form is
//! `∫ μ⁻¹ curl u curl v̄ − κ² ε u·v̄ − i ∫_{∂Ω} (κ/η)(u·t)(v̄·t)`.

mod element;
mod inductance_blocks;
mod medium;
mod source;
mod system;

pub use element::Element;
pub use inductance_blocks::{
    assemble_auxiliary, assemble_despres, decouple_classes, AuxiliarySystem, OmegaPrime,
};
pub use medium::{flower_coefficients, flower_kappa0, Medium, MediumPreset};
pub use source::{PlaneWave, SourceSpec};
pub use system::{assemble_all_local, assemble_global, assemble_local, energy_gram, evaluate_field, LocalSystem};
