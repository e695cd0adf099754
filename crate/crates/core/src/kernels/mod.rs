//! Numerical kernels shared by every module: sparse storage, sparse LU,
//! preconditioned CG and restarted GMRES. Iterative kernels take operator
//! callbacks so that matrix-free operators plug in directly.

pub mod gmres;
pub mod lu;
pub mod pcg;
pub mod sparse;
pub mod vector;

pub use gmres::{gmres_solve, Observer, GmresConfig, GmresOutcome, GmresStatus};
pub use lu::{lu_factor, LuFactorization};
pub use pcg::{pcg_solve, PcgConfig, PcgOutcome};
pub use sparse::{SparseMatrix, TripletBuilder};
