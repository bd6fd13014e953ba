//! Numerical engine for left-invariant complex Finsler metrics on complex Lie groups.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function of its inputs:
//! Wirtinger finite differences on real coordinates, concrete group charts with holomorphic
//! multiplication, the invariant-frame calculus on `T^{1,0}G`, complex Minkowski norms, the
//! Chern-Finsler connection computed by two independent routes, holomorphic sectional curvature
//! and the three Kähler torsions.
//!
//! Index conventions: a matrix `M` with entries `M^i_j` is stored with the upper index as the row,
//! so `M[(i, j)] = M^i_j`. Hessians are stored as `H[(i, j)] = ∂_{w^i} ∂_{w̄^j} f`.

#![no_std]

extern crate alloc;

pub mod calculus;
pub mod curvature;
pub mod dual;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod metric;
pub mod norm;
pub mod report;
pub mod sampling;

pub use calculus::{ComplexPoint, DiffOrder, DiffScheme, FiberPoint};
pub use error::{Error, Result};
pub use lie::{FrameData, FrameSide, GroupModel, StructureConstants};
pub use linalg::{CMatrix, Tensor3};
pub use metric::{FinslerFunction, LeftInvariantMetric, MetricJet, PerturbedMetric, SprayValue};
pub use norm::MinkowskiNorm;
pub use report::{Expect, ResidualRow, SampleCoords, VerificationReport};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Fibers with `‖w‖∞` below this are rejected by metric operations.
pub const DEFAULT_W_MIN: f64 = 1e-3;
