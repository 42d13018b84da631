//! Robust PhaseMax: exact phase retrieval from magnitude measurements with
//! sparse adversarial corruptions, by linear programming.
//!
//! Given Gaussian sensing vectors a_i, corrupted magnitudes
//! b_i = |⟨a_i, x0⟩| + η_i with η sparse, and an anchor φ near x0, the
//! program
//!
//! ```text
//! maximize ⟨φ, x⟩ − λ Σ e_i   s.t.  |⟨a_i, x⟩| ≤ b_i + e_i,  e ≥ 0
//! ```
//!
//! returns (x0, max(−η, 0)) once m is a large enough multiple of n and λ is
//! at least 7∥x0∥/m.
//!
//! Modules:
//! - [`measurements`]: signals, Gaussian ensembles, corruption models
//! - [`anchor`]: oracle and spectral anchors, median norm estimate
//! - [`lp`]: dense two-phase simplex and a vertex-enumeration oracle
//! - [`rpm`]: program assembly, solve, recovery metrics
//! - [`lemmas`]: Monte Carlo and closed-form checks of the supporting bounds
//! - [`trial`], [`sweep`], [`heatmap`]: seeded experiments and their output
// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]


pub mod anchor;
pub mod csvio;
pub mod error;
pub mod heatmap;
pub mod lemmas;
pub mod linalg;
pub mod lp;
pub mod measurements;
mod parallel;
pub mod rpm;
pub mod seed;
pub mod stats;
pub mod sweep;
pub mod trial;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use lp::{LpProblem, LpSolution, LpStatus, SolveOptions};
pub use measurements::{CorruptionModel, CorruptionSpec, MeasurementSet, SensingMatrix, Signal};
pub use rpm::{Formulation, LambdaMode, RecoveryReport, RpmConfig};
pub use trial::{AnchorMode, TrialConfig, TrialResult};
