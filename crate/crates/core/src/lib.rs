//! Model stability analysis for finite-element stiffness matrices.
//!
//! Ill-conditioning in a stiffness matrix usually comes from a modelling
//! error: a dof held by almost no stiffness, or by stiffness wildly out of
//! proportion with its neighbours. Such dofs form weakly connected
//! components of the dof graph, and the eigenvectors of the smallest
//! eigenvalues concentrate on them. This crate
//!
//! 1. assembles the stiffness matrix of a 2D frame/truss model,
//! 2. estimates its condition number,
//! 3. computes the extreme eigenpairs with a sparse Lanczos solver,
//! 4. looks for a gap separating a cluster of tiny eigenvalues,
//! 5. turns each eigenvector into per-element energies and splits the
//!    elements into a suspect and a sound cluster.
//!
//! The numerical kernels are generic over [`Scalar`] (`f32`, `f64`); the
//! aliases below fix them to `f64`, which is what the CLI and report use.
//!
//! ```
//! use msa_core::{fixtures, run_stability_analysis, StabilityParams};
//!
//! let model = fixtures::portal_frame(1e-8);
//! let params = StabilityParams { n_s: 4, ..Default::default() };
//! let analysis = run_stability_analysis::<f64>(&model, &params).unwrap();
//! assert_eq!(analysis.gap.k, Some(1));
//! let suspects: Vec<u64> = analysis.fields[0]
//!     .suspects()
//!     .into_iter()
//!     .map(|e| model.elements()[e].id)
//!     .collect();
//! assert_eq!(suspects, vec![7, 8]);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod cholesky;
pub mod conditioning;
pub mod dense;
pub mod eigen;
pub mod fixtures;
pub mod model;
pub mod report;
pub mod scalar;
pub mod sparse;
pub mod stability;
pub mod svg;

pub use assembly::{assemble, element_matrices, AssemblyError, ElementStiffness};
pub use conditioning::{estimate_condition, ConditionError, ConditionEstimate};
pub use eigen::{
    dense_oracle_eig, solve_extreme_eigenpairs, EigenError, EigenOptions, EigenPair, EigenSet,
};
pub use model::{
    build_dof_map, parse_model, Dof, DofMap, Element, ElementKind, ElementProps, Model, ModelError,
    Node, Restraint,
};
pub use report::StabilityReport;
pub use scalar::Scalar;
pub use sparse::SparseSymmetric;
pub use stability::{
    detect_gap, energy_s, energy_v, normalize_energies, partition_two_clusters,
    run_stability_analysis, AnalysisError, Cluster, EnergyField, EnergyKind, GapResult,
    StabilityAnalysis, StabilityParams,
};

/// Stiffness matrix in binary64.
pub type Matrix = SparseSymmetric<f64>;
pub type Eigenpairs = EigenSet<f64>;
pub type Condition = ConditionEstimate<f64>;
pub type Gap = GapResult<f64>;
pub type Field = EnergyField<f64>;
pub type Analysis = StabilityAnalysis<f64>;
