//! Symmetry-reduced quantum state tomography.
//!
//! Given the generators of a symmetry group (Lie algebra generators for a
//! connected group, or unitary generators of a finite group), this crate
//! builds an orthonormal Hermitian basis `{S_i}` of the operators commuting
//! with the group, parameterizes symmetric states as `ρ = Σ α_i S_i`, and
//! estimates `α` from noisy measurement records either by linear inversion or
//! by a convex program that enforces `ρ ⪰ 0`.
//!
//! Modules, bottom up:
//! - [`matlin`]: dense complex Hermitian linear algebra and fidelity.
//! - [`symmetry`]: commutant construction, projection and generator catalog.
//! - [`statesim`]: target states, measurement sets and noise simulation.
//! - [`estimate`]: design matrices, quorum selection and estimators.
//! - [`pipeline`]: simulate-then-estimate scenarios and benchmark sweeps.

pub mod error;
pub mod estimate;
pub mod matlin;
pub mod pipeline;
pub mod policy;
pub mod rng;
pub mod statesim;
pub mod symmetry;

pub use error::{Error, Result};
pub use estimate::{
    baseline_full_inversion, design_matrix, fidelity_report, linear_inversion, select_quorum,
    vqt_estimate, vqt_estimate_with_unmeasured, DesignMatrix, EstimateResult, SolverOptions,
};
pub use matlin::{
    commutator_i, eig_hermitian, fidelity, hs_inner, is_psd, kron, pauli_basis, ComplexMatrix,
    DensityMatrix, HermitianOp, Spectrum,
};
pub use pipeline::{
    run_benchmark, BenchmarkRow, EstimatorConfig, EstimatorKind, MeasurementChoice,
    MeasurementConfig, Prepared, RunConfig, Scenario, StateConfig, StateKind, Sweep, SymmetryRef,
    Trial,
};
pub use policy::NumericPolicy;
pub use statesim::{
    calibrate_frequency, cat_state, eigenprojector_set, ghz_state, polarization_projector_pool,
    random_density, random_symmetric_state, simulate, simulate_binomial, simulate_exact,
    simulate_gaussian, MeasurementKind, MeasurementRecord, MeasurementSet, NoiseKind, NoiseModel,
    ValueKind, DEFAULT_DEGENERACY_TOL,
};
pub use symmetry::{
    catalog, finite_to_hermitian_constraints, global_rotation_generator,
    individual_rotation_generators, lie_constraint_set, perm_generators, project_symmetric,
    symmetric_basis, werner_generators, SymmetricBasis, SymmetryKind, SymmetrySpec,
};
