//! Fixtures shared by the criterion benchmarks.

use symtomo::{
    catalog, polarization_projector_pool, random_symmetric_state, select_quorum, simulate,
    symmetric_basis, MeasurementRecord, NoiseModel, NumericPolicy, SymmetricBasis,
};

pub fn basis(name: &str, n_qubits: usize) -> SymmetricBasis {
    symmetric_basis(
        &catalog(name, n_qubits).expect("catalog symmetry"),
        &NumericPolicy::default(),
    )
    .expect("basis")
}

/// Photon-counting record of a random symmetric state on a greedy quorum.
pub fn photonic_record(basis: &SymmetricBasis, seed: u64) -> MeasurementRecord {
    let pool = polarization_projector_pool(basis.n_qubits()).expect("pool");
    let set = select_quorum(&pool, basis, 0).expect("quorum");
    let rho = random_symmetric_state(basis, basis.dim(), seed).expect("state");
    simulate(&rho, &set, &NoiseModel::binomial(0.18, 5e-5, 500_000, seed)).expect("record")
}
