//! Generator sets for the symmetries used throughout the examples.

use nalgebra::DMatrix;

use super::{SymmetryKind, SymmetrySpec};
use crate::error::{Error, Result};
use crate::matlin::{embed_site, pauli, ComplexMatrix, HermitianOp, C64};

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 5] = [
    "permutation",
    "werner",
    "global_rotation_z",
    "individual_rotation_z",
    "trivial",
];

fn require_qubits(n_qubits: usize, min: usize, what: &str) -> Result<()> {
    if n_qubits < min {
        return Err(Error::Dimension(format!(
            "{what} symmetry needs at least {min} qubits, got {n_qubits}"
        )));
    }
    Ok(())
}

fn site_sum(op: &HermitianOp, n_qubits: usize) -> HermitianOp {
    let d = 1 << n_qubits;
    let mut acc = HermitianOp::zeros(d);
    for site in 0..n_qubits {
        acc.axpy(1.0, &embed_site(op, site, n_qubits));
    }
    acc
}

/// Permutation matrix exchanging qubits `a` and `b` (0 = leftmost factor).
fn transposition(a: usize, b: usize, n_qubits: usize) -> ComplexMatrix {
    let d = 1usize << n_qubits;
    let (ba, bb) = (n_qubits - 1 - a, n_qubits - 1 - b);
    let mut m = DMatrix::<C64>::zeros(d, d);
    for col in 0..d {
        let (xa, xb) = ((col >> ba) & 1, (col >> bb) & 1);
        let row = if xa != xb {
            col ^ (1 << ba) ^ (1 << bb)
        } else {
            col
        };
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    ComplexMatrix::new(m).expect("square")
}

/// Transpositions `P_12, P_13, …, P_1N` generating the symmetric group.
pub fn perm_generators(n_qubits: usize) -> Result<SymmetrySpec> {
    require_qubits(n_qubits, 2, "permutation")?;
    let gens = (1..n_qubits)
        .map(|j| transposition(0, j, n_qubits))
        .collect();
    SymmetrySpec::new(SymmetryKind::Finite, n_qubits, "permutation", gens)
}

/// `{Σ_sites σ_k}` for `k = 0..3`, the generators of `U^{⊗N}`.
pub fn werner_generators(n_qubits: usize) -> Result<SymmetrySpec> {
    require_qubits(n_qubits, 2, "Werner")?;
    let gens = (0..4)
        .map(|k| site_sum(&pauli(k), n_qubits).into())
        .collect();
    SymmetrySpec::new(SymmetryKind::Lie, n_qubits, "werner", gens)
}

/// Total `σz`: rotations of the whole register about `z`.
pub fn global_rotation_generator(n_qubits: usize) -> Result<SymmetrySpec> {
    require_qubits(n_qubits, 1, "global rotation")?;
    let g = site_sum(&pauli(3), n_qubits);
    SymmetrySpec::new(
        SymmetryKind::Lie,
        n_qubits,
        "global_rotation_z",
        vec![g.into()],
    )
}

/// `σz` on each qubit separately.
pub fn individual_rotation_generators(n_qubits: usize) -> Result<SymmetrySpec> {
    require_qubits(n_qubits, 1, "individual rotation")?;
    let gens = (0..n_qubits)
        .map(|site| embed_site(&pauli(3), site, n_qubits).into())
        .collect();
    SymmetrySpec::new(SymmetryKind::Lie, n_qubits, "individual_rotation_z", gens)
}

/// Looks up a catalog symmetry by name.
pub fn catalog(name: &str, n_qubits: usize) -> Result<SymmetrySpec> {
    match name {
        "permutation" => perm_generators(n_qubits),
        "werner" => werner_generators(n_qubits),
        "global_rotation_z" => global_rotation_generator(n_qubits),
        "individual_rotation_z" => individual_rotation_generators(n_qubits),
        "trivial" => SymmetrySpec::trivial(n_qubits),
        _ => Err(Error::UnknownSymmetry {
            name: name.to_string(),
            available: CATALOG_NAMES.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{commutator_i, DensityMatrix};
    use crate::symmetry::commutator_norm;
    use nalgebra::DVector;

    fn basis_ket(index: usize, d: usize) -> DVector<C64> {
        let mut v = DVector::zeros(d);
        v[index] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn swap_exchanges_01_and_10() {
        let spec = perm_generators(2).unwrap();
        assert_eq!(spec.generators().len(), 1);
        let swap = spec.generators()[0].as_matrix();
        assert_eq!(swap * basis_ket(1, 4), basis_ket(2, 4));
        assert_eq!(swap * basis_ket(0, 4), basis_ket(0, 4));
    }

    #[test]
    fn three_qubit_transpositions_are_involutions() {
        let spec = perm_generators(3).unwrap();
        assert_eq!(spec.generators().len(), 2);
        for g in spec.generators() {
            let sq = g.as_matrix() * g.as_matrix();
            assert_eq!(sq, DMatrix::identity(8, 8));
        }
        assert!(perm_generators(1).is_err());
    }

    #[test]
    fn werner_generators_two_qubits() {
        let spec = werner_generators(2).unwrap();
        assert_eq!(spec.generators().len(), 4);
        let z = spec.generators()[3].to_hermitian().unwrap();
        assert!(z.distance(&HermitianOp::diagonal(&[2.0, 0.0, 0.0, -2.0])) < 1e-15);
        let id = spec.generators()[0].to_hermitian().unwrap();
        assert!(id.distance(&HermitianOp::identity(4).scale(2.0)) < 1e-15);
        let swap = perm_generators(2).unwrap().generators()[0].clone();
        for g in spec.generators() {
            assert!(commutator_norm(g.as_matrix(), swap.as_matrix()) < 1e-14);
        }
        assert!(werner_generators(1).is_err());
    }

    #[test]
    fn werner_generators_commute_with_all_transpositions() {
        let w = werner_generators(3).unwrap();
        let p = perm_generators(3).unwrap();
        for g in w.generators() {
            for t in p.generators() {
                assert!(commutator_norm(g.as_matrix(), t.as_matrix()) < 1e-14);
            }
        }
    }

    #[test]
    fn global_rotation_examples() {
        let one = global_rotation_generator(1).unwrap();
        assert!(
            one.generators()[0]
                .to_hermitian()
                .unwrap()
                .distance(&pauli(3))
                < 1e-15
        );
        let two = global_rotation_generator(2).unwrap();
        let g = two.generators()[0].to_hermitian().unwrap();
        assert!(g.distance(&HermitianOp::diagonal(&[2.0, 0.0, 0.0, -2.0])) < 1e-15);
        // singlet (|01⟩ - |10⟩)/√2
        let mut psi = DVector::<C64>::zeros(4);
        psi[1] = C64::new(1.0, 0.0);
        psi[2] = C64::new(-1.0, 0.0);
        let singlet = DensityMatrix::pure(&psi).unwrap();
        assert_eq!(
            commutator_i(&g, singlet.op()).unwrap().frobenius_norm(),
            0.0
        );
    }

    #[test]
    fn individual_rotation_examples() {
        let one = individual_rotation_generators(1).unwrap();
        assert!(
            one.generators()[0]
                .to_hermitian()
                .unwrap()
                .distance(&pauli(3))
                < 1e-15
        );
        let three = individual_rotation_generators(3).unwrap();
        assert_eq!(three.generators().len(), 3);
        for a in three.generators() {
            for b in three.generators() {
                assert_eq!(commutator_norm(a.as_matrix(), b.as_matrix()), 0.0);
            }
        }
    }

    #[test]
    fn unknown_name_lists_catalog() {
        let err = catalog("lorentz", 2).unwrap_err().to_string();
        for name in CATALOG_NAMES {
            assert!(err.contains(name));
        }
    }
}
