//! Normalized tensor-Pauli basis and coordinates with respect to it.

use nalgebra::DMatrix;

use super::{HermitianOp, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest register supported by the dense representation.
pub const MAX_QUBITS: usize = 6;

/// One Pauli string in symplectic form. Entry `(r, r ^ x)` of the string
/// matrix equals `i^{ny} (-1)^{popcount((r ^ x) & z)}`; all other entries vanish.
#[derive(Clone, Copy, Debug)]
struct PauliString {
    x: usize,
    z: usize,
    phase: C64,
}

impl PauliString {
    fn from_index(index: usize, n_qubits: usize) -> Self {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for k in 0..n_qubits {
            let digit = (index >> (2 * (n_qubits - 1 - k))) & 3;
            let bit = 1usize << (n_qubits - 1 - k);
            match digit {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        let phase = match ny % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        Self { x, z, phase }
    }

    #[inline]
    fn entry(&self, row: usize) -> (usize, C64) {
        let col = row ^ self.x;
        let v = if (col & self.z).count_ones() % 2 == 1 {
            -self.phase
        } else {
            self.phase
        };
        (col, v)
    }
}

/// The ordered, normalized Pauli basis `{σ_{i1} ⊗ … ⊗ σ_{iN} / √(2^N)}` of an
/// `N`-qubit register, lexicographic in `(i1, …, iN)` with `σ0 = I`,
/// `σ1 = σx`, `σ2 = σy`, `σ3 = σz`.
///
/// Because the basis is orthonormal under the Hilbert-Schmidt product, the
/// real coordinate vector of a Hermitian operator is an isometric image of
/// it: inner products and norms can be computed on coordinates.
#[derive(Clone, Debug)]
pub struct PauliFrame {
    n_qubits: usize,
    dim: usize,
    strings: Vec<PauliString>,
    norm: f64,
}

impl PauliFrame {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "number of qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        let strings = (0..dim * dim)
            .map(|s| PauliString::from_index(s, n_qubits))
            .collect();
        Ok(Self {
            n_qubits,
            dim,
            strings,
            norm: 1.0 / (dim as f64).sqrt(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements `4^N`.
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// The `index`-th normalized basis element.
    pub fn element(&self, index: usize) -> HermitianOp {
        let s = &self.strings[index];
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            let (c, v) = s.entry(r);
            m[(r, c)] = v * self.norm;
        }
        HermitianOp::from_raw(m)
    }

    /// Real coordinates `⟨B_s, A⟩` of a matrix; for non-Hermitian input this
    /// returns the coordinates of its Hermitian part.
    pub fn coords_of(&self, a: &DMatrix<C64>) -> Vec<f64> {
        debug_assert_eq!(a.nrows(), self.dim);
        self.strings
            .iter()
            .map(|s| {
                let mut acc = ZERO;
                for r in 0..self.dim {
                    let (c, v) = s.entry(r);
                    acc += v * a[(c, r)];
                }
                acc.re * self.norm
            })
            .collect()
    }

    pub fn coords(&self, a: &HermitianOp) -> Vec<f64> {
        self.coords_of(a.as_matrix())
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(&self, coords: &[f64]) -> HermitianOp {
        debug_assert_eq!(coords.len(), self.strings.len());
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for (s, &w) in self.strings.iter().zip(coords) {
            if w == 0.0 {
                continue;
            }
            let w = w * self.norm;
            for r in 0..self.dim {
                let (c, v) = s.entry(r);
                m[(r, c)] += v * w;
            }
        }
        HermitianOp::hermitize(m)
    }

    /// `Q · B_s` for a dense `Q`, exploiting that `B_s` is monomial.
    pub(crate) fn right_multiply(&self, q: &DMatrix<C64>, index: usize) -> DMatrix<C64> {
        let s = &self.strings[index];
        let mut out = DMatrix::<C64>::zeros(self.dim, self.dim);
        // (Q B)[i, c] = Q[i, k] B[k, c] with c = k ^ x
        for k in 0..self.dim {
            let (c, v) = s.entry(k);
            let v = v * self.norm;
            for i in 0..self.dim {
                out[(i, c)] = q[(i, k)] * v;
            }
        }
        out
    }

    /// `B_s · Q` for a dense `Q`.
    pub(crate) fn left_multiply(&self, q: &DMatrix<C64>, index: usize) -> DMatrix<C64> {
        let s = &self.strings[index];
        let mut out = DMatrix::<C64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            let (c, v) = s.entry(r);
            let v = v * self.norm;
            for j in 0..self.dim {
                out[(r, j)] = v * q[(c, j)];
            }
        }
        out
    }
}

/// Normalized tensor-Pauli basis of `N` qubits (`1 ≤ N ≤ 6`), `4^N` elements.
pub fn pauli_basis(n_qubits: usize) -> Result<Vec<HermitianOp>> {
    let frame = PauliFrame::new(n_qubits)?;
    Ok((0..frame.len()).map(|s| frame.element(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{hs_inner, kron, pauli, ComplexMatrix};

    #[test]
    fn single_qubit_basis() {
        let b = pauli_basis(1).unwrap();
        assert_eq!(b.len(), 4);
        let s = 1.0 / 2f64.sqrt();
        for (k, e) in b.iter().enumerate() {
            assert!(e.distance(&pauli(k).scale(s)) < 1e-15);
        }
    }

    #[test]
    fn two_qubit_basis_orthonormal_and_ordered() {
        let b = pauli_basis(2).unwrap();
        assert_eq!(b.len(), 16);
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((hs_inner(&b[i], &b[j]).unwrap() - want).abs() < 1e-14);
            }
        }
        // index 4*a + b is σa ⊗ σb / 2
        for a in 0..4 {
            for c in 0..4 {
                let k = kron(&pauli(a).into(), &pauli(c).into());
                let want = HermitianOp::from_raw(k.into_inner()).scale(0.5);
                assert!(b[4 * a + c].distance(&want) < 1e-15);
            }
        }
    }

    #[test]
    fn three_qubit_identity_overlap() {
        let b = pauli_basis(3).unwrap();
        assert_eq!(b.len(), 64);
        let ip = hs_inner(&b[0], &HermitianOp::identity(8)).unwrap();
        assert!((ip - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        assert!(pauli_basis(0).is_err());
        assert!(pauli_basis(7).is_err());
    }

    #[test]
    fn coordinates_round_trip_and_products() {
        let frame = PauliFrame::new(2).unwrap();
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = C64::new((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.2);
            }
        }
        let h = HermitianOp::hermitize(m.clone());
        let c = frame.coords(&h);
        assert!(frame.from_coords(&c).distance(&h) < 1e-14);
        for (s, &w) in c.iter().enumerate() {
            assert!((hs_inner(&frame.element(s), &h).unwrap() - w).abs() < 1e-14);
        }
        for s in [0, 5, 7, 11, 14] {
            let e = frame.element(s);
            assert!((frame.right_multiply(&m, s) - &m * e.as_matrix()).norm() < 1e-14);
            assert!((frame.left_multiply(&m, s) - e.as_matrix() * &m).norm() < 1e-14);
        }
        let _ = ComplexMatrix::identity(1);
    }
}
