//! The symmetric subspace `S_G` of a symmetry group and its orthonormal basis.
//!
//! A state is invariant under a connected Lie group with Hermitian generators
//! `{Q_k}` iff it commutes with every `Q_k`, which is the same as being
//! Hilbert-Schmidt orthogonal to every `i[Q_k, O_j]` for a basis `{O_j}` of
//! Hermitian matrices. `S_G` is therefore the orthogonal complement of the
//! span `T` of those commutators. Finite groups reduce to the same problem
//! after splitting each unitary generator into Hermitian and anti-Hermitian
//! parts.
//!
//! [`symmetric_basis`] orthonormalizes the commutators (yielding a basis of
//! `T`), appends the Pauli basis and orthonormalizes the combined list; the
//! vectors that survive after the first `c = dim T` form the basis of `S_G`.

mod catalog;
pub(crate) mod gso;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{
    commutator_i, hs_inner, ComplexMatrix, DensityMatrix, HermitianOp, MatrixJson, PauliFrame, C64,
    I,
};
use crate::policy::NumericPolicy;
use gso::Orthonormalizer;

pub use catalog::{
    catalog, global_rotation_generator, individual_rotation_generators, perm_generators,
    werner_generators, CATALOG_NAMES,
};

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryKind {
    /// Hermitian Lie algebra generators `Q_k`.
    Lie,
    /// Unitary generators `U_k` of a finite group.
    Finite,
}

/// A symmetry declared through its generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct SymmetrySpec {
    kind: SymmetryKind,
    n_qubits: usize,
    label: String,
    generators: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    kind: SymmetryKind,
    n_qubits: usize,
    label: String,
    generators: Vec<MatrixJson>,
}

impl TryFrom<SpecJson> for SymmetrySpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        let generators = raw
            .generators
            .iter()
            .map(|g| g.to_matrix().and_then(ComplexMatrix::new))
            .collect::<Result<Vec<_>>>()?;
        SymmetrySpec::new(raw.kind, raw.n_qubits, raw.label, generators)
    }
}

impl From<SymmetrySpec> for SpecJson {
    fn from(s: SymmetrySpec) -> Self {
        Self {
            kind: s.kind,
            n_qubits: s.n_qubits,
            label: s.label,
            generators: s.generators.iter().map(MatrixJson::from).collect(),
        }
    }
}

impl SymmetrySpec {
    pub fn new(
        kind: SymmetryKind,
        n_qubits: usize,
        label: impl Into<String>,
        generators: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::matlin::MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "number of qubits must be in 1..={}, got {n_qubits}",
                crate::matlin::MAX_QUBITS
            )));
        }
        let dim = 1usize << n_qubits;
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: g.dim(),
                    right: dim,
                });
            }
            match kind {
                SymmetryKind::Lie => {
                    g.to_hermitian()?;
                }
                SymmetryKind::Finite => {
                    let deviation = g.unitarity_defect();
                    if deviation > UNITARY_TOL {
                        return Err(Error::NotUnitary { index, deviation });
                    }
                }
            }
        }
        Ok(Self {
            kind,
            n_qubits,
            label: label.into(),
            generators,
        })
    }

    /// The trivial group, declared by the single generator `I`.
    pub fn trivial(n_qubits: usize) -> Result<Self> {
        let d = 1usize << n_qubits.min(crate::matlin::MAX_QUBITS);
        Self::new(
            SymmetryKind::Lie,
            n_qubits,
            "trivial",
            vec![ComplexMatrix::identity(d)],
        )
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// Same group with every generator multiplied by `s` (Lie kind only; a
    /// scaled unitary is no longer unitary).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if self.kind != SymmetryKind::Lie {
            return Err(Error::InvalidArgument(
                "only Lie generators can be rescaled".into(),
            ));
        }
        Ok(Self {
            generators: self.generators.iter().map(|g| g.scale(s)).collect(),
            ..self.clone()
        })
    }

    /// Hermitian generators of a Lie-kind spec.
    fn hermitian_generators(&self) -> Result<Vec<HermitianOp>> {
        if self.kind != SymmetryKind::Lie {
            return Err(Error::InvalidArgument(format!(
                "symmetry '{}' has finite generators; convert them first",
                self.label
            )));
        }
        self.generators.iter().map(|g| g.to_hermitian()).collect()
    }
}

/// All `m · 4^N` operators `i[Q_k, O_j]`, generator-major. Zero commutators
/// are kept.
pub fn lie_constraint_set(spec: &SymmetrySpec, basis: &[HermitianOp]) -> Result<Vec<HermitianOp>> {
    let generators = spec.hermitian_generators()?;
    let mut out = Vec::with_capacity(generators.len() * basis.len());
    for q in &generators {
        for o in basis {
            out.push(commutator_i(q, o)?);
        }
    }
    Ok(out)
}

/// Replaces each unitary `U` by `(U + U†)/2` and `(U − U†)/(2i)`.
///
/// For Hermitian `ρ`, `[ρ, U] = [ρ, H₁] + i[ρ, H₂]` splits into an
/// anti-Hermitian and a Hermitian part, so `[ρ, U] = 0` iff both vanish.
pub fn finite_to_hermitian_constraints(spec: &SymmetrySpec) -> Result<SymmetrySpec> {
    if spec.kind != SymmetryKind::Finite {
        return Err(Error::InvalidArgument(format!(
            "symmetry '{}' is not finite",
            spec.label
        )));
    }
    let half = C64::new(0.5, 0.0);
    let mut generators = Vec::with_capacity(2 * spec.generators.len());
    for (index, u) in spec.generators.iter().enumerate() {
        let deviation = u.unitarity_defect();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { index, deviation });
        }
        let m = u.as_matrix();
        let adj = m.adjoint();
        let re = (m + &adj) * half;
        let im = (m - &adj) * (half / I);
        generators.push(HermitianOp::hermitize(re).into());
        generators.push(HermitianOp::hermitize(im).into());
    }
    SymmetrySpec::new(
        SymmetryKind::Lie,
        spec.n_qubits,
        spec.label.clone(),
        generators,
    )
}

/// Orthonormal basis `{S_1, …, S_r}` of the symmetric subspace.
#[derive(Clone, Debug)]
pub struct SymmetricBasis {
    n_qubits: usize,
    elements: Vec<HermitianOp>,
    coords: Vec<Vec<f64>>,
    spec: SymmetrySpec,
    complement_dim: usize,
    frame: PauliFrame,
}

impl SymmetricBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `r = dim S_G`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn spec(&self) -> &SymmetrySpec {
        &self.spec
    }

    /// `c = dim T`, so that `r + c = 4^N`.
    pub fn complement_dim(&self) -> usize {
        self.complement_dim
    }

    pub fn frame(&self) -> &PauliFrame {
        &self.frame
    }

    /// Pauli coordinates of `S_i`.
    pub fn element_coords(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// `α_i = tr(S_i A)`.
    pub fn coefficients(&self, op: &HermitianOp) -> Result<Vec<f64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: self.dim(),
            });
        }
        let c = self.frame.coords(op);
        Ok(self.coefficients_of_coords(&c))
    }

    pub(crate) fn coefficients_of_coords(&self, c: &[f64]) -> Vec<f64> {
        self.coords.iter().map(|s| gso::dot(s, c)).collect()
    }

    /// `Σ α_i S_i`.
    pub fn assemble(&self, alpha: &[f64]) -> Result<HermitianOp> {
        if alpha.len() != self.len() {
            return Err(Error::DimensionMismatch {
                left: alpha.len(),
                right: self.len(),
            });
        }
        let d = self.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (a, s) in alpha.iter().zip(&self.elements) {
            if *a != 0.0 {
                m += s.as_matrix() * C64::new(*a, 0.0);
            }
        }
        Ok(HermitianOp::hermitize(m))
    }

    /// Orthogonal projection of an arbitrary Hermitian operator onto `S_G`.
    pub fn project(&self, op: &HermitianOp) -> Result<HermitianOp> {
        let alpha = self.coefficients(op)?;
        self.assemble(&alpha)
    }

    /// Re-ordered copy of the basis (`order[k]` is the old index of new element `k`).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len()
            || order
                .iter()
                .any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidArgument(
                "not a permutation of the basis".into(),
            ));
        }
        Ok(Self {
            elements: order.iter().map(|&i| self.elements[i].clone()).collect(),
            coords: order.iter().map(|&i| self.coords[i].clone()).collect(),
            ..self.clone()
        })
    }

    /// Basis of the full Hermitian space (no symmetry).
    pub fn full(n_qubits: usize) -> Result<Self> {
        symmetric_basis(&SymmetrySpec::trivial(n_qubits)?, &NumericPolicy::default())
    }
}

/// Coordinates of `i[Q, B_j]` for every Pauli element `B_j`, in order.
fn commutator_coords(q: &DMatrix<C64>, frame: &PauliFrame) -> Vec<Vec<f64>> {
    (0..frame.len())
        .map(|j| {
            let c = (frame.right_multiply(q, j) - frame.left_multiply(q, j)) * I;
            frame.coords_of(&c)
        })
        .collect()
}

/// Builds the orthonormal basis of `S_G` for `spec`.
pub fn symmetric_basis(spec: &SymmetrySpec, policy: &NumericPolicy) -> Result<SymmetricBasis> {
    let lie = match spec.kind {
        SymmetryKind::Lie => spec.clone(),
        SymmetryKind::Finite => finite_to_hermitian_constraints(spec)?,
    };
    let generators = lie.hermitian_generators()?;
    let frame = PauliFrame::new(spec.n_qubits)?;
    let len = frame.len();

    // Span of the constraint operators. Every commutator is traceless, so the
    // span never exceeds 4^N - 1.
    let mut span_t = Orthonormalizer::new(len, policy.rank_tol);
    'outer: for q in &generators {
        for v in commutator_coords(q.as_matrix(), &frame) {
            if span_t.rank() == len - 1 {
                break 'outer;
            }
            span_t.push(v);
        }
    }
    let t_basis = span_t.into_vectors();
    let c = t_basis.len();

    // Re-orthogonalize [T_1..T_c, B_1..B_{4^N}] and keep what follows T.
    let mut combined = Orthonormalizer::new(len, policy.rank_tol);
    for v in t_basis {
        if !combined.push(v) {
            return Err(Error::Numerical(
                "orthonormal constraint vectors lost rank on re-orthogonalization".into(),
            ));
        }
    }
    for j in 0..len {
        if combined.is_full() {
            break;
        }
        let mut e = vec![0.0; len];
        e[j] = 1.0;
        combined.push(e);
    }
    if !combined.is_full() {
        return Err(Error::Numerical(format!(
            "completed basis has rank {} < {len}",
            combined.rank()
        )));
    }
    let coords: Vec<Vec<f64>> = combined.into_vectors().split_off(c);
    let elements = coords.iter().map(|v| frame.from_coords(v)).collect();
    Ok(SymmetricBasis {
        n_qubits: spec.n_qubits,
        elements,
        coords,
        spec: spec.clone(),
        complement_dim: c,
        frame,
    })
}

/// Symmetric part `ρ_G = Σ_i tr(ρ S_i) S_i`.
pub fn project_symmetric(rho: &DensityMatrix, basis: &SymmetricBasis) -> Result<DensityMatrix> {
    DensityMatrix::new(basis.project(rho.op())?)
}

/// `‖[A, B]‖_F` for any pair of square matrices.
pub fn commutator_norm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a * b - b * a).norm()
}

/// Largest `|⟨S_i, T⟩| / ‖T‖` over basis elements and the given constraints.
pub fn max_constraint_overlap(basis: &SymmetricBasis, constraints: &[HermitianOp]) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in constraints {
        let n = t.frobenius_norm();
        if n == 0.0 {
            continue;
        }
        for s in basis.elements() {
            worst = worst.max(hs_inner(s, t)?.abs() / n);
        }
    }
    Ok(worst)
}
