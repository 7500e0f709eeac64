//! Dense complex Hermitian linear algebra at dimension `d = 2^N`.
//!
//! Matrices are stored as [`nalgebra::DMatrix`] of [`Complex64`] and wrapped in
//! newtypes that carry the structural guarantees the rest of the crate relies
//! on: [`ComplexMatrix`] (square), [`HermitianOp`] (Hermitian) and
//! [`DensityMatrix`] (Hermitian, unit trace, positive semidefinite).

mod json;
mod pauli;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub use json::MatrixJson;
pub use pauli::{pauli_basis, PauliFrame, MAX_QUBITS};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerances attached to [`DensityMatrix`] validation.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
pub const DENSITY_PSD_TOL: f64 = 1e-9;

const EIG_MAX_ITER: usize = 10_000;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::Dimension("matrix has dimension 0".into()));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    /// Frobenius norm of `U U† - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (&self.0 * self.0.adjoint() - DMatrix::<C64>::identity(d, d)).norm()
    }

    /// Interpret as a Hermitian operator, checking the default tolerance.
    pub fn to_hermitian(&self) -> Result<HermitianOp> {
        HermitianOp::new(self.0.clone())
    }
}

impl From<HermitianOp> for ComplexMatrix {
    fn from(h: HermitianOp) -> Self {
        Self(h.0)
    }
}

/// Complex Hermitian matrix with the Hilbert-Schmidt inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp(DMatrix<C64>);

impl HermitianOp {
    /// Validates squareness and Hermiticity at the default tolerance.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerance(m, NumericPolicy::default().herm_tol)
    }

    /// Validates Hermiticity with a tolerance relative to `max(1, max|m_ij|)`.
    pub fn with_tolerance(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        let m = ComplexMatrix::new(m)?.into_inner();
        let defect = hermiticity_defect(&m);
        if defect > tol * max_abs(&m).max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::hermitize(m))
    }

    /// Returns `(M + M†) / 2` without validation. Used for computed results
    /// that are Hermitian up to round-off.
    pub fn hermitize(m: DMatrix<C64>) -> Self {
        let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self(sym)
    }

    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let v = DVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        Self(DMatrix::from_diagonal(&v))
    }

    /// Projector `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector(v: &DVector<C64>) -> Self {
        let norm2 = v.norm_squared();
        Self::hermitize(v * v.adjoint() / C64::new(norm2, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// `self + s * other`, in place.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.0 += &other.0 * C64::new(s, 0.0);
    }

    /// Frobenius distance to another operator.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm()
    }

    /// Conjugation `U self U†` by an arbitrary square matrix.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Ok(Self::hermitize(
            u.as_matrix() * &self.0 * u.as_matrix().adjoint(),
        ))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*eig_hermitian(self)?.eigenvalues.last().expect("dim >= 1"))
    }

    /// Expectation value `tr(self * rho)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        hs_inner(self, rho.op())
    }
}

impl From<HermitianOp> for DMatrix<C64> {
    fn from(h: HermitianOp) -> Self {
        h.0
    }
}

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianOp);

impl DensityMatrix {
    pub fn new(op: HermitianOp) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = op.min_eigenvalue()?;
        if min < -DENSITY_PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {min:.3e}"
            )));
        }
        Ok(Self(op))
    }

    /// Pure state `|ψ⟩⟨ψ|` (the vector is normalized first).
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        if psi.norm() == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        Ok(Self(HermitianOp::projector(psi)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianOp::identity(dim).scale(1.0 / dim as f64))
    }

    /// Clamps negative eigenvalues to zero and renormalizes the trace.
    pub fn from_clamped(op: &HermitianOp) -> Result<Self> {
        let spec = eig_hermitian(op)?;
        let d = op.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        let mut total = 0.0;
        for (k, &l) in spec.eigenvalues.iter().enumerate() {
            if l > 0.0 {
                let v = spec.eigenvectors.column(k);
                m += v * v.adjoint() * C64::new(l, 0.0);
                total += l;
            }
        }
        if total <= 0.0 {
            return Err(Error::InvalidDensity("no positive spectral weight".into()));
        }
        Ok(Self(HermitianOp::hermitize(m / C64::new(total, 0.0))))
    }

    pub fn op(&self) -> &HermitianOp {
        &self.0
    }

    pub fn into_op(self) -> HermitianOp {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn purity(&self) -> f64 {
        hs_inner(&self.0, &self.0).expect("same dim")
    }
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    /// Reassembles `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.eigenvectors.nrows();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            m += v * v.adjoint() * C64::new(l, 0.0);
        }
        m
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// Hilbert-Schmidt inner product `tr(A B†)`, real for Hermitian arguments.
pub fn hs_inner(a: &HermitianOp, b: &HermitianOp) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.0
        .iter()
        .zip(b.0.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// `i [A, B] = i (AB - BA)`, Hermitian whenever `A` and `B` are.
pub fn commutator_i(a: &HermitianOp, b: &HermitianOp) -> Result<HermitianOp> {
    check_dims(a.dim(), b.dim())?;
    let c = (&a.0 * &b.0 - &b.0 * &a.0) * I;
    Ok(HermitianOp::hermitize(c))
}

/// Raw commutator `AB - BA` for general square matrices.
pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

pub fn eig_hermitian(m: &HermitianOp) -> Result<Spectrum> {
    let eig =
        SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
            Error::Numerical(format!(
                "Hermitian eigensolver exceeded {EIG_MAX_ITER} iterations"
            ))
        })?;
    let d = m.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::<C64>::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Positive square root with eigenvalues clamped at zero.
/// Lower Cholesky factor of a Hermitian positive-definite matrix, or `None`
/// when a pivot is not strictly positive. (nalgebra's complex Cholesky takes
/// complex square roots of negative pivots and so never rejects.)
pub(crate) fn cholesky_hpd(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let n = m.nrows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return None;
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Some(l)
}

pub(crate) fn psd_sqrt(m: &HermitianOp) -> Result<DMatrix<C64>> {
    let spec = eig_hermitian(m)?;
    let d = m.dim();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        if l > 0.0 {
            let v = spec.eigenvectors.column(k);
            out += v * v.adjoint() * C64::new(l.sqrt(), 0.0);
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `F = (tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let sr = psd_sqrt(rho.op())?;
    let inner = HermitianOp::hermitize(&sr * sigma.op().as_matrix() * &sr);
    let spec = eig_hermitian(&inner)?;
    let root_trace: f64 = spec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &HermitianOp, tol: f64) -> bool {
    match m.min_eigenvalue() {
        Ok(l) => l >= -tol,
        Err(_) => false,
    }
}

/// Single-qubit Pauli matrices σ0..σ3.
pub fn pauli(k: usize) -> HermitianOp {
    let m = match k {
        0 => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        1 => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("Pauli index {k} out of range"),
    };
    HermitianOp(m)
}

/// Embeds a single-site operator at `site` (0 = leftmost factor) of an
/// `n_qubits` register.
pub fn embed_site(op: &HermitianOp, site: usize, n_qubits: usize) -> HermitianOp {
    let id = ComplexMatrix::identity(2);
    let mut acc = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        let factor = if q == site {
            ComplexMatrix(op.0.clone())
        } else {
            id.clone()
        };
        acc = kron(&acc, &factor);
    }
    HermitianOp(acc.0)
}
