//! Target states, measurement sets and simulated measurement records.
//!
//! Two noise models are provided. The photonic model draws click counts from
//! `Binomial(N_trials, p_det)` with `p_det = 1 − exp(−μ p_ideal − λ_dc)` and
//! inverts that response to report calibrated frequencies. The Gaussian model
//! adds `N(0, σ²)` to each exact expectation value. Every effect draws from
//! its own sub-stream of the record seed, so records do not depend on
//! evaluation order.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Binomial, Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{eig_hermitian, hs_inner, DensityMatrix, HermitianOp, C64};
use crate::rng::{stream, substream, RNG_ALGORITHM};
use crate::symmetry::{project_symmetric, SymmetricBasis};

const PROJECTOR_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-8;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    /// Effects are projectors; outcomes are (calibrated) frequencies.
    Projector,
    /// Effects are arbitrary Hermitian observables; outcomes are mean values.
    Observable,
}

/// Ordered list of measured effects with a label each.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    effects: Vec<HermitianOp>,
    kind: MeasurementKind,
    labels: Vec<String>,
}

impl MeasurementSet {
    pub fn new(
        effects: Vec<HermitianOp>,
        kind: MeasurementKind,
        labels: Vec<String>,
    ) -> Result<Self> {
        if effects.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} effects but {} labels",
                effects.len(),
                labels.len()
            )));
        }
        if let Some(first) = effects.first() {
            let d = first.dim();
            if let Some(bad) = effects.iter().find(|e| e.dim() != d) {
                return Err(Error::DimensionMismatch {
                    left: bad.dim(),
                    right: d,
                });
            }
        }
        if kind == MeasurementKind::Projector {
            for (e, label) in effects.iter().zip(&labels) {
                let sq = e.as_matrix() * e.as_matrix();
                let defect = (sq - e.as_matrix()).norm();
                if defect > PROJECTOR_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "effect {label} is not a projector (‖E² − E‖ = {defect:.3e})"
                    )));
                }
            }
        }
        Ok(Self {
            effects,
            kind,
            labels,
        })
    }

    /// The basis elements `S_i` themselves, as observables labelled `S1..Sr`.
    pub fn basis_observables(basis: &SymmetricBasis) -> Self {
        let labels = (1..=basis.len()).map(|i| format!("S{i}")).collect();
        Self {
            effects: basis.elements().to_vec(),
            kind: MeasurementKind::Observable,
            labels,
        }
    }

    pub fn effects(&self) -> &[HermitianOp] {
        &self.effects
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.effects.first().map(HermitianOp::dim)
    }

    /// Sub-set in the given index order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            effects: indices.iter().map(|&i| self.effects[i].clone()).collect(),
            kind: self.kind,
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Frequency,
    Expectation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// Photon-counting detection: `mu` mean photons per pulse, `lambda_dc`
    /// dark counts per pulse, `n_trials` pulses per setting.
    BinomialPhotonic {
        mu: f64,
        lambda_dc: f64,
        n_trials: u64,
    },
    /// Additive `N(0, sigma²)` on expectation values.
    Gaussian {
        sigma: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }

    pub fn binomial(mu: f64, lambda_dc: f64, n_trials: u64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::BinomialPhotonic {
                mu,
                lambda_dc,
                n_trials,
            },
            seed,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Gaussian { sigma },
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::None => Ok(()),
            NoiseKind::BinomialPhotonic {
                mu,
                lambda_dc,
                n_trials,
            } => {
                if mu.is_nan()
                    || mu <= 0.0
                    || lambda_dc.is_nan()
                    || lambda_dc < 0.0
                    || n_trials == 0
                {
                    return Err(Error::InvalidArgument(format!(
                        "binomial noise needs mu > 0, lambda_dc >= 0, n_trials >= 1 (got {mu}, {lambda_dc}, {n_trials})"
                    )));
                }
                Ok(())
            }
            NoiseKind::Gaussian { sigma } => {
                if sigma.is_nan() || sigma < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian sigma must be >= 0, got {sigma}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Measured values for every effect of a set.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub set: MeasurementSet,
    pub values: Vec<f64>,
    pub value_kind: ValueKind,
    pub noise: NoiseModel,
}

#[derive(Serialize)]
struct RecordJson<'a> {
    labels: &'a [String],
    values: &'a [f64],
    value_kind: ValueKind,
    noise: &'a NoiseModel,
    seed: u64,
    rng: &'static str,
}

impl MeasurementRecord {
    pub fn new(
        set: MeasurementSet,
        values: Vec<f64>,
        value_kind: ValueKind,
        noise: NoiseModel,
    ) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} effects",
                values.len(),
                set.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "record contains non-finite values".into(),
            ));
        }
        if value_kind == ValueKind::Frequency && values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(
                "frequencies must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            set,
            values,
            value_kind,
            noise,
        })
    }

    /// Same record with effects (and values) re-ordered.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            set: self.set.select(order),
            values: order.iter().map(|&i| self.values[i]).collect(),
            value_kind: self.value_kind,
            noise: self.noise,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RecordJson {
            labels: self.set.labels(),
            values: &self.values,
            value_kind: self.value_kind,
            noise: &self.noise,
            seed: self.noise.seed,
            rng: RNG_ALGORITHM,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// One row per effect: `label,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = match self.value_kind {
            ValueKind::Frequency => "frequency",
            ValueKind::Expectation => "expectation",
        };
        writeln!(w, "label,{header}")?;
        for (l, v) in self.set.labels().iter().zip(&self.values) {
            writeln!(w, "{l},{v:.17e}")?;
        }
        Ok(())
    }
}

fn basis_ket(index: usize, d: usize) -> DVector<C64> {
    let mut v = DVector::zeros(d);
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Pure state `√p |0…0⟩ + √(1−p) |1…1⟩`.
pub fn cat_state(n_qubits: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "cat parameter p must lie in [0, 1], got {p}"
        )));
    }
    if n_qubits == 0 || n_qubits > crate::matlin::MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "unsupported number of qubits {n_qubits}"
        )));
    }
    let d = 1usize << n_qubits;
    let psi = basis_ket(0, d) * C64::new(p.sqrt(), 0.0)
        + basis_ket(d - 1, d) * C64::new((1.0 - p).sqrt(), 0.0);
    DensityMatrix::pure(&psi)
}

/// GHZ state, the `p = 1/2` cat state.
pub fn ghz_state(n_qubits: usize) -> Result<DensityMatrix> {
    cat_state(n_qubits, 0.5)
}

/// `G G† / tr(G G†)` with `G` a `d × rank` matrix of standard complex
/// Gaussian entries drawn from `seed`.
pub fn random_density(n_qubits: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if n_qubits == 0 || n_qubits > crate::matlin::MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "unsupported number of qubits {n_qubits}"
        )));
    }
    let d = 1usize << n_qubits;
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!(
            "rank must lie in 1..={d}, got {rank}"
        )));
    }
    let mut rng = stream(seed);
    let mut g = DMatrix::<C64>::zeros(d, rank);
    for j in 0..rank {
        for i in 0..d {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            g[(i, j)] = C64::new(re, im);
        }
    }
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(HermitianOp::hermitize(m / C64::new(tr, 0.0)))
}

/// Symmetric part of a random density matrix (the group twirl keeps it a
/// valid state).
pub fn random_symmetric_state(
    basis: &SymmetricBasis,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    let rho = random_density(basis.n_qubits(), rank, seed)?;
    project_symmetric(&rho, basis)
}

const POLARIZATION_LABELS: [char; 4] = ['H', 'V', 'D', 'R'];

fn polarization_ket(k: usize) -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = match k {
        0 => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        1 => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        2 => [C64::new(s, 0.0), C64::new(s, 0.0)],
        _ => [C64::new(s, 0.0), C64::new(0.0, -s)],
    };
    DVector::from_column_slice(&v)
}

/// All `4^N` tensor products of single-qubit projectors onto `H, V, D, R`,
/// ordered lexicographically (leftmost qubit most significant).
pub fn polarization_projector_pool(n_qubits: usize) -> Result<MeasurementSet> {
    if n_qubits == 0 || n_qubits > crate::matlin::MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "unsupported number of qubits {n_qubits}"
        )));
    }
    let count = 1usize << (2 * n_qubits);
    let mut effects = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for index in 0..count {
        let mut ket = DVector::from_element(1, C64::new(1.0, 0.0));
        let mut label = String::with_capacity(n_qubits);
        for q in 0..n_qubits {
            let k = (index >> (2 * (n_qubits - 1 - q))) & 3;
            ket = ket.kronecker(&polarization_ket(k));
            label.push(POLARIZATION_LABELS[k]);
        }
        effects.push(HermitianOp::projector(&ket));
        labels.push(label);
    }
    Ok(MeasurementSet {
        effects,
        kind: MeasurementKind::Projector,
        labels,
    })
}

/// Spectral projectors of every basis element, with eigenvalues closer than
/// `degeneracy_tol` merged and duplicates across elements removed.
pub fn eigenprojector_set(basis: &SymmetricBasis, degeneracy_tol: f64) -> Result<MeasurementSet> {
    let d = basis.dim();
    let mut effects: Vec<HermitianOp> = Vec::new();
    let mut labels = Vec::new();
    for (i, s) in basis.elements().iter().enumerate() {
        let spec = eig_hermitian(s)?;
        let mut start = 0;
        let mut cluster = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && spec.eigenvalues[end - 1] - spec.eigenvalues[end] <= degeneracy_tol {
                end += 1;
            }
            let mut p = DMatrix::<C64>::zeros(d, d);
            for k in start..end {
                let v = spec.eigenvectors.column(k);
                p += v * v.adjoint();
            }
            let p = HermitianOp::hermitize(p);
            if !effects.iter().any(|e| e.distance(&p) < DEDUP_TOL) {
                effects.push(p);
                labels.push(format!("S{}:{}", i + 1, cluster + 1));
            }
            cluster += 1;
            start = end;
        }
    }
    Ok(MeasurementSet {
        effects,
        kind: MeasurementKind::Projector,
        labels,
    })
}

fn check_record_dims(rho: &DensityMatrix, set: &MeasurementSet) -> Result<()> {
    match set.dim() {
        Some(d) if d != rho.dim() => Err(Error::DimensionMismatch {
            left: d,
            right: rho.dim(),
        }),
        _ => Ok(()),
    }
}

fn born_values(rho: &DensityMatrix, set: &MeasurementSet) -> Result<Vec<f64>> {
    set.effects()
        .iter()
        .map(|e| hs_inner(e, rho.op()))
        .collect()
}

/// Noise-free record: exact Born values `tr(E ρ)`.
pub fn simulate_exact(rho: &DensityMatrix, set: &MeasurementSet) -> Result<MeasurementRecord> {
    check_record_dims(rho, set)?;
    let exact = born_values(rho, set)?;
    let (values, kind) = match set.kind() {
        MeasurementKind::Projector => (
            exact.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            ValueKind::Frequency,
        ),
        MeasurementKind::Observable => (exact, ValueKind::Expectation),
    };
    MeasurementRecord::new(set.clone(), values, kind, NoiseModel::none())
}

/// Inverse detector response `−(ln(1 − f) + λ_dc)/μ`, clamped to `[0, 1]`.
pub fn calibrate_frequency(f: f64, mu: f64, lambda_dc: f64, n_trials: u64) -> f64 {
    let f = if f >= 1.0 {
        1.0 - 1.0 / (2.0 * n_trials as f64)
    } else {
        f
    };
    (-((-f).ln_1p() + lambda_dc) / mu).clamp(0.0, 1.0)
}

/// Photon-counting simulation with response inversion.
pub fn simulate_binomial(
    rho: &DensityMatrix,
    set: &MeasurementSet,
    noise: &NoiseModel,
) -> Result<MeasurementRecord> {
    check_record_dims(rho, set)?;
    noise.validate()?;
    let NoiseKind::BinomialPhotonic {
        mu,
        lambda_dc,
        n_trials,
    } = noise.kind
    else {
        return Err(Error::InvalidArgument(
            "simulate_binomial needs a binomial_photonic noise model".into(),
        ));
    };
    if set.kind() != MeasurementKind::Projector {
        return Err(Error::InvalidArgument(
            "photon counting needs projector effects".into(),
        ));
    }
    let ideal = born_values(rho, set)?;
    let values = ideal
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let p_ideal = p.clamp(0.0, 1.0);
            let p_det = -(-mu * p_ideal - lambda_dc).exp_m1();
            let dist = Binomial::new(n_trials, p_det.clamp(0.0, 1.0))
                .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?;
            let clicks = dist.sample(&mut substream(noise.seed, i as u64));
            let f = clicks as f64 / n_trials as f64;
            Ok(calibrate_frequency(f, mu, lambda_dc, n_trials))
        })
        .collect::<Result<Vec<f64>>>()?;
    MeasurementRecord::new(set.clone(), values, ValueKind::Frequency, *noise)
}

/// Additive Gaussian noise on exact expectation values.
pub fn simulate_gaussian(
    rho: &DensityMatrix,
    set: &MeasurementSet,
    noise: &NoiseModel,
) -> Result<MeasurementRecord> {
    check_record_dims(rho, set)?;
    noise.validate()?;
    let NoiseKind::Gaussian { sigma } = noise.kind else {
        return Err(Error::InvalidArgument(
            "simulate_gaussian needs a gaussian noise model".into(),
        ));
    };
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("normal parameters: {e}")))?;
    let exact = born_values(rho, set)?;
    let values = exact
        .par_iter()
        .enumerate()
        .map(|(i, &v)| v + normal.sample(&mut substream(noise.seed, i as u64)))
        .collect();
    MeasurementRecord::new(set.clone(), values, ValueKind::Expectation, *noise)
}

/// Dispatches on the noise kind.
pub fn simulate(
    rho: &DensityMatrix,
    set: &MeasurementSet,
    noise: &NoiseModel,
) -> Result<MeasurementRecord> {
    match noise.kind {
        NoiseKind::None => simulate_exact(rho, set),
        NoiseKind::BinomialPhotonic { .. } => simulate_binomial(rho, set, noise),
        NoiseKind::Gaussian { .. } => simulate_gaussian(rho, set, noise),
    }
}
