//! Simulate-then-estimate scenarios and benchmark sweeps.
//!
//! A [`Scenario`] fixes the symmetry, the target-state family, the measured
//! effects, the noise model and the estimator. [`Prepared`] caches the
//! symmetric basis and measurement set so that many seeded trials can run
//! against it, in parallel, with results that depend only on the seeds.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    baseline_full_inversion, fidelity_report, linear_inversion, select_quorum, vqt_estimate,
    EstimateResult, SolverOptions,
};
use crate::matlin::DensityMatrix;
use crate::policy::NumericPolicy;
use crate::rng::child_seed;
use crate::statesim::{
    cat_state, eigenprojector_set, polarization_projector_pool, random_symmetric_state, simulate,
    MeasurementKind, MeasurementRecord, MeasurementSet, NoiseKind, NoiseModel,
    DEFAULT_DEGENERACY_TOL,
};
use crate::symmetry::{catalog, symmetric_basis, SymmetricBasis, SymmetrySpec};

/// A catalog name or an explicit generator set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymmetryRef {
    Name(String),
    Spec(SymmetrySpec),
}

impl SymmetryRef {
    pub fn resolve(&self, n_qubits: usize) -> Result<SymmetrySpec> {
        match self {
            Self::Name(name) => catalog(name, n_qubits),
            Self::Spec(spec) if spec.n_qubits() == n_qubits => Ok(spec.clone()),
            Self::Spec(spec) => Err(Error::InvalidArgument(format!(
                "symmetry '{}' is defined for {} qubits, scenario asks for {n_qubits}",
                spec.label(),
                spec.n_qubits()
            ))),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Self::Name(name) => name,
            Self::Spec(spec) => spec.label(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Cat,
    Ghz,
    RandomSymmetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateConfig {
    pub kind: StateKind,
    /// Cat-state weight of `|0…0⟩`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Ginibre rank for random states (default: full rank).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Fixed state seed; when absent each trial draws its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl StateConfig {
    pub fn label(&self) -> String {
        match self.kind {
            StateKind::Cat => format!("cat(p={})", self.p.unwrap_or(f64::NAN)),
            StateKind::Ghz => "ghz".into(),
            StateKind::RandomSymmetric => match self.rank {
                Some(r) => format!("random_symmetric(rank={r})"),
                None => "random_symmetric".into(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementChoice {
    /// Greedy quorum drawn from the `4^N` polarization projectors.
    Polarization,
    /// All `4^N` polarization projectors.
    PolarizationFull,
    /// Spectral projectors of the basis elements.
    Eigenprojectors,
    /// The basis elements themselves, as observables.
    DirectObservables,
}

impl MeasurementChoice {
    pub fn name(self) -> &'static str {
        match self {
            Self::Polarization => "polarization",
            Self::PolarizationFull => "polarization_full",
            Self::Eigenprojectors => "eigenprojectors",
            Self::DirectObservables => "direct_observables",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Linear,
    Vqt,
    /// Linear inversion over the full Pauli basis from all `4^N`
    /// polarization projectors, ignoring the symmetry.
    Baseline,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Vqt => "vqt",
            Self::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            kind: EstimatorKind::Vqt,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub kind: MeasurementChoice,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            kind: MeasurementChoice::Polarization,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub symmetry: SymmetryRef,
    pub n_qubits: usize,
    pub state: StateConfig,
    #[serde(default)]
    pub measurement: MeasurementConfig,
    #[serde(default = "NoiseModel::none")]
    pub noise: NoiseModel,
    #[serde(default)]
    pub estimator: EstimatorConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.estimator.solver.validate()?;
        match self.state.kind {
            StateKind::Cat => match self.state.p {
                Some(p) if (0.0..=1.0).contains(&p) => {}
                _ => return Err(Error::InvalidArgument("cat state needs p in [0, 1]".into())),
            },
            StateKind::Ghz => {}
            StateKind::RandomSymmetric => {
                if let Some(r) = self.state.rank {
                    let d = 1usize << self.n_qubits.min(crate::matlin::MAX_QUBITS);
                    if r == 0 || r > d {
                        return Err(Error::InvalidArgument(format!(
                            "state rank must lie in 1..={d}"
                        )));
                    }
                }
            }
        }
        if matches!(self.noise.kind, NoiseKind::BinomialPhotonic { .. })
            && self.measurement.kind == MeasurementChoice::DirectObservables
            && self.estimator.kind != EstimatorKind::Baseline
        {
            return Err(Error::InvalidArgument(
                "photon-counting noise needs projector measurements, not direct_observables".into(),
            ));
        }
        Ok(())
    }
}

/// One simulate-then-estimate run.
#[derive(Clone, Debug)]
pub struct Trial {
    pub seed: u64,
    pub target: DensityMatrix,
    pub record: MeasurementRecord,
    pub result: EstimateResult,
    pub fidelity: f64,
    /// Estimation time only (excludes basis construction and simulation).
    pub wall: Duration,
}

/// Scenario with its basis and measurement set built.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub basis: SymmetricBasis,
    pub set: MeasurementSet,
}

fn measurement_set(choice: MeasurementChoice, basis: &SymmetricBasis) -> Result<MeasurementSet> {
    let n = basis.n_qubits();
    match choice {
        MeasurementChoice::Polarization => {
            select_quorum(&polarization_projector_pool(n)?, basis, 0)
        }
        MeasurementChoice::PolarizationFull => polarization_projector_pool(n),
        MeasurementChoice::Eigenprojectors => eigenprojector_set(basis, DEFAULT_DEGENERACY_TOL),
        MeasurementChoice::DirectObservables => Ok(MeasurementSet::basis_observables(basis)),
    }
}

impl Prepared {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let spec = scenario.symmetry.resolve(scenario.n_qubits)?;
        let basis = symmetric_basis(&spec, &NumericPolicy::default())?;
        Self::with_basis(scenario, basis)
    }

    /// Reuses an already computed basis for the scenario's symmetry.
    pub fn with_basis(scenario: Scenario, basis: SymmetricBasis) -> Result<Self> {
        scenario.validate()?;
        if basis.n_qubits() != scenario.n_qubits {
            return Err(Error::DimensionMismatch {
                left: basis.n_qubits(),
                right: scenario.n_qubits,
            });
        }
        let set = if scenario.estimator.kind == EstimatorKind::Baseline {
            polarization_projector_pool(scenario.n_qubits)?
        } else {
            measurement_set(scenario.measurement.kind, &basis)?
        };
        Ok(Self {
            scenario,
            basis,
            set,
        })
    }

    pub fn target(&self, state_seed: u64) -> Result<DensityMatrix> {
        let st = &self.scenario.state;
        let n = self.scenario.n_qubits;
        match st.kind {
            StateKind::Cat => cat_state(n, st.p.unwrap_or(0.5)),
            StateKind::Ghz => cat_state(n, 0.5),
            StateKind::RandomSymmetric => random_symmetric_state(
                &self.basis,
                st.rank.unwrap_or(self.basis.dim()),
                st.seed.unwrap_or(state_seed),
            ),
        }
    }

    pub fn estimate(&self, record: &MeasurementRecord) -> Result<EstimateResult> {
        match self.scenario.estimator.kind {
            EstimatorKind::Linear => linear_inversion(record, &self.basis),
            EstimatorKind::Vqt => {
                vqt_estimate(record, &self.basis, &self.scenario.estimator.solver)
            }
            EstimatorKind::Baseline => baseline_full_inversion(record),
        }
    }

    /// Draws the target from sub-seed 0 of `seed` and the noise from sub-seed 1.
    pub fn simulate(&self, seed: u64) -> Result<(DensityMatrix, MeasurementRecord)> {
        let target = self.target(child_seed(seed, 0))?;
        let noise = self.scenario.noise.with_seed(child_seed(seed, 1));
        let record = simulate(&target, &self.set, &noise)?;
        Ok((target, record))
    }

    /// Simulates as in [`Prepared::simulate`], then estimates and scores.
    pub fn run_trial(&self, seed: u64) -> Result<Trial> {
        let (target, record) = self.simulate(seed)?;
        let start = Instant::now();
        let mut result = self.estimate(&record)?;
        let wall = start.elapsed();
        let fidelity = fidelity_report(&mut result, &target)?;
        Ok(Trial {
            seed,
            target,
            record,
            result,
            fidelity,
            wall,
        })
    }
}

/// Parameter lists swept by a benchmark; an empty list keeps the scenario value.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Sweep {
    pub symmetry: Vec<SymmetryRef>,
    pub n_qubits: Vec<usize>,
    pub p: Vec<f64>,
    pub lambda_dc: Vec<f64>,
    pub sigma: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Master seed; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sweep: Sweep,
}

fn one() -> usize {
    1
}

/// One point of the sweep grid.
#[derive(Clone, Debug)]
pub struct Cell {
    pub index: usize,
    pub scenario: Scenario,
    /// Name and value of the swept quantity used as the plot abscissa.
    pub x: (String, f64),
}

fn values_or<T: Clone>(list: &[T], base: T) -> Vec<T> {
    if list.is_empty() {
        vec![base]
    } else {
        list.to_vec()
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        for cell in self.cells()? {
            cell.scenario.validate()?;
        }
        Ok(())
    }

    /// Cartesian product in the order symmetry, N, λ_dc, σ, p.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let base = &self.scenario;
        let sweep = &self.sweep;
        let x_name = if sweep.p.len() > 1 {
            "p"
        } else if sweep.sigma.len() > 1 {
            "sigma"
        } else if sweep.lambda_dc.len() > 1 {
            "lambda_dc"
        } else if sweep.n_qubits.len() > 1 {
            "n_qubits"
        } else {
            "cell"
        };
        let base_p = base.state.p.unwrap_or(f64::NAN);
        let (base_lambda, base_sigma) = match base.noise.kind {
            NoiseKind::BinomialPhotonic { lambda_dc, .. } => (lambda_dc, f64::NAN),
            NoiseKind::Gaussian { sigma } => (f64::NAN, sigma),
            NoiseKind::None => (f64::NAN, f64::NAN),
        };
        if !sweep.lambda_dc.is_empty()
            && !matches!(base.noise.kind, NoiseKind::BinomialPhotonic { .. })
        {
            return Err(Error::InvalidArgument(
                "lambda_dc sweep needs binomial_photonic noise".into(),
            ));
        }
        if !sweep.sigma.is_empty() && !matches!(base.noise.kind, NoiseKind::Gaussian { .. }) {
            return Err(Error::InvalidArgument(
                "sigma sweep needs gaussian noise".into(),
            ));
        }
        if !sweep.p.is_empty() && base.state.kind != StateKind::Cat {
            return Err(Error::InvalidArgument("p sweep needs a cat state".into()));
        }
        let mut cells = Vec::new();
        for sym in values_or(&sweep.symmetry, base.symmetry.clone()) {
            for n in values_or(&sweep.n_qubits, base.n_qubits) {
                for lambda in values_or(&sweep.lambda_dc, base_lambda) {
                    for sigma in values_or(&sweep.sigma, base_sigma) {
                        for p in values_or(&sweep.p, base_p) {
                            let mut s = base.clone();
                            s.symmetry = sym.clone();
                            s.n_qubits = n;
                            if s.state.kind == StateKind::Cat {
                                s.state.p = Some(p);
                            }
                            s.noise.kind = match s.noise.kind {
                                NoiseKind::BinomialPhotonic { mu, n_trials, .. } => {
                                    NoiseKind::BinomialPhotonic {
                                        mu,
                                        lambda_dc: lambda,
                                        n_trials,
                                    }
                                }
                                NoiseKind::Gaussian { .. } => NoiseKind::Gaussian { sigma },
                                NoiseKind::None => NoiseKind::None,
                            };
                            let index = cells.len();
                            let x = match x_name {
                                "p" => p,
                                "sigma" => sigma,
                                "lambda_dc" => lambda,
                                "n_qubits" => n as f64,
                                _ => index as f64,
                            };
                            cells.push(Cell {
                                index,
                                scenario: s,
                                x: (x_name.to_string(), x),
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Outcome of one repetition inside a benchmark cell.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub repetition: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunSummary, String>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub fidelity: f64,
    pub physical: bool,
    pub objective: f64,
    pub iterations: usize,
    pub wall: Duration,
}

/// Aggregated statistics for one cell.
#[derive(Clone, Debug)]
pub struct BenchmarkRow {
    pub cell: usize,
    pub x: (String, f64),
    pub symmetry: String,
    pub n_qubits: usize,
    pub state: String,
    pub measurement: String,
    pub estimator: String,
    pub noise: NoiseModel,
    pub runs: Vec<RunOutcome>,
    /// Fidelities of the successful runs, in repetition order.
    pub fidelities: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (zero for a single run).
    pub std: f64,
    pub failures: usize,
    pub mean_wall: Duration,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Seed of repetition `rep` in cell `cell`.
pub fn trial_seed(master: u64, cell: usize, rep: usize) -> u64 {
    child_seed(child_seed(master, cell as u64), rep as u64)
}

fn basis_key(sym: &SymmetryRef, n: usize) -> String {
    match sym {
        SymmetryRef::Name(name) => format!("{name}/{n}"),
        SymmetryRef::Spec(spec) => format!(
            "spec:{}/{n}",
            serde_json::to_string(spec).unwrap_or_default()
        ),
    }
}

/// Runs every cell for `repetitions` seeds. Failed runs are recorded and the
/// sweep continues; only configuration errors abort.
pub fn run_benchmark(config: &RunConfig, master_seed: u64) -> Result<Vec<BenchmarkRow>> {
    config.validate()?;
    let cells = config.cells()?;
    let mut bases: HashMap<String, SymmetricBasis> = HashMap::new();
    let mut prepared = Vec::with_capacity(cells.len());
    for cell in &cells {
        let s = &cell.scenario;
        let key = basis_key(&s.symmetry, s.n_qubits);
        if !bases.contains_key(&key) {
            let spec = s.symmetry.resolve(s.n_qubits)?;
            bases.insert(
                key.clone(),
                symmetric_basis(&spec, &NumericPolicy::default())?,
            );
        }
        prepared.push(Prepared::with_basis(s.clone(), bases[&key].clone())?);
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.repetitions).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<RunOutcome> = jobs
        .par_iter()
        .map(|&(c, rep)| {
            let seed = trial_seed(master_seed, c, rep);
            let outcome = prepared[c]
                .run_trial(seed)
                .map(|t| RunSummary {
                    fidelity: t.fidelity,
                    physical: t.result.physical,
                    objective: t.result.objective,
                    iterations: t.result.iterations,
                    wall: t.wall,
                })
                .map_err(|e| e.to_string());
            RunOutcome {
                repetition: rep,
                seed,
                outcome,
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    for (cell, runs) in cells.iter().zip(outcomes.chunks(config.repetitions)) {
        let s = &cell.scenario;
        let fidelities: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|o| o.fidelity))
            .collect();
        let walls: Vec<Duration> = runs
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|o| o.wall))
            .collect();
        let (mean, std) = mean_std(&fidelities);
        let mean_wall = if walls.is_empty() {
            Duration::ZERO
        } else {
            walls.iter().sum::<Duration>() / walls.len() as u32
        };
        rows.push(BenchmarkRow {
            cell: cell.index,
            x: cell.x.clone(),
            symmetry: s.symmetry.label().to_string(),
            n_qubits: s.n_qubits,
            state: s.state.label(),
            measurement: s.measurement.kind.name().to_string(),
            estimator: s.estimator.kind.name().to_string(),
            noise: s.noise,
            failures: runs.len() - fidelities.len(),
            runs: runs.to_vec(),
            fidelities,
            mean,
            std,
            mean_wall,
        });
    }
    Ok(rows)
}

/// Kind of the measured effects, for callers that pick noise models.
pub fn measurement_kind(choice: MeasurementChoice) -> MeasurementKind {
    match choice {
        MeasurementChoice::DirectObservables => MeasurementKind::Observable,
        _ => MeasurementKind::Projector,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> Scenario {
        Scenario {
            symmetry: SymmetryRef::Name("permutation".into()),
            n_qubits: 2,
            state: StateConfig {
                kind: StateKind::Cat,
                p: Some(0.5),
                rank: None,
                seed: None,
            },
            measurement: MeasurementConfig {
                kind: MeasurementChoice::Polarization,
            },
            noise: NoiseModel::none(),
            estimator: EstimatorConfig {
                kind: EstimatorKind::Vqt,
                solver: SolverOptions::default(),
            },
        }
    }

    #[test]
    fn noiseless_trial_is_exact() {
        let prep = Prepared::new(scenario()).unwrap();
        let t = prep.run_trial(1).unwrap();
        assert!(t.fidelity > 1.0 - 1e-6);
        assert_eq!(t.record.set.len(), 10);
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let text = r#"{
            "symmetry": "werner", "n_qubits": 3,
            "state": {"kind": "random_symmetric"},
            "measurement": {"kind": "direct_observables"},
            "noise": {"kind": "gaussian", "sigma": 0.001},
            "estimator": {"kind": "vqt"},
            "repetitions": 2,
            "sweep": {"sigma": [1e-5, 1e-3]}
        }"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.scenario.estimator.solver, SolverOptions::default());
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[1].x, ("sigma".to_string(), 1e-3));
        assert!(
            matches!(cells[1].scenario.noise.kind, NoiseKind::Gaussian { sigma } if sigma == 1e-3)
        );
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back.cells().unwrap().len(), 2);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut s = scenario();
        s.state.p = None;
        assert!(s.validate().is_err());
        let mut s = scenario();
        s.measurement.kind = MeasurementChoice::DirectObservables;
        s.noise = NoiseModel::binomial(0.18, 0.0, 100, 0);
        assert!(s.validate().is_err());
        let cfg = RunConfig {
            scenario: scenario(),
            repetitions: 0,
            seed: None,
            output: None,
            sweep: Sweep::default(),
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            scenario: scenario(),
            repetitions: 1,
            seed: None,
            output: None,
            sweep: Sweep {
                sigma: vec![0.1],
                ..Sweep::default()
            },
        };
        assert!(cfg.cells().is_err());
    }

    #[test]
    fn benchmark_is_deterministic_and_aggregates() {
        let mut s = scenario();
        s.noise = NoiseModel::binomial(0.18, 5e-5, 100_000, 0);
        let cfg = RunConfig {
            scenario: s,
            repetitions: 3,
            seed: None,
            output: None,
            sweep: Sweep {
                p: vec![0.2, 0.8],
                ..Sweep::default()
            },
        };
        let a = run_benchmark(&cfg, 11).unwrap();
        let b = run_benchmark(&cfg, 11).unwrap();
        assert_eq!(a.len(), 2);
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.fidelities, rb.fidelities);
            let (m, sd) = mean_std(&ra.fidelities);
            assert!((m - ra.mean).abs() < 1e-12 && (sd - ra.std).abs() < 1e-12);
            assert_eq!(ra.failures, 0);
        }
        let c = run_benchmark(&cfg, 12).unwrap();
        assert_ne!(a[0].fidelities, c[0].fidelities);
    }

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[1.0]), (1.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
        assert!(mean_std(&[]).0.is_nan());
    }
}
