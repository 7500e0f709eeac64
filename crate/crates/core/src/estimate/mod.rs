//! Estimators for the coefficients `α` of `ρ = Σ α_j S_j`.
//!
//! [`linear_inversion`] solves the measurement equations `Σ_j α_j tr(S_j E_i) = f_i`
//! in the least-squares sense and may return an unphysical operator.
//! [`vqt_estimate`] solves the convex program
//!
//! ```text
//! minimize   Σ_i Δ_i
//! subject to |tr(E_i ρ) − f_i| ≤ Δ_i |f_i|,  tr ρ = 1,  ρ ⪰ 0,  ρ = Σ α_j S_j
//! ```
//!
//! with a barrier method, so its output is always a valid state.

mod barrier;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{fidelity, DensityMatrix, HermitianOp, MatrixJson, C64};
use crate::policy::NumericPolicy;
use crate::statesim::{MeasurementKind, MeasurementRecord, MeasurementSet, ValueKind};
use crate::symmetry::gso::Orthonormalizer;
use crate::symmetry::SymmetricBasis;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;

/// Real matrix `M[i][j] = tr(S_j E_i)`.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    pub entries: DMatrix<f64>,
    pub rank: usize,
    /// Ratio of the largest to the smallest retained singular value.
    pub condition: f64,
}

impl DesignMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.ncols()
    }
}

fn singular_rank(m: &DMatrix<f64>) -> (usize, f64) {
    if m.is_empty() {
        return (0, f64::INFINITY);
    }
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return (0, f64::INFINITY);
    }
    let kept: Vec<f64> = sv.iter().copied().filter(|s| *s > RANK_TOL * max).collect();
    (
        kept.len(),
        max / kept.iter().copied().fold(f64::INFINITY, f64::min),
    )
}

fn effect_rows(effects: &[HermitianOp], basis: &SymmetricBasis) -> Result<DMatrix<f64>> {
    let r = basis.len();
    let mut m = DMatrix::<f64>::zeros(effects.len(), r);
    for (i, e) in effects.iter().enumerate() {
        if e.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: e.dim(),
                right: basis.dim(),
            });
        }
        let coords = basis.frame().coords(e);
        for (j, v) in basis
            .coefficients_of_coords(&coords)
            .into_iter()
            .enumerate()
        {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

pub fn design_matrix(set: &MeasurementSet, basis: &SymmetricBasis) -> Result<DesignMatrix> {
    let entries = effect_rows(set.effects(), basis)?;
    let (rank, condition) = singular_rank(&entries);
    Ok(DesignMatrix {
        entries,
        rank,
        condition,
    })
}

/// Greedy quorum: scans `pool` in order, keeping each effect that raises the
/// rank of the design matrix, until the rank reaches `r`; then tops up with
/// further effects in pool order while fewer than `target_count` are kept.
pub fn select_quorum(
    pool: &MeasurementSet,
    basis: &SymmetricBasis,
    target_count: usize,
) -> Result<MeasurementSet> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("empty measurement pool".into()));
    }
    let rows = effect_rows(pool.effects(), basis)?;
    let r = basis.len();
    let mut ortho = Orthonormalizer::new(r, RANK_TOL);
    let mut chosen = Vec::new();
    for i in 0..rows.nrows() {
        if ortho.is_full() {
            break;
        }
        let row: Vec<f64> = rows.row(i).iter().copied().collect();
        if row.iter().any(|v| *v != 0.0) && ortho.push(row) {
            chosen.push(i);
        }
    }
    if ortho.rank() < r {
        return Err(Error::InsufficientQuorum {
            achieved: ortho.rank(),
            required: r,
        });
    }
    for i in 0..rows.nrows() {
        if chosen.len() >= target_count {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    Ok(pool.select(&chosen))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Newton-step budget shared by the feasibility and optimality phases.
    pub max_iterations: usize,
    /// Allowed violation of hard constraints (`tr ρ = 1`, `ρ ⪰ 0`, `f_i = 0` rows).
    pub eps_feas: f64,
    /// Target duality gap of the barrier method.
    pub eps_obj: f64,
    pub mu0: f64,
    pub mu_factor: f64,
    /// Use `Δ_i |f_i|` instead of `Δ_i f_i` in the tolerance constraints.
    /// Always on for observable (expectation-valued) records.
    pub abs_value_variant: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            eps_feas: 1e-7,
            eps_obj: 1e-6,
            mu0: 1.0,
            mu_factor: 0.2,
            abs_value_variant: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_feas > 0.0 && self.eps_obj > 0.0 && self.mu0 > 0.0) {
            return Err(Error::InvalidArgument(
                "solver tolerances and mu0 must be positive".into(),
            ));
        }
        if !(self.mu_factor > 0.0 && self.mu_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "barrier reduction factor must lie in (0, 1), got {}",
                self.mu_factor
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EstimateResult {
    pub alpha: Vec<f64>,
    /// `Σ α_j S_j`; not necessarily positive for linear inversion.
    pub rho_hat: HermitianOp,
    pub objective: f64,
    /// Per-effect tolerances `Δ_i` (linear inversion: absolute residuals).
    pub deltas: Vec<f64>,
    pub iterations: usize,
    pub feas_residual: f64,
    pub min_eigenvalue: f64,
    pub physical: bool,
    pub fidelity: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ResultJson {
    alpha: Vec<f64>,
    rho: MatrixJson,
    objective: f64,
    feas_residual: f64,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    fidelity: Option<f64>,
    physical: bool,
    #[serde(default)]
    deltas: Vec<f64>,
    #[serde(default)]
    min_eigenvalue: Option<f64>,
}

impl EstimateResult {
    fn finish(
        alpha: Vec<f64>,
        rho_hat: HermitianOp,
        objective: f64,
        deltas: Vec<f64>,
        iterations: usize,
    ) -> Result<Self> {
        let min_eigenvalue = rho_hat.min_eigenvalue()?;
        let trace_err = (rho_hat.trace() - 1.0).abs();
        let feas_residual = trace_err.max(-min_eigenvalue).max(0.0);
        let physical =
            trace_err <= TRACE_TOL && min_eigenvalue >= -NumericPolicy::default().psd_tol;
        Ok(Self {
            alpha,
            rho_hat,
            objective,
            deltas,
            iterations,
            feas_residual,
            min_eigenvalue,
            physical,
            fidelity: None,
        })
    }

    /// Clamped and renormalized estimate, suitable for fidelity comparisons.
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_clamped(&self.rho_hat)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ResultJson {
            alpha: self.alpha.clone(),
            rho: MatrixJson::from_matrix(self.rho_hat.as_matrix()),
            objective: self.objective,
            feas_residual: self.feas_residual,
            iterations: self.iterations,
            fidelity: self.fidelity,
            physical: self.physical,
            deltas: self.deltas.clone(),
            min_eigenvalue: Some(self.min_eigenvalue),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultJson = serde_json::from_str(text)?;
        let rho_hat = HermitianOp::new(doc.rho.to_matrix()?)?;
        let min_eigenvalue = match doc.min_eigenvalue {
            Some(v) => v,
            None => rho_hat.min_eigenvalue()?,
        };
        Ok(Self {
            alpha: doc.alpha,
            rho_hat,
            objective: doc.objective,
            deltas: doc.deltas,
            iterations: doc.iterations,
            feas_residual: doc.feas_residual,
            min_eigenvalue,
            physical: doc.physical,
            fidelity: doc.fidelity,
        })
    }
}

fn check_record(record: &MeasurementRecord, basis: &SymmetricBasis) -> Result<()> {
    if let Some(d) = record.set.dim() {
        if d != basis.dim() {
            return Err(Error::DimensionMismatch {
                left: d,
                right: basis.dim(),
            });
        }
    }
    if record.set.is_empty() {
        return Err(Error::InvalidArgument("record has no effects".into()));
    }
    if record.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "record contains non-finite values".into(),
        ));
    }
    Ok(())
}

/// Least-squares solution of `M α = f`; positivity is not enforced.
pub fn linear_inversion(
    record: &MeasurementRecord,
    basis: &SymmetricBasis,
) -> Result<EstimateResult> {
    check_record(record, basis)?;
    let dm = design_matrix(&record.set, basis)?;
    let r = basis.len();
    if dm.rank < r {
        return Err(Error::UnderDetermined {
            rank: dm.rank,
            required: r,
        });
    }
    let f = DVector::from_column_slice(&record.values);
    let svd = dm.entries.clone().svd(true, true);
    let cutoff = RANK_TOL * svd.singular_values.max();
    let alpha = svd
        .solve(&f, cutoff)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let residual = &dm.entries * &alpha - &f;
    let alpha: Vec<f64> = alpha.iter().copied().collect();
    let rho_hat = basis.assemble(&alpha)?;
    EstimateResult::finish(
        alpha,
        rho_hat,
        residual.norm(),
        residual.iter().map(|v| v.abs()).collect(),
        1,
    )
}

/// Linear inversion over the full Pauli basis (no symmetry assumed).
pub fn baseline_full_inversion(record: &MeasurementRecord) -> Result<EstimateResult> {
    let d = record
        .set
        .dim()
        .ok_or_else(|| Error::InvalidArgument("record has no effects".into()))?;
    let n = d.trailing_zeros() as usize;
    linear_inversion(record, &SymmetricBasis::full(n)?)
}

/// Stores and returns the fidelity of the clamped, renormalized estimate with `target`.
pub fn fidelity_report(result: &mut EstimateResult, target: &DensityMatrix) -> Result<f64> {
    let f = fidelity(&result.density()?, target)?;
    result.fidelity = Some(f);
    Ok(f)
}

/// VQT estimate with every effect of the record in the measured set.
pub fn vqt_estimate(
    record: &MeasurementRecord,
    basis: &SymmetricBasis,
    opts: &SolverOptions,
) -> Result<EstimateResult> {
    vqt_estimate_with_unmeasured(record, &[], basis, opts)
}

/// Orthonormal complement of `t` (columns), via a Householder reflection.
fn complement(t: &DVector<f64>) -> DMatrix<f64> {
    let r = t.len();
    let mut v = t / t.norm();
    v[0] += if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let h = DMatrix::<f64>::identity(r, r) - &v * v.transpose() * (2.0 / v.norm_squared());
    h.columns(1, r - 1).into_owned()
}

/// VQT estimate with the extra objective term `Σ tr(E ρ)` over `unmeasured`.
pub fn vqt_estimate_with_unmeasured(
    record: &MeasurementRecord,
    unmeasured: &[HermitianOp],
    basis: &SymmetricBasis,
    opts: &SolverOptions,
) -> Result<EstimateResult> {
    check_record(record, basis)?;
    opts.validate()?;
    let r = basis.len();
    let d = basis.dim();
    let m = effect_rows(record.set.effects(), basis)?;
    let u_rows = effect_rows(unmeasured, basis)?;
    let abs_variant = opts.abs_value_variant
        || record.value_kind == ValueKind::Expectation
        || record.set.kind() == MeasurementKind::Observable;

    // α = α0 + Z β keeps tr ρ = 1 exactly
    let t = DVector::from_iterator(r, basis.elements().iter().map(HermitianOp::trace));
    if t.norm() < 1e-12 {
        return Err(Error::Numerical(
            "basis does not contain the identity direction".into(),
        ));
    }
    let alpha0 = &t / t.norm_squared();
    let z = if r > 1 {
        complement(&t)
    } else {
        DMatrix::zeros(1, 0)
    };
    let nb = r - 1;

    let mut soft = Vec::new();
    let mut hard = Vec::new();
    for (i, &f) in record.values.iter().enumerate() {
        if f == 0.0 || (f < 0.0 && !abs_variant) {
            hard.push(i);
        } else {
            soft.push(i);
        }
    }
    let reduced = |rows: &[usize]| -> (DMatrix<f64>, DVector<f64>) {
        let mut a = DMatrix::<f64>::zeros(rows.len(), nb);
        let mut g = DVector::<f64>::zeros(rows.len());
        for (k, &i) in rows.iter().enumerate() {
            let mi = m.row(i);
            a.row_mut(k).copy_from(&(mi * &z));
            g[k] = record.values[i] - mi.dot(&alpha0.transpose());
        }
        (a, g)
    };
    let (soft_rows, soft_target) = reduced(&soft);
    let soft_weight = DVector::from_iterator(
        soft.len(),
        soft.iter().map(|&i| 1.0 / record.values[i].abs()),
    );
    let (hard_rows, hard_target) = reduced(&hard);

    let mut c_alpha = DVector::<f64>::zeros(r);
    for i in 0..u_rows.nrows() {
        c_alpha += u_rows.row(i).transpose();
    }
    let c = z.transpose() * &c_alpha;

    let alpha0_vec: Vec<f64> = alpha0.iter().copied().collect();
    let f0 = basis.assemble(&alpha0_vec)?.into_inner();
    let f: Vec<DMatrix<C64>> = (0..nb)
        .map(|k| {
            let col: Vec<f64> = z.column(k).iter().copied().collect();
            basis.assemble(&col).map(HermitianOp::into_inner)
        })
        .collect::<Result<_>>()?;

    let eps = opts.eps_feas;
    let schedule = barrier::Schedule {
        mu0: opts.mu0,
        factor: opts.mu_factor,
        gap_tol: opts.eps_obj,
        max_iterations: opts.max_iterations,
    };
    let mut iterations = 0;
    let mut beta = DVector::<f64>::zeros(nb);

    // hard rows: |a_h β − g_h| ≤ ε as two inequalities
    let band = |shift: f64| -> (DMatrix<f64>, DVector<f64>) {
        let nh = hard.len();
        let mut a = DMatrix::<f64>::zeros(2 * nh, nb);
        let mut b = DVector::<f64>::zeros(2 * nh);
        for k in 0..nh {
            a.row_mut(2 * k).copy_from(&hard_rows.row(k));
            b[2 * k] = eps + hard_target[k] + shift;
            a.row_mut(2 * k + 1).copy_from(&(-hard_rows.row(k)));
            b[2 * k + 1] = eps - hard_target[k] + shift;
        }
        (a, b)
    };
    let band_violation = |beta: &DVector<f64>| -> (usize, f64) {
        let res = &hard_rows * beta - &hard_target;
        res.iter()
            .enumerate()
            .map(|(k, v)| (hard[k], v.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    };

    if !hard.is_empty() && band_violation(&beta).1 >= eps {
        // phase I: minimize u subject to |a_h β − g_h| ≤ ε + u, ρ ≻ 0
        let (a, b) = band(0.0);
        let mut a1 = DMatrix::<f64>::zeros(a.nrows(), nb + 1);
        a1.view_mut((0, 0), (a.nrows(), nb)).copy_from(&a);
        a1.column_mut(nb).fill(-1.0);
        let mut f1 = f.clone();
        f1.push(DMatrix::zeros(d, d));
        let mut c1 = DVector::<f64>::zeros(nb + 1);
        c1[nb] = 1.0;
        let phase1 = barrier::Problem {
            f0: f0.clone(),
            f: f1,
            c: c1,
            l1_rows: DMatrix::zeros(0, nb + 1),
            l1_target: DVector::zeros(0),
            l1_weight: DVector::zeros(0),
            ineq_rows: a1,
            ineq_rhs: b,
        };
        let mut x0 = DVector::<f64>::zeros(nb + 1);
        x0[nb] = band_violation(&beta).1 - eps + 1.0;
        let target = -0.5 * eps;
        let stop = move |x: &DVector<f64>| x[nb] < target;
        let sched1 = barrier::Schedule {
            gap_tol: 1e-3 * eps,
            ..schedule
        };
        let out = barrier::solve(&phase1, x0, &sched1, Some(&stop));
        let x = match out {
            Ok(o) => {
                iterations += o.iterations;
                o.x
            }
            Err(Error::NotConverged { .. }) => {
                let (index, violation) = band_violation(&beta);
                return Err(Error::Infeasible {
                    index,
                    violation: violation - eps,
                });
            }
            Err(e) => return Err(e),
        };
        beta = x.rows(0, nb).into_owned();
        let (index, violation) = band_violation(&beta);
        if violation >= eps {
            return Err(Error::Infeasible {
                index,
                violation: violation - eps,
            });
        }
    }

    let (ineq_rows, ineq_rhs) = band(0.0);
    let phase2 = barrier::Problem {
        f0,
        f,
        c,
        l1_rows: soft_rows.clone(),
        l1_target: soft_target.clone(),
        l1_weight: soft_weight.clone(),
        ineq_rows,
        ineq_rhs,
    };
    let schedule = barrier::Schedule {
        max_iterations: opts.max_iterations.saturating_sub(iterations).max(1),
        ..schedule
    };
    let out = barrier::solve(&phase2, beta, &schedule, None)?;
    iterations += out.iterations;
    let beta = out.x;

    let alpha_vec = &alpha0 + &z * &beta;
    let alpha: Vec<f64> = alpha_vec.iter().copied().collect();
    let rho_hat = basis.assemble(&alpha)?;
    let residuals = &m * &alpha_vec - DVector::from_column_slice(&record.values);
    let mut deltas = vec![0.0; record.set.len()];
    for &i in &soft {
        deltas[i] = residuals[i].abs() / record.values[i].abs();
    }
    let unmeasured_term = c_alpha.dot(&alpha_vec);
    let objective = deltas.iter().sum::<f64>() + unmeasured_term;
    let mut result = EstimateResult::finish(alpha, rho_hat, objective, deltas, iterations)?;
    let hard_violation = hard.iter().map(|&i| residuals[i].abs()).fold(0.0, f64::max);
    result.feas_residual = result.feas_residual.max(hard_violation);
    Ok(result)
}
