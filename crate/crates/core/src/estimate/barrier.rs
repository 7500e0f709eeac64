//! Log-barrier interior-point method for small dense problems of the form
//!
//! ```text
//! minimize   c·x + Σ_i w_i |m_i·x − g_i|
//! subject to ρ(x) = F_0 + Σ_k x_k F_k ⪰ 0,   b_j − a_j·x ≥ 0.
//! ```
//!
//! Each absolute value is written as `Δ_i ≥ ±w_i(m_i·x − g_i)` and the slack
//! `Δ_i` is minimized out of the barrier subproblem in closed form, leaving
//! the smooth penalty `μ (s − ln(1 + s))` with `s = √(1 + (w r / μ)²)`.
//! Newton systems are solved through a QR factorization of the stacked
//! Jacobian-like matrix whose normal matrix is the barrier Hessian; this
//! avoids squaring the condition number near rank-deficient optima.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matlin::{cholesky_hpd, C64};

/// Problem data; all row matrices have one row per term.
pub(crate) struct Problem {
    pub f0: DMatrix<C64>,
    pub f: Vec<DMatrix<C64>>,
    pub c: DVector<f64>,
    pub l1_rows: DMatrix<f64>,
    pub l1_target: DVector<f64>,
    pub l1_weight: DVector<f64>,
    pub ineq_rows: DMatrix<f64>,
    pub ineq_rhs: DVector<f64>,
}

pub(crate) struct Schedule {
    pub mu0: f64,
    pub factor: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
}

pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub iterations: usize,
}

const NEWTON_TOL: f64 = 1e-10;
const VALUE_EPS: f64 = 1e-14;
const ARMIJO: f64 = 0.25;
const MAX_HALVINGS: usize = 60;

struct Local {
    value: f64,
    grad: DVector<f64>,
    jac: DMatrix<f64>,
}

impl Problem {
    fn n(&self) -> usize {
        self.c.len()
    }

    fn dim(&self) -> usize {
        self.f0.nrows()
    }

    /// Number of logarithmic barrier terms, which bounds the duality gap by `μ ν`.
    fn nu(&self) -> f64 {
        (self.dim() + 2 * self.l1_rows.nrows() + self.ineq_rows.nrows()) as f64
    }

    pub fn rho(&self, x: &DVector<f64>) -> DMatrix<C64> {
        let mut m = self.f0.clone();
        for (xk, fk) in x.iter().zip(&self.f) {
            if *xk != 0.0 {
                m += fk * C64::new(*xk, 0.0);
            }
        }
        m
    }

    fn cholesky(&self, x: &DVector<f64>) -> Option<DMatrix<C64>> {
        cholesky_hpd(&self.rho(x))
    }

    fn slacks(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let h = &self.ineq_rhs - &self.ineq_rows * x;
        h.iter().all(|v| *v > 0.0).then_some(h)
    }

    fn is_interior(&self, x: &DVector<f64>) -> bool {
        self.slacks(x).is_some() && self.cholesky(x).is_some()
    }

    fn penalty(&self, x: &DVector<f64>, mu: f64) -> DVector<f64> {
        let r = &self.l1_rows * x - &self.l1_target;
        DVector::from_iterator(
            r.len(),
            r.iter()
                .zip(self.l1_weight.iter())
                .map(|(ri, wi)| wi / mu * ri),
        )
    }

    /// Barrier function value, or `None` outside the domain.
    fn value(&self, x: &DVector<f64>, mu: f64) -> Option<f64> {
        let h = self.slacks(x)?;
        let l = self.cholesky(x)?;
        let logdet: f64 = 2.0 * (0..self.dim()).map(|i| l[(i, i)].re.ln()).sum::<f64>();
        let smooth: f64 = self
            .penalty(x, mu)
            .iter()
            .map(|q| {
                let s = q.hypot(1.0);
                s - s.ln_1p()
            })
            .sum();
        Some(self.c.dot(x) / mu + smooth - logdet - h.iter().map(|v| v.ln()).sum::<f64>())
    }

    fn local(&self, x: &DVector<f64>, mu: f64) -> Option<Local> {
        let n = self.n();
        let d = self.dim();
        let h = self.slacks(x)?;
        let l = self.cholesky(x)?;
        let linv = l.solve_lower_triangular(&DMatrix::<C64>::identity(d, d))?;
        let linv_adj = linv.adjoint();
        let logdet: f64 = 2.0 * (0..d).map(|i| l[(i, i)].re.ln()).sum::<f64>();

        let n_psd = d * d;
        let n_l1 = self.l1_rows.nrows();
        let n_ineq = self.ineq_rows.nrows();
        let mut jac = DMatrix::<f64>::zeros(n_psd + n_l1 + n_ineq, n);
        let mut grad = &self.c / mu;

        let s2 = std::f64::consts::SQRT_2;
        for (k, fk) in self.f.iter().enumerate() {
            let w = &linv * fk * &linv_adj;
            let mut col = jac.column_mut(k);
            let mut row = 0;
            let mut tr = 0.0;
            for i in 0..d {
                col[row] = w[(i, i)].re;
                tr += w[(i, i)].re;
                row += 1;
                for j in i + 1..d {
                    col[row] = s2 * w[(i, j)].re;
                    col[row + 1] = s2 * w[(i, j)].im;
                    row += 2;
                }
            }
            grad[k] -= tr;
        }

        let q = self.penalty(x, mu);
        let mut smooth = 0.0;
        for i in 0..n_l1 {
            let k = self.l1_weight[i] / mu;
            let s = q[i].hypot(1.0);
            smooth += s - s.ln_1p();
            let d1 = k * q[i] / (1.0 + s);
            let d2 = k / (s * (1.0 + s)).sqrt();
            for j in 0..n {
                let m = self.l1_rows[(i, j)];
                grad[j] += d1 * m;
                jac[(n_psd + i, j)] = d2 * m;
            }
        }

        let mut log_slack = 0.0;
        for i in 0..n_ineq {
            log_slack += h[i].ln();
            for j in 0..n {
                let a = self.ineq_rows[(i, j)] / h[i];
                grad[j] += a;
                jac[(n_psd + n_l1 + i, j)] = a;
            }
        }

        let value = self.c.dot(x) / mu + smooth - logdet - log_slack;
        Some(Local { value, grad, jac })
    }
}

/// Newton direction `−(JᵀJ)⁻¹ g` via a QR factorization of `J`.
fn newton_direction(local: &Local) -> Option<DVector<f64>> {
    let r = nalgebra::QR::new(local.jac.clone()).r();
    let y = r.tr_solve_upper_triangular(&(-&local.grad))?;
    let dx = r.solve_upper_triangular(&y)?;
    dx.iter().all(|v| v.is_finite()).then_some(dx)
}

/// Early-exit test evaluated after each centering step.
pub(crate) type StopRule<'a> = &'a dyn Fn(&DVector<f64>) -> bool;

/// Runs the barrier method from the strictly feasible point `x0`.
pub(crate) fn solve(
    problem: &Problem,
    x0: DVector<f64>,
    schedule: &Schedule,
    stop: Option<StopRule>,
) -> Result<Outcome> {
    if !problem.is_interior(&x0) {
        return Err(Error::Numerical(
            "barrier start point is not strictly feasible".into(),
        ));
    }
    let nu = problem.nu();
    let mut x = x0;
    let mut mu = schedule.mu0;
    let mut iterations = 0;
    loop {
        // centering
        loop {
            if iterations >= schedule.max_iterations {
                return Err(Error::NotConverged {
                    iterations,
                    gap: mu * nu,
                });
            }
            let Some(local) = problem.local(&x, mu) else {
                return Err(Error::Numerical("lost strict feasibility".into()));
            };
            let Some(dx) = newton_direction(&local) else {
                return Err(Error::Numerical("singular Newton system".into()));
            };
            iterations += 1;
            let decrement = -local.grad.dot(&dx);
            // below this the change in Φ is lost in rounding
            if decrement.is_nan()
                || decrement <= 2.0 * NEWTON_TOL.max(VALUE_EPS * local.value.abs())
            {
                break;
            }
            let mut t = 1.0;
            let mut accepted = None;
            let floor = VALUE_EPS * local.value.abs();
            for _ in 0..MAX_HALVINGS {
                if ARMIJO * t * decrement < floor {
                    break;
                }
                let trial = &x + &dx * t;
                if let Some(v) = problem.value(&trial, mu) {
                    if v <= local.value - ARMIJO * t * decrement {
                        accepted = Some(trial);
                        break;
                    }
                }
                t *= 0.5;
            }
            match accepted {
                Some(next) if next != x => x = next,
                Some(_) => break,
                // no representable decrease left at this barrier weight
                None => break,
            }
            if let Some(stop) = stop {
                if stop(&x) {
                    return Ok(Outcome { x, iterations });
                }
            }
        }
        if mu * nu < schedule.gap_tol {
            return Ok(Outcome { x, iterations });
        }
        mu *= schedule.factor;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|v| C64::new(*v, 0.0)),
        ))
    }

    #[test]
    fn one_dimensional_l1_with_psd_bounds() {
        // ρ(x) = diag(1/2 + x, 1/2 − x), minimize 2|x − 0.8|: optimum at the
        // boundary x = 1/2 with value 0.6.
        let problem = Problem {
            f0: diag(&[0.5, 0.5]),
            f: vec![diag(&[1.0, -1.0])],
            c: DVector::zeros(1),
            l1_rows: DMatrix::from_element(1, 1, 1.0),
            l1_target: DVector::from_element(1, 0.8),
            l1_weight: DVector::from_element(1, 2.0),
            ineq_rows: DMatrix::zeros(0, 1),
            ineq_rhs: DVector::zeros(0),
        };
        let schedule = Schedule {
            mu0: 1.0,
            factor: 0.2,
            gap_tol: 1e-9,
            max_iterations: 500,
        };
        let out = solve(&problem, DVector::zeros(1), &schedule, None).unwrap();
        assert!((out.x[0] - 0.5).abs() < 1e-8, "{}", out.x[0]);
    }

    #[test]
    fn linear_objective_with_inequality() {
        // minimize x subject to x ≥ −0.3 (as 0.3 + x ≥ 0) and ρ ⪰ 0
        let problem = Problem {
            f0: diag(&[0.5, 0.5]),
            f: vec![diag(&[1.0, -1.0])],
            c: DVector::from_element(1, 1.0),
            l1_rows: DMatrix::zeros(0, 1),
            l1_target: DVector::zeros(0),
            l1_weight: DVector::zeros(0),
            ineq_rows: DMatrix::from_element(1, 1, -1.0),
            ineq_rhs: DVector::from_element(1, 0.3),
        };
        let schedule = Schedule {
            mu0: 1.0,
            factor: 0.2,
            gap_tol: 1e-10,
            max_iterations: 500,
        };
        let out = solve(&problem, DVector::zeros(1), &schedule, None).unwrap();
        assert!((out.x[0] + 0.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_infeasible_start() {
        let problem = Problem {
            f0: diag(&[0.5, 0.5]),
            f: vec![diag(&[1.0, -1.0])],
            c: DVector::zeros(1),
            l1_rows: DMatrix::zeros(0, 1),
            l1_target: DVector::zeros(0),
            l1_weight: DVector::zeros(0),
            ineq_rows: DMatrix::zeros(0, 1),
            ineq_rhs: DVector::zeros(0),
        };
        let schedule = Schedule {
            mu0: 1.0,
            factor: 0.2,
            gap_tol: 1e-9,
            max_iterations: 10,
        };
        assert!(solve(&problem, DVector::from_element(1, 0.7), &schedule, None).is_err());
    }
}
