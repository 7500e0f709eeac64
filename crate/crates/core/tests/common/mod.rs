//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the Gram-Schmidt construction or the barrier
//! solver: dimensions come from a dense SVD, twirls from explicit group
//! averages or nullspace projectors, and VQT optima from a cutting-plane LP.
#![allow(dead_code, clippy::unnecessary_map_or)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use symtomo::symmetry::SymmetryKind;
use symtomo::{HermitianOp, SymmetricBasis, SymmetrySpec};

pub const SVD_TOL: f64 = 1e-9;

/// Column-stacking vectorization.
fn vec_of(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Linear map `X ↦ [Q_k, X]` (Lie) or `X ↦ U_k X U_k† − X` (finite), stacked
/// over all generators, acting on column-stacked `d × d` matrices.
pub fn constraint_superoperator(spec: &SymmetrySpec) -> DMatrix<C64> {
    let d = spec.dim();
    let gens = spec.generators();
    let mut out = DMatrix::<C64>::zeros(gens.len() * d * d, d * d);
    for (k, g) in gens.iter().enumerate() {
        let g = g.as_matrix();
        for col in 0..d * d {
            let mut e = DMatrix::<C64>::zeros(d, d);
            e[(col % d, col / d)] = C64::new(1.0, 0.0);
            let image = match spec.kind() {
                SymmetryKind::Lie => g * &e - &e * g,
                SymmetryKind::Finite => g * &e * g.adjoint() - &e,
            };
            out.view_mut((k * d * d, col), (d * d, 1))
                .copy_from(&vec_of(&image));
        }
    }
    out
}

/// Orthonormal basis (columns) of the commutant, as vectorized matrices.
pub fn nullspace(spec: &SymmetrySpec) -> DMatrix<C64> {
    let a = constraint_superoperator(spec);
    let gram = a.adjoint() * &a;
    let eig = nalgebra::linalg::SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.amax().max(1.0);
    let cols: Vec<DVector<C64>> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i].abs() <= SVD_TOL * scale)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(a.ncols(), 0);
    }
    DMatrix::from_columns(&cols)
}

pub fn nullspace_dim(spec: &SymmetrySpec) -> usize {
    nullspace(spec).ncols()
}

/// Twirl as the orthogonal projector onto the commutant.
pub fn twirl_by_nullspace(spec: &SymmetrySpec, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let n = nullspace(spec);
    let d = rho.nrows();
    let v = &n * (n.adjoint() * vec_of(rho));
    DMatrix::from_column_slice(d, d, v.as_slice())
}

/// All group elements generated by the unitary generators of a finite spec.
pub fn group_closure(spec: &SymmetrySpec) -> Vec<DMatrix<C64>> {
    assert_eq!(spec.kind(), SymmetryKind::Finite);
    let d = spec.dim();
    let mut elems = vec![DMatrix::<C64>::identity(d, d)];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in spec.generators() {
                let p = g.as_matrix() * a;
                if !elems.iter().any(|e| (e - &p).norm() < 1e-9) {
                    elems.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
        assert!(
            elems.len() <= 10_000,
            "group too large for the closure oracle"
        );
    }
    elems
}

/// Explicit group average `|G|⁻¹ Σ U ρ U†`.
pub fn twirl_by_group(group: &[DMatrix<C64>], rho: &DMatrix<C64>) -> DMatrix<C64> {
    let mut acc = DMatrix::<C64>::zeros(rho.nrows(), rho.ncols());
    for u in group {
        acc += u * rho * u.adjoint();
    }
    acc / C64::new(group.len() as f64, 0.0)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

/// Dense two-phase simplex with Bland's rule.
///
/// Minimizes `cᵀx` over `x ≥ 0` subject to `A_le x ≤ b_le` and `A_eq x = b_eq`.
pub struct Lp {
    pub c: Vec<f64>,
    pub le: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

const LP_EPS: f64 = 1e-10;

impl Lp {
    pub fn solve(&self) -> Option<(f64, Vec<f64>)> {
        let n = self.c.len();
        let m_le = self.le.len();
        let rows: Vec<(Vec<f64>, f64, Option<usize>)> = self
            .le
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (a.clone(), *b, Some(i)))
            .chain(self.eq.iter().map(|(a, b)| (a.clone(), *b, None)))
            .collect();
        let m = rows.len();
        // columns: x (n), slacks (m_le), artificials (m), rhs
        let n_art = m;
        let width = n + m_le + n_art + 1;
        let mut t = vec![vec![0.0; width]; m];
        let mut basis = vec![0usize; m];
        for (r, (a, b, slack)) in rows.iter().enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[r][j] = sign * a[j];
            }
            if let Some(s) = slack {
                t[r][n + s] = sign;
            }
            t[r][n + m_le + r] = 1.0;
            t[r][width - 1] = sign * b;
            basis[r] = n + m_le + r;
        }
        let a0 = t.clone();
        let phase1: Vec<f64> = (0..width - 1)
            .map(|j| if j >= n + m_le { 1.0 } else { 0.0 })
            .collect();
        Self::run(&mut t, &mut basis, &phase1, width - 1, &a0)?;
        let infeas: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= n + m_le)
            .map(|(r, _)| t[r][width - 1])
            .sum();
        if infeas > 1e-7 {
            return None;
        }
        // drive remaining zero-level artificials out of the basis
        for r in 0..m {
            if basis[r] >= n + m_le {
                if let Some(j) = (0..n + m_le).find(|&j| t[r][j].abs() > 1e-9) {
                    Self::pivot(&mut t, &mut basis, r, j);
                }
            }
        }
        let mut cost = vec![0.0; width - 1];
        cost[..n].copy_from_slice(&self.c);
        Self::run(&mut t, &mut basis, &cost, n + m_le, &a0)?;
        let mut x = vec![0.0; n];
        for (r, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[r][width - 1];
            }
        }
        let value = self.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        Some((value, x))
    }

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, j: usize) {
        let p = t[r][j];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[j] != 0.0 {
                let f = row[j];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        basis[r] = j;
    }

    /// Recomputes the tableau as `B⁻¹ A` from the original rows to wash out
    /// accumulated pivoting error.
    fn reinvert(t: &mut [Vec<f64>], basis: &[usize], a0: &[Vec<f64>]) {
        let m = a0.len();
        let width = a0[0].len();
        let b = DMatrix::from_fn(m, m, |r, k| a0[r][basis[k]]);
        let a = DMatrix::from_fn(m, width, |r, j| a0[r][j]);
        if let Some(x) = b.lu().solve(&a) {
            for r in 0..m {
                for j in 0..width {
                    t[r][j] = x[(r, j)];
                }
            }
        }
    }

    /// Simplex iterations over columns `0..allowed`. Dantzig pricing, with
    /// Bland's rule after a run of degenerate pivots.
    fn run(
        t: &mut [Vec<f64>],
        basis: &mut [usize],
        cost: &[f64],
        allowed: usize,
        a0: &[Vec<f64>],
    ) -> Option<()> {
        let width = t[0].len();
        let mut degenerate = 0;
        for iter in 0..100_000 {
            if iter % 100 == 0 {
                Self::reinvert(t, basis, a0);
            }
            let bland = degenerate > 50;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let z: f64 = basis
                    .iter()
                    .enumerate()
                    .map(|(r, &b)| cost[b] * t[r][j])
                    .sum();
                let reduced = cost[j] - z;
                if reduced < -LP_EPS && entering.map_or(true, |(_, best)| reduced < best) {
                    entering = Some((j, reduced));
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = entering else {
                Self::reinvert(t, basis, a0);
                return Some(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..t.len() {
                if t[r][j] > LP_EPS {
                    let ratio = t[r][width - 1] / t[r][j];
                    let better = match best {
                        None => true,
                        Some((br, bv)) => {
                            ratio < bv - 1e-12 || (ratio < bv + 1e-12 && basis[r] < basis[br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let (r, ratio) = best?; // unbounded
            if ratio.abs() < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            Self::pivot(t, basis, r, j);
        }
        None
    }
}

/// Reference optimum of the VQT program
/// `min Σ |tr(E_i ρ) − f_i| / |f_i|` over `ρ = Σ α_j S_j ⪰ 0`, `tr ρ = 1`,
/// by Kelley cutting planes on the PSD cone. Returns `(lower bound, α)`;
/// all `f_i` must be nonzero.
pub fn vqt_cutting_plane(
    basis: &SymmetricBasis,
    effects: &[HermitianOp],
    values: &[f64],
) -> (f64, Vec<f64>) {
    let r = basis.len();
    let m = effects.len();
    let s: Vec<&DMatrix<C64>> = basis.elements().iter().map(|e| e.as_matrix()).collect();
    let mrow: Vec<Vec<f64>> = effects
        .iter()
        .map(|e| {
            s.iter()
                .map(|sj| (e.as_matrix() * *sj).trace().re)
                .collect()
        })
        .collect();
    let t: Vec<f64> = s.iter().map(|sj| sj.trace().re).collect();
    // variables: α⁺ (r), α⁻ (r), Δ (m)
    let nv = 2 * r + m;
    let alpha_row = |coef: &[f64]| -> Vec<f64> {
        let mut row = vec![0.0; nv];
        for j in 0..r {
            row[j] = coef[j];
            row[r + j] = -coef[j];
        }
        row
    };
    let mut lp = Lp {
        c: vec![0.0; nv],
        le: Vec::new(),
        eq: Vec::new(),
    };
    for i in 0..m {
        lp.c[2 * r + i] = 1.0;
    }
    lp.eq.push((alpha_row(&t), 1.0));
    for i in 0..m {
        let w = values[i].abs();
        let mut up = alpha_row(&mrow[i]);
        up[2 * r + i] = -w;
        lp.le.push((up, values[i]));
        let neg: Vec<f64> = mrow[i].iter().map(|v| -v).collect();
        let mut down = alpha_row(&neg);
        down[2 * r + i] = -w;
        lp.le.push((down, -values[i]));
    }
    // |α_j| = |tr(ρ S_j)| ≤ ‖S_j‖_F = 1 for any density ρ
    for j in 0..r {
        let mut e = vec![0.0; r];
        e[j] = 1.0;
        lp.le.push((alpha_row(&e), 1.0));
        e[j] = -1.0;
        lp.le.push((alpha_row(&e), 1.0));
    }
    let mut lower = f64::NAN;
    let mut alpha = vec![0.0; r];
    for _ in 0..400 {
        let Some((value, x)) = lp.solve() else {
            panic!("relaxation failed after {} cuts", lp.le.len())
        };
        lower = value;
        alpha = (0..r).map(|j| x[j] - x[r + j]).collect();
        let rho = basis.assemble(&alpha).unwrap();
        let eig = nalgebra::linalg::SymmetricEigen::new(rho.as_matrix().clone());
        let mut cut_added = false;
        for k in 0..eig.eigenvalues.len() {
            if eig.eigenvalues[k] < -1e-10 {
                let v = eig.eigenvectors.column(k);
                // v† ρ v ≥ 0  ⇔  −Σ α_j v†S_j v ≤ 0
                let coef: Vec<f64> = s
                    .iter()
                    .map(|sj| -(v.adjoint() * *sj * v)[(0, 0)].re)
                    .collect();
                lp.le.push((alpha_row(&coef), 0.0));
                cut_added = true;
            }
        }
        if !cut_added {
            break;
        }
    }
    (lower, alpha)
}

/// Objective of the VQT program at `α` (no feasibility check).
pub fn vqt_objective(
    basis: &SymmetricBasis,
    effects: &[HermitianOp],
    values: &[f64],
    alpha: &[f64],
) -> f64 {
    let rho = basis.assemble(alpha).unwrap();
    effects
        .iter()
        .zip(values)
        .map(|(e, f)| ((e.as_matrix() * rho.as_matrix()).trace().re - f).abs() / f.abs())
        .sum()
}

/// Dense 1-D grid followed by golden-section refinement over the single free
/// parameter of a two-element basis, restricted to `ρ ⪰ 0`.
pub fn vqt_grid_1d(basis: &SymmetricBasis, effects: &[HermitianOp], values: &[f64]) -> f64 {
    assert_eq!(basis.len(), 2);
    let t: Vec<f64> = basis.elements().iter().map(HermitianOp::trace).collect();
    // α(s) = α0 + s·z with tᵀz = 0
    let tn = t[0] * t[0] + t[1] * t[1];
    let a0 = [t[0] / tn, t[1] / tn];
    let z = [-t[1] / tn.sqrt(), t[0] / tn.sqrt()];
    let point = |s: f64| [a0[0] + s * z[0], a0[1] + s * z[1]];
    let feasible = |s: f64| {
        let rho = basis.assemble(&point(s)).unwrap();
        nalgebra::linalg::SymmetricEigen::new(rho.as_matrix().clone())
            .eigenvalues
            .min()
            >= -1e-12
    };
    let f = |s: f64| {
        if feasible(s) {
            vqt_objective(basis, effects, values, &point(s))
        } else {
            f64::INFINITY
        }
    };
    let n = 20_000;
    let (lo, hi) = (-2.0, 2.0);
    let h = (hi - lo) / n as f64;
    let (mut best_s, mut best) = (lo, f64::INFINITY);
    for k in 0..=n {
        let s = lo + k as f64 * h;
        let v = f(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    let (mut a, mut b) = (best_s - h, best_s + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.min(f(0.5 * (a + b)))
}
