use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Relative residual below which a vector counts as linearly dependent.
    pub rank_tol: f64,
    /// Eigenvalues above `-psd_tol` count as non-negative.
    pub psd_tol: f64,
    /// Maximum entrywise deviation from Hermiticity accepted on construction.
    pub herm_tol: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            psd_tol: 1e-9,
            herm_tol: 1e-12,
        }
    }
}
