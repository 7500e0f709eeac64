//! JSON form `{"dim": d, "re": [[...]], "im": [[...]]}` (row-major).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, DensityMatrix, HermitianOp, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let d = m.nrows();
        let row = |f: fn(&C64) -> f64, i: usize| (0..d).map(|j| f(&m[(i, j)])).collect();
        Self {
            dim: d,
            re: (0..d).map(|i| row(|z| z.re, i)).collect(),
            im: (0..d).map(|i| row(|z| z.im, i)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        let d = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Dimension(format!(
                "matrix JSON does not describe a {d}x{d} matrix"
            )));
        }
        Ok(DMatrix::from_fn(d, d, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self::from_matrix(m.as_matrix())
    }
}

impl From<&HermitianOp> for MatrixJson {
    fn from(m: &HermitianOp) -> Self {
        Self::from_matrix(m.as_matrix())
    }
}

macro_rules! serde_via_json {
    ($ty:ty, $build:expr, $view:expr) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                MatrixJson::from_matrix($view(self)).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(
                d: D,
            ) -> std::result::Result<Self, D::Error> {
                let raw = MatrixJson::deserialize(d)?;
                let m = raw.to_matrix().map_err(serde::de::Error::custom)?;
                $build(m).map_err(serde::de::Error::custom)
            }
        }
    };
}

fn density_from(m: DMatrix<C64>) -> Result<DensityMatrix> {
    HermitianOp::new(m).and_then(DensityMatrix::new)
}

fn density_view(m: &DensityMatrix) -> &DMatrix<C64> {
    m.op().as_matrix()
}

serde_via_json!(ComplexMatrix, ComplexMatrix::new, ComplexMatrix::as_matrix);
serde_via_json!(HermitianOp, HermitianOp::new, HermitianOp::as_matrix);
serde_via_json!(DensityMatrix, density_from, density_view);
