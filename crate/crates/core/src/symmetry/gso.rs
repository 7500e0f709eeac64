//! Re-orthogonalizing Gram-Schmidt over real coordinate vectors.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Incrementally built orthonormal set.
///
/// A candidate is first projected against all accepted vectors in one
/// classical sweep whose inner products only touch the candidate's nonzero
/// entries. Candidates whose residual norm drops below `rank_tol` times their
/// original norm are rejected; survivors get a second, modified Gram-Schmidt
/// sweep before normalization.
#[derive(Clone, Debug)]
pub(crate) struct Orthonormalizer {
    len: usize,
    rank_tol: f64,
    vectors: Vec<Vec<f64>>,
}

impl Orthonormalizer {
    pub fn new(len: usize, rank_tol: f64) -> Self {
        Self {
            len,
            rank_tol,
            vectors: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.len
    }

    /// Returns whether `v` extended the span.
    pub fn push(&mut self, mut v: Vec<f64>) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let original = norm(&v);
        if original == 0.0 || self.is_full() {
            return false;
        }
        let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
        let coeffs: Vec<f64> = if 2 * support.len() < v.len() {
            self.vectors
                .iter()
                .map(|q| support.iter().map(|&i| q[i] * v[i]).sum())
                .collect()
        } else {
            self.vectors.iter().map(|q| dot(q, &v)).collect()
        };
        for (q, &h) in self.vectors.iter().zip(&coeffs) {
            if h != 0.0 {
                axpy(-h, q, &mut v);
            }
        }
        if norm(&v) < self.rank_tol * original {
            return false;
        }
        for q in &self.vectors {
            let h = dot(q, &v);
            axpy(-h, q, &mut v);
        }
        let residual = norm(&v);
        if residual < self.rank_tol * original {
            return false;
        }
        let inv = 1.0 / residual;
        v.iter_mut().for_each(|x| *x *= inv);
        self.vectors.push(v);
        true
    }

    pub fn into_vectors(self) -> Vec<Vec<f64>> {
        self.vectors
    }
}
