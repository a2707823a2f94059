//! Small dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Relative singular-value cutoff used by the pseudo-inverse fallback.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dev = (&m - m.adjoint()).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        let scale = m.iter().fold(1.0f64, |acc, v| acc.max(v.norm()));
        if dev > 1e-10 * scale {
            return Err(Error::NonHermitian);
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { values, vectors })
    }

    /// `f(H) psi` for a scalar function of the eigenvalues.
    pub fn apply_fn(&self, psi: &[Complex64], f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let v = DVector::from_column_slice(psi);
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &lam) in coeffs.iter_mut().zip(&self.values) {
            *c *= f(lam);
        }
        (&self.vectors * coeffs).as_slice().to_vec()
    }
}

/// Solves `(a + lambda I) x = b` for symmetric positive semi-definite `a`,
/// falling back to a pseudo-inverse when the Cholesky factorization fails.
pub fn solve_regularized(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n = a.nrows();
    let mut reg = a.clone();
    for i in 0..n {
        reg[(i, i)] += lambda;
    }
    let x = match reg.clone().cholesky() {
        Some(ch) => ch.solve(b),
        None => pinv_solve(reg, b)?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("linear solve produced non-finite values".into()));
    }
    Ok(x)
}

/// Minimum-norm least-squares solution for a symmetric matrix through its
/// eigendecomposition, discarding eigenvalues below `PINV_CUTOFF` times the
/// largest in magnitude.
pub fn pinv_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let eig = nalgebra::SymmetricEigen::new(a);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = lmax * PINV_CUTOFF;
    let mut y = eig.eigenvectors.transpose() * b;
    for (yi, &l) in y.iter_mut().zip(eig.eigenvalues.iter()) {
        *yi = if l.abs() > cutoff { *yi / l } else { 0.0 };
    }
    Ok(&eig.eigenvectors * y)
}

/// `exp(scale * A) psi` by a truncated Taylor series, split into substeps so
/// that each substep has `|scale| * norm_bound <= 0.5`.
pub fn exp_action(
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    norm_bound: f64,
    scale: Complex64,
    psi: &[Complex64],
) -> Vec<Complex64> {
    let reach = scale.norm() * norm_bound;
    let steps = ((reach / 0.5).ceil() as usize).max(1);
    let h = scale / steps as f64;
    let mut cur = psi.to_vec();
    let mut term = vec![Complex64::default(); psi.len()];
    let mut next = vec![Complex64::default(); psi.len()];
    for _ in 0..steps {
        term.copy_from_slice(&cur);
        let mut acc = cur.clone();
        let base = acc.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        for k in 1..=40 {
            apply(&term, &mut next);
            let f = h / k as f64;
            let mut size = 0.0;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = f * n;
                size += t.norm_sqr();
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if size.sqrt() <= 1e-17 * base {
                break;
            }
        }
        cur = acc;
    }
    cur
}
