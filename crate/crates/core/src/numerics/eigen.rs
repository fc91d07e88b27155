//! Dense symmetric eigenproblems.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// A dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetricMatrix(DMatrix<f64>);

impl DenseSymmetricMatrix {
    /// Accepts `m` if it is square and symmetric to 1e-12 relative to its
    /// largest entry. The stored matrix is exactly symmetrized.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(invalid("matrix must be square with dimension >= 1"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        let scale = m.amax();
        let n = m.nrows();
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > 1e-12 * scale {
            return Err(invalid(format!("matrix is not symmetric (max asymmetry {asym:e})")));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self(sym))
    }

    /// Builds `M[i][j] = f(i, j)` for `j >= i` and mirrors it.
    pub fn from_upper_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self::new(m)
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full spectrum in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn pair(&self, k: usize) -> EigenPair {
        EigenPair {
            value: self.values[k],
            vector: self.vectors.column(k).iter().copied().collect(),
        }
    }
}

/// Ascending eigen-decomposition, with the residual of every pair checked
/// against `1e-10 * ||M||`.
pub fn symmetric_spectrum(m: &DenseSymmetricMatrix) -> Result<Spectrum> {
    let eig = SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, 10_000).ok_or(Error::EigenFailure {
        residual: f64::INFINITY,
        tolerance: 0.0,
    })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.dimension();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    let norm = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tolerance = 1e-10 * norm.max(f64::MIN_POSITIVE);
    let residual = (&m.0 * &vectors - &vectors * DMatrix::from_diagonal(&DVector::from(values.clone())))
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if !(residual <= tolerance) && norm > 0.0 {
        return Err(Error::EigenFailure { residual, tolerance });
    }
    Ok(Spectrum { values, vectors })
}

/// Algebraically smallest eigenvalue and a unit eigenvector.
pub fn lowest_eigenpair(m: &DenseSymmetricMatrix) -> Result<EigenPair> {
    Ok(symmetric_spectrum(m)?.pair(0))
}
