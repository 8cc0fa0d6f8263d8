//! Hermitian eigendecomposition and spectral matrix functions.

use nalgebra::SymmetricEigen;

use crate::error::Result;
use crate::policy::POLICY;
use crate::tensor::{CMatrix, CVector, Operator, PureState, SystemShape};

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub degeneracy_tolerance: f64,
    shape: SystemShape,
}

impl SpectralDecomposition {
    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_energy(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn spectral_width(&self) -> f64 {
        self.max_energy() - self.ground_energy()
    }

    /// Number of eigenvalues within the degeneracy tolerance of the minimum.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.ground_energy();
        self.eigenvalues
            .iter()
            .take_while(|&&e| e - e0 <= self.degeneracy_tolerance)
            .count()
    }

    pub fn eigenvector(&self, i: usize) -> PureState {
        PureState::from_parts_unchecked(
            self.eigenvectors.column(i).into_owned(),
            self.shape.clone(),
        )
    }

    /// First ground eigenvector. Under degeneracy this is an arbitrary
    /// element of the ground manifold.
    pub fn ground_state(&self) -> PureState {
        self.eigenvector(0)
    }

    /// Eigenvalues grouped into (value, multiplicity) levels.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some((first, count)) if e - *first <= self.degeneracy_tolerance => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// V diag(f(λ)) V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.weighted(&w)
    }

    /// V diag(w) V† for per-eigenvector weights `w`.
    pub fn weighted(&self, w: &[f64]) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &wj) in w.iter().enumerate() {
            for z in scaled.column_mut(j).iter_mut() {
                *z *= wj;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }
}

/// Ascending eigenpairs of a Hermitian matrix (no validation; the matrix is
/// symmetrized first).
pub(crate) fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn eigh_values(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).unscale(2.0);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Lowest eigenpair of a Hermitian matrix; first column on ties.
pub(crate) fn lowest_eigenpair(m: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = eigh(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Diagonalizes a Hermitian operator.
pub fn eig_hermitian(h: &Operator) -> Result<SpectralDecomposition> {
    h.ensure_hermitian()?;
    let (eigenvalues, eigenvectors) = eigh(h.matrix());
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        degeneracy_tolerance: POLICY.degeneracy,
        shape: h.shape().clone(),
    })
}
