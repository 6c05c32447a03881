//! Eigen-decompositions delegated to nalgebra.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64 as C64;

fn to_nalgebra(m: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[[r, c]])
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(m));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Eigenvalues of a general complex matrix, from the diagonal of its Schur form.
pub fn eigenvalues(m: &Array2<C64>) -> Vec<C64> {
    let (_, t) = nalgebra::Schur::new(to_nalgebra(m)).unpack();
    t.diagonal().iter().copied().collect()
}
