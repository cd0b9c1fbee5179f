//! Exact characteristic polynomials, eigenvalues with exact multiplicities,
//! and SVD-based null spaces and generalized eigenspaces.

mod eigen;
mod poly;
mod rational;
mod roots;


use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

pub use eigen::{
    eigenvalues, eval_matrix_poly, generalized_eigenspace, left_generalized_eigenspace,
    minimal_polynomial, null_space, nullity_ladder, rank, spectral_radius, Eigenvalue,
    GeneralizedEigenspace, Root, Spectrum,
};
pub use poly::{char_poly, IntPolynomial};
pub use rational::{
    format_rational, complex_json, matrix_json, real_json, snap_complex, snap_matrix, snap_rational, snap_value, MAX_DENOMINATOR, SNAP_TOL,
};
pub use roots::aberth;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type CRowVector = RowDVector<Complex64>;

/// Default relative rank tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Integer matrix power by repeated squaring.
pub fn mat_pow(a: &CMatrix, mut k: u64) -> CMatrix {
    let mut base = a.clone();
    let mut acc = identity(a.nrows());
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Largest absolute row sum.
pub fn norm_inf(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖a - b‖_F / max(‖b‖_F, 1)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}
