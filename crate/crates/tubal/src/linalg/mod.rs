//! Minimal dense kernels used by the tube and tensor algebra: complex/real
//! matrices, a one-sided Jacobi SVD, and a general eigensolver.

mod cmatrix;
mod eig;
mod svd;

pub use cmatrix::{CMatrix, RMatrix};
pub use eig::{eig_general, Eig};
pub use num_complex::Complex64;
pub use svd::{condition_number, jacobi_svd, pseudo_inverse, Svd};

/// Largest |imaginary part| of a complex slice.
pub fn max_imag(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Largest modulus of a complex slice.
pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
