//! Dense complex linear algebra for small matrices.

mod eigen;
mod matrix;
pub mod poly;
mod rref;

pub use eigen::{
    adapted_eigenbasis, chain_length, cluster_tol, eigen_structure, jordan_chain, normalize_eigvec, EigenStructure,
    EigenValue,
};
pub use matrix::{dot, inner, norm_inf_vec, CMatrix};
pub use rref::{
    column_basis, in_span, intersect, nullspace, orthonormalize, rank, rref, solve_min_norm, solve_square, Rref,
};

pub use num_complex::Complex64 as C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}
