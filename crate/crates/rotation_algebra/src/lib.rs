//! Coefficient arithmetic in the irrational rotation algebra.
//!
//! Elements are finite sums `Σ c_pq w_pq` over the twisted monomials
//! `w_pq = λ^{-pq} u^p v^q`, where `uv = λ²vu` and `λ = e^{iπα}`.

mod automorphism;
mod element;

pub use automorphism::{
    gl2z_isometry, moment, moment_at, neumann_inverse, rho_beta, rho_generators, IntegerMatrix2,
};
pub use element::{AlgebraElement, AlphaId, DEFAULT_FLOOR};
pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("rotation numbers differ: {0} vs {1}")]
    AlphaMismatch(String, String),
    #[error("determinant {0} is not ±1")]
    Determinant(i64),
    #[error("beta must exceed 1, got {0}")]
    Beta(f64),
    #[error("expected a single monomial, got {0} terms")]
    NotMonomial(usize),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
