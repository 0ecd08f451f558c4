//! Sequences on the integer lattice and the operators acting on them.
//!
//! Conventions: `(uξ)_n = ξ_{n-1}`, `(vξ)_n = λ^{-2n}ξ_n`, `(wξ)_n = λ^{n²}ξ_n`
//! with `λ = e^{iπα}`, and `(D_xξ)_n = x^n ξ_n`. The family
//! `h_γ(δ) = γu + γ^{-1}u* + β(δv + δ^{-1}v*)` acts on [`LatticeWindow`]s,
//! which lose one site per side for every nearest-neighbour coupling.

mod conjugator;
mod phase;
pub mod series;
mod window;

pub use conjugator::{intertwine_residual, Conjugator, KCutoffs};
pub use num_complex::Complex64;
pub use phase::{diophantine_profile, satisfies_diophantine, PhaseReducer};
pub use series::{conjugating_generator, exp_ig, g_series, map_on_circle, LaurentSeries};
pub use window::{
    apply_d, apply_diag_v, apply_h, apply_shift_u, apply_shift_u_adj, apply_w, apply_w_adj, translate, HParams,
    LatticeWindow,
};

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("empty window")]
    EmptyWindow,
    #[error("non-finite component")]
    NonFinite,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("x^n overflows; keep |n·log|x|| below {bound:.3e}")]
    Overflow { bound: f64 },
    #[error("window of {have} sites too small, need {needed}")]
    WindowTooSmall { needed: usize, have: usize },
    #[error("{samples} samples too few for support {support}")]
    TooFewSamples { samples: usize, support: usize },
    #[error("sin(πα·{n}) vanishes")]
    Resonance { n: i64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
