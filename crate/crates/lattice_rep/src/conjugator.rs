use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::{conjugating_generator, exp_ig};
use crate::window::{apply_h, HParams, LatticeWindow};
use crate::{LatticeError, LaurentSeries, PhaseReducer};

/// Truncation controls for the conjugator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KCutoffs {
    /// Number of generator terms on each side.
    pub terms: usize,
    /// Circle samples for the exponential.
    pub samples: usize,
    /// Coefficients of `e^{ig}` below this are dropped from the tails.
    pub floor: f64,
}

impl Default for KCutoffs {
    fn default() -> Self {
        Self { terms: 60, samples: 2048, floor: 1e-18 }
    }
}

/// The operator `k_γ = w* e^{ig(γu)} w*` with `g` the conjugating generator.
#[derive(Clone, Debug)]
pub struct Conjugator {
    alpha: PhaseReducer,
    gamma: f64,
    beta: f64,
    exp_coeffs: LaurentSeries,
}

impl Conjugator {
    pub fn new(gamma: f64, beta: f64, alpha: &PhaseReducer, cut: KCutoffs) -> Result<Self, LatticeError> {
        let g = conjugating_generator(beta, gamma, alpha, cut.terms)?;
        let exp_coeffs = exp_ig(&g, cut.samples)?.trim(cut.floor);
        Ok(Self { alpha: *alpha, gamma, beta, exp_coeffs })
    }

    /// Same construction with an arbitrary generator in place of the conjugating one.
    pub fn from_generator(
        generator: &LaurentSeries,
        gamma: f64,
        beta: f64,
        alpha: &PhaseReducer,
        cut: KCutoffs,
    ) -> Result<Self, LatticeError> {
        let exp_coeffs = exp_ig(generator, cut.samples)?.trim(cut.floor);
        Ok(Self { alpha: *alpha, gamma, beta, exp_coeffs })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Coefficients `E_j` of the exponential.
    pub fn exp_coeffs(&self) -> &LaurentSeries {
        &self.exp_coeffs
    }

    /// Number of sites lost on each side by [`Conjugator::apply`].
    pub fn halo(&self) -> usize {
        self.exp_coeffs.half_width()
    }

    /// `(kξ)_n = λ^{-n²} Σ_j E_j λ^{-(n-j)²} ξ_{n-j}` on the interior shrunk by the halo.
    pub fn apply(&self, xi: &LatticeWindow) -> Result<LatticeWindow, LatticeError> {
        let j = self.halo() as i64;
        let lo = xi.n_min() + j;
        let hi = xi.n_max() - j;
        if lo > hi {
            return Err(LatticeError::WindowTooSmall { needed: 2 * self.halo() + 1, have: xi.len() });
        }
        let twisted: Vec<Complex64> = xi.iter().map(|(n, z)| z * self.alpha.lambda_sq(n).conj()).collect();
        let base = xi.n_min();
        Ok(LatticeWindow::from_fn(lo, hi, |n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, e) in self.exp_coeffs.iter() {
                acc += e * twisted[(n - k - base) as usize];
            }
            acc * self.alpha.lambda_sq(n).conj()
        }))
    }

    /// Apply to a vector that vanishes outside its window; the result is
    /// exact on the window grown by the halo.
    pub fn apply_compact(&self, xi: &LatticeWindow) -> Result<LatticeWindow, LatticeError> {
        let j = 2 * self.halo() as i64;
        let padded = LatticeWindow::from_fn(xi.n_min() - j, xi.n_max() + j, |n| xi.at(n));
        self.apply(&padded)
    }
}

/// Max over random compactly supported `ξ` of the sup-norm of
/// `h_{γ/δ}(δ) k ξ - k h_{γδ}(δ) ξ`, relative to `‖ξ‖_∞`.
#[allow(clippy::too_many_arguments)]
pub fn intertwine_residual(
    gamma: f64,
    delta: f64,
    beta: f64,
    alpha: &PhaseReducer,
    trials: usize,
    support: i64,
    seed: u64,
    cut: KCutoffs,
) -> Result<f64, LatticeError> {
    if !(delta > 1.0) {
        return Err(LatticeError::Parameter(format!("delta must exceed 1, got {delta}")));
    }
    let k = Conjugator::new(gamma, beta, alpha, cut)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Complex64::new(delta, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let left = HParams::new(Complex64::new(gamma / delta, 0.0), d, one, beta);
    let right = HParams::new(Complex64::new(gamma * delta, 0.0), d, one, beta);
    let reach = support + 2 * k.halo() as i64 + 4;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let xi = LatticeWindow::from_fn(-reach, reach, |n| {
            if n.abs() <= support {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let scale = xi.norm_inf();
        if scale == 0.0 {
            continue;
        }
        let lhs = apply_h(&left, &k.apply(&xi)?, alpha)?;
        let rhs = k.apply(&apply_h(&right, &xi, alpha)?)?;
        worst = worst.max(lhs.sub(&rhs)?.norm_inf() / scale);
    }
    Ok(worst)
}
