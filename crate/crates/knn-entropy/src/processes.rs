//! Samplers for a stationary Gaussian Markov chain and iid baselines.
//!
//! The chain on `R^d` has marginal `N(0, Sigma_d)` where `Sigma_d` is
//! tridiagonal with unit diagonal and band `r`, and transition kernel
//!
//! ```text
//! X_{t+1} | X_t  ~  N( rho Sigma_d^{-1} X_t,  Sigma_d - rho^2 Sigma_d^{-1} )
//! ```
//!
//! The cross-covariance of consecutive states is the symmetric block
//! `rho I_d`, so the chain is reversible: simulating backwards uses the same
//! kernel, which is what makes pinned realizations exact.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, lower_matvec, spd_inverse, Matrix};
use crate::math::gaussian_entropy;
use crate::rng::{Prng, RngSeed};

/// The tridiagonal Toeplitz matrix with unit diagonal and `r` on the first
/// off-diagonals.
pub fn build_sigma(d: usize, r: f64) -> Matrix {
    assert!(d >= 1, "dimension must be at least 1");
    let mut m = Matrix::identity(d);
    for i in 0..d.saturating_sub(1) {
        m.set(i, i + 1, r);
        m.set(i + 1, i, r);
    }
    m
}

/// Parameters of the stationary Gaussian Markov chain, with the derived
/// sampling machinery precomputed and validated once.
///
/// Construction fails unless both `Sigma_d` and the conditional covariance
/// `Sigma_d - rho^2 Sigma_d^{-1}` are positive definite (checked by Cholesky).
#[derive(Debug, Clone)]
pub struct GaussianChainSpec {
    dim: usize,
    band: f64,
    temporal: f64,
    chol_marginal: Matrix,
    transition_mean: Matrix,
    chol_conditional: Matrix,
}

impl GaussianChainSpec {
    pub fn new(dim: usize, band: f64, temporal: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Arity("dimension must be at least 1".into()));
        }
        let in_open_unit = |v: f64| v.is_finite() && v.abs() < 1.0;
        if !in_open_unit(band) || !in_open_unit(temporal) {
            return Err(Error::Domain(format!(
                "band and temporal correlation must lie in (-1, 1), got r = {band}, rho = {temporal}"
            )));
        }
        let sigma = build_sigma(dim, band);
        let chol_marginal = cholesky(&sigma)?;
        let sigma_inv = spd_inverse(&chol_marginal);
        let conditional = sigma.sub(&sigma_inv.scaled(temporal * temporal));
        let chol_conditional = cholesky(&conditional)?;
        Ok(Self {
            dim,
            band,
            temporal,
            chol_marginal,
            transition_mean: sigma_inv.scaled(temporal),
            chol_conditional,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn temporal(&self) -> f64 {
        self.temporal
    }

    /// Closed-form entropy of the stationary marginal, in nats.
    pub fn stationary_entropy(&self) -> f64 {
        gaussian_entropy(self.dim, self.band).expect("spec construction verified positive definiteness")
    }

    fn draw_marginal(&self, rng: &mut Prng) -> Vec<f64> {
        lower_matvec(&self.chol_marginal, &self.draw_z(rng))
    }

    fn step(&self, from: &[f64], rng: &mut Prng) -> Vec<f64> {
        let mut x = self.transition_mean.matvec(from);
        let noise = lower_matvec(&self.chol_conditional, &self.draw_z(rng));
        for (xi, ni) in x.iter_mut().zip(&noise) {
            *xi += ni;
        }
        x
    }

    fn draw_z(&self, rng: &mut Prng) -> Vec<f64> {
        (0..self.dim).map(|_| rng.standard_normal()).collect()
    }
}

/// A chain started exactly from the stationary law `N(0, Sigma_d)` — no
/// burn-in — and advanced with the transition kernel.
pub fn sample_stationary_chain(
    spec: &GaussianChainSpec,
    length: usize,
    seed: RngSeed,
) -> Result<Dataset> {
    if length == 0 {
        return Err(Error::Arity("chain length must be at least 1".into()));
    }
    let mut rng = Prng::from_seed(seed);
    let mut data = Vec::with_capacity(length * spec.dim);
    let mut state = spec.draw_marginal(&mut rng);
    data.extend_from_slice(&state);
    for _ in 1..length {
        state = spec.step(&state, &mut rng);
        data.extend_from_slice(&state);
    }
    Dataset::from_flat(data, spec.dim)
}

/// Independent draws from `N(0, Sigma_d)`: the iid baseline with the same
/// marginal as the chain.
pub fn sample_iid_gaussian(d: usize, r: f64, length: usize, seed: RngSeed) -> Result<Dataset> {
    let spec = GaussianChainSpec::new(d, r, 0.0)?;
    sample_stationary_chain(&spec, length, seed)
}

/// A chain realization conditioned on `X[pin_index] = pin_value`.
///
/// Indices after the pin are simulated forward with the transition kernel;
/// indices before it are simulated backward with the same kernel, which is
/// exact because the chain is reversible. Forward variates are drawn before
/// backward ones, so the output is deterministic in the seed.
pub fn sample_pinned_chain(
    spec: &GaussianChainSpec,
    length: usize,
    pin_index: usize,
    pin_value: &[f64],
    seed: RngSeed,
) -> Result<Dataset> {
    if pin_index >= length {
        return Err(Error::Arity(format!(
            "pin index {pin_index} out of range for length {length}"
        )));
    }
    if pin_value.len() != spec.dim {
        return Err(Error::Arity(format!(
            "pin value has dimension {}, chain has dimension {}",
            pin_value.len(),
            spec.dim
        )));
    }
    let mut rng = Prng::from_seed(seed);
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); length];
    rows[pin_index] = pin_value.to_vec();
    for t in pin_index + 1..length {
        rows[t] = spec.step(&rows[t - 1], &mut rng);
    }
    for t in (0..pin_index).rev() {
        rows[t] = spec.step(&rows[t + 1], &mut rng);
    }
    Dataset::from_rows(&rows)
}
