//! Random-walk Metropolis sampler for eigenvalue densities on the simplex.
//!
//! Serves as the independent reference for the Wishart-based boundary
//! sampler: the target is written directly from the density formula
//! `∏_{i<j}|λᵢ−λⱼ|^a · ∏ᵢ λᵢ^b` on `{λ ≥ 0, Σλ = 1}`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::StateSpace;
use crate::hermitian::{CMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::sampling::{sample_haar_unitary, BoundaryState};

/// Unnormalized eigenvalue density on the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumDensity {
    /// Number of free eigenvalues.
    pub count: usize,
    pub vandermonde_exponent: f64,
    pub power_exponent: f64,
}

impl SpectrumDensity {
    /// Nonzero spectrum of a boundary state: N−1 eigenvalues, both exponents β.
    pub fn boundary(space: StateSpace) -> Self {
        let beta = space.field.beta();
        Self {
            count: space.n - 1,
            vandermonde_exponent: beta,
            power_exponent: beta,
        }
    }

    /// Full spectrum under the flat measure on the state body.
    pub fn interior(space: StateSpace) -> Self {
        Self {
            count: space.n,
            vandermonde_exponent: space.field.beta(),
            power_exponent: 0.0,
        }
    }

    pub fn log_density(&self, lambda: &[f64]) -> f64 {
        if lambda.iter().any(|&l| l <= 0.0) {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..lambda.len() {
            acc += self.power_exponent * lambda[i].ln();
            for j in i + 1..lambda.len() {
                acc += self.vandermonde_exponent * (lambda[i] - lambda[j]).abs().ln();
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    /// Standard deviation of the mass moved between two coordinates.
    pub step: f64,
    pub burn_in: usize,
    /// Chain steps between retained samples.
    pub thin: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            step: 0.08,
            burn_in: 20_000,
            thin: 25,
        }
    }
}

/// Metropolis chain over the simplex. Proposals move mass `δ ~ N(0, step²)`
/// between two random coordinates, which keeps `Σλ = 1` and is symmetric.
#[derive(Debug, Clone)]
pub struct SpectrumChain {
    density: SpectrumDensity,
    config: ChainConfig,
    state: Vec<f64>,
    log_p: f64,
    proposed: u64,
    accepted: u64,
}

impl SpectrumChain {
    pub fn new<R: Rng + ?Sized>(
        density: SpectrumDensity,
        config: ChainConfig,
        rng: &mut R,
    ) -> Result<Self> {
        if density.count == 0 {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        if config.thin == 0 || !(config.step > 0.0) {
            return Err(Error::InvalidArgument(
                "chain needs thin >= 1 and a positive step".into(),
            ));
        }
        let p = density.count;
        // Distinct starting eigenvalues 1..p, normalized.
        let total = (p * (p + 1) / 2) as f64;
        let state: Vec<f64> = (1..=p).map(|k| k as f64 / total).collect();
        let log_p = density.log_density(&state);
        let mut chain = Self {
            density,
            config,
            state,
            log_p,
            proposed: 0,
            accepted: 0,
        };
        for _ in 0..config.burn_in {
            chain.step(rng);
        }
        chain.proposed = 0;
        chain.accepted = 0;
        Ok(chain)
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let p = self.state.len();
        if p < 2 {
            return;
        }
        let i = rng.random_range(0..p);
        let mut j = rng.random_range(0..p - 1);
        if j >= i {
            j += 1;
        }
        let delta: f64 = self.config.step * rng.sample::<f64, _>(StandardNormal);
        self.proposed += 1;
        let (old_i, old_j) = (self.state[i], self.state[j]);
        self.state[i] += delta;
        self.state[j] -= delta;
        let log_new = self.density.log_density(&self.state);
        let u: f64 = rng.random();
        if log_new > f64::NEG_INFINITY && u.ln() < log_new - self.log_p {
            self.log_p = log_new;
            self.accepted += 1;
        } else {
            self.state[i] = old_i;
            self.state[j] = old_j;
        }
    }

    /// Next retained spectrum, sorted in decreasing order.
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        for _ in 0..self.config.thin {
            self.step(rng);
        }
        let mut out = self.state.clone();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.proposed as f64
    }
}

/// `count` thinned spectra from one chain.
pub fn metropolis_spectra<R: Rng + ?Sized>(
    density: SpectrumDensity,
    config: ChainConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let mut chain = SpectrumChain::new(density, config, rng)?;
    Ok((0..count).map(|_| chain.next_sample(rng)).collect())
}

/// Boundary state with a Metropolis spectrum and a Haar eigenbasis.
pub fn boundary_state_from_chain<R: Rng + ?Sized>(
    space: StateSpace,
    chain: &mut SpectrumChain,
    rng: &mut R,
) -> Result<BoundaryState> {
    if chain.density.count != space.n - 1 {
        return Err(Error::DimensionMismatch {
            expected: space.n - 1,
            found: chain.density.count,
        });
    }
    let spectrum = chain.next_sample(rng);
    let u = sample_haar_unitary(space.n, space.field, rng)?;
    let mut diag = DMatrix::<f64>::zeros(space.n, space.n);
    for (k, l) in spectrum.iter().enumerate() {
        diag[(k, k)] = *l;
    }
    let d: CMatrix = diag.map(|x| C64::new(x, 0.0));
    let rho = HermitianMatrix::new(&u * d * u.adjoint(), space.field)?;
    Ok(BoundaryState {
        state: DensityMatrix::new(rho)?,
        zero_eigvec: u.column(space.n - 1).into_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::rng::RngStream;

    #[test]
    fn log_density_matches_formula() {
        let d = SpectrumDensity::boundary(StateSpace::new(3, NumberField::Complex).unwrap());
        let l = [0.7, 0.3];
        let expected = (0.4f64.powi(2) * 0.49 * 0.09).ln();
        assert!((d.log_density(&l) - expected).abs() < 1e-12);
        assert_eq!(d.log_density(&[1.2, -0.2]), f64::NEG_INFINITY);
    }

    #[test]
    fn chain_stays_on_simplex() {
        let space = StateSpace::new(4, NumberField::Complex).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let cfg = ChainConfig { burn_in: 1000, ..Default::default() };
        let samples = metropolis_spectra(SpectrumDensity::boundary(space), cfg, 200, &mut rng).unwrap();
        for s in &samples {
            assert_eq!(s.len(), 3);
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(s.iter().all(|&l| l > 0.0));
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn two_point_spectrum_is_trivial() {
        let space = StateSpace::new(2, NumberField::Real).unwrap();
        let mut rng = RngStream::new(3, 1).rng();
        let s = metropolis_spectra(SpectrumDensity::boundary(space), ChainConfig::default(), 5, &mut rng)
            .unwrap();
        assert!(s.iter().all(|v| v == &vec![1.0]));
    }

    /// For N=3 complex the largest boundary eigenvalue x ∈ [1/2, 1] has density
    /// ∝ (2x−1)² x² (1−x)²; its mean by quadrature is compared with the chain.
    #[test]
    fn chain_mean_matches_quadrature() {
        let f = |x: f64| (2.0 * x - 1.0).powi(2) * x * x * (1.0 - x).powi(2);
        let m = 20_000;
        let (mut z, mut zx) = (0.0, 0.0);
        for k in 0..m {
            let x = 0.5 + 0.5 * (k as f64 + 0.5) / m as f64;
            z += f(x);
            zx += x * f(x);
        }
        let exact = zx / z;
        let space = StateSpace::new(3, NumberField::Complex).unwrap();
        let mut rng = RngStream::new(21, 0).rng();
        let s = metropolis_spectra(SpectrumDensity::boundary(space), ChainConfig::default(), 20_000, &mut rng)
            .unwrap();
        let mean = s.iter().map(|v| v[0]).sum::<f64>() / s.len() as f64;
        let var = s.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / s.len() as f64;
        let se = (var / s.len() as f64).sqrt();
        assert!((mean - exact).abs() < 5.0 * se, "mean {mean} exact {exact} se {se}");
    }

    #[test]
    fn chain_boundary_state_has_kernel() {
        let space = StateSpace::new(3, NumberField::Real).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        let mut chain = SpectrumChain::new(SpectrumDensity::boundary(space), ChainConfig::default(), &mut rng)
            .unwrap();
        let b = boundary_state_from_chain(space, &mut chain, &mut rng).unwrap();
        assert!((b.state.as_hermitian().matrix() * &b.zero_eigvec).norm() < 1e-12);
        assert!(chain.acceptance_rate() > 0.1);
    }
}
