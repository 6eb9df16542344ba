//! Statistical checks of the samplers against known distributions and
//! against the Metropolis reference chain.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::direction::GellMannBasis;
use crate::error::{Error, Result};
use crate::field::{NumberField, StateSpace};
use crate::hermitian::{CVector, C64};
use crate::metropolis::{metropolis_spectra, ChainConfig, SpectrumDensity};
use crate::rng::{RngStream, StreamRng};
use crate::sampling::{sample_boundary_state_hs, sample_haar_unitary, sample_state_hs, DirectionSampler};
use crate::stats::{chi2_two_sample, histogram, ks_one_sample, ks_two_sample, Moments};

const PURPOSE_VALIDATION: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub samples: usize,
    pub seed: u64,
    /// Significance level of the χ² and KS tests.
    pub alpha: f64,
    /// Band for the moment checks, in standard errors.
    pub sigma_band: f64,
    pub bins: usize,
    /// Smallest pooled count per bin; sparser neighbours are merged.
    pub min_bin_count: u64,
    pub chain_thin: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 2024,
            alpha: 0.01,
            sigma_band: 4.0,
            bins: 40,
            min_bin_count: 20,
            chain_thin: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub name: String,
    pub statistic: f64,
    /// p-value for distribution tests, `|z|` for moment tests.
    pub score: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ValidationCheck {
    fn test(name: String, statistic: f64, p_value: f64, alpha: f64) -> Self {
        Self { name, statistic, score: p_value, threshold: alpha, pass: p_value > alpha }
    }

    fn moment(name: String, value: f64, target: f64, stderr: f64, band: f64) -> Self {
        let z = crate::estimators::sigma_deviation(value, stderr, target);
        Self { name, statistic: value, score: z, threshold: band, pass: z <= band }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn stream(cfg: &ValidationConfig, index: u32) -> StreamRng {
    RngStream::new(cfg.seed, 0).substream(PURPOSE_VALIDATION, index).rng()
}

fn space(n: usize, field: NumberField) -> StateSpace {
    StateSpace::new(n, field).expect("n >= 2")
}

/// `|U₁₁|²` of Haar matrices against its Beta law: `Beta(1, N−1)` complex,
/// `Beta(1/2, (N−1)/2)` real.
pub fn check_haar_entry(n: usize, field: NumberField, cfg: &ValidationConfig) -> Result<ValidationCheck> {
    let mut rng = stream(cfg, 1 + n as u32 * 2 + (field == NumberField::Real) as u32);
    let mut values = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        values.push(sample_haar_unitary(n, field, &mut rng)?[(0, 0)].norm_sqr());
    }
    let (a, b) = match field {
        NumberField::Complex => (1.0, n as f64 - 1.0),
        NumberField::Real => (0.5, (n as f64 - 1.0) / 2.0),
    };
    let law = Beta::new(a, b).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let t = ks_one_sample(&values, |x| law.cdf(x))?;
    Ok(ValidationCheck::test(format!("haar |U11|^2 beta law N={n} {field}"), t.statistic, t.p_value, cfg.alpha))
}

/// For N = 2 the HS measure is uniform in the Bloch ball, so
/// `P(Tr ρ² > 3/4) = P(|r| > 1/√2) = 1 − 2^{−3/2}`.
pub fn check_purity_tail(cfg: &ValidationConfig) -> ValidationCheck {
    let mut rng = stream(cfg, 100);
    let sp = space(2, NumberField::Complex);
    let hits = (0..cfg.samples)
        .filter(|_| sample_state_hs(sp, &mut rng).purity() > 0.75)
        .count();
    let p = hits as f64 / cfg.samples as f64;
    let target = 1.0 - 2f64.powf(-1.5);
    let se = (target * (1.0 - target) / cfg.samples as f64).sqrt();
    ValidationCheck::moment("hs purity tail N=2".into(), p, target, se, cfg.sigma_band)
}

fn bloch_vector(rho: &crate::hermitian::HermitianMatrix) -> [f64; 3] {
    let m = rho.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re]
}

/// N = 2 boundary states are pure with a uniform Bloch vector: each
/// coordinate is uniform on `[−1, 1]` (complex); the polar angle is uniform
/// on the circle (real).
pub fn check_bloch_uniformity(field: NumberField, cfg: &ValidationConfig) -> Result<Vec<ValidationCheck>> {
    let mut rng = stream(cfg, 110 + (field == NumberField::Real) as u32);
    let sp = space(2, field);
    let mut coords = [Vec::new(), Vec::new(), Vec::new()];
    let mut angles = Vec::new();
    for _ in 0..cfg.samples {
        let b = bloch_vector(sample_boundary_state_hs(sp, &mut rng)?.state.as_hermitian());
        for k in 0..3 {
            coords[k].push(b[k]);
        }
        angles.push(b[0].atan2(b[2]));
    }
    let mut out = Vec::new();
    match field {
        NumberField::Complex => {
            for (k, axis) in ["x", "y", "z"].iter().enumerate() {
                let t = ks_one_sample(&coords[k], |v| ((v + 1.0) / 2.0).clamp(0.0, 1.0))?;
                out.push(ValidationCheck::test(
                    format!("bloch {axis} uniform N=2 complex"),
                    t.statistic,
                    t.p_value,
                    cfg.alpha,
                ));
            }
        }
        NumberField::Real => {
            let pi = std::f64::consts::PI;
            let t = ks_one_sample(&angles, |a| ((a + pi) / (2.0 * pi)).clamp(0.0, 1.0))?;
            out.push(ValidationCheck::test(
                "bloch angle uniform N=2 real".into(),
                t.statistic,
                t.p_value,
                cfg.alpha,
            ));
        }
    }
    Ok(out)
}

/// Coordinates of a uniform unit vector in `R^D` have mean 0 and
/// `E[c²] = 1/D`.
pub fn check_direction_moments(sp: StateSpace, cfg: &ValidationConfig) -> Result<Vec<ValidationCheck>> {
    let mut rng = stream(cfg, 120 + sp.n as u32 * 2 + (sp.field == NumberField::Real) as u32);
    let sampler = DirectionSampler::new(sp);
    let basis = GellMannBasis::new(sp);
    let d = basis.len();
    let (mut first, mut sq) = (Moments::default(), Moments::default());
    for _ in 0..cfg.samples {
        let w = sampler.sample(&mut rng);
        let c = basis.coordinates(w.matrix())?;
        let last = c[d - 1];
        first.push(c[0]);
        sq.push(last * last);
    }
    Ok(vec![
        ValidationCheck::moment(
            format!("direction mean N={} {}", sp.n, sp.field),
            first.mean(),
            0.0,
            first.stderr(),
            cfg.sigma_band,
        ),
        ValidationCheck::moment(
            format!("direction variance 1/D N={} {}", sp.n, sp.field),
            sq.mean(),
            1.0 / d as f64,
            sq.stderr(),
            cfg.sigma_band,
        ),
    ])
}

/// Merges adjacent bins until every pooled count reaches `min`.
pub fn merge_sparse_bins(a: &[u64], b: &[u64], min: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut ma, mut mb) = (Vec::new(), Vec::new());
    let (mut ca, mut cb) = (0, 0);
    for (&x, &y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        if ca + cb >= min {
            ma.push(ca);
            mb.push(cb);
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        if let (Some(la), Some(lb)) = (ma.last_mut(), mb.last_mut()) {
            *la += ca;
            *lb += cb;
        } else {
            ma.push(ca);
            mb.push(cb);
        }
    }
    (ma, mb)
}

fn chi2_check(name: String, a: &[f64], b: &[f64], lo: f64, hi: f64, cfg: &ValidationConfig) -> Result<ValidationCheck> {
    let ha = histogram(a.iter().copied(), lo, hi, cfg.bins);
    let hb = histogram(b.iter().copied(), lo, hi, cfg.bins);
    let (ma, mb) = merge_sparse_bins(&ha, &hb, cfg.min_bin_count);
    let t = chi2_two_sample(&ma, &mb)?;
    Ok(ValidationCheck::test(name, t.statistic, t.p_value, cfg.alpha))
}

/// Largest and smallest nonzero boundary eigenvalues from the Wishart
/// sampler against the Metropolis chain on the same density.
pub fn check_boundary_spectrum(sp: StateSpace, cfg: &ValidationConfig) -> Result<Vec<ValidationCheck>> {
    if sp.n < 3 {
        return Err(Error::InvalidArgument("boundary spectrum check needs N >= 3".into()));
    }
    let tag = 200 + sp.n as u32 * 2 + (sp.field == NumberField::Real) as u32;
    let mut rng = stream(cfg, tag);
    let (mut wmax, mut wmin) = (Vec::with_capacity(cfg.samples), Vec::with_capacity(cfg.samples));
    for _ in 0..cfg.samples {
        let ev = sample_boundary_state_hs(sp, &mut rng)?.state.as_hermitian().eigenvalues()?;
        wmax.push(ev[sp.n - 1]);
        wmin.push(ev[1]);
    }
    let chain = ChainConfig { thin: cfg.chain_thin, ..Default::default() };
    let mut chain_rng = stream(cfg, tag + 1000);
    let spectra = metropolis_spectra(SpectrumDensity::boundary(sp), chain, cfg.samples, &mut chain_rng)?;
    let mmax: Vec<f64> = spectra.iter().map(|s| s[0]).collect();
    let mmin: Vec<f64> = spectra.iter().map(|s| s[s.len() - 1]).collect();
    let split = 1.0 / (sp.n - 1) as f64;
    let mut out = vec![chi2_check(
        format!("boundary lambda_max vs chain N={} {}", sp.n, sp.field),
        &wmax,
        &mmax,
        split,
        1.0,
        cfg,
    )?];
    // For N = 3 the smallest nonzero eigenvalue is 1 − λ_max.
    if sp.n > 3 {
        out.push(chi2_check(
            format!("boundary lambda_min vs chain N={} {}", sp.n, sp.field),
            &wmin,
            &mmin,
            0.0,
            split,
            cfg,
        )?);
    }
    Ok(out)
}

/// Interior HS spectrum against the chain with the interior density.
pub fn check_interior_spectrum(sp: StateSpace, cfg: &ValidationConfig) -> Result<ValidationCheck> {
    let tag = 300 + sp.n as u32 * 2 + (sp.field == NumberField::Real) as u32;
    let mut rng = stream(cfg, tag);
    let wmax: Vec<f64> = (0..cfg.samples)
        .map(|_| sample_state_hs(sp, &mut rng).as_hermitian().eigenvalues().map(|ev| ev[sp.n - 1]))
        .collect::<Result<_>>()?;
    let chain = ChainConfig { thin: cfg.chain_thin, ..Default::default() };
    let mut chain_rng = stream(cfg, tag + 1000);
    let mmax: Vec<f64> = metropolis_spectra(SpectrumDensity::interior(sp), chain, cfg.samples, &mut chain_rng)?
        .iter()
        .map(|s| s[0])
        .collect();
    chi2_check(
        format!("interior lambda_max vs chain N={} {}", sp.n, sp.field),
        &wmax,
        &mmax,
        1.0 / sp.n as f64,
        1.0,
        cfg,
    )
}

/// `⟨e₁|ρ|e₁⟩` against `⟨v|ρ|v⟩` for a fixed random unit `v`, on independent
/// boundary samples; equal in law if the ensemble is unitarily invariant.
pub fn check_unitary_invariance(sp: StateSpace, cfg: &ValidationConfig) -> Result<ValidationCheck> {
    let mut rng = stream(cfg, 400 + sp.n as u32 * 2 + (sp.field == NumberField::Real) as u32);
    let v: CVector = sample_haar_unitary(sp.n, sp.field, &mut rng)?.column(0).into_owned();
    let mut e1 = DVector::from_element(sp.n, C64::new(0.0, 0.0));
    e1[0] = C64::new(1.0, 0.0);
    let half = cfg.samples / 2;
    let mut a = Vec::with_capacity(half);
    let mut b = Vec::with_capacity(half);
    for k in 0..2 * half {
        let rho = sample_boundary_state_hs(sp, &mut rng)?.state;
        if k % 2 == 0 {
            a.push(rho.as_hermitian().expectation(&e1)?);
        } else {
            b.push(rho.as_hermitian().expectation(&v)?);
        }
    }
    let t = ks_two_sample(&a, &b)?;
    Ok(ValidationCheck::test(
        format!("boundary unitary invariance N={} {}", sp.n, sp.field),
        t.statistic,
        t.p_value,
        cfg.alpha,
    ))
}

/// The full validation battery.
pub fn run_sampler_validation(cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.samples < 1000 {
        return Err(Error::InvalidArgument("sampler validation needs at least 1000 samples".into()));
    }
    let fields = [NumberField::Complex, NumberField::Real];
    let mut checks = Vec::new();
    for field in fields {
        for n in [2, 3, 4] {
            checks.push(check_haar_entry(n, field, cfg)?);
        }
    }
    checks.push(check_purity_tail(cfg));
    for field in fields {
        checks.extend(check_bloch_uniformity(field, cfg)?);
        checks.extend(check_direction_moments(space(3, field), cfg)?);
        for n in [3, 4] {
            checks.extend(check_boundary_spectrum(space(n, field), cfg)?);
        }
        checks.push(check_interior_spectrum(space(3, field), cfg)?);
        checks.push(check_unitary_invariance(space(4, field), cfg)?);
    }
    Ok(ValidationReport { config: *cfg, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_bins_merge_forward() {
        let (a, b) = merge_sparse_bins(&[5, 0, 1, 30, 2], &[4, 1, 0, 20, 1], 10);
        assert_eq!(a, vec![5, 33]);
        assert_eq!(b, vec![5, 21]);
    }

    #[test]
    fn small_battery_runs() {
        let cfg = ValidationConfig { samples: 5_000, ..Default::default() };
        let report = run_sampler_validation(&cfg).unwrap();
        assert!(report.checks.len() > 20);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.len() <= 1, "{failed:#?}");
    }
}
