//! Monte Carlo estimators of volumes, areas, γ, the PPT probabilities
//! `p_V`, `p_A` and their ratio Ω.
//!
//! Radial estimators integrate in polar coordinates around `ρ*`:
//!
//! ```text
//! V = (S_{D−1}/D)·E_ω[r(ω)^D]        A = S_{D−1}·E_ω[r(ω)^{D−1} / ⟨ω, n(ω)⟩]
//! ```
//!
//! with `ω` uniform on the unit sphere and `S_{D−1}` its total area. Powers
//! are taken relative to the inscribed radius (`x = (r/r_in)^D`) and the
//! constant `r_in^D` is applied in log space, so nothing underflows for
//! large `D`.
//!
//! Hit-count estimators draw interior or boundary states and count PPT
//! verdicts. Every estimator runs in shards with one random stream each;
//! shards are merged in index order, so results depend only on
//! `(samples, seed, shards)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::body::{boundary_contact, radial_function, BodyKind, BodySpec};
use crate::error::{Error, Result};
use crate::field::{BipartiteShape, NumberField};
use crate::hermitian::{is_ppt, min_eigenvalue, partial_transpose, DEFAULT_PPT_TOL};
use crate::rng::{RngStream, StreamRng, ALGORITHM_ID};
use crate::sampling::{sample_boundary_state_hs, sample_state_hs, DirectionSampler};
use crate::stats::{Moments, PairedMoments};

/// Smallest sample count accepted by the Monte Carlo estimators.
pub const MIN_SAMPLES: u64 = 1_000;
/// Smallest per-side sample count for Ω and the area cross-check.
pub const MIN_OMEGA_SAMPLES: u64 = 10_000;
/// Largest tolerated fraction of skipped (non-generic) directions.
pub const MAX_SKIPPED_FRACTION: f64 = 1e-3;
/// Relative floating-point floor added in quadrature to radial standard
/// errors. Radial estimators of constant-height bodies have (near) zero
/// sampling variance, so the reported error would otherwise be smaller
/// than the rounding error of the eigensolver.
pub const ROUNDING_FLOOR_REL: f64 = 1e-12;

const PURPOSE_DIRECTIONS: u32 = 1;
const PURPOSE_INTERIOR: u32 = 2;
const PURPOSE_BOUNDARY: u32 = 3;
const PURPOSE_DIRECTIONS_ALT: u32 = 4;

/// Sample budget and seeding of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McRun {
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
}

impl McRun {
    pub fn new(samples: u64, seed: u64, shards: u32) -> Self {
        Self { samples, seed, shards }
    }

    fn check(&self, min: u64) -> Result<()> {
        if self.samples < min {
            return Err(Error::InvalidArgument(format!(
                "need at least {min} samples, got {}",
                self.samples
            )));
        }
        if self.shards == 0 {
            return Err(Error::InvalidArgument("shards must be >= 1".into()));
        }
        Ok(())
    }

    fn shard_size(&self, index: u32) -> u64 {
        let base = self.samples / self.shards as u64;
        let extra = (index as u64) < self.samples % self.shards as u64;
        base + extra as u64
    }

    fn seed_info(&self) -> SeedInfo {
        SeedInfo {
            seed: self.seed,
            shards: self.shards,
            algorithm: ALGORITHM_ID.to_string(),
        }
    }

    /// Runs `work(count, rng)` on every shard in parallel and returns the
    /// per-shard results in shard order.
    fn map_shards<T, F>(&self, purpose: u32, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut StreamRng) -> T + Sync,
    {
        let root = RngStream::new(self.seed, 0);
        (0..self.shards)
            .into_par_iter()
            .map(|i| {
                let mut rng = root.substream(purpose, i).rng();
                work(self.shard_size(i), &mut rng)
            })
            .collect()
    }
}

/// Seed descriptor stored with every estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub shards: u32,
    pub algorithm: String,
}

/// A Monte Carlo value with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: SeedInfo,
    pub estimator_id: String,
    /// Samples excluded as non-generic.
    #[serde(default)]
    pub skipped: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl Estimate {
    /// `|value − target|` in units of the standard error.
    pub fn sigma_deviation(&self, target: f64) -> f64 {
        sigma_deviation(self.value, self.stderr, target)
    }
}

pub fn sigma_deviation(value: f64, stderr: f64, target: f64) -> f64 {
    let diff = (value - target).abs();
    if diff == 0.0 {
        0.0
    } else if stderr > 0.0 {
        diff / stderr
    } else {
        f64::INFINITY
    }
}

fn with_floor(value: f64, stat_err: f64) -> f64 {
    stat_err.hypot(ROUNDING_FLOOR_REL * value.abs())
}

/// `ln S_{D−1} = ln(2π^{D/2}/Γ(D/2))`, the log-area of the unit sphere in `R^D`.
pub fn ln_unit_sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    std::f64::consts::LN_2 + half * std::f64::consts::PI.ln() - ln_gamma(half)
}

/// Per-direction sums shared by the volume, area and γ estimators.
#[derive(Debug, Clone, Default)]
pub struct RadialSurvey {
    /// `x = (r/r_in)^D` over every direction.
    pub volume: Moments,
    /// `(x, y)` over generic directions, `y = x·r_in/h` with `h` the support height.
    pub paired: PairedMoments,
    /// `(y, y·1{contact point is PPT})` over generic directions (full body only).
    pub ppt_weighted: PairedMoments,
    pub skipped: u64,
    dim: usize,
    r_in: f64,
}

impl RadialSurvey {
    fn merge(&mut self, other: &RadialSurvey) {
        self.volume.merge(&other.volume);
        self.paired.merge(&other.paired);
        self.ppt_weighted.merge(&other.ppt_weighted);
        self.skipped += other.skipped;
    }

    fn ln_volume_scale(&self) -> f64 {
        ln_unit_sphere_area(self.dim) - (self.dim as f64).ln() + self.dim as f64 * self.r_in.ln()
    }

    fn ln_area_scale(&self) -> f64 {
        ln_unit_sphere_area(self.dim) + (self.dim as f64 - 1.0) * self.r_in.ln()
    }

    fn skip_warning(&self) -> Option<String> {
        let frac = self.skipped as f64 / self.volume.n as f64;
        (frac > MAX_SKIPPED_FRACTION)
            .then(|| format!("non-generic fraction {frac:.2e} exceeds {MAX_SKIPPED_FRACTION:e}"))
    }
}

/// Samples `run.samples` uniform directions and accumulates the radial sums.
pub fn radial_survey(body: &BodySpec, run: &McRun) -> Result<RadialSurvey> {
    radial_survey_with(body, run, PURPOSE_DIRECTIONS)
}

fn radial_survey_with(body: &BodySpec, run: &McRun, purpose: u32) -> Result<RadialSurvey> {
    run.check(MIN_SAMPLES)?;
    let body = *body;
    let dim = body.ambient_dim();
    let r_in = body.inscribed_radius();
    let sampler = DirectionSampler::new(body.space());
    let shard_results = run.map_shards(purpose, |count, rng| -> Result<RadialSurvey> {
        let mut s = RadialSurvey {
            dim,
            r_in,
            ..Default::default()
        };
        for _ in 0..count {
            let omega = sampler.sample(rng);
            match boundary_contact(&body, &omega) {
                Ok(contact) => {
                    let x = (dim as f64 * (contact.radius / r_in).ln()).exp();
                    let h = contact.height(&omega);
                    let y = x * r_in / h;
                    s.volume.push(x);
                    s.paired.push(x, y);
                    if body.kind() == BodyKind::FullStateBody {
                        let t_a = partial_transpose(contact.point.as_hermitian(), &body.shape())?;
                        let ppt = min_eigenvalue(&t_a)? >= -DEFAULT_PPT_TOL;
                        s.ppt_weighted.push(y, if ppt { y } else { 0.0 });
                    }
                }
                Err(Error::NonGeneric { .. }) => {
                    let r = radial_function(&body, &omega)?;
                    s.volume.push((dim as f64 * (r / r_in).ln()).exp());
                    s.skipped += 1;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(s)
    });
    let mut total = RadialSurvey {
        dim,
        r_in,
        ..Default::default()
    };
    for shard in shard_results {
        total.merge(&shard?);
    }
    Ok(total)
}

impl RadialSurvey {
    pub fn volume_estimate(&self, run: &McRun, id: &str) -> Estimate {
        let scale = self.ln_volume_scale().exp();
        let value = scale * self.volume.mean();
        Estimate {
            value,
            stderr: with_floor(value, scale * self.volume.stderr()),
            n_samples: self.volume.n,
            seed: run.seed_info(),
            estimator_id: id.to_string(),
            skipped: 0,
            warning: None,
        }
    }

    pub fn area_estimate(&self, run: &McRun, id: &str) -> Estimate {
        let scale = self.ln_area_scale().exp();
        let value = scale * self.paired.mean_y();
        Estimate {
            value,
            stderr: with_floor(value, scale * self.paired.stderr_y()),
            n_samples: self.paired.n,
            seed: run.seed_info(),
            estimator_id: id.to_string(),
            skipped: self.skipped,
            warning: self.skip_warning(),
        }
    }

    /// `γ = r_in·A/V = D·E[y]/E[x]` on the generic directions.
    pub fn gamma_estimate(&self, run: &McRun, id: &str) -> Estimate {
        let (ratio, se) = self.paired.ratio_y_over_x();
        let d = self.dim as f64;
        let value = d * ratio;
        Estimate {
            value,
            stderr: with_floor(value, d * se),
            n_samples: self.paired.n,
            seed: run.seed_info(),
            estimator_id: id.to_string(),
            skipped: self.skipped,
            warning: self.skip_warning(),
        }
    }

    /// `A_P/A_tot` as the PPT-indicator-weighted share of the area integral.
    pub fn ppt_area_fraction(&self, run: &McRun, id: &str) -> Result<Estimate> {
        if self.ppt_weighted.n == 0 {
            return Err(Error::Unsupported(
                "PPT area fraction needs a full-body survey".into(),
            ));
        }
        let (value, se) = self.ppt_weighted.ratio_y_over_x();
        Ok(Estimate {
            value,
            stderr: se,
            n_samples: self.ppt_weighted.n,
            seed: run.seed_info(),
            estimator_id: id.to_string(),
            skipped: self.skipped,
            warning: self.skip_warning(),
        })
    }
}

fn body_tag(body: &BodySpec) -> String {
    let kind = match body.kind() {
        BodyKind::FullStateBody => "full",
        BodyKind::PptBody => "ppt",
    };
    format!("{kind}/{}/{}", body.shape(), body.shape().field())
}

/// Radial volume estimate `(S_{D−1}/D)·E[r^D]`.
pub fn mc_volume(body: &BodySpec, run: &McRun) -> Result<Estimate> {
    let survey = radial_survey(body, run)?;
    Ok(survey.volume_estimate(run, &format!("mc_volume/{}", body_tag(body))))
}

/// Radial area estimate `S_{D−1}·E[r^{D−1}/⟨ω,n⟩]`; non-generic directions
/// are skipped and counted.
pub fn mc_area(body: &BodySpec, run: &McRun) -> Result<Estimate> {
    let survey = radial_survey(body, run)?;
    Ok(survey.area_estimate(run, &format!("mc_area/{}", body_tag(body))))
}

/// `γ = r·A/V` from one set of shared directions (correlated ratio).
pub fn mc_gamma(body: &BodySpec, run: &McRun) -> Result<Estimate> {
    let survey = radial_survey(body, run)?;
    Ok(survey.gamma_estimate(run, &format!("mc_gamma/{}", body_tag(body))))
}

fn binomial_estimate(hits: u64, n: u64, run: &McRun, id: String) -> Estimate {
    let p = hits as f64 / n as f64;
    Estimate {
        value: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        n_samples: n,
        seed: run.seed_info(),
        estimator_id: id,
        skipped: 0,
        warning: None,
    }
}

fn count_hits<F>(run: &McRun, purpose: u32, trial: F) -> Result<u64>
where
    F: Fn(&mut StreamRng) -> Result<bool> + Sync,
{
    let per_shard = run.map_shards(purpose, |count, rng| -> Result<u64> {
        let mut hits = 0;
        for _ in 0..count {
            hits += trial(rng)? as u64;
        }
        Ok(hits)
    });
    per_shard.into_iter().sum()
}

fn estimate_p_interior_with(shape: &BipartiteShape, run: &McRun, min: u64) -> Result<Estimate> {
    run.check(min)?;
    let (shape, space) = (*shape, shape.space());
    let hits = count_hits(run, PURPOSE_INTERIOR, |rng| {
        is_ppt(&sample_state_hs(space, rng), &shape, DEFAULT_PPT_TOL)
    })?;
    Ok(binomial_estimate(hits, run.samples, run, format!("p_interior/{shape}/{}", shape.field())))
}

fn estimate_p_boundary_with(shape: &BipartiteShape, run: &McRun, min: u64) -> Result<Estimate> {
    run.check(min)?;
    let (shape, space) = (*shape, shape.space());
    let hits = count_hits(run, PURPOSE_BOUNDARY, |rng| {
        is_ppt(&sample_boundary_state_hs(space, rng)?.state, &shape, DEFAULT_PPT_TOL)
    })?;
    Ok(binomial_estimate(hits, run.samples, run, format!("p_boundary/{shape}/{}", shape.field())))
}

/// `p_V`: fraction of HS-random states that are PPT.
pub fn estimate_p_interior(shape: &BipartiteShape, run: &McRun) -> Result<Estimate> {
    estimate_p_interior_with(shape, run, MIN_SAMPLES)
}

/// `p_A = A_P/A_tot`: fraction of HS-random boundary states that are PPT.
pub fn estimate_p_boundary(shape: &BipartiteShape, run: &McRun) -> Result<Estimate> {
    estimate_p_boundary_with(shape, run, MIN_SAMPLES)
}

/// `p_A` by radial integration: PPT-weighted share of the full body's area.
pub fn radial_p_boundary(shape: &BipartiteShape, run: &McRun) -> Result<Estimate> {
    let body = BodySpec::new(BodyKind::FullStateBody, *shape)?;
    let survey = radial_survey(&body, run)?;
    survey.ppt_area_fraction(run, &format!("radial_p_boundary/{shape}/{}", shape.field()))
}

/// Interior and boundary PPT probabilities and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub p_v: Estimate,
    pub p_a: Estimate,
    pub omega: f64,
    pub omega_stderr: f64,
    pub shape: BipartiteShape,
}

/// `Ω = p_V/p_A` with first-order error propagation; the two probabilities
/// come from independent streams.
pub fn estimate_omega(shape: &BipartiteShape, run: &McRun) -> Result<OmegaReport> {
    let p_v = estimate_p_interior_with(shape, run, MIN_OMEGA_SAMPLES)?;
    let p_a = estimate_p_boundary_with(shape, run, MIN_OMEGA_SAMPLES)?;
    if p_a.value == 0.0 {
        return Err(Error::InsufficientSamples(format!(
            "no PPT boundary states among {} samples",
            p_a.n_samples
        )));
    }
    let omega = p_v.value / p_a.value;
    let rel_v = if p_v.value > 0.0 { p_v.stderr / p_v.value } else { 0.0 };
    let rel_a = p_a.stderr / p_a.value;
    Ok(OmegaReport {
        omega,
        omega_stderr: omega * rel_v.hypot(rel_a),
        p_v,
        p_a,
        shape: *shape,
    })
}

/// Fraction of boundary states whose partial transpose is within `δ` of
/// singular, for each `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerProbe {
    pub shape: BipartiteShape,
    pub n_samples: u64,
    pub rows: Vec<CornerRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerRow {
    pub delta: f64,
    pub count: u64,
    pub fraction: f64,
}

impl CornerProbe {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].fraction <= w[0].fraction)
    }

    /// `fraction(δ_{k+1})/fraction(δ_k)` for consecutive rows.
    pub fn step_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].fraction / w[0].fraction)
            .collect()
    }
}

pub fn corner_probe(shape: &BipartiteShape, deltas: &[f64], run: &McRun) -> Result<CornerProbe> {
    run.check(MIN_SAMPLES)?;
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("corner probe needs at least one delta".into()));
    }
    if deltas.iter().any(|d| !(*d >= 0.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "deltas must be non-negative and strictly decreasing".into(),
        ));
    }
    let (shape, space) = (*shape, shape.space());
    let per_shard = run.map_shards(PURPOSE_BOUNDARY, |count, rng| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; deltas.len()];
        for _ in 0..count {
            let b = sample_boundary_state_hs(space, rng)?;
            let lmin = min_eigenvalue(&partial_transpose(b.state.as_hermitian(), &shape)?)?.abs();
            for (c, d) in counts.iter_mut().zip(deltas) {
                *c += (lmin < *d) as u64;
            }
        }
        Ok(counts)
    });
    let mut counts = vec![0u64; deltas.len()];
    for shard in per_shard {
        for (c, s) in counts.iter_mut().zip(shard?) {
            *c += s;
        }
    }
    Ok(CornerProbe {
        shape,
        n_samples: run.samples,
        rows: deltas
            .iter()
            .zip(counts)
            .map(|(&delta, count)| CornerRow {
                delta,
                count,
                fraction: count as f64 / run.samples as f64,
            })
            .collect(),
    })
}

/// `A_PPT` computed by radial integration over the PPT body and by the
/// hit-count route `2·p_A·A_tot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCrossCheck {
    pub shape: BipartiteShape,
    pub a_ppt_radial: Estimate,
    pub a_tot: Estimate,
    pub p_a: Estimate,
    pub a_ppt_hitcount: Estimate,
    pub discrepancy_sigma: f64,
}

pub fn cross_validate_area(shape: &BipartiteShape, run: &McRun) -> Result<AreaCrossCheck> {
    run.check(MIN_OMEGA_SAMPLES)?;
    let full = BodySpec::full(shape.space());
    let tag = format!("{shape}/{}", shape.field());
    // For K = 1 the transpose maps the body onto itself: A_PPT = A_tot.
    let (ppt_body, factor) = if shape.k() >= 2 {
        (BodySpec::ppt(*shape)?, 2.0)
    } else {
        (full, 1.0)
    };
    let a_ppt_radial =
        radial_survey_with(&ppt_body, run, PURPOSE_DIRECTIONS)?.area_estimate(run, &format!("a_ppt_radial/{tag}"));

    let full_survey = radial_survey_with(&full, run, PURPOSE_DIRECTIONS_ALT)?;
    let a_tot = match shape.field() {
        NumberField::Complex => {
            let ratio = crate::body::analytic_area_volume_ratio(shape.n(), shape.field())?;
            let v = full_survey.volume_estimate(run, &format!("v_tot/{tag}"));
            Estimate {
                value: ratio * v.value,
                stderr: ratio * v.stderr,
                estimator_id: format!("a_tot_analytic/{tag}"),
                ..v
            }
        }
        NumberField::Real => full_survey.area_estimate(run, &format!("a_tot_radial/{tag}")),
    };
    let p_a = estimate_p_boundary_with(shape, run, MIN_OMEGA_SAMPLES)?;
    let value = factor * p_a.value * a_tot.value;
    let rel_p = if p_a.value > 0.0 { p_a.stderr / p_a.value } else { 0.0 };
    let a_ppt_hitcount = Estimate {
        value,
        stderr: value * rel_p.hypot(a_tot.stderr / a_tot.value),
        n_samples: p_a.n_samples,
        seed: run.seed_info(),
        estimator_id: format!("a_ppt_hitcount/{tag}"),
        skipped: 0,
        warning: None,
    };
    let combined = a_ppt_radial.stderr.hypot(a_ppt_hitcount.stderr);
    let discrepancy_sigma = sigma_deviation(a_ppt_radial.value, combined, a_ppt_hitcount.value);
    Ok(AreaCrossCheck {
        shape: *shape,
        a_ppt_radial,
        a_tot,
        p_a,
        a_ppt_hitcount,
        discrepancy_sigma,
    })
}

/// Support heights of the boundary contacts along random directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightCheck {
    pub body: BodySpec,
    pub n_samples: u64,
    pub inscribed_radius: f64,
    pub max_deviation: f64,
    pub non_generic: u64,
}

impl HeightCheck {
    pub fn non_generic_fraction(&self) -> f64 {
        self.non_generic as f64 / self.n_samples as f64
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.non_generic_fraction() < MAX_SKIPPED_FRACTION
    }
}

/// `max |support_height(ω) − r_in|` over generic random directions.
pub fn height_check(body: &BodySpec, run: &McRun) -> Result<HeightCheck> {
    run.check(1)?;
    let body = *body;
    let r_in = body.inscribed_radius();
    let sampler = DirectionSampler::new(body.space());
    let per_shard = run.map_shards(PURPOSE_DIRECTIONS, |count, rng| -> Result<(f64, u64)> {
        let mut worst: f64 = 0.0;
        let mut skipped = 0;
        for _ in 0..count {
            let omega = sampler.sample(rng);
            match boundary_contact(&body, &omega) {
                Ok(c) => worst = worst.max((c.height(&omega) - r_in).abs()),
                Err(Error::NonGeneric { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((worst, skipped))
    });
    let mut max_deviation: f64 = 0.0;
    let mut non_generic = 0;
    for shard in per_shard {
        let (w, s) = shard?;
        max_deviation = max_deviation.max(w);
        non_generic += s;
    }
    Ok(HeightCheck {
        body,
        n_samples: run.samples,
        inscribed_radius: r_in,
        max_deviation,
        non_generic,
    })
}
