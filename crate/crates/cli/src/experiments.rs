//! Dispatch from a config to the library estimators.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ppt_geometry::body::{BodyKind, BodySpec};
use ppt_geometry::estimators::{
    corner_probe, cross_validate_area, estimate_omega, height_check, radial_survey, sigma_deviation, Estimate, McRun,
};
use ppt_geometry::polytope::{
    constant_height_check, cube, intersect_bodies, polytope_gamma_mc, random_unit_body, rectangle, regular_simplex,
    rotated_square, square, TangentBody,
};
use ppt_geometry::rng::RngStream;
use ppt_geometry::validation::{run_sampler_validation, ValidationConfig};
use ppt_geometry::NumberField;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind, PolytopeSpec};
use crate::RunError;

const PURPOSE_POLYTOPE_BUILD: u32 = 48;
const PURPOSE_POLYTOPE_HEIGHT: u32 = 49;
const DEFAULT_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// One acceptance test inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_deviation: Option<f64>,
    /// Band or bound the check is judged against.
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// `|value − target| ≤ k·stderr`.
    pub fn band(name: impl Into<String>, est: &Estimate, target: f64, k: f64) -> Self {
        let dev = sigma_deviation(est.value, est.stderr, target);
        Self {
            name: name.into(),
            value: est.value,
            stderr: Some(est.stderr),
            target: Some(target),
            sigma_deviation: Some(dev),
            threshold: k,
            pass: dev <= k,
        }
    }

    /// `value ≤ bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            stderr: None,
            target: None,
            sigma_deviation: None,
            threshold: bound,
            pass: value <= bound,
        }
    }

    /// `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { pass: value < bound, ..Self::at_most(name, value, bound) }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: ok as u8 as f64,
            stderr: None,
            target: Some(1.0),
            sigma_deviation: None,
            threshold: 1.0,
            pass: ok,
        }
    }
}

/// Checks and raw estimator output of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub details: Value,
}

fn run_of(cfg: &ExperimentConfig) -> McRun {
    McRun::new(cfg.n_samples, cfg.seed, cfg.shards)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("estimator output serializes")
}

fn body_of(cfg: &ExperimentConfig) -> Result<BodySpec, RunError> {
    let shape = cfg.bipartite_shape()?;
    let kind = cfg.body.unwrap_or(BodyKind::FullStateBody);
    Ok(BodySpec::new(kind, shape)?)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Omega => omega(cfg),
        ExperimentKind::Gamma => gamma(cfg),
        ExperimentKind::HeightCheck => heights(cfg),
        ExperimentKind::CornerProbe => corners(cfg),
        ExperimentKind::AreaCrosscheck => area(cfg),
        ExperimentKind::PolytopeGamma => polytope(cfg),
        ExperimentKind::SamplerValidate => samplers(cfg),
    }
}

fn omega(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let rep = estimate_omega(&cfg.bipartite_shape()?, &run_of(cfg))?;
    let est = Estimate {
        value: rep.omega,
        stderr: rep.omega_stderr,
        estimator_id: "omega".into(),
        ..rep.p_v.clone()
    };
    Ok(Outcome {
        checks: vec![Check::band("omega", &est, 2.0, cfg.tolerance("sigma"))],
        details: to_value(&rep),
    })
}

fn gamma(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let body = body_of(cfg)?;
    let run = run_of(cfg);
    let survey = radial_survey(&body, &run)?;
    let v = survey.volume_estimate(&run, "mc_volume");
    let a = survey.area_estimate(&run, "mc_area");
    let g = survey.gamma_estimate(&run, "mc_gamma");
    let k = cfg.tolerance("sigma");
    let mut checks = vec![Check::band("gamma", &g, body.ambient_dim() as f64, k)];
    let skipped = g.skipped as f64 / cfg.n_samples as f64;
    checks.push(Check::below("non-generic fraction", skipped, cfg.tolerance("non_generic_fraction")));
    // The qubit body is a ball of radius 1/√2 in R³.
    if body.kind() == BodyKind::FullStateBody && body.space().n == 2 && body.space().field == NumberField::Complex {
        let pi = std::f64::consts::PI;
        checks.push(Check::band("volume", &v, pi * 2f64.sqrt() / 3.0, k));
        checks.push(Check::band("area", &a, 2.0 * pi, k));
    }
    Ok(Outcome {
        checks,
        details: json!({ "volume": v, "area": a, "gamma": g, "dimension": body.ambient_dim() }),
    })
}

fn heights(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let rep = height_check(&body_of(cfg)?, &run_of(cfg))?;
    Ok(Outcome {
        checks: vec![
            Check::at_most("max |height - r_in|", rep.max_deviation, cfg.tolerance("height")),
            Check::below(
                "non-generic fraction",
                rep.non_generic_fraction(),
                cfg.tolerance("non_generic_fraction"),
            ),
        ],
        details: to_value(&rep),
    })
}

fn corners(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let deltas = cfg.deltas.clone().unwrap_or_else(|| DEFAULT_DELTAS.to_vec());
    let probe = corner_probe(&cfg.bipartite_shape()?, &deltas, &run_of(cfg))?;
    let mut checks = vec![Check::flag("monotone in delta", probe.is_monotone())];
    if let Some(&last) = probe.step_ratios().last() {
        // A last step with no hits on either side is 0/0 and fails.
        let last = if last.is_nan() { f64::INFINITY } else { last };
        checks.push(Check::at_most("last step ratio", last, cfg.tolerance("corner_last_ratio")));
    }
    Ok(Outcome { checks, details: to_value(&probe) })
}

fn area(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let rep = cross_validate_area(&cfg.bipartite_shape()?, &run_of(cfg))?;
    let mut check = Check::below("A_PPT discrepancy (sigma)", rep.discrepancy_sigma, cfg.tolerance("sigma"));
    check.target = Some(0.0);
    Ok(Outcome { checks: vec![check], details: to_value(&rep) })
}

/// Builds the polytope and its default target: `D` for unit generators,
/// 1.8 for the rectangle.
pub fn build_polytope(spec: &PolytopeSpec, seed: u64) -> Result<(TangentBody, Option<f64>), RunError> {
    let bad = |e: ppt_geometry::Error| RunError::Config(ConfigError::new("polytope", e.to_string()));
    let body = match spec {
        PolytopeSpec::Cube { dim } => cube(*dim).map_err(bad)?,
        PolytopeSpec::Simplex { dim } => regular_simplex(*dim).map_err(bad)?,
        PolytopeSpec::Rectangle => return Ok((rectangle()?, Some(1.8))),
        PolytopeSpec::Octagon => intersect_bodies(&square()?, &rotated_square(std::f64::consts::FRAC_PI_4)?)?,
        PolytopeSpec::RandomUnit { dim, count, shrink } => {
            let mut rng = RngStream::new(seed, 0).substream(PURPOSE_POLYTOPE_BUILD, 0).rng();
            let body = random_unit_body(*dim, *count, &mut rng).map_err(bad)?;
            match shrink {
                Some(f) => body.with_scaled_generator(0, *f).map_err(bad)?,
                None => body,
            }
        }
        PolytopeSpec::Intersection { parts } => {
            let mut acc: Option<TangentBody> = None;
            for p in parts {
                let (b, _) = build_polytope(p, seed)?;
                acc = Some(match acc {
                    None => b,
                    Some(a) => intersect_bodies(&a, &b).map_err(bad)?,
                });
            }
            acc.ok_or_else(|| RunError::Config(ConfigError::new("polytope", "empty intersection")))?
        }
        PolytopeSpec::Generators { generators } => TangentBody::try_from(generators.clone()).map_err(bad)?,
    };
    let target = body.all_unit().then_some(body.dim() as f64);
    Ok((body, target))
}

fn polytope(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let spec = cfg.polytope.as_ref().expect("validated");
    let (body, default_target) = build_polytope(spec, cfg.seed)?;
    let g = polytope_gamma_mc(&body, &run_of(cfg))?;
    let mut rng = RngStream::new(cfg.seed, 0).substream(PURPOSE_POLYTOPE_HEIGHT, 0).rng();
    let tol = cfg.tolerance("constant_height");
    let height = constant_height_check(&body, cfg.n_samples.min(100_000), tol, &mut rng)?;
    let mut checks = Vec::new();
    if let Some(t) = cfg.target.or(default_target) {
        checks.push(Check::band("gamma", &g.gamma, t, cfg.tolerance("sigma")));
    }
    // The body has constant height iff no sub-unit generator is a vertex.
    let mut expected = true;
    for (i, y) in body.generators().iter().enumerate() {
        if (y.norm() - 1.0).abs() > tol && body.generator_is_vertex(i)? {
            expected = false;
        }
    }
    let mut verdict = Check::flag("max face deviation", height.pass == expected);
    verdict.value = height.max_deviation;
    verdict.target = None;
    verdict.threshold = tol;
    checks.push(verdict);
    Ok(Outcome {
        checks,
        details: json!({ "gamma": g, "constant_height": height, "generators": body.len(), "dim": body.dim() }),
    })
}

fn samplers(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let vc = ValidationConfig {
        samples: cfg.n_samples as usize,
        seed: cfg.seed,
        alpha: cfg.tolerance("alpha"),
        sigma_band: cfg.tolerance("validation_sigma"),
        ..Default::default()
    };
    let rep = run_sampler_validation(&vc)?;
    let checks = rep
        .checks
        .iter()
        .map(|c| Check {
            name: c.name.clone(),
            value: c.score,
            stderr: None,
            target: None,
            sigma_deviation: None,
            threshold: c.threshold,
            pass: c.pass,
        })
        .collect();
    Ok(Outcome { checks, details: to_value(&rep) })
}
