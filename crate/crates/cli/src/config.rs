use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use ppt_geometry::body::BodyKind;
use ppt_geometry::estimators::{MIN_OMEGA_SAMPLES, MIN_SAMPLES};
use ppt_geometry::field::parse_shape;
use ppt_geometry::{BipartiteShape, NumberField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Omega,
    Gamma,
    HeightCheck,
    CornerProbe,
    AreaCrosscheck,
    PolytopeGamma,
    SamplerValidate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::Omega,
        Self::Gamma,
        Self::HeightCheck,
        Self::CornerProbe,
        Self::AreaCrosscheck,
        Self::PolytopeGamma,
        Self::SamplerValidate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Gamma => "gamma",
            Self::HeightCheck => "height-check",
            Self::CornerProbe => "corner-probe",
            Self::AreaCrosscheck => "area-crosscheck",
            Self::PolytopeGamma => "polytope-gamma",
            Self::SamplerValidate => "sampler-validate",
        }
    }

    pub fn min_samples(&self) -> u64 {
        match self {
            Self::Omega | Self::AreaCrosscheck => MIN_OMEGA_SAMPLES,
            Self::HeightCheck => 1,
            _ => MIN_SAMPLES,
        }
    }

    fn needs_shape(&self) -> bool {
        !matches!(self, Self::PolytopeGamma | Self::SamplerValidate)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Polytope selection for `polytope-gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolytopeSpec {
    Cube { dim: usize },
    Simplex { dim: usize },
    /// `[−1, 1] × [−1, 1.5]`.
    Rectangle,
    /// Square intersected with the square rotated by 45°.
    Octagon,
    /// Polar of `count` random unit vectors, drawn from the config seed;
    /// `shrink` rescales the first generator.
    RandomUnit {
        dim: usize,
        count: usize,
        #[serde(default)]
        shrink: Option<f64>,
    },
    Intersection { parts: Vec<PolytopeSpec> },
    Generators { generators: Vec<Vec<f64>> },
}

/// Known tolerance keys and their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 7] = [
    ("sigma", 3.0),
    ("height", 1e-9),
    ("non_generic_fraction", 1e-3),
    ("corner_last_ratio", 0.2),
    ("alpha", 0.01),
    ("validation_sigma", 4.0),
    ("constant_height", 1e-12),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// `"KxM"`; the full body of an N-level system is `"1xN"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyKind>,
    #[serde(default = "default_field")]
    pub field: NumberField,
    pub n_samples: u64,
    pub seed: u64,
    pub shards: u32,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeSpec>,
    /// Expected value for `polytope-gamma` when it cannot be inferred.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

fn default_field() -> NumberField {
    NumberField::Complex
}

/// Invalid configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shards: Option<u32>,
    pub samples: Option<u64>,
    pub field: Option<NumberField>,
    pub shape: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("<document>")
                .to_string();
            ConfigError { field, message: msg }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.shards {
            self.shards = v;
        }
        if let Some(v) = o.samples {
            self.n_samples = v;
        }
        if let Some(v) = o.field {
            self.field = v;
        }
        if let Some(v) = &o.shape {
            self.shape = Some(v.clone());
        }
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCE_DEFAULTS
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .expect("known tolerance key")
        })
    }

    pub fn bipartite_shape(&self) -> Result<BipartiteShape, ConfigError> {
        let text = self
            .shape
            .as_deref()
            .ok_or_else(|| ConfigError::new("shape", format!("required for `{}`", self.experiment)))?;
        parse_shape(text)
            .and_then(|(k, m)| BipartiteShape::new(k, m, self.field))
            .map_err(|e| ConfigError::new("shape", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let min = self.experiment.min_samples();
        if self.n_samples < min {
            return Err(ConfigError::new(
                "n_samples",
                format!("`{}` needs at least {min}, got {}", self.experiment, self.n_samples),
            ));
        }
        if self.shards == 0 {
            return Err(ConfigError::new("shards", "must be >= 1"));
        }
        if self.output_path.as_os_str().is_empty() {
            return Err(ConfigError::new("output_path", "must not be empty"));
        }
        for (key, value) in &self.tolerances {
            if !TOLERANCE_DEFAULTS.iter().any(|(k, _)| k == key) {
                return Err(ConfigError::new("tolerances", format!("unknown key `{key}`")));
            }
            if !(*value > 0.0) {
                return Err(ConfigError::new("tolerances", format!("`{key}` must be positive")));
            }
        }
        if self.experiment.needs_shape() {
            let shape = self.bipartite_shape()?;
            let ppt = matches!(self.body, Some(BodyKind::PptBody));
            if ppt && shape.k() < 2 {
                return Err(ConfigError::new("body", "the PPT body needs K >= 2"));
            }
        }
        if self.experiment == ExperimentKind::PolytopeGamma && self.polytope.is_none() {
            return Err(ConfigError::new("polytope", "required for `polytope-gamma`"));
        }
        if let Some(d) = &self.deltas {
            if d.is_empty() || d.iter().any(|x| !(*x >= 0.0)) || d.windows(2).any(|w| w[1] >= w[0]) {
                return Err(ConfigError::new("deltas", "must be non-negative and strictly decreasing"));
            }
        }
        Ok(())
    }

    /// Canonical JSON used for hashing and for the stored record.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Parses `"complex"` / `"real"` for command-line flags.
pub fn parse_field(s: &str) -> Result<NumberField, String> {
    s.parse::<NumberField>().map_err(|e| e.to_string())
}
