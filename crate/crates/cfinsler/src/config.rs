//! Run configuration: JSON parsing, defaults and validation.
//!
//! ```json
//! {
//!   "model": { "name": "heisenberg3" },
//!   "norm": { "kind": "pnorm", "p": 1.5 },
//!   "seed": 42,
//!   "samples": { "points": 20 },
//!   "tolerances": { "berwald": 1e-4 },
//!   "scheme": { "step": 1e-5, "order": 2 },
//!   "suites": ["berwald", "curvature", "kahler"]
//! }
//! ```
//!
//! Every key except `model` and `norm` is optional. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use cfinsler_core::sampling::Sampler;
use cfinsler_core::{CMatrix, DiffOrder, DiffScheme, GroupModel, LeftInvariantMetric, MinkowskiNorm, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Verification suites, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Frames,
    Minkowski,
    Connection,
    Berwald,
    Spray,
    Kahler,
    Curvature,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Frames, Suite::Minkowski, Suite::Connection, Suite::Berwald, Suite::Spray, Suite::Kahler, Suite::Curvature];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Frames => "frames",
            Suite::Minkowski => "minkowski",
            Suite::Connection => "connection",
            Suite::Berwald => "berwald",
            Suite::Spray => "spray",
            Suite::Kahler => "kahler",
            Suite::Curvature => "curvature",
        }
    }

    pub fn parse(name: &str) -> Result<Self, CliError> {
        Suite::ALL.into_iter().find(|s| s.as_str() == name).ok_or_else(|| {
            CliError::validation(
                "suites",
                format!("unknown suite `{name}`; valid suites are {}", Suite::valid_names()),
            )
        })
    }

    pub fn valid_names() -> String {
        Suite::ALL.map(Suite::as_str).join(", ")
    }

    /// Position in [`Suite::ALL`]; also selects the suite's sampling stream.
    pub fn index(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Berwald | Suite::Kahler | Suite::Curvature => 1e-4,
            _ => 1e-5,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NormSpec {
    /// Matrix rows of `[re, im]` pairs; defaults to the identity. The matrix is Hermitized.
    Hermitian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<[f64; 2]>>>,
    },
    Pnorm {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    /// Fiber points for the frames, connection and spray suites.
    pub points: usize,
    /// Base points for the Berwald suite.
    pub base_points: usize,
    /// Fiber directions per base point for the Berwald suite.
    pub fibers: usize,
    pub curvature_points: usize,
    pub kahler_points: usize,
    /// Sphere samples for the pseudo-convexity scan.
    pub norm_samples: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts { points: 20, base_points: 5, fibers: 20, curvature_points: 50, kahler_points: 50, norm_samples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSpec {
    /// Step, order and extrapolation for single-level derivatives.
    pub step: f64,
    pub order: u8,
    pub richardson: bool,
    /// Step of the order-4 stencils used for nested derivatives (Hessians, connection).
    pub nested_step: f64,
    /// Base step of the curvature line stencils, scaled by `1 + |z|`.
    pub curvature_step: f64,
}

impl Default for SchemeSpec {
    fn default() -> Self {
        let base = DiffScheme::default();
        SchemeSpec {
            step: base.step,
            order: 2,
            richardson: base.richardson,
            nested_step: DiffScheme::nested().step,
            curvature_step: DiffScheme::curvature().step,
        }
    }
}

/// The configuration file as written, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: ModelSpec,
    pub norm: NormSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub samples: SampleCounts,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub scheme: SchemeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
    #[serde(default = "default_w_min")]
    pub w_min: f64,
    /// Weight `ε` of the non-invariant term `ε·Re(z¹)·𝒢(w)`; zero for a left-invariant metric.
    #[serde(default)]
    pub perturbation: f64,
}

fn default_seed() -> u64 {
    42
}

fn default_w_min() -> f64 {
    cfinsler_core::DEFAULT_W_MIN
}

/// Minimum number of sphere samples for the pseudo-convexity gate.
const GATE_SAMPLES: usize = 200;
/// Smallest admissible Hessian eigenvalue in the pseudo-convexity gate.
pub const PSEUDO_CONVEX_FLOOR: f64 = 1e-8;

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: GroupModel,
    pub norm: MinkowskiNorm,
    pub seed: u64,
    pub samples: SampleCounts,
    pub tolerances: BTreeMap<Suite, f64>,
    pub scheme: DiffScheme,
    pub nested: DiffScheme,
    pub curvature: DiffScheme,
    pub suites: Vec<Suite>,
    pub w_min: f64,
    pub perturbation: f64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    raw: RawConfig,
}

/// Serialized form of the effective configuration; its SHA-256 is the report's config hash.
#[derive(Serialize)]
struct Effective<'a> {
    config: &'a RawConfig,
    tol_scale: f64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(CliError::Parse)?;
        Self::from_raw(raw)
    }

    pub fn from_raw(mut raw: RawConfig) -> Result<Self, CliError> {
        let model = parse_model(&raw.model)?;
        let norm = parse_norm(&raw.norm, model.dim())?;

        let s = &raw.samples;
        for (field, value, min) in [
            ("samples.points", s.points, 1),
            ("samples.base_points", s.base_points, 1),
            ("samples.fibers", s.fibers, 2),
            ("samples.curvature_points", s.curvature_points, 1),
            ("samples.kahler_points", s.kahler_points, cfinsler_core::curvature::MIN_KAHLER_SAMPLES),
            ("samples.norm_samples", s.norm_samples, 1),
        ] {
            if value < min {
                return Err(CliError::validation(field, format!("must be at least {min}, got {value}")));
            }
        }

        let mut tolerances = BTreeMap::new();
        for suite in Suite::ALL {
            tolerances.insert(suite, suite.default_tolerance());
        }
        for (name, tol) in &raw.tolerances {
            let suite = Suite::parse(name).map_err(|_| {
                CliError::validation(
                    &format!("tolerances.{name}"),
                    format!("unknown suite; valid suites are {}", Suite::valid_names()),
                )
            })?;
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(CliError::validation(&format!("tolerances.{name}"), format!("must be positive, got {tol}")));
            }
            tolerances.insert(suite, *tol);
        }

        let sc = &raw.scheme;
        let scheme = DiffScheme::new(sc.step, sc.order, sc.richardson).map_err(|e| CliError::validation("scheme", e))?;
        let nested = DiffScheme { step: sc.nested_step, order: DiffOrder::Four, richardson: false };
        nested.validate().map_err(|e| CliError::validation("scheme.nested_step", e))?;
        let curvature = DiffScheme { step: sc.curvature_step, ..DiffScheme::curvature() };
        curvature.validate().map_err(|e| CliError::validation("scheme.curvature_step", e))?;

        let suites = match &raw.suites {
            None => Suite::ALL.to_vec(),
            Some(names) => {
                if names.is_empty() {
                    return Err(CliError::validation("suites", format!("must name at least one of {}", Suite::valid_names())));
                }
                let mut v = names.iter().map(|n| Suite::parse(n)).collect::<Result<Vec<_>, _>>()?;
                v.sort();
                v.dedup();
                v
            }
        };

        if !(raw.w_min.is_finite() && raw.w_min > 0.0) {
            return Err(CliError::validation("w_min", format!("must be positive, got {}", raw.w_min)));
        }
        if !raw.perturbation.is_finite() {
            return Err(CliError::validation("perturbation", "must be finite"));
        }

        // Pseudo-convexity gate on the unit sphere.
        let mut rng = Sampler::new(raw.seed);
        let sphere: Vec<Vec<C64>> = (0..GATE_SAMPLES.max(s.norm_samples)).map(|_| rng.unit_vector(model.dim())).collect();
        let (ok, min_ev) = norm.verify_pseudo_convex(&sphere, PSEUDO_CONVEX_FLOOR).map_err(|e| CliError::validation("norm", e))?;
        if !ok {
            return Err(CliError::validation(
                "norm",
                format!("not pseudo-convex on the unit sphere: minimum Hessian eigenvalue {min_ev:e}"),
            ));
        }

        raw.suites = Some(suites.iter().map(|s| s.as_str().to_string()).collect());
        raw.tolerances = tolerances.iter().map(|(k, v)| (k.as_str().to_string(), *v)).collect();
        Ok(RunConfig {
            model,
            norm,
            seed: raw.seed,
            samples: raw.samples.clone(),
            tolerances,
            scheme,
            nested,
            curvature,
            suites,
            w_min: raw.w_min,
            perturbation: raw.perturbation,
            tol_scale: 1.0,
            raw,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.raw.seed = seed;
        self
    }

    pub fn with_tol_scale(mut self, scale: f64) -> Result<Self, CliError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(CliError::validation("tol-scale", format!("must be positive, got {scale}")));
        }
        self.tol_scale = scale;
        Ok(self)
    }

    pub fn with_suites(mut self, names: &[String]) -> Result<Self, CliError> {
        let mut v = names.iter().map(|n| Suite::parse(n)).collect::<Result<Vec<_>, _>>()?;
        v.sort();
        v.dedup();
        self.raw.suites = Some(v.iter().map(|s| s.as_str().to_string()).collect());
        self.suites = v;
        Ok(self)
    }

    /// The configuration with all defaults filled in, as canonical JSON.
    pub fn effective_json(&self) -> String {
        serde_json::to_string(&Effective { config: &self.raw, tol_scale: self.tol_scale }).expect("config serializes")
    }

    /// Hex SHA-256 of [`RunConfig::effective_json`].
    pub fn config_hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.effective_json().as_bytes()))
    }

    /// Factor applied to every built-in check tolerance of `suite`.
    pub fn tol_factor(&self, suite: Suite) -> f64 {
        self.tol_scale * self.tolerances[&suite] / suite.default_tolerance()
    }

    pub fn metric(&self) -> LeftInvariantMetric {
        LeftInvariantMetric::new(self.model.clone(), self.norm.clone()).expect("validated dimensions").with_w_min(self.w_min)
    }

    pub fn norm_label(&self) -> String {
        match &self.raw.norm {
            NormSpec::Hermitian { matrix: None } => "hermitian(I)".into(),
            NormSpec::Hermitian { matrix: Some(_) } => "hermitian".into(),
            NormSpec::Pnorm { p, .. } => format!("pnorm(p={p})"),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    RunConfig::from_json(&text)
}

fn parse_model(spec: &ModelSpec) -> Result<GroupModel, CliError> {
    let name = spec.name.trim();
    let model = match (name, spec.n) {
        ("abelian", Some(n)) => GroupModel::builtin(&format!("abelian({n})")),
        ("abelian", None) => Ok(GroupModel::Abelian { n: 2 }),
        (_, Some(_)) => return Err(CliError::validation("model.n", "only the abelian model takes a dimension")),
        (other, None) => GroupModel::builtin(other),
    };
    model.map_err(|e| CliError::validation("model.name", e))
}

fn parse_norm(spec: &NormSpec, n: usize) -> Result<MinkowskiNorm, CliError> {
    match spec {
        NormSpec::Hermitian { matrix: None } => Ok(MinkowskiNorm::euclidean(n)),
        NormSpec::Hermitian { matrix: Some(rows) } => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::validation("norm.matrix", format!("must be {n}x{n} to match the model")));
            }
            let m = CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
            MinkowskiNorm::hermitian(m).map_err(|e| CliError::validation("norm.matrix", e))
        }
        NormSpec::Pnorm { p, weights } => {
            if !(p.is_finite() && *p > 1.0) {
                return Err(CliError::validation("norm.p", format!("must exceed 1, got {p}")));
            }
            let weights = weights.clone().unwrap_or_else(|| vec![1.0; n]);
            if weights.len() != n {
                return Err(CliError::validation("norm.weights", format!("need {n} weights, got {}", weights.len())));
            }
            MinkowskiNorm::pnorm(*p, weights).map_err(|e| CliError::validation("norm.weights", e))
        }
    }
}
