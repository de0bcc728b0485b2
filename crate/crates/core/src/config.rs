//! Experiment configuration: JSON on disk, `SPHERELAB_<KEY>` environment
//! overrides, and validation into typed inputs.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::control::Region;
use crate::error::{Error, Result};
use crate::geom::UnitVector3;
use crate::harmonics::HarmonicExpansion;

/// Prefix of environment variables that override config keys.
pub const ENV_PREFIX: &str = "SPHERELAB_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub l: usize,
    pub m: i64,
    pub coef: f64,
}

/// Inline real-harmonic coefficients or a JSON file of `{l, m, coef}` records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Terms(Vec<Term>),
    File(PathBuf),
}

impl PotentialSpec {
    /// `V = 4xz`, i.e. `4·√(4π/15)·Y_{2,1}`.
    pub fn four_xz() -> Self {
        PotentialSpec::Terms(vec![Term {
            l: 2,
            m: 1,
            coef: 4.0 * (4.0 * PI / 15.0).sqrt(),
        }])
    }

    pub fn zero() -> Self {
        PotentialSpec::Terms(Vec::new())
    }

    /// Relative paths resolve against `base` (the config file's directory).
    pub fn load(&self, base: Option<&Path>) -> Result<HarmonicExpansion> {
        match self {
            PotentialSpec::Terms(terms) if terms.is_empty() => Ok(HarmonicExpansion::zeros(0)),
            PotentialSpec::Terms(terms) => HarmonicExpansion::from_terms(terms.iter().map(|t| (t.l, t.m, t.coef))),
            PotentialSpec::File(path) => {
                let resolved = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                HarmonicExpansion::load_json(&resolved)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    #[serde(rename = "L")]
    pub l_max: usize,
    pub region: String,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Number of geodesic-sphere normals in control sweeps and sampled outputs.
    pub grid: usize,
    pub dt: f64,
    pub saturation: f64,
    pub tolerance: f64,
    pub closed: bool,
    pub second_average_nodes: usize,
    pub second_order: bool,
    pub min_cluster: Option<usize>,
    pub k_min: usize,
    pub k_max: Option<usize>,
    pub gram_horizon: f64,
    pub gram_l: Vec<usize>,
    pub gram_decay: f64,
    pub mass_floor: f64,
    pub husimi_k: usize,
    pub husimi_band: Band,
    pub husimi_grid: usize,
    pub flow_start: [f64; 3],
    pub output: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            potential: PotentialSpec::four_xz(),
            l_max: 40,
            region: Region::cap(UnitVector3::E3, 0.3f64.acos()).to_string(),
            horizon: 40.0,
            grid: 2000,
            dt: 0.02,
            saturation: 0.05,
            tolerance: crate::control::DEFAULT_TOLERANCE,
            closed: false,
            second_average_nodes: crate::radon::DEFAULT_SECOND_AVERAGE_NODES,
            second_order: false,
            min_cluster: None,
            k_min: 10,
            k_max: None,
            gram_horizon: TAU,
            gram_l: vec![10, 20, 30, 40],
            gram_decay: 5.0,
            mass_floor: crate::observability::MASS_ANCHOR,
            husimi_k: 40,
            husimi_band: Band::Max,
            husimi_grid: 2000,
            flow_start: [0.6, 0.0, 0.8],
            output: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config; errors carry the line and column of the offending key.
    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::parse_text(text, "config")
    }

    fn parse_text(text: &str, context: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.into(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Loads `path` (or defaults), then applies overrides from `vars`.
    pub fn load<I>(path: Option<&Path>, vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                let context = format!("config {}", p.display());
                serde_json::to_value(Self::parse_text(&text, &context)?).expect("config serializes")
            }
            None => Value::Object(Default::default()),
        };
        apply_overrides(&mut value, vars)?;
        let mut config = Self::from_value(value)?;
        if let (PotentialSpec::File(file), Some(dir)) = (&config.potential, path.and_then(Path::parent)) {
            if file.is_relative() {
                config.potential = PotentialSpec::File(dir.join(file));
            }
        }
        Ok(config)
    }

    fn from_value(value: Value) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_value(value).map_err(|source| Error::Json {
            context: "config".into(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        self.region()?;
        if self.l_max == 0 {
            return fail("L must be positive".into());
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return fail(format!("T = {} must be positive and finite", self.horizon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail(format!("dt = {} must be positive", self.dt));
        }
        if !(self.gram_horizon > 0.0 && self.gram_horizon.is_finite()) {
            return fail(format!("gram_horizon = {} must be positive", self.gram_horizon));
        }
        if self.grid == 0 || self.husimi_grid == 0 {
            return fail("grid sizes must be positive".into());
        }
        if self.second_average_nodes < 4 {
            return fail(format!("second_average_nodes = {} is below 4", self.second_average_nodes));
        }
        if self.gram_l.is_empty() || self.gram_l.contains(&0) {
            return fail("gram_l must list positive truncation degrees".into());
        }
        if self.tolerance < 0.0 || self.saturation < 0.0 {
            return fail("tolerance and saturation must be non-negative".into());
        }
        self.start()?;
        Ok(())
    }

    pub fn region(&self) -> Result<Region> {
        Region::parse(&self.region)
    }

    pub fn start(&self) -> Result<UnitVector3> {
        UnitVector3::try_new(Vector3::from(self.flow_start))
    }

    pub fn potential(&self) -> Result<HarmonicExpansion> {
        self.potential.load(None)
    }

    /// Cluster indices kept for curves: `k_min ≤ k ≤ k_max`.
    pub fn keeps_cluster(&self, k: usize) -> bool {
        k >= self.k_min && self.k_max.is_none_or(|top| k <= top)
    }
}

/// Applies `SPHERELAB_<KEY>=<json>` overrides; keys match config fields
/// case-insensitively and values that are not valid JSON are taken as strings.
pub fn apply_overrides<I>(value: &mut Value, vars: I) -> Result<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    let known = match serde_json::to_value(ExperimentConfig::default()) {
        Ok(Value::Object(map)) => map.keys().cloned().collect::<Vec<_>>(),
        _ => unreachable!("config serializes to an object"),
    };
    let Value::Object(map) = value else {
        return Err(Error::Config("config root must be a JSON object".into()));
    };
    let mut vars: Vec<(String, String)> = vars.into_iter().collect();
    vars.sort();
    for (name, raw) in vars {
        let Some(key) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let field = known
            .iter()
            .find(|k| k.eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::Config(format!("{name} does not name a config field")))?;
        let parsed = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        map.insert(field.clone(), parsed);
    }
    Ok(())
}
