//! Scenario configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::demand::{estimate_demand, ingest_observations, DemandProfile};
use crate::kernel::{KernelParams, VehicleCatalog};
use crate::net::{build_bicutan_network, NetworkGeometryConfig, RoadNetwork};
use crate::schemes::SchemeId;

pub const DEFAULT_BASE_SEED: u64 = 20131213;

/// One experiment as written on disk. Paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Geometry JSON; the built-in layout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    pub scheme: SchemeId,
    /// Demand profile JSON. Exactly one of `demand` and `observations`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<PathBuf>,
    /// Observation CSV to estimate demand from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<PathBuf>,
    /// Period the observations cover, s. Defaults to `duration_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation_horizon_s: Option<f64>,
    /// Vehicle-type table JSON; built-in values when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicles: Option<PathBuf>,
    #[serde(default)]
    pub vplus: f64,
    /// Measured period after the warm-up, s.
    pub duration_s: f64,
    pub warmup_s: f64,
    pub dt: f64,
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_BASE_SEED
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let c: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.demand.is_some() == self.observations.is_some() {
            return bad("set exactly one of \"demand\" and \"observations\"".into());
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s must be positive, got {}", self.duration_s));
        }
        if !(self.warmup_s >= 0.0 && self.warmup_s < self.duration_s) {
            return bad(format!("warmup_s must be in [0, duration_s), got {}", self.warmup_s));
        }
        if !(self.vplus >= 0.0 && self.vplus.is_finite()) {
            return bad(format!("vplus must be >= 0, got {}", self.vplus));
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.observation_horizon_s.is_some_and(|h| !(h > 0.0)) {
            return bad("observation_horizon_s must be positive".into());
        }
        Ok(())
    }

    /// Simulated clock at the end of a replication, s.
    pub fn horizon(&self) -> f64 {
        self.warmup_s + self.duration_s
    }
}

/// A configuration with every referenced file loaded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub network: RoadNetwork,
    pub catalog: VehicleCatalog,
    pub kernel: KernelParams,
    pub demand: DemandProfile,
    /// SHA-256 of the config file followed by each referenced file.
    pub digest: String,
}

fn read(path: &Path) -> Result<Vec<u8>, HarnessError> {
    fs::read(path).map_err(|e| HarnessError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, HarnessError> {
    serde_json::from_slice(bytes).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = read(path)?;
        let config = ScenarioConfig::parse(
            std::str::from_utf8(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
        )?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut hasher = sha2::Sha256::default();
        sha2::Digest::update(&mut hasher, &text);
        let mut load = |rel: &Path| -> Result<(PathBuf, Vec<u8>), HarnessError> {
            let p = base.join(rel);
            let bytes = read(&p)?;
            sha2::Digest::update(&mut hasher, &bytes);
            Ok((p, bytes))
        };

        let geometry = match &config.network {
            Some(rel) => {
                let (p, b) = load(rel)?;
                json::<NetworkGeometryConfig>(&p, &b)?
            }
            None => NetworkGeometryConfig::default(),
        };
        let catalog = match &config.vehicles {
            Some(rel) => {
                let (p, b) = load(rel)?;
                json::<VehicleCatalog>(&p, &b)?
            }
            None => VehicleCatalog::default(),
        };
        let demand = match (&config.demand, &config.observations) {
            (Some(rel), _) => {
                let (p, b) = load(rel)?;
                json::<DemandProfile>(&p, &b)?
            }
            (None, Some(rel)) => {
                let (_, b) = load(rel)?;
                let records = ingest_observations(b.as_slice())?;
                estimate_demand(&records, config.observation_horizon_s.unwrap_or(config.duration_s))?
            }
            (None, None) => unreachable!("validated"),
        };
        let digest = sha2::Digest::finalize(hasher).iter().map(|b| format!("{b:02x}")).collect();
        Self::assemble(config, &geometry, catalog, demand, digest)
    }

    /// Builds a scenario from in-memory parts; file references in `config`
    /// are ignored.
    pub fn assemble(
        config: ScenarioConfig,
        geometry: &NetworkGeometryConfig,
        catalog: VehicleCatalog,
        demand: DemandProfile,
        digest: String,
    ) -> Result<Self, HarnessError> {
        config.validate()?;
        let network = build_bicutan_network(geometry).map_err(|e| HarnessError::Config(e.to_string()))?;
        catalog.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let kernel = KernelParams { dt: config.dt, ..KernelParams::default() };
        kernel.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let demand = DemandProfile { volume_scale: config.vplus, ..demand };
        demand.validate()?;
        Ok(Self { config, network, catalog, kernel, demand, digest })
    }

    pub fn seed(&self, replicate: usize) -> u64 {
        self.config.base_seed + replicate as u64
    }
}
