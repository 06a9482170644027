use serde::{Deserialize, Serialize};

use super::MissionError;
use crate::fast::SelectionMode;
use crate::gridworld::{generate_map, io::parse_map, GroundTruthMap, MapKind, RangeSensor};

/// Procedural map request, or a map file when `file` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSpec {
    pub kind: MapKind,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub file: Option<String>,
}

impl Default for MapSpec {
    fn default() -> Self {
        Self {
            kind: MapKind::Indoor,
            seed: 0,
            width: 64,
            height: 64,
            resolution: 0.4,
            file: None,
        }
    }
}

impl MapSpec {
    pub fn load(&self) -> Result<GroundTruthMap, MissionError> {
        match &self.file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| MissionError::Config(format!("{path}: {e}")))?;
                Ok(parse_map(&text)?)
            }
            None => Ok(generate_map(
                self.kind,
                self.seed,
                self.width,
                self.height,
                self.resolution,
            )?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Global guidance plus a local policy.
    Guided,
    /// Nearest-target baseline without guidance.
    Greedy,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Guided => "guided",
            Method::Greedy => "greedy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalPolicy {
    /// Scripted guidepost follower.
    Heuristic,
    /// Attention policy loaded from `checkpoint`.
    Network,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonerBackend {
    Rule,
    External,
}

/// Everything one episode needs. Numeric fields must be positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub map: MapSpec,
    pub node_resolution: f64,
    pub sensor_range: f64,
    pub sensor_rays: usize,
    /// Frontier counting range for utility; `None` means 0.9 of the sensor
    /// range, so unknown cells behind a counted frontier are inside the scan.
    pub utility_range: Option<f64>,
    /// Local window side; `None` means eight node spacings.
    pub window: Option<f64>,
    pub k: usize,
    pub k_top: usize,
    pub method: Method,
    pub policy: LocalPolicy,
    pub checkpoint: Option<String>,
    pub selection: SelectionMode,
    pub reasoner: ReasonerBackend,
    pub endpoint: Option<String>,
    /// Recorded exchanges served instead of a live endpoint.
    pub replay: Option<String>,
    /// Free-text environment description; empty picks one from the map kind.
    pub description: String,
    pub step_cap: usize,
    /// Decision steps between scheduled global replans.
    pub replan_interval: usize,
    pub rng_seed: u64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            map: MapSpec::default(),
            node_resolution: 1.2,
            sensor_range: 6.0,
            sensor_rays: 360,
            utility_range: None,
            window: None,
            k: 6,
            k_top: 12,
            method: Method::Guided,
            policy: LocalPolicy::Heuristic,
            checkpoint: None,
            selection: SelectionMode::Greedy,
            reasoner: ReasonerBackend::Rule,
            endpoint: None,
            replay: None,
            description: String::new(),
            step_cap: 2000,
            replan_interval: 15,
            rng_seed: 0,
        }
    }
}

impl MissionConfig {
    pub fn window_size(&self) -> f64 {
        self.window.unwrap_or(8.0 * self.node_resolution)
    }

    pub fn utility_range(&self) -> f64 {
        self.utility_range.unwrap_or(0.9 * self.sensor_range)
    }

    pub fn sensor(&self) -> RangeSensor {
        RangeSensor {
            range: self.sensor_range,
            rays: self.sensor_rays,
        }
    }

    pub fn validate(&self) -> Result<(), MissionError> {
        let positive = [
            ("node_resolution", self.node_resolution),
            ("sensor_range", self.sensor_range),
            ("window", self.window_size()),
            ("utility_range", self.utility_range()),
            ("map.resolution", self.map.resolution),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MissionError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("k", self.k),
            ("k_top", self.k_top),
            ("step_cap", self.step_cap),
            ("replan_interval", self.replan_interval),
            ("sensor_rays", self.sensor_rays),
        ] {
            if v == 0 {
                return Err(MissionError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.policy == LocalPolicy::Network
            && self.method == Method::Guided
            && self.checkpoint.is_none()
        {
            return Err(MissionError::Config(
                "network policy needs a checkpoint".into(),
            ));
        }
        Ok(())
    }

    /// Description handed to characterization.
    pub fn environment_description(&self, kind: MapKind) -> String {
        if !self.description.trim().is_empty() {
            return self.description.clone();
        }
        match kind {
            MapKind::Indoor => "indoor office building with long corridors, rooms and doorways",
            MapKind::Forest => {
                "outdoor forest environment with natural obstacles and terrain variations"
            }
            MapKind::Warehouse => {
                "indoor warehouse with narrow aisles between storage racks arranged in a grid"
            }
            MapKind::Custom => "unknown environment",
        }
        .to_string()
    }

    pub fn from_toml(text: &str) -> Result<Self, MissionError> {
        #[cfg(feature = "cli")]
        {
            toml::from_str(text).map_err(|e| MissionError::Config(e.to_string()))
        }
        #[cfg(not(feature = "cli"))]
        {
            let _ = text;
            Err(MissionError::Config("built without TOML support".into()))
        }
    }
}
