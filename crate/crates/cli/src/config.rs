use std::path::Path;

use pml_core::objective::{ObjectiveSpec, DEFAULT_QUAD_NODES};
use pml_core::optimizer::SimplexConfig;
use pml_core::{GridSpec, Sampling};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Experiment parameters shared by every subcommand. Field names match the
/// JSON config file and, kebab-cased, the command-line flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lambda0: f64,
    pub n0: f64,
    pub h: f64,
    pub m: usize,
    #[serde(with = "sampling_tag")]
    pub sampling: Sampling,
    pub quad_nodes: usize,
    pub max_evals: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSpec::default();
        Self {
            lambda0: grid.lambda0,
            n0: grid.n0,
            h: grid.h,
            m: grid.m,
            sampling: grid.sampling,
            quad_nodes: DEFAULT_QUAD_NODES,
            max_evals: SimplexConfig::default().max_evals,
        }
    }
}

/// Flag values; `None` leaves the file or default value in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub lambda0: Option<f64>,
    pub n0: Option<f64>,
    pub h: Option<f64>,
    pub m: Option<usize>,
    pub sampling: Option<Sampling>,
    pub quad_nodes: Option<usize>,
    pub max_evals: Option<usize>,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config file {}: {e}", path.display())))
    }

    pub fn apply(mut self, o: &ConfigOverrides) -> Self {
        self.lambda0 = o.lambda0.unwrap_or(self.lambda0);
        self.n0 = o.n0.unwrap_or(self.n0);
        self.h = o.h.unwrap_or(self.h);
        self.m = o.m.unwrap_or(self.m);
        self.sampling = o.sampling.unwrap_or(self.sampling);
        self.quad_nodes = o.quad_nodes.unwrap_or(self.quad_nodes);
        self.max_evals = o.max_evals.unwrap_or(self.max_evals);
        self
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.lambda0, self.n0, self.h, self.m, self.sampling).map_err(CliError::usage)
    }

    pub fn objective(&self) -> Result<ObjectiveSpec, CliError> {
        ObjectiveSpec::new(self.grid()?, self.quad_nodes).map_err(CliError::usage)
    }

    pub fn simplex(&self) -> SimplexConfig {
        SimplexConfig {
            max_evals: self.max_evals,
            ..SimplexConfig::default()
        }
    }
}

mod sampling_tag {
    use pml_core::Sampling;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Sampling, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(s.tag())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Sampling, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}
