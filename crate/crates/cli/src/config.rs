use std::path::{Path, PathBuf};

use oscillab::nodal::SphericalCombo;
use oscillab::potentials::PotentialSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Overlap,
    Series,
    Spectrum,
    Theorem1,
    Lemmas,
    Nodal,
    Growth,
    Window,
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Overlap => "overlap",
            Command::Series => "series",
            Command::Spectrum => "spectrum",
            Command::Theorem1 => "theorem1",
            Command::Lemmas => "lemmas",
            Command::Nodal => "nodal",
            Command::Growth => "growth",
            Command::Window => "window",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// A potential given inline or as a path relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialRef {
    Path(PathBuf),
    Inline(PotentialSpec),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "J")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<usize>,
    /// Overlap source: closed_form, quadrature or exact_rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ells: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combo: Option<SphericalCombo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub potential: Option<PotentialRef>,
    #[serde(default)]
    pub parameters: Params,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("missing parameter `{0}`")]
    Missing(&'static str),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        Ok((cfg, text))
    }

    pub fn potential(&self, base: &Path) -> Result<Option<PotentialSpec>, ConfigError> {
        match &self.potential {
            None => Ok(None),
            Some(PotentialRef::Inline(spec)) => {
                spec.check().map_err(|e| ConfigError::Schema(e.to_string()))?;
                Ok(Some(spec.clone()))
            }
            Some(PotentialRef::Path(p)) => {
                let full = if p.is_absolute() { p.clone() } else { base.join(p) };
                let text = std::fs::read_to_string(&full).map_err(|e| ConfigError::Io(full.clone(), e))?;
                PotentialSpec::from_json(&text)
                    .map(Some)
                    .map_err(|e| ConfigError::Schema(e.to_string()))
            }
        }
    }
}

impl Params {
    pub fn need<T: Copy>(v: Option<T>, name: &'static str) -> Result<T, ConfigError> {
        v.ok_or(ConfigError::Missing(name))
    }
}
