//! JSON experiment configuration and the on-disk run artifact.
//!
//! Configs are strict: unknown keys are rejected, the schema version is
//! checked before anything is computed, and every numeric knob is
//! validated up front.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use dbqite::costing::GateCounts;
use dbqite::flow::{FlowTrace, Schedule};
use dbqite::hamiltonian::EvolutionMethod;
use dbqite::ite::IteCurve;
use dbqite::qpe::QpeResult;
use dbqite::PauliSum;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub init: InitSpec,
    pub engine: EngineSpec,
    /// Flow steps, imaginary-time samples, or precision qubits, depending
    /// on the engine.
    pub steps: usize,
    pub schedule: Schedule,
    pub evolution: EvolutionMethod,
    pub seed: u64,
    pub outputs: OutputSpec,
    /// Norm over-estimation factor for the `qpe` engine (1 = exact).
    #[serde(default = "default_rescale", skip_serializing_if = "is_unit")]
    pub rescale_factor: f64,
}

fn default_rescale() -> f64 {
    1.0
}

fn is_unit(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Heisenberg { length: usize },
    Custom { file: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Singlet,
    Hva {
        #[serde(default = "default_hva_points")]
        points: usize,
        #[serde(default = "default_hva_t_max")]
        t_max: f64,
    },
    Zero,
    File { path: PathBuf },
}

fn default_hva_points() -> usize {
    dbqite::verify::HVA_GRID_POINTS
}

fn default_hva_t_max() -> f64 {
    dbqite::verify::HVA_GRID_T_MAX
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineSpec {
    Ite,
    Dbi,
    Dbqite,
    Qpe,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub stem: String,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).context("config does not match the schema")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (this build speaks {})",
                self.schema_version,
                SCHEMA_VERSION
            );
        }
        if let ModelSpec::Heisenberg { length } = self.model {
            if length < 2 {
                bail!("heisenberg model needs at least 2 qubits");
            }
        }
        if let InitSpec::Hva { points, t_max } = self.init {
            if points == 0 || t_max < 0.0 {
                bail!("hva init needs points ≥ 1 and t_max ≥ 0");
            }
        }
        self.schedule.validate().map_err(anyhow::Error::from)?;
        match self.engine {
            EngineSpec::Ite => {
                if !matches!(self.schedule.kind, dbqite::flow::ScheduleKind::Fixed { .. }) {
                    bail!("the ite engine uses a fixed schedule as the τ spacing");
                }
            }
            EngineSpec::Qpe => {
                if self.steps == 0 {
                    bail!("the qpe engine needs at least one precision qubit in `steps`");
                }
                if self.rescale_factor < 1.0 {
                    bail!("rescale_factor must be ≥ 1 (norm over-estimation)");
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn load_model(&self) -> anyhow::Result<PauliSum> {
        match &self.model {
            ModelSpec::Heisenberg { length } => Ok(PauliSum::heisenberg_chain(*length)?),
            ModelSpec::Custom { file } => {
                let text = std::fs::read_to_string(file)
                    .with_context(|| format!("cannot read hamiltonian {}", file.display()))?;
                let h: PauliSum =
                    serde_json::from_str(&text).context("hamiltonian file does not parse")?;
                Ok(h)
            }
        }
    }
}

/// Everything one run writes next to its CSV outputs. Re-running the same
/// config and seed reproduces all numeric fields bit for bit (in exact
/// evolution mode) except `wall_clock_seconds`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub wall_clock_seconds: f64,
    pub outcome: RunOutcome,
    /// Cumulative circuit cost per record (empty when no cost model
    /// applies, e.g. for the imaginary-time oracle).
    pub gate_counts: Vec<GateCounts>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RunOutcome {
    Flow { trace: FlowTrace },
    Ite { curve: IteCurve },
    Qpe { result: QpeResult },
}
