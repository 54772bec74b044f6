//! Experiment tasks and their scale presets.

use crate::cipher::RoundCount;
use crate::error::{Error, Result};
use crate::neural::TrainConfig;
use crate::rng::RngMode;
use crate::stringology::{FeatureSchema, SCHEMA_V1_MIN_BITS};

/// The three experiment tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// EChaCha20 at full rounds vs uniform random.
    Distinguish,
    /// One distinguisher per reduced-round variant vs uniform random.
    Rounds,
    /// ChaCha20 vs random, EChaCha20 vs random, ChaCha20 vs EChaCha20.
    Variants,
}

impl Task {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "distinguish" => Ok(Task::Distinguish),
            "rounds" => Ok(Task::Rounds),
            "variants" => Ok(Task::Variants),
            other => Err(Error::Config(format!(
                "unknown task {other:?} (expected distinguish, rounds, or variants)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Distinguish => "distinguish",
            Task::Rounds => "rounds",
            Task::Variants => "variants",
        }
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub sequences_per_class: usize,
    pub n_bits: usize,
    pub rounds_list: Vec<u32>,
    pub schema_version: String,
    pub train: TrainConfig,
    /// Global seed; every other seed (corpus entries, splits, training)
    /// is derived from it.
    pub seed: u64,
    pub rng_mode: RngMode,
}

/// The full-scale rounds sweep of the reference experiments.
pub const SWEEP_ROUNDS: [u32; 5] = [2, 4, 8, 12, 20];

impl ExperimentConfig {
    /// Desk scale: 1,000 sequences per class of 2^13 bits; runs end to end
    /// in minutes on a laptop.
    pub fn desk(task: Task) -> Self {
        ExperimentConfig {
            task,
            sequences_per_class: 1000,
            n_bits: 1 << 13,
            rounds_list: default_rounds(task),
            schema_version: "v1".into(),
            train: TrainConfig::default(),
            seed: 42,
            rng_mode: RngMode::Seeded,
        }
    }

    /// Paper scale: 50,000 sequences per class of 2^16 bits.
    pub fn paper(task: Task) -> Self {
        ExperimentConfig {
            sequences_per_class: 50_000,
            n_bits: 1 << 16,
            ..Self::desk(task)
        }
    }

    pub fn preset(name: &str, task: Task) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk(task)),
            "paper" => Ok(Self::paper(task)),
            other => Err(Error::Config(format!(
                "unknown preset {other:?} (expected \"desk\" or \"paper\")"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sequences_per_class < 20 {
            return Err(Error::Config(format!(
                "need at least 20 sequences per class, got {}",
                self.sequences_per_class
            )));
        }
        if self.n_bits % 8 != 0 {
            return Err(Error::Config(format!(
                "sequence length must be a multiple of 8 bits, got {}",
                self.n_bits
            )));
        }
        if self.n_bits < SCHEMA_V1_MIN_BITS {
            return Err(Error::Config(format!(
                "sequence length must be at least {SCHEMA_V1_MIN_BITS} bits, got {}",
                self.n_bits
            )));
        }
        if self.rounds_list.is_empty() {
            return Err(Error::Config("rounds list must be non-empty".into()));
        }
        for &r in &self.rounds_list {
            RoundCount::new(r)?;
        }
        FeatureSchema::by_version(&self.schema_version)?;
        self.train.validate()?;
        Ok(())
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::by_version(&self.schema_version).expect("validated schema version")
    }
}

fn default_rounds(task: Task) -> Vec<u32> {
    match task {
        Task::Rounds => SWEEP_ROUNDS.to_vec(),
        _ => vec![RoundCount::FULL.get()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_the_documented_scales() {
        let desk = ExperimentConfig::desk(Task::Distinguish);
        assert_eq!(desk.sequences_per_class, 1000);
        assert_eq!(desk.n_bits, 1 << 13);
        assert_eq!(desk.rounds_list, vec![20]);
        desk.validate().unwrap();

        let paper = ExperimentConfig::paper(Task::Rounds);
        assert_eq!(paper.sequences_per_class, 50_000);
        assert_eq!(paper.n_bits, 1 << 16);
        assert_eq!(paper.rounds_list, vec![2, 4, 8, 12, 20]);
        paper.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = ExperimentConfig::desk(Task::Distinguish);
        cfg.sequences_per_class = 5;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::desk(Task::Distinguish);
        cfg.n_bits = 100;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::desk(Task::Rounds);
        cfg.rounds_list = vec![3];
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::desk(Task::Distinguish);
        cfg.schema_version = "v9".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn task_names_round_trip() {
        for task in [Task::Distinguish, Task::Rounds, Task::Variants] {
            assert_eq!(Task::parse(task.name()).unwrap(), task);
        }
        assert!(Task::parse("nope").is_err());
    }
}
