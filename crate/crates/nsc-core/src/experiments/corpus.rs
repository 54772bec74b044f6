//! Corpus generation with provenance manifests.
//!
//! Sequence files are raw little-endian bytes with extension `.ks`; the
//! manifest binds every file to its generator, key/nonce material, round
//! count, and class label. The manifest is written last, so a directory
//! without `manifest.json` is a detectably partial corpus.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::cipher::{
    chacha20_keystream, echacha_keystream, GeneratorKind, Key256, Keystream, KeystreamMeta,
    Nonce128, RoundCount,
};
use crate::error::{Error, Result};
use crate::experiments::config::{ExperimentConfig, Task};
use crate::experiments::worker_pool;
use crate::rng::{derive_seed_indexed, fill_bytes, RngMode};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CORPUS_SUBDIR: &str = "corpus";

const NONCE_CONVENTION: &str = "chacha20 uses the low 96 bits of the sampled 128-bit nonce; \
     the 32-bit block counter starts at 0";

/// One sequence file and its provenance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative to the manifest's directory.
    pub file_path: String,
    pub generator: GeneratorKind,
    pub rounds: Option<u32>,
    pub key_hex: String,
    pub nonce_hex: String,
    pub n_bits: usize,
    /// 1 for cipher-generated, 0 for the uniform source.
    pub label: u8,
}

/// Provenance record for a generated corpus.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub created_at: String,
    pub tool_version: String,
    pub global_seed: u64,
    pub rng_mode: RngMode,
    pub nonce_convention: String,
}

impl CorpusManifest {
    /// Parses manifest JSON without touching the filesystem.
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Checks id uniqueness, file existence, sizes, and label/generator
    /// consistency against the directory holding the sequence files.
    pub fn validate(&self, dir: &Path) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for entry in &self.entries {
            if !seen.insert(&entry.id) {
                return Err(Error::format(
                    dir.join(MANIFEST_FILE),
                    format!("duplicate entry id {:?}", entry.id),
                ));
            }
            let expected_label = u8::from(entry.generator != GeneratorKind::Urandom);
            if entry.label != expected_label {
                return Err(Error::format(
                    dir.join(MANIFEST_FILE),
                    format!(
                        "entry {:?} has label {} but generator {}",
                        entry.id,
                        entry.label,
                        entry.generator.as_str()
                    ),
                ));
            }
            let path = dir.join(&entry.file_path);
            let len = std::fs::metadata(&path)
                .map_err(|e| Error::io(format!("stat {}", path.display()), e))?
                .len();
            if len != (entry.n_bits / 8) as u64 {
                return Err(Error::format(
                    path,
                    format!("expected {} bytes, found {len}", entry.n_bits / 8),
                ));
            }
        }
        Ok(())
    }

    pub fn entry(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Uniform baseline sequence of `n_bits` bits from the named source.
pub fn uniform_source(n_bits: usize, mode: RngMode, seed: u64) -> Result<Keystream> {
    if n_bits == 0 || n_bits % 8 != 0 {
        return Err(Error::InvalidInput(format!(
            "sequence length must be a positive multiple of 8 bits, got {n_bits}"
        )));
    }
    let mut bytes = vec![0u8; n_bits / 8];
    fill_bytes(mode, seed, &mut bytes)?;
    Keystream::new(
        bytes,
        KeystreamMeta {
            generator: GeneratorKind::Urandom,
            rounds: None,
            sequence_index: 0,
        },
    )
}

/// What to generate for one entry, fixed before any work starts.
struct EntryPlan {
    id: String,
    generator: GeneratorKind,
    rounds: Option<u32>,
}

fn plan_entries(cfg: &ExperimentConfig) -> Vec<EntryPlan> {
    let n = cfg.sequences_per_class;
    let mut plan = Vec::new();
    let cipher = |plan: &mut Vec<EntryPlan>, generator: GeneratorKind, rounds: u32| {
        for i in 0..n {
            let id = match generator {
                GeneratorKind::EChaCha20 => format!("echacha20-r{rounds:02}-{i:06}"),
                GeneratorKind::ChaCha20 => format!("chacha20-{i:06}"),
                GeneratorKind::Urandom => unreachable!(),
            };
            plan.push(EntryPlan {
                id,
                generator,
                rounds: Some(rounds),
            });
        }
    };

    match cfg.task {
        Task::Distinguish => {
            cipher(&mut plan, GeneratorKind::EChaCha20, cfg.rounds_list[0]);
        }
        Task::Rounds => {
            for &r in &cfg.rounds_list {
                cipher(&mut plan, GeneratorKind::EChaCha20, r);
            }
        }
        Task::Variants => {
            cipher(&mut plan, GeneratorKind::EChaCha20, cfg.rounds_list[0]);
            cipher(&mut plan, GeneratorKind::ChaCha20, 20);
        }
    }
    for i in 0..n {
        plan.push(EntryPlan {
            id: format!("urandom-{i:06}"),
            generator: GeneratorKind::Urandom,
            rounds: None,
        });
    }
    plan
}

fn generate_entry(
    plan: &EntryPlan,
    plan_index: u64,
    cfg: &ExperimentConfig,
    corpus_dir: &Path,
) -> Result<ManifestEntry> {
    let entry_seed = derive_seed_indexed(cfg.seed, "entry", plan_index);
    let (bytes, key_hex, nonce_hex) = match plan.generator {
        GeneratorKind::Urandom => {
            let ks = uniform_source(cfg.n_bits, cfg.rng_mode, entry_seed)?;
            (ks.into_bytes(), String::new(), String::new())
        }
        cipher => {
            let mut material = [0u8; 48];
            fill_bytes(cfg.rng_mode, entry_seed, &mut material)?;
            let key = Key256::from_bytes(material[..32].try_into().unwrap());
            let nonce = Nonce128::from_bytes(material[32..].try_into().unwrap());
            let ks = match cipher {
                GeneratorKind::EChaCha20 => {
                    let rounds = RoundCount::new(plan.rounds.unwrap())?;
                    echacha_keystream(&key, &nonce, rounds, cfg.n_bits)?
                }
                GeneratorKind::ChaCha20 => {
                    chacha20_keystream(&key, &nonce.truncate96(), cfg.n_bits)?
                }
                GeneratorKind::Urandom => unreachable!(),
            };
            (ks.into_bytes(), key.to_hex(), nonce.to_hex())
        }
    };

    let file_path = format!("{}.ks", plan.id);
    let full = corpus_dir.join(&file_path);
    std::fs::write(&full, &bytes).map_err(|e| Error::io(format!("writing {}", full.display()), e))?;

    Ok(ManifestEntry {
        id: plan.id.clone(),
        file_path,
        generator: plan.generator,
        rounds: plan.rounds,
        key_hex,
        nonce_hex,
        n_bits: cfg.n_bits,
        label: u8::from(plan.generator != GeneratorKind::Urandom),
    })
}

/// Generates every sequence file for the task, then writes the manifest
/// (atomically, last). On failure the already-written sequence files are
/// removed so no manifest-less partial corpus survives.
pub fn generate_corpus(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CorpusManifest> {
    cfg.validate()?;
    let corpus_dir = out_dir.join(CORPUS_SUBDIR);
    std::fs::create_dir_all(&corpus_dir)
        .map_err(|e| Error::io(format!("creating {}", corpus_dir.display()), e))?;

    let plan = plan_entries(cfg);
    let generated: Result<Vec<ManifestEntry>> = worker_pool().install(|| {
        plan.par_iter()
            .enumerate()
            .map(|(i, p)| generate_entry(p, i as u64, cfg, &corpus_dir))
            .collect()
    });

    let entries = match generated {
        Ok(entries) => entries,
        Err(err) => {
            for p in &plan {
                let _ = std::fs::remove_file(corpus_dir.join(format!("{}.ks", p.id)));
            }
            return Err(err);
        }
    };

    let manifest = CorpusManifest {
        entries,
        created_at: match cfg.rng_mode {
            RngMode::Seeded => "unix:0".to_string(),
            RngMode::Os => {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                format!("unix:{now}")
            }
        },
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        global_seed: cfg.seed,
        rng_mode: cfg.rng_mode,
        nonce_convention: NONCE_CONVENTION.to_string(),
    };
    write_manifest(&manifest, &corpus_dir)?;
    Ok(manifest)
}

/// Serializes the manifest via a temp file plus rename.
pub fn write_manifest(manifest: &CorpusManifest, corpus_dir: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;
    let tmp = corpus_dir.join(format!("{MANIFEST_FILE}.tmp"));
    let path = corpus_dir.join(MANIFEST_FILE);
    std::fs::write(&tmp, text).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, &path)
        .map_err(|e| Error::io(format!("renaming {} into place", tmp.display()), e))
}

/// Loads and validates `corpus/manifest.json` under `out_dir`.
pub fn load_manifest(out_dir: &Path) -> Result<(CorpusManifest, PathBuf)> {
    let corpus_dir = out_dir.join(CORPUS_SUBDIR);
    let path = corpus_dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let manifest: CorpusManifest =
        serde_json::from_str(&text).map_err(|e| Error::format(&path, e.to_string()))?;
    manifest.validate(&corpus_dir)?;
    Ok((manifest, corpus_dir))
}

/// Reads one sequence file back as a bit string.
pub fn read_sequence(corpus_dir: &Path, entry: &ManifestEntry) -> Result<BitString> {
    let path = corpus_dir.join(&entry.file_path);
    let bytes =
        std::fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    if bytes.len() * 8 != entry.n_bits {
        return Err(Error::format(
            path,
            format!("expected {} bits, found {}", entry.n_bits, bytes.len() * 8),
        ));
    }
    Ok(BitString::from_bytes(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(task: Task) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::desk(task);
        cfg.sequences_per_class = 20;
        cfg.n_bits = 1 << 12;
        cfg
    }

    #[test]
    fn uniform_source_is_seed_deterministic() {
        let a = uniform_source(4096, RngMode::Seeded, 5).unwrap();
        let b = uniform_source(4096, RngMode::Seeded, 5).unwrap();
        assert_eq!(a.as_bytes(), b.as_bytes());
        let c = uniform_source(4096, RngMode::Seeded, 6).unwrap();
        assert_ne!(a.as_bytes(), c.as_bytes());
        assert!(uniform_source(100, RngMode::Seeded, 0).is_err());
    }

    #[test]
    fn uniform_source_bit_balance() {
        for seed in 0..20 {
            let ks = uniform_source(1 << 16, RngMode::Seeded, seed).unwrap();
            let ones: u32 = ks.as_bytes().iter().map(|b| b.count_ones()).sum();
            let fraction = f64::from(ones) / 65536.0;
            assert!(
                (fraction - 0.5).abs() <= 0.01,
                "seed {seed}: ones fraction {fraction}"
            );
        }
    }

    #[test]
    fn generate_and_reload_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg(Task::Distinguish);
        let manifest = generate_corpus(&cfg, dir.path()).unwrap();
        assert_eq!(manifest.entries.len(), 40);

        let (loaded, corpus_dir) = load_manifest(dir.path()).unwrap();
        assert_eq!(loaded, manifest);

        let first = &loaded.entries[0];
        assert_eq!(first.generator, GeneratorKind::EChaCha20);
        assert_eq!(first.rounds, Some(20));
        assert_eq!(first.label, 1);
        let bits = read_sequence(&corpus_dir, first).unwrap();
        assert_eq!(bits.len(), cfg.n_bits);

        let last = loaded.entries.last().unwrap();
        assert_eq!(last.generator, GeneratorKind::Urandom);
        assert_eq!(last.label, 0);
        assert!(last.key_hex.is_empty());
    }

    #[test]
    fn deterministic_mode_regenerates_identical_bytes() {
        let cfg = tiny_cfg(Task::Distinguish);
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let man_a = generate_corpus(&cfg, dir_a.path()).unwrap();
        let man_b = generate_corpus(&cfg, dir_b.path()).unwrap();
        assert_eq!(man_a, man_b);
        for entry in &man_a.entries {
            let a = std::fs::read(dir_a.path().join(CORPUS_SUBDIR).join(&entry.file_path)).unwrap();
            let b = std::fs::read(dir_b.path().join(CORPUS_SUBDIR).join(&entry.file_path)).unwrap();
            assert_eq!(a, b, "file {} differs", entry.file_path);
        }
    }

    #[test]
    fn rounds_task_shares_one_uniform_pool() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_cfg(Task::Rounds);
        cfg.rounds_list = vec![2, 20];
        let manifest = generate_corpus(&cfg, dir.path()).unwrap();
        let cipher2 = manifest
            .entries
            .iter()
            .filter(|e| e.rounds == Some(2))
            .count();
        let uniform = manifest
            .entries
            .iter()
            .filter(|e| e.generator == GeneratorKind::Urandom)
            .count();
        assert_eq!(cipher2, 20);
        assert_eq!(uniform, 20);
        assert_eq!(manifest.entries.len(), 60);
    }

    #[test]
    fn variants_task_generates_both_ciphers() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_corpus(&tiny_cfg(Task::Variants), dir.path()).unwrap();
        let chacha = manifest
            .entries
            .iter()
            .filter(|e| e.generator == GeneratorKind::ChaCha20)
            .count();
        assert_eq!(chacha, 20);
        assert_eq!(manifest.entries.len(), 60);
        // nonce material recorded even though only 96 bits are consumed
        let entry = manifest
            .entries
            .iter()
            .find(|e| e.generator == GeneratorKind::ChaCha20)
            .unwrap();
        assert_eq!(entry.nonce_hex.len(), 32);
    }

    #[test]
    fn manifest_validation_catches_truncated_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg(Task::Distinguish);
        let manifest = generate_corpus(&cfg, dir.path()).unwrap();
        let victim = dir
            .path()
            .join(CORPUS_SUBDIR)
            .join(&manifest.entries[0].file_path);
        std::fs::write(&victim, b"short").unwrap();
        assert!(load_manifest(dir.path()).is_err());
    }
}
