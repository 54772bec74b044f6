//! Corpus construction, dataset splits, the experiment tasks, and report
//! emission.

mod config;
mod corpus;
mod feature_io;
mod report;
mod split;
pub mod svg;
mod tasks;

pub use config::{ExperimentConfig, Task, SWEEP_ROUNDS};
pub use corpus::{
    generate_corpus, load_manifest, read_sequence, uniform_source, write_manifest, CorpusManifest,
    ManifestEntry, CORPUS_SUBDIR, MANIFEST_FILE,
};
pub use feature_io::{
    extract_corpus_features, read_features_csv, read_features_nscf, write_features_csv,
    write_features_nscf, FeatureRow, NSCF_MAGIC, NSCF_VERSION,
};
pub use report::{roc_to_csv, write_text, MgramComparison, ReportRow, ReportTable, TABLE_CSV_HEADER};
pub use split::{split_dataset, Split, SplitAssignment};
pub use tasks::{
    evaluate_condition, features_csv_path, features_nscf_path, find_condition, model_file_path,
    reports_dir, run_experiment, select_rows, split_seed, stage_eval, stage_features,
    stage_generate, stage_report, stage_train, task_conditions, train_seed, Arch, Condition,
    EvalResult, SelectionRule, TaskReport, TrainedModel,
};

use std::sync::OnceLock;

/// Worker pool for corpus generation and feature extraction; its width is
/// capped by the NSC_THREADS environment variable when set.
pub(crate) fn worker_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("NSC_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            builder = builder.num_threads(n);
        }
        builder.build().expect("worker pool construction cannot fail")
    })
}
