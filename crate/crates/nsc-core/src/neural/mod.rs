//! The neural distinguisher: network, training loop, metrics, and the
//! advantage estimator.

mod checkpoint;
mod metrics;
mod mlp;
mod train;

pub use checkpoint::Distinguisher;
pub use metrics::{
    advantage, evaluate, metrics_from_confusion, roc_auc, AdvantageEstimate, ConfusionCounts,
    EvaluationOutcome, Metrics, RocCurve,
};
pub use mlp::{
    decide, forward, gradients, init_parameters, loss_bce, GradientSet, MlpParameters, PROB_CLAMP,
};
pub use train::{
    logistic_baseline, train_mlp, EpochStats, LabeledDataset, Standardizer, TrainConfig,
    TrainHistory, HIDDEN_LAYERS,
};
