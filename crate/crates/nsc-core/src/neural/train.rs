//! Mini-batch gradient-descent training with seeded shuffling and
//! best-validation-epoch selection.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::neural::mlp::{forward, gradients, init_parameters, loss_bce, MlpParameters};
use crate::rng::{derive_seed, seeded_rng};

/// Hidden layer widths of the distinguisher network.
pub const HIDDEN_LAYERS: [usize; 2] = [64, 32];

/// Feature rows with binary labels, all sharing one schema.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} rows vs {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(first) = features.first() {
            let d = first.len();
            if features.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidInput("rows have mixed dimensions".into()));
            }
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        Ok(LabeledDataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// (negatives, positives).
    pub fn class_counts(&self) -> (usize, usize) {
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - positives, positives)
    }

    /// Rows with the given label.
    pub fn rows_with_label(&self, label: u8) -> Vec<Vec<f64>> {
        self.features
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .map(|(f, _)| f.clone())
            .collect()
    }

    /// Applies a per-feature transform to every row.
    pub fn map_rows(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> LabeledDataset {
        LabeledDataset {
            features: self.features.iter().map(|r| f(r)).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Training hyperparameters; fully determines a run together with the data.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs: 300,
            batch_size: 64,
            seed: 0,
            l2: 1e-4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Config("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

/// Per-feature affine transform fitted on the training split.
///
/// Group A of schema v1 is already normalized, so entries below
/// `standardized_from` stay identity; zero-variance features get scale 1
/// and collapse to 0 after centering.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Standardizer {
            means: vec![0.0; dim],
            scales: vec![1.0; dim],
        }
    }

    /// Fits means and standard deviations on `rows`, leaving indices below
    /// `from` untouched.
    pub fn fit(rows: &[Vec<f64>], from: usize) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("cannot standardize an empty split".into()))?;
        let mut s = Standardizer::identity(dim);
        let n = rows.len() as f64;
        for j in from..dim {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            s.means[j] = mean;
            s.scales[j] = if std > 1e-12 { std } else { 1.0 };
        }
        Ok(s)
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.means.len()
    }
}

/// Loss and accuracy of one epoch on the train and validation splits.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    /// Epoch whose parameters were returned (lowest validation loss,
    /// earliest on ties).
    pub best_epoch: usize,
}

fn split_stats(params: &MlpParameters, data: &LabeledDataset) -> Result<(f64, f64)> {
    let mut probs = Vec::with_capacity(data.len());
    let mut correct = 0usize;
    for (x, &y) in data.features().iter().zip(data.labels()) {
        let p = forward(params, x)?;
        if u8::from(p >= 0.5) == y {
            correct += 1;
        }
        probs.push(p);
    }
    let labels: Vec<f64> = data.labels().iter().map(|&y| f64::from(y)).collect();
    Ok((loss_bce(&probs, &labels)?, correct as f64 / data.len() as f64))
}

fn fit(
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cfg: &TrainConfig,
    hidden: &[usize],
) -> Result<(MlpParameters, TrainHistory)> {
    cfg.validate()?;
    if train.is_empty() || validation.is_empty() {
        return Err(Error::Training("empty train or validation split".into()));
    }
    let (neg, pos) = train.class_counts();
    if neg < 2 || pos < 2 {
        return Err(Error::Training(format!(
            "need at least 2 samples per class, got {neg} negative / {pos} positive"
        )));
    }
    if validation.dimension() != train.dimension() {
        return Err(Error::Training("split dimensions disagree".into()));
    }

    let mut layer_sizes = vec![train.dimension()];
    layer_sizes.extend_from_slice(hidden);
    layer_sizes.push(1);

    let mut params = init_parameters(&layer_sizes, derive_seed(cfg.seed, "init"))?;
    let mut shuffle_rng = seeded_rng(derive_seed(cfg.seed, "shuffle"));
    let labels_f: Vec<f64> = train.labels().iter().map(|&y| f64::from(y)).collect();

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, usize, MlpParameters)> = None;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for batch in order.chunks(cfg.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| train.features()[i].as_slice()).collect();
            let ys: Vec<f64> = batch.iter().map(|&i| labels_f[i]).collect();
            let grads = gradients(&params, &xs, &ys, cfg.l2)?;
            params.step(&grads, cfg.learning_rate);
        }

        let (train_loss, train_accuracy) = split_stats(&params, train)?;
        let (val_loss, val_accuracy) = split_stats(&params, validation)?;
        history.push(EpochStats {
            epoch,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
        if best.as_ref().map_or(true, |(loss, _, _)| val_loss < *loss) {
            best = Some((val_loss, epoch, params.clone()));
        }
    }

    let (_, best_epoch, best_params) = best.expect("at least one epoch ran");
    Ok((
        best_params,
        TrainHistory {
            epochs: history,
            best_epoch,
        },
    ))
}

/// Trains the distinguisher network (hidden layers 64 and 32).
pub fn train_mlp(
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cfg: &TrainConfig,
) -> Result<(MlpParameters, TrainHistory)> {
    fit(train, validation, cfg, &HIDDEN_LAYERS)
}

/// Trains the logistic baseline: a direct d -> 1 sigmoid, the same model
/// with zero hidden layers.
pub fn logistic_baseline(
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cfg: &TrainConfig,
) -> Result<(MlpParameters, TrainHistory)> {
    fit(train, validation, cfg, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Two well-separated Gaussian blobs in 2-D.
    fn separable(seed: u64, per_class: usize) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..per_class * 2 {
            let label = (i % 2) as u8;
            let center = if label == 1 { 2.0 } else { -2.0 };
            features.push(vec![
                center + rng.random_range(-0.5..0.5),
                center + rng.random_range(-0.5..0.5),
            ]);
            labels.push(label);
        }
        LabeledDataset::new(features, labels).unwrap()
    }

    fn quick_cfg() -> TrainConfig {
        TrainConfig {
            epochs: 200,
            batch_size: 16,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::new(vec![vec![1.0]], vec![2]).is_err());
        assert!(LabeledDataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1]).is_err());
        let d = separable(1, 10);
        assert_eq!(d.class_counts(), (10, 10));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { learning_rate: 0.0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { epochs: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { l2: -1.0, ..TrainConfig::default() }.validate().is_err());
    }

    #[test]
    fn separable_data_reaches_full_training_accuracy() {
        let train = separable(10, 40);
        let val = separable(11, 10);
        let (params, history) = train_mlp(&train, &val, &quick_cfg()).unwrap();
        let last = history.epochs.last().unwrap();
        assert_eq!(last.train_accuracy, 1.0, "history: {:?}", last);
        let (_, acc) = split_stats(&params, &val).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn logistic_baseline_is_a_single_layer() {
        let train = separable(20, 30);
        let val = separable(21, 10);
        let (params, _) = logistic_baseline(&train, &val, &quick_cfg()).unwrap();
        assert_eq!(params.layer_sizes(), &[2, 1]);
        let (_, acc) = split_stats(&params, &val).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn training_is_reproducible_for_fixed_seed() {
        let train = separable(30, 20);
        let val = separable(31, 8);
        let cfg = TrainConfig { epochs: 20, ..quick_cfg() };
        let (p1, h1) = train_mlp(&train, &val, &cfg).unwrap();
        let (p2, h2) = train_mlp(&train, &val, &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(h1, h2);
    }

    #[test]
    fn single_class_data_is_a_training_error() {
        let features = vec![vec![0.0, 0.0]; 10];
        let labels = vec![1u8; 10];
        let data = LabeledDataset::new(features, labels).unwrap();
        let err = train_mlp(&data, &data, &quick_cfg()).unwrap_err();
        assert!(matches!(err, Error::Training(_)));
    }

    #[test]
    fn standardizer_centers_and_scales_from_the_given_index() {
        let rows = vec![vec![5.0, 10.0, 1.0], vec![5.0, 20.0, 3.0]];
        let s = Standardizer::fit(&rows, 1).unwrap();
        assert_eq!((s.means[0], s.scales[0]), (0.0, 1.0));
        let t = s.apply(&rows[0]);
        assert_eq!(t[0], 5.0);
        assert_eq!(t[1], -1.0);
        assert_eq!(t[2], -1.0);
        // zero-variance feature collapses to 0 instead of dividing by 0
        let constant = Standardizer::fit(&vec![vec![7.0]; 4], 0).unwrap();
        assert_eq!(constant.apply(&[7.0]), vec![0.0]);
    }
}
