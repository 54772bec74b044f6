//! Model checkpoints: plain text, header `NSCMLP v1`, layer sizes, the
//! per-layer weights and biases as whitespace-separated decimals with 17
//! significant digits, then the standardization statistics.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::neural::mlp::{forward, MlpParameters};
use crate::neural::train::{LabeledDataset, Standardizer};

/// A trained model bundled with the feature standardization fitted on its
/// training split; the unit that gets saved, loaded, and evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Distinguisher {
    pub params: MlpParameters,
    pub standardizer: Standardizer,
}

impl Distinguisher {
    /// Probability that a raw (unstandardized) feature row is class 1.
    pub fn score(&self, raw_features: &[f64]) -> Result<f64> {
        forward(&self.params, &self.standardizer.apply(raw_features))
    }

    pub fn decide(&self, raw_features: &[f64]) -> Result<u8> {
        Ok(u8::from(self.score(raw_features)? >= 0.5))
    }

    /// Standardizes every row of a raw dataset for evaluation.
    pub fn standardize(&self, data: &LabeledDataset) -> LabeledDataset {
        data.map_rows(|row| self.standardizer.apply(row))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = encode(self);
        std::fs::write(path, text)
            .map_err(|e| Error::io(format!("writing checkpoint {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading checkpoint {}", path.display()), e))?;
        decode(&text).map_err(|reason| Error::format(path, reason))
    }
}

fn push_floats(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

fn encode(model: &Distinguisher) -> String {
    let params = &model.params;
    let mut out = String::from("NSCMLP v1\n");
    out.push_str("layers");
    for s in params.layer_sizes() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    for l in 0..params.num_layers() {
        let _ = writeln!(out, "layer {l}");
        let fan_in = params.layer_sizes()[l];
        let weights = params.weights(l);
        for o in 0..params.layer_sizes()[l + 1] {
            push_floats(&mut out, &weights[o * fan_in..(o + 1) * fan_in]);
        }
        push_floats(&mut out, params.biases(l));
    }
    out.push_str("standardization\n");
    push_floats(&mut out, &model.standardizer.means);
    push_floats(&mut out, &model.standardizer.scales);
    out
}

struct Tokens<'a> {
    inner: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> std::result::Result<&'a str, String> {
        self.inner.next().ok_or_else(|| "unexpected end of checkpoint".to_string())
    }

    fn expect(&mut self, literal: &str) -> std::result::Result<(), String> {
        let tok = self.next()?;
        if tok != literal {
            return Err(format!("expected {literal:?}, found {tok:?}"));
        }
        Ok(())
    }

    fn float(&mut self) -> std::result::Result<f64, String> {
        let tok = self.next()?;
        tok.parse::<f64>().map_err(|_| format!("bad float {tok:?}"))
    }

    fn floats(&mut self, count: usize) -> std::result::Result<Vec<f64>, String> {
        (0..count).map(|_| self.float()).collect()
    }
}

fn decode(text: &str) -> std::result::Result<Distinguisher, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty checkpoint")?;
    if header.trim() != "NSCMLP v1" {
        return Err(format!("bad header {header:?}"));
    }

    let mut tokens = Tokens {
        inner: text[header.len()..].split_whitespace(),
    };
    tokens.expect("layers")?;
    let mut layer_sizes = Vec::new();
    // sizes run until the first "layer" keyword
    loop {
        let tok = tokens.next()?;
        if tok == "layer" {
            break;
        }
        layer_sizes.push(tok.parse::<usize>().map_err(|_| format!("bad layer size {tok:?}"))?);
    }
    if layer_sizes.len() < 2 {
        return Err("need at least input and output sizes".into());
    }

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..layer_sizes.len() - 1 {
        if l > 0 {
            tokens.expect("layer")?;
        }
        let idx = tokens.next()?;
        if idx.parse::<usize>() != Ok(l) {
            return Err(format!("expected layer {l}, found {idx:?}"));
        }
        let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
        weights.push(tokens.floats(fan_in * fan_out)?);
        biases.push(tokens.floats(fan_out)?);
    }

    tokens.expect("standardization")?;
    let d = layer_sizes[0];
    let means = tokens.floats(d)?;
    let scales = tokens.floats(d)?;
    if tokens.inner.next().is_some() {
        return Err("trailing content after standardization".into());
    }

    let params =
        MlpParameters::from_raw(layer_sizes, weights, biases).map_err(|e| e.to_string())?;
    Ok(Distinguisher {
        params,
        standardizer: Standardizer {
            means,
            scales,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::mlp::init_parameters;

    fn sample_model() -> Distinguisher {
        let params = init_parameters(&[6, 4, 1], 55).unwrap();
        let standardizer = Standardizer {
            means: vec![0.5; 6],
            scales: vec![2.0, 1.0, 1.0, 3.0, 1.0, 1.0],
        };
        Distinguisher {
            params,
            standardizer,
        }
    }

    #[test]
    fn checkpoint_round_trips_bit_exactly() {
        let model = sample_model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.nscmlp");
        model.save(&path).unwrap();
        let loaded = Distinguisher::load(&path).unwrap();
        assert_eq!(loaded.params.layer_sizes(), model.params.layer_sizes());
        for l in 0..model.params.num_layers() {
            assert_eq!(loaded.params.weights(l), model.params.weights(l));
            assert_eq!(loaded.params.biases(l), model.params.biases(l));
        }
        assert_eq!(loaded.standardizer, model.standardizer);
    }

    #[test]
    fn header_line_is_pinned() {
        let model = sample_model();
        let text = encode(&model);
        assert!(text.starts_with("NSCMLP v1\nlayers 6 4 1\n"));
    }

    #[test]
    fn malformed_checkpoints_are_rejected() {
        assert!(decode("").is_err());
        assert!(decode("NSCMLP v2\nlayers 2 1\n").is_err());
        assert!(decode("NSCMLP v1\nlayers 2 1\nlayer 0\n1.0").is_err());
    }

    #[test]
    fn scores_apply_standardization() {
        let params = MlpParameters::from_raw(vec![1, 1], vec![vec![1.0]], vec![vec![0.0]]).unwrap();
        let model = Distinguisher {
            params,
            standardizer: Standardizer {
                means: vec![10.0],
                scales: vec![2.0],
            },
        };
        // (10 - 10) / 2 = 0 -> sigmoid(0) = 0.5
        assert_eq!(model.score(&[10.0]).unwrap(), 0.5);
        assert_eq!(model.decide(&[12.0]).unwrap(), 1);
        assert_eq!(model.decide(&[8.0]).unwrap(), 0);
    }
}
