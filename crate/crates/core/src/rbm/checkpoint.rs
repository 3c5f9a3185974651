//! Versioned JSON checkpoints.
//!
//! ```text
//! {"version": 1, "n_visible": Nv, "n_hidden": Nh,
//!  "mask": [u64 words, bit k of word k/64 is edge k in row-major order],
//!  "weights": [row-major], "config": {...}, "history": {...}}
//! ```

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::model::Rbm;
use super::train::{TrainConfig, TrainHistory};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u64,
    pub n_visible: usize,
    pub n_hidden: usize,
    pub mask: Vec<u64>,
    pub weights: Vec<f64>,
    pub config: TrainConfig,
    pub history: TrainHistory,
}

impl Checkpoint {
    pub fn new(rbm: &Rbm, config: &TrainConfig, history: &TrainHistory) -> Self {
        let edges = rbm.n_visible() * rbm.n_hidden();
        let mut mask = vec![0u64; edges.div_ceil(64)];
        for (k, &m) in rbm.mask().iter().enumerate() {
            if m {
                mask[k / 64] |= 1 << (k % 64);
            }
        }
        Self {
            version: CHECKPOINT_VERSION,
            n_visible: rbm.n_visible(),
            n_hidden: rbm.n_hidden(),
            mask,
            weights: rbm.weights().iter().copied().collect(),
            config: config.clone(),
            history: history.clone(),
        }
    }

    pub fn into_parts(self) -> Result<(Rbm, TrainConfig, TrainHistory)> {
        let shape = (self.n_visible, self.n_hidden);
        let edges = self.n_visible * self.n_hidden;
        if self.mask.len() != edges.div_ceil(64) {
            return Err(Error::CorruptCheckpoint(format!("mask has {} words for {edges} edges", self.mask.len())));
        }
        let weights = Array2::from_shape_vec(shape, self.weights)
            .map_err(|e| Error::CorruptCheckpoint(format!("weights do not fit {shape:?}: {e}")))?;
        let mask = Array2::from_shape_fn(shape, |(i, j)| {
            let k = i * self.n_hidden + j;
            self.mask[k / 64] >> (k % 64) & 1 == 1
        });
        let rbm = Rbm::with_mask(weights, mask).map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
        Ok((rbm, self.config, self.history))
    }
}

pub fn save_checkpoint(rbm: &Rbm, config: &TrainConfig, history: &TrainHistory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(&Checkpoint::new(rbm, config, history))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(Rbm, TrainConfig, TrainHistory)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::CorruptCheckpoint(format!("{}: {e}", path.display())))?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::CorruptCheckpoint(format!("{}: missing version tag", path.display())))?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::VersionMismatch { found: version, expected: CHECKPOINT_VERSION });
    }
    let checkpoint: Checkpoint =
        serde_json::from_value(value).map_err(|e| Error::CorruptCheckpoint(format!("{}: {e}", path.display())))?;
    checkpoint.into_parts()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbm::EpochRecord;
    use ndarray::array;

    fn fixture() -> (Rbm, TrainConfig, TrainHistory) {
        let mask = Array2::from_shape_fn((9, 8), |(i, j)| (i + j) % 3 != 0);
        let rbm = Rbm::random(9, 8, Some(mask), 5).unwrap();
        let history = TrainHistory {
            initial_validation_error: 0.5,
            records: vec![EpochRecord {
                epoch: 1,
                validation_error: 0.1 + 0.2,
                mean_gradient_magnitude: 1.0 / 3.0,
                wall_time_sampling: 0.25,
                wall_time_total: 0.5,
            }],
        };
        (rbm, TrainConfig::default(), history)
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (rbm, config, history) = fixture();
        save_checkpoint(&rbm, &config, &history, &path).unwrap();
        let (r, c, h) = load_checkpoint(&path).unwrap();
        for (a, b) in r.weights().iter().zip(rbm.weights()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(r, rbm);
        assert_eq!(c, config);
        assert_eq!(h, history);
    }

    #[test]
    fn future_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (rbm, config, history) = fixture();
        let mut ck = Checkpoint::new(&rbm, &config, &history);
        ck.version = 2;
        std::fs::write(&path, serde_json::to_string(&ck).unwrap()).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::VersionMismatch { found: 2, expected: 1 })));
    }

    #[test]
    fn truncated_and_inconsistent_files_are_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (rbm, config, history) = fixture();
        save_checkpoint(&rbm, &config, &history, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::CorruptCheckpoint(_))));

        let mut ck = Checkpoint::new(&Rbm::from_weights(array![[0.5, 0.25]]).unwrap(), &config, &history);
        ck.mask = vec![0b01];
        std::fs::write(&path, serde_json::to_string(&ck).unwrap()).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::CorruptCheckpoint(_))));
        ck.mask = vec![0b11];
        ck.weights.pop();
        std::fs::write(&path, serde_json::to_string(&ck).unwrap()).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::CorruptCheckpoint(_))));
    }
}
