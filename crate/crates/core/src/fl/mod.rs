//! Federated training over the owners a consumer recruited: one local
//! training pass per owner, sample-weighted averaging, then evaluation on a
//! shared clean test set.

mod data;
pub mod idx;
mod softmax;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use data::{
    partition_mode, synth_dataset, synth_test_set, ClassCenters, LocalDataset, Partition, DEFAULT_CENTER_SCALE,
    DEFAULT_FEATURE_DIM, DEFAULT_NOISE_RATE_BLURRED, DEFAULT_NUM_CLASSES, DEFAULT_SHARDS_PER_OWNER,
};
pub use idx::{encode_images, encode_labels, load_idx, IdxDataset, IMAGES_MAGIC, LABELS_MAGIC};
pub use softmax::{
    cross_entropy, cross_entropy_gradient, evaluate, fedavg, local_train, SoftmaxModel, DEFAULT_LOCAL_EPOCHS,
    DEFAULT_LOCAL_LR,
};

use crate::error::Result;
use crate::market::DataOwner;
use crate::seed::{stream_rng, Stream};

pub const DEFAULT_TEST_SIZE: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlSettings {
    pub partition: Partition,
    pub noise_rate_blurred: f64,
    pub local_epochs: usize,
    pub local_lr: f64,
    pub num_classes: usize,
    pub feature_dim: usize,
    pub center_scale: f64,
    pub test_size: usize,
}

impl Default for FlSettings {
    fn default() -> Self {
        FlSettings {
            partition: Partition::Iid,
            noise_rate_blurred: DEFAULT_NOISE_RATE_BLURRED,
            local_epochs: DEFAULT_LOCAL_EPOCHS,
            local_lr: DEFAULT_LOCAL_LR,
            num_classes: DEFAULT_NUM_CLASSES,
            feature_dim: DEFAULT_FEATURE_DIM,
            center_scale: DEFAULT_CENTER_SCALE,
            test_size: DEFAULT_TEST_SIZE,
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Synthetic(ClassCenters),
    Idx {
        train: IdxDataset,
        by_class: Vec<Vec<usize>>,
    },
}

/// Everything needed to materialize owner datasets and score cohorts for
/// one run.
#[derive(Debug, Clone)]
pub struct FlEnvironment {
    settings: FlSettings,
    source: Source,
    test_set: LocalDataset,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortResult {
    pub model: SoftmaxModel,
    pub accuracy: f64,
    pub num_owners: usize,
    pub num_samples: u64,
}

impl FlEnvironment {
    pub fn synthetic(settings: FlSettings, seed: u64) -> Self {
        let centers = ClassCenters::generate(
            settings.num_classes,
            settings.feature_dim,
            settings.center_scale,
            &mut stream_rng(seed, Stream::ClassCenters, 0),
        );
        let test_set = synth_test_set(&centers, settings.test_size, &mut stream_rng(seed, Stream::TestSet, 0));
        FlEnvironment {
            settings,
            source: Source::Synthetic(centers),
            test_set,
            seed,
        }
    }

    /// Owners resample rows of `train` (with replacement) from their class
    /// support; `test` is used as-is for evaluation.
    pub fn from_idx(mut settings: FlSettings, train: IdxDataset, test: IdxDataset, seed: u64) -> Self {
        settings.num_classes = train.num_classes().max(test.num_classes());
        settings.feature_dim = train.dim();
        let mut by_class = vec![Vec::new(); settings.num_classes];
        for (i, &y) in train.labels.iter().enumerate() {
            by_class[y as usize].push(i);
        }
        FlEnvironment {
            settings,
            source: Source::Idx { train, by_class },
            test_set: test.into_local_dataset(0),
            seed,
        }
    }

    pub fn settings(&self) -> &FlSettings {
        &self.settings
    }

    pub fn test_set(&self) -> &LocalDataset {
        &self.test_set
    }

    fn owner_rng(&self, owner: &DataOwner) -> ChaCha8Rng {
        let mut rng = stream_rng(self.seed, Stream::LocalData, owner.local_seed);
        // decorrelate partitions so IID and non-IID runs of one owner differ
        let tag: u64 = match self.settings.partition {
            Partition::Iid => 0,
            Partition::NonIid { shards_per_owner } => shards_per_owner as u64,
        };
        ChaCha8Rng::seed_from_u64(rng.random::<u64>() ^ tag)
    }

    /// The local dataset `owner` contributes; identical for every consumer.
    pub fn owner_dataset(&self, owner: &DataOwner) -> LocalDataset {
        let mut rng = self.owner_rng(owner);
        let s = &self.settings;
        match &self.source {
            Source::Synthetic(centers) => synth_dataset(owner, centers, s.partition, s.noise_rate_blurred, &mut rng),
            Source::Idx { train, by_class } => {
                let present: Vec<usize> = (0..by_class.len()).filter(|&k| !by_class[k].is_empty()).collect();
                let support: Vec<usize> = s
                    .partition
                    .class_support(present.len(), &mut rng)
                    .into_iter()
                    .map(|i| present[i])
                    .collect();
                let (classes, labels, noisy_labels) = data::draw_labels(owner, &support, s.noise_rate_blurred, &mut rng);
                let mut features = Vec::with_capacity(classes.len() * train.dim());
                for &c in &classes {
                    let rows = &by_class[c];
                    features.extend_from_slice(train.row(rows[rng.random_range(0..rows.len())]));
                }
                LocalDataset {
                    owner_id: owner.id,
                    dim: train.dim(),
                    features,
                    labels,
                    noisy_labels,
                }
            }
        }
    }

    /// One federated round over `owners`: local training runs in parallel and
    /// is aggregated in owner-id order. A cohort without owners keeps the
    /// untrained model.
    pub fn train_cohort(&self, owners: &[DataOwner]) -> Result<CohortResult> {
        let s = &self.settings;
        let init = SoftmaxModel::zeros(s.num_classes, s.feature_dim);
        let mut sorted = owners.to_vec();
        sorted.sort_by_key(|o| o.id);
        let updates = sorted
            .par_iter()
            .map(|o| {
                let data = self.owner_dataset(o);
                local_train(&init, &data, s.local_epochs, s.local_lr).map(|m| (m, data.len()))
            })
            .collect::<Result<Vec<_>>>()?;
        let model = if updates.is_empty() { init } else { fedavg(&updates)? };
        let accuracy = evaluate(&model, &self.test_set);
        Ok(CohortResult {
            model,
            accuracy,
            num_owners: sorted.len(),
            num_samples: sorted.iter().map(|o| o.num_samples as u64).sum(),
        })
    }
}
