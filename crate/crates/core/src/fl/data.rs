use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{DataOwner, QualityTier};

pub const DEFAULT_FEATURE_DIM: usize = 8;
pub const DEFAULT_NUM_CLASSES: usize = 10;
pub const DEFAULT_NOISE_RATE_BLURRED: f64 = 0.4;
pub const DEFAULT_SHARDS_PER_OWNER: usize = 2;
/// Standard deviation of each class-center coordinate; samples add unit noise.
pub const DEFAULT_CENTER_SCALE: f64 = 1.0;

/// A labelled design matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDataset {
    pub owner_id: u32,
    pub dim: usize,
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
    /// How many labels were resampled by the blurred-owner label noise.
    pub noisy_labels: usize,
}

impl LocalDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label_histogram(&self, num_classes: usize) -> Vec<usize> {
        let mut h = vec![0; num_classes];
        for &y in &self.labels {
            h[y] += 1;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCenters {
    pub dim: usize,
    pub centers: Vec<Vec<f64>>,
}

impl ClassCenters {
    pub fn generate<R: Rng + ?Sized>(num_classes: usize, dim: usize, scale: f64, rng: &mut R) -> Self {
        let centers = (0..num_classes)
            .map(|_| (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        ClassCenters { dim, centers }
    }

    pub fn num_classes(&self) -> usize {
        self.centers.len()
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, class: usize, rng: &mut R, out: &mut Vec<f64>) {
        out.extend(self.centers[class].iter().map(|c| c + rng.sample::<f64, _>(StandardNormal)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partition {
    Iid,
    NonIid { shards_per_owner: usize },
}

impl Partition {
    pub fn label(self) -> &'static str {
        match self {
            Partition::Iid => "iid",
            Partition::NonIid { .. } => "niid",
        }
    }

    /// Classes an owner draws from; drawn with `rng` for the non-IID split.
    pub fn class_support<R: Rng + ?Sized>(self, num_classes: usize, rng: &mut R) -> Vec<usize> {
        match self {
            Partition::Iid => (0..num_classes).collect(),
            Partition::NonIid { shards_per_owner } => {
                let mut v = sample(rng, num_classes, shards_per_owner).into_vec();
                v.sort_unstable();
                v
            }
        }
    }
}

/// Validates a partition request against the number of classes.
pub fn partition_mode(non_iid: bool, shards_per_owner: usize, num_classes: usize) -> Result<Partition> {
    if !non_iid {
        return Ok(Partition::Iid);
    }
    if shards_per_owner == 0 || shards_per_owner > num_classes {
        return Err(Error::invalid(
            "shards_per_owner",
            format!("must lie in [1, {num_classes}], got {shards_per_owner}"),
        ));
    }
    Ok(Partition::NonIid { shards_per_owner })
}

/// Draws labels for one owner: classes uniform over its support, then for
/// blurred owners a `noise_rate` fraction of labels resampled uniformly over
/// the same support.
pub(crate) fn draw_labels<R: Rng + ?Sized>(
    owner: &DataOwner,
    support: &[usize],
    noise_rate: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>, usize) {
    let n = owner.num_samples as usize;
    let classes: Vec<usize> = (0..n).map(|_| support[rng.random_range(0..support.len())]).collect();
    let mut labels = classes.clone();
    let mut noisy = 0;
    if owner.quality_tier == QualityTier::Blurred {
        for y in labels.iter_mut() {
            if rng.random::<f64>() < noise_rate {
                *y = support[rng.random_range(0..support.len())];
                noisy += 1;
            }
        }
    }
    (classes, labels, noisy)
}

pub fn synth_dataset<R: Rng + ?Sized>(
    owner: &DataOwner,
    centers: &ClassCenters,
    partition: Partition,
    noise_rate_blurred: f64,
    rng: &mut R,
) -> LocalDataset {
    let support = partition.class_support(centers.num_classes(), rng);
    let (classes, labels, noisy_labels) = draw_labels(owner, &support, noise_rate_blurred, rng);
    let mut features = Vec::with_capacity(classes.len() * centers.dim);
    for &c in &classes {
        centers.sample_into(c, rng, &mut features);
    }
    LocalDataset {
        owner_id: owner.id,
        dim: centers.dim,
        features,
        labels,
        noisy_labels,
    }
}

/// Class-balanced clean evaluation set.
pub fn synth_test_set<R: Rng + ?Sized>(centers: &ClassCenters, n: usize, rng: &mut R) -> LocalDataset {
    let k = centers.num_classes();
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let mut features = Vec::with_capacity(n * centers.dim);
    for &c in &labels {
        centers.sample_into(c, rng, &mut features);
    }
    LocalDataset {
        owner_id: 0,
        dim: centers.dim,
        features,
        labels,
        noisy_labels: 0,
    }
}
