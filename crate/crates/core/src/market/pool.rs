use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{stream_rng, Stream};

/// Number of entries in a bid request feature vector: bias, normalized
/// sequence number, normalized sample count.
pub const FEATURE_DIM: usize = 3;

/// Sample count that maps to 1.0 in the quantity feature.
pub const QUANTITY_SCALE: f64 = 10_000.0;

pub type Features = [f64; FEATURE_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QualityTier {
    Clean,
    Blurred,
}

impl QualityTier {
    pub fn as_str(self) -> &'static str {
        match self {
            QualityTier::Clean => "clean",
            QualityTier::Blurred => "blurred",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataOwner {
    /// 1-based sequence number within the pool.
    pub id: u32,
    pub num_samples: u32,
    pub quality_tier: QualityTier,
    pub local_seed: u64,
}

/// Owners `1..=ceil(P/2)` are blurred.
pub fn tier_for(id: u32, pool_size: usize) -> QualityTier {
    if (id as usize) <= pool_size.div_ceil(2) {
        QualityTier::Blurred
    } else {
        QualityTier::Clean
    }
}

pub fn generate_do_pool(
    pool_size: usize,
    sample_range: (u32, u32),
    master_seed: u64,
) -> Result<Vec<DataOwner>> {
    let (min, max) = sample_range;
    if pool_size < 2 {
        return Err(Error::invalid("pool_size", format!("need at least 2 owners, got {pool_size}")));
    }
    if min < 1 || min > max {
        return Err(Error::invalid(
            "sample_range",
            format!("expected 1 <= min <= max, got [{min}, {max}]"),
        ));
    }
    let mut rng = stream_rng(master_seed, Stream::Pool, 0);
    Ok((1..=pool_size as u32)
        .map(|id| DataOwner {
            id,
            num_samples: rng.random_range(min..=max),
            quality_tier: tier_for(id, pool_size),
            local_seed: rng.random(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidRequest {
    pub owner_id: u32,
    pub features: Features,
}

pub fn make_bid_request(owner: &DataOwner, pool_size: usize) -> BidRequest {
    BidRequest {
        owner_id: owner.id,
        features: [
            1.0,
            owner.id as f64 / pool_size as f64,
            owner.num_samples as f64 / QUANTITY_SCALE,
        ],
    }
}
