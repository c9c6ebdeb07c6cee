//! One FedAvg round over clean versus blurred cohorts, IID and non-IID.
//!
//! cargo run --release --example federated_training

use afl_market::fl::{FlEnvironment, FlSettings, Partition};
use afl_market::market::{DataOwner, QualityTier};

fn cohort(tier: QualityTier) -> Vec<DataOwner> {
    (1..=8)
        .map(|i| DataOwner {
            id: i,
            num_samples: 3000,
            quality_tier: tier,
            local_seed: 100 + i as u64,
        })
        .collect()
}

fn main() {
    for partition in [Partition::Iid, Partition::NonIid { shards_per_owner: 2 }] {
        let env = FlEnvironment::synthetic(FlSettings { partition, ..Default::default() }, 5);
        for tier in [QualityTier::Clean, QualityTier::Blurred] {
            let r = env.train_cohort(&cohort(tier)).unwrap();
            println!(
                "{:<5} {:<7}: {} owners, {} samples, accuracy {:.4}",
                partition.label(),
                tier.as_str(),
                r.num_owners,
                r.num_samples,
                r.accuracy
            );
        }
    }
}
