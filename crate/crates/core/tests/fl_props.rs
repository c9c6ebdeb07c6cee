use afl_market::fl::{evaluate, fedavg, local_train, FlEnvironment, FlSettings, LocalDataset, Partition, SoftmaxModel};
use afl_market::market::{DataOwner, QualityTier};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut ChaCha8Rng) -> SoftmaxModel {
    let mut m = SoftmaxModel::zeros(4, 3);
    for w in m.weights.iter_mut() {
        *w = rng.random_range(-1.0..1.0);
    }
    m
}

#[test]
fn fedavg_ignores_input_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut updates: Vec<(SoftmaxModel, usize)> =
        (0..7).map(|_| (random_model(&mut rng), rng.random_range(1..500))).collect();
    let base = fedavg(&updates).unwrap();
    for _ in 0..10 {
        updates.shuffle(&mut rng);
        let m = fedavg(&updates).unwrap();
        for (a, b) in base.weights.iter().zip(&m.weights) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn evaluate_ignores_test_order() {
    let env = FlEnvironment::synthetic(FlSettings::default(), 4);
    let owner = DataOwner {
        id: 80,
        num_samples: 3000,
        quality_tier: QualityTier::Clean,
        local_seed: 9,
    };
    let model = local_train(
        &SoftmaxModel::zeros(10, env.settings().feature_dim),
        &env.owner_dataset(&owner),
        50,
        0.05,
    )
    .unwrap();
    let test = env.test_set();
    let acc = evaluate(&model, test);
    let mut idx: Vec<usize> = (0..test.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let shuffled = LocalDataset {
        owner_id: 0,
        dim: test.dim,
        features: idx.iter().flat_map(|&i| test.row(i).to_vec()).collect(),
        labels: idx.iter().map(|&i| test.labels[i]).collect(),
        noisy_labels: 0,
    };
    assert_eq!(evaluate(&model, &shuffled), acc);
}

fn cohort(tier: QualityTier, seed: u64) -> Vec<DataOwner> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..5)
        .map(|i| DataOwner {
            id: i + 1,
            num_samples: 2000,
            quality_tier: tier,
            local_seed: rng.random(),
        })
        .collect()
}

#[test]
fn clean_cohort_is_at_least_as_accurate_as_blurred() {
    for partition in [Partition::Iid, Partition::NonIid { shards_per_owner: 2 }] {
        for seed in 0..5 {
            let env = FlEnvironment::synthetic(FlSettings { partition, ..Default::default() }, seed);
            let clean = env.train_cohort(&cohort(QualityTier::Clean, seed)).unwrap();
            let blurred = env.train_cohort(&cohort(QualityTier::Blurred, seed)).unwrap();
            assert_eq!(clean.num_samples, blurred.num_samples);
            assert!(
                clean.accuracy >= blurred.accuracy,
                "{partition:?} seed {seed}: {} < {}",
                clean.accuracy,
                blurred.accuracy
            );
        }
    }
}

#[test]
fn non_iid_owner_sees_exactly_its_shards() {
    let env = FlEnvironment::synthetic(
        FlSettings {
            partition: Partition::NonIid { shards_per_owner: 2 },
            ..Default::default()
        },
        8,
    );
    for owner in cohort(QualityTier::Blurred, 8) {
        let hist = env.owner_dataset(&owner).label_histogram(10);
        assert_eq!(hist.iter().filter(|&&k| k > 0).count(), 2, "{hist:?}");
    }
}

#[test]
fn cohort_training_is_deterministic() {
    let env = FlEnvironment::synthetic(FlSettings::default(), 21);
    let owners = cohort(QualityTier::Clean, 21);
    let mut reversed = owners.clone();
    reversed.reverse();
    let a = env.train_cohort(&owners).unwrap();
    let b = env.train_cohort(&reversed).unwrap();
    assert_eq!(a, b);
}
