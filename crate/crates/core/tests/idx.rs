use std::fs;
use std::path::PathBuf;

use afl_market::fl::{encode_images, encode_labels, load_idx};
use afl_market::harness::{run_experiment, RunConfig};
use afl_market::Error;

fn write_pair(dir: &std::path::Path, prefix: &str, n: usize, seed: u8) -> (PathBuf, PathBuf) {
    let pixels: Vec<u8> = (0..n * 16).map(|i| ((i * 37) as u8).wrapping_add(seed)).collect();
    let labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    let img = dir.join(format!("{prefix}-images"));
    let lbl = dir.join(format!("{prefix}-labels"));
    fs::write(&img, encode_images(4, 4, &pixels)).unwrap();
    fs::write(&lbl, encode_labels(&labels)).unwrap();
    (img, lbl)
}

#[test]
fn pixels_scaled_and_labels_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let (img, lbl) = write_pair(dir.path(), "train", 50, 3);
    let d = load_idx(&img, &lbl).unwrap();
    assert_eq!(d.len(), 50);
    assert_eq!(d.dim(), 16);
    assert!(d.features.iter().all(|&x| (0.0..=1.0).contains(&x)));
    assert!(d.labels.iter().all(|&y| y <= 9));
}

#[test]
fn swapped_files_report_magic() {
    let dir = tempfile::tempdir().unwrap();
    let (img, lbl) = write_pair(dir.path(), "train", 5, 0);
    let err = load_idx(&lbl, &img).unwrap_err();
    assert!(matches!(err, Error::IdxFormat { .. }));
    assert!(err.to_string().contains("0x00000801"), "{err}");
}

#[test]
fn trailing_bytes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (img, lbl) = write_pair(dir.path(), "train", 5, 0);
    let mut bytes = fs::read(&img).unwrap();
    bytes.push(0);
    fs::write(&img, bytes).unwrap();
    assert!(load_idx(&img, &lbl).is_err());
}

#[test]
fn experiment_runs_on_idx_data() {
    let dir = tempfile::tempdir().unwrap();
    let (tri, trl) = write_pair(dir.path(), "train", 400, 1);
    let (tei, tel) = write_pair(dir.path(), "test", 100, 2);
    let config = RunConfig {
        idx_train_images: Some(tri),
        idx_train_labels: Some(trl),
        idx_test_images: Some(tei),
        idx_test_labels: Some(tel),
        local_epochs: 5,
        sample_max: 2000,
        ..RunConfig::with_seed(6)
    };
    let a = run_experiment(&config).unwrap();
    for m in &a.metrics.agents {
        let acc = m.fl_accuracy.unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }
}

/// Set `AFL_MNIST_DIR` to a directory holding the four canonical MNIST files.
#[test]
fn canonical_mnist_training_pair() {
    let Ok(dir) = std::env::var("AFL_MNIST_DIR") else {
        eprintln!("AFL_MNIST_DIR not set; skipping");
        return;
    };
    let dir = PathBuf::from(dir);
    let d = load_idx(dir.join("train-images-idx3-ubyte"), dir.join("train-labels-idx1-ubyte")).unwrap();
    assert_eq!(d.len(), 60_000);
    assert_eq!((d.rows, d.cols), (28, 28));
    assert!(d.labels.iter().all(|&y| y <= 9));
}
