//! Reader (and a small writer) for the IDX binary container used by the
//! MNIST family of datasets.
//!
//! Layout: a big-endian `u32` magic whose low byte is the number of
//! dimensions and whose third byte is the element type (`0x08` = unsigned
//! byte), one big-endian `u32` per dimension, then the raw elements.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::data::LocalDataset;
use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdxDataset {
    pub rows: usize,
    pub cols: usize,
    /// Pixels scaled to `[0, 1]`, one row of `rows * cols` per item.
    pub features: Vec<f64>,
    pub labels: Vec<u8>,
}

impl IdxDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn into_local_dataset(self, owner_id: u32) -> LocalDataset {
        LocalDataset {
            owner_id,
            dim: self.rows * self.cols,
            features: self.features,
            labels: self.labels.into_iter().map(usize::from).collect(),
            noisy_labels: 0,
        }
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::IdxFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| format_err(path, format!("truncated header at byte {offset}")))
}

/// Parses an IDX buffer, returning its dimension sizes and payload.
fn parse<'a>(bytes: &'a [u8], expected_magic: u32, path: &Path) -> Result<(Vec<usize>, &'a [u8])> {
    let magic = read_u32(bytes, 0, path)?;
    if magic != expected_magic {
        return Err(format_err(
            path,
            format!("bad magic 0x{magic:08x}, expected 0x{expected_magic:08x}"),
        ));
    }
    let ndim = (magic & 0xff) as usize;
    let dims = (0..ndim)
        .map(|i| read_u32(bytes, 4 + 4 * i, path).map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    let header = 4 + 4 * ndim;
    let expected = dims.iter().product::<usize>();
    let payload = &bytes[header..];
    if payload.len() != expected {
        return Err(format_err(
            path,
            format!("payload holds {} bytes, header promises {expected}", payload.len()),
        ));
    }
    Ok((dims, payload))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<IdxDataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let image_bytes = read_file(images_path)?;
    let label_bytes = read_file(labels_path)?;
    let (idims, pixels) = parse(&image_bytes, IMAGES_MAGIC, images_path)?;
    let (ldims, labels) = parse(&label_bytes, LABELS_MAGIC, labels_path)?;
    if idims[0] != ldims[0] {
        return Err(Error::IdxConsistency(format!(
            "{} images but {} labels",
            idims[0], ldims[0]
        )));
    }
    Ok(IdxDataset {
        rows: idims[1],
        cols: idims[2],
        features: pixels.iter().map(|&p| p as f64 / 255.0).collect(),
        labels: labels.to_vec(),
    })
}

pub fn encode_images(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let count = pixels.len() / (rows * cols).max(1);
    let mut out = Vec::with_capacity(16 + pixels.len());
    out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    for d in [count, rows, cols] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_pair(dir: &Path, images: &[u8], labels: &[u8]) -> (std::path::PathBuf, std::path::PathBuf) {
        let ip = dir.join("images.idx3-ubyte");
        let lp = dir.join("labels.idx1-ubyte");
        fs::write(&ip, images).unwrap();
        fs::write(&lp, labels).unwrap();
        (ip, lp)
    }

    #[test]
    fn roundtrip_small_pair() {
        let dir = tempfile::tempdir().unwrap();
        let pixels: Vec<u8> = (0..3 * 2 * 2).map(|i| (i * 20) as u8).collect();
        let (ip, lp) = write_pair(dir.path(), &encode_images(2, 2, &pixels), &encode_labels(&[0, 9, 4]));
        let ds = load_idx(&ip, &lp).unwrap();
        assert_eq!((ds.len(), ds.rows, ds.cols), (3, 2, 2));
        assert_eq!(ds.row(1), &[80.0 / 255.0, 100.0 / 255.0, 120.0 / 255.0, 140.0 / 255.0]);
        assert!(ds.features.iter().all(|p| (0.0..=1.0).contains(p)));
        assert_eq!(ds.labels, vec![0, 9, 4]);
    }

    #[test]
    fn wrong_magic_reports_observed_value() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = write_pair(dir.path(), &encode_labels(&[1, 2]), &encode_labels(&[1, 2]));
        let err = load_idx(&ip, &lp).unwrap_err();
        assert!(err.to_string().contains("0x00000801"), "{err}");
    }

    #[test]
    fn truncated_file_fails_closed() {
        let dir = tempfile::tempdir().unwrap();
        let mut images = encode_images(2, 2, &[7; 8]);
        images.pop();
        let (ip, lp) = write_pair(dir.path(), &images, &encode_labels(&[1, 2]));
        assert!(matches!(load_idx(&ip, &lp), Err(Error::IdxFormat { .. })));

        let (ip, lp) = write_pair(dir.path(), &[0, 0, 8], &encode_labels(&[1]));
        assert!(matches!(load_idx(&ip, &lp), Err(Error::IdxFormat { .. })));
    }

    #[test]
    fn count_mismatch_is_consistency_error() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = write_pair(dir.path(), &encode_images(2, 2, &[1; 8]), &encode_labels(&[1, 2, 3]));
        assert!(matches!(load_idx(&ip, &lp), Err(Error::IdxConsistency(_))));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_idx("/nonexistent/a", "/nonexistent/b"), Err(Error::Io { .. })));
    }
}
