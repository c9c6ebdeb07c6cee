//! Load an IDX image/label pair. Pass the two paths to read real files
//! (for example MNIST); without arguments a small pair is written to a
//! temporary directory and read back.
//!
//! cargo run --release --example idx_smoke -- train-images-idx3-ubyte train-labels-idx1-ubyte

use afl_market::fl::{encode_images, encode_labels, load_idx};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let _tmp;
    let (images, labels) = if let [i, l] = args.as_slice() {
        (i.into(), l.into())
    } else {
        let dir = tempfile::tempdir().unwrap();
        let pixels: Vec<u8> = (0..20 * 28 * 28).map(|i| (i % 256) as u8).collect();
        let ys: Vec<u8> = (0..20).map(|i| i % 10).collect();
        let i = dir.path().join("images.idx");
        let l = dir.path().join("labels.idx");
        std::fs::write(&i, encode_images(28, 28, &pixels)).unwrap();
        std::fs::write(&l, encode_labels(&ys)).unwrap();
        _tmp = dir;
        (i, l)
    };
    match load_idx(&images, &labels) {
        Ok(d) => {
            let mut counts = [0usize; 256];
            for &y in &d.labels {
                counts[y as usize] += 1;
            }
            println!("{} items of {}x{}, {} classes", d.len(), d.rows, d.cols, d.num_classes());
            println!("label counts: {:?}", &counts[..d.num_classes()]);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
