use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{parse_config, RunConfig};
use super::experiment::run_experiment;
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct SweepEntry {
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub result: Result<()>,
}

/// All `*.toml` files directly under `dir`, sorted by name.
pub fn list_configs(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Runs every config in `dir` in parallel. Each run writes into
/// `<out>/<config stem>`, or into its own `output_dir` when `out` is `None`.
/// One failing config does not stop the others.
pub fn sweep(dir: impl AsRef<Path>, out: Option<&Path>, seed: Option<u64>) -> Result<Vec<SweepEntry>> {
    let configs = list_configs(dir)?;
    Ok(configs
        .into_par_iter()
        .map(|path| {
            let stem = path.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
            let mut output_dir = PathBuf::new();
            let result = (|| {
                let mut config: RunConfig = parse_config(&path)?;
                if let Some(seed) = seed {
                    config.master_seed = seed;
                }
                output_dir = match out {
                    Some(o) => o.join(&stem),
                    None => config.output_dir.join(&stem),
                };
                config.output_dir = output_dir.clone();
                run_experiment(&config)?.write_to(&output_dir)?;
                Ok(())
            })();
            SweepEntry {
                config_path: path,
                output_dir,
                result,
            }
        })
        .collect())
}
