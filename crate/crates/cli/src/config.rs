//! Run configuration. Precedence: command-line flags, then the JSON config
//! file, then built-in defaults. `KOLOCAL_OUT_DIR` overrides the output
//! directory from every other source.

use std::path::{Path, PathBuf};

use kolocal_core::witten::EigenOptions;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::Failure;

pub const OUT_DIR_ENV: &str = "KOLOCAL_OUT_DIR";
pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Eigensolver tolerance overrides.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceFile {
    pub tol: Option<f64>,
    pub dense_limit: Option<usize>,
    pub degree: Option<usize>,
    pub max_iter: Option<usize>,
    pub guard: Option<usize>,
}

/// Grid defaults for the lattice commands.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub n: Option<usize>,
    pub m: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "N")]
    pub points: Option<usize>,
    pub lambda: Option<f64>,
}

/// Contents of a `--config` JSON file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: ToleranceFile,
    #[serde(default)]
    pub grid: GridFile,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))
    }
}

/// Resolved configuration for one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub out_dir: PathBuf,
    pub eigen: EigenOptions,
    pub grid: GridFile,
}

/// Global flags as parsed from the command line.
#[derive(Clone, Debug, Default)]
pub struct GlobalFlags {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub tol: Option<f64>,
    pub dense_limit: Option<usize>,
}

impl RunConfig {
    pub fn resolve(flags: &GlobalFlags, env_out: Option<PathBuf>) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let t = &file.tolerances;
        let d = EigenOptions::default();
        let eigen = EigenOptions {
            tol: flags.tol.or(t.tol).unwrap_or(d.tol),
            dense_limit: flags.dense_limit.or(t.dense_limit).unwrap_or(d.dense_limit),
            degree: t.degree.unwrap_or(d.degree),
            max_iter: t.max_iter.unwrap_or(d.max_iter),
            guard: t.guard.unwrap_or(d.guard),
            seed,
        };
        if !(eigen.tol > 0.0) || eigen.degree == 0 || eigen.max_iter == 0 {
            return Err(Failure::usage("tolerances must be positive"));
        }
        let out_dir = env_out
            .or_else(|| flags.out_dir.clone())
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from("kolocal-out"));
        Ok(RunConfig { seed, format: flags.format.or(file.format).unwrap_or_default(), out_dir, eigen, grid: file.grid })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "format": self.format,
            "out_dir": self.out_dir.display().to_string(),
            "eigen": {
                "tol": self.eigen.tol,
                "dense_limit": self.eigen.dense_limit,
                "degree": self.eigen.degree,
                "max_iter": self.eigen.max_iter,
                "guard": self.eigen.guard,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = std::env::temp_dir().join(format!("kolocal-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"seed": 5, "format": "text", "tolerances": {"tol": 1e-8}, "grid": {"N": 301}}"#).unwrap();
        let flags = GlobalFlags { seed: Some(9), config: Some(path.clone()), ..Default::default() };
        let c = RunConfig::resolve(&flags, None).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.format, Format::Text);
        assert_eq!(c.eigen.tol, 1e-8);
        assert_eq!(c.eigen.seed, 9);
        assert_eq!(c.grid.points, Some(301));
        assert_eq!(c.eigen.dense_limit, EigenOptions::default().dense_limit);
        let c = RunConfig::resolve(&GlobalFlags::default(), Some("envdir".into())).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.out_dir, PathBuf::from("envdir"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = std::env::temp_dir().join(format!("kolocal-config-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"sead": 5}"#).unwrap();
        let flags = GlobalFlags { config: Some(path), ..Default::default() };
        assert_eq!(RunConfig::resolve(&flags, None).unwrap_err().code, 2);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn nonpositive_tolerance_is_rejected() {
        let flags = GlobalFlags { tol: Some(0.0), ..Default::default() };
        assert!(RunConfig::resolve(&flags, None).is_err());
    }
}
