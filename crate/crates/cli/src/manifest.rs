use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stratify_core::datasets::GeneratorSpec;
use stratify_core::DetectorConfig;

use crate::args::Command;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Ok(FileDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub boundary: usize,
    pub manifold: usize,
    pub intersection: usize,
}

impl From<[usize; 3]> for ClassCounts {
    fn from([boundary, manifold, intersection]: [usize; 3]) -> Self {
        ClassCounts {
            boundary,
            manifold,
            intersection,
        }
    }
}

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The command with all defaults resolved; replay runs exactly this.
    pub invocation: Command,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<GeneratorSpec>,
    /// Detector settings after validation, so swapped radii show here.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detector: Option<DetectorConfig>,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    /// Output files other than the manifest itself.
    pub outputs: Vec<FileDigest>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class_counts: Option<ClassCounts>,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Integrity(format!("{}: not a run manifest: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises") + "\n";
        stratify_core::io::write_text(path, &text).map_err(CliError::from)
    }
}
