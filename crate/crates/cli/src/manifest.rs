//! Dataset manifest: a small JSON file listing the per-view CSV files and an
//! optional label file. Relative paths are resolved against the manifest's
//! own directory so a dataset folder can be moved as a unit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wmnmf::dataset::{read_labels_csv, read_matrix_csv, MultiViewDataset};

use crate::{input_error, CliError};

fn default_delimiter() -> char {
    ','
}

fn default_rows_are_features() -> bool {
    true
}

/// On-disk description of a multi-view dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    /// One CSV file per view, in view order.
    pub views: Vec<PathBuf>,
    /// Optional ground-truth labels, one integer per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    /// Field separator used in every referenced CSV.
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// When true (the default) each CSV stores one feature per row and one
    /// observation per column; when false the orientation is transposed.
    #[serde(default = "default_rows_are_features")]
    pub rows_are_features: bool,
}

impl Manifest {
    /// Parses a manifest file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read manifest {}: {e}", path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| input_error(format!("malformed manifest {}: {e}", path.display())))?;
        if manifest.views.is_empty() {
            return Err(input_error(format!(
                "manifest {} lists no views",
                path.display()
            )));
        }
        Ok(manifest)
    }

    /// Resolves a referenced path against the manifest's directory.
    fn resolve(&self, manifest_path: &Path, file: &Path) -> PathBuf {
        if file.is_absolute() {
            file.to_path_buf()
        } else {
            manifest_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(file)
        }
    }

    /// Loads every view (and labels, when listed) into a dataset.
    pub fn load_dataset(&self, manifest_path: &Path) -> Result<MultiViewDataset, CliError> {
        let mut views = Vec::with_capacity(self.views.len());
        let mut names = Vec::with_capacity(self.views.len());
        for file in &self.views {
            let full = self.resolve(manifest_path, file);
            let mut matrix = read_matrix_csv(&full, self.delimiter)
                .map_err(|e| input_error(format!("view {}: {e}", full.display())))?;
            if !self.rows_are_features {
                matrix = matrix.t().to_owned();
            }
            views.push(matrix);
            names.push(file.display().to_string());
        }
        let labels = match &self.labels {
            Some(file) => {
                let full = self.resolve(manifest_path, file);
                Some(
                    read_labels_csv(&full)
                        .map_err(|e| input_error(format!("labels {}: {e}", full.display())))?,
                )
            }
            None => None,
        };
        MultiViewDataset::new(views, labels)
            .map(|ds| ds.with_view_names(names))
            .map_err(input_error)
    }

    /// Serializes the manifest to `path` as pretty JSON.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| input_error(format!("cannot serialize manifest: {e}")))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
    }
}
