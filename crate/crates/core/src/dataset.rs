//! Multi-view datasets: validation, normalization, and CSV interchange.
//!
//! A dataset is an ordered list of views. View `s` is an `M_s × N` matrix
//! whose columns are observations; every view describes the same `N`
//! observations through its own feature set. Optional integer labels support
//! evaluation against a known clustering.

use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;

/// Tolerance within which a normalized view's entry sum must equal 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// An immutable collection of nonnegative views over a shared observation set.
#[derive(Clone, Debug)]
pub struct MultiViewDataset {
    views: Vec<NonnegMatrix>,
    labels: Option<Vec<usize>>,
    view_names: Option<Vec<String>>,
}

impl MultiViewDataset {
    /// Validates raw matrices into a dataset.
    ///
    /// Checks that at least one view is present, every view is nonempty with
    /// finite nonnegative entries, all views share the same observation
    /// (column) count, and labels — when given — cover every observation.
    pub fn new(views: Vec<Array2<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::NoViews);
        }
        let mut wrapped = Vec::with_capacity(views.len());
        for (s, view) in views.into_iter().enumerate() {
            let (rows, cols) = view.dim();
            if rows == 0 || cols == 0 {
                return Err(Error::EmptyView { view: s, rows, cols });
            }
            wrapped.push(NonnegMatrix::new(view, &format!("view {s}"))?);
        }
        let n_obs = wrapped[0].dim().1;
        for (s, view) in wrapped.iter().enumerate().skip(1) {
            let found = view.dim().1;
            if found != n_obs {
                return Err(Error::ObservationCountMismatch { view: s, expected: n_obs, found });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n_obs {
                return Err(Error::LabelLengthMismatch {
                    labels: labels.len(),
                    observations: n_obs,
                });
            }
        }
        Ok(MultiViewDataset { views: wrapped, labels, view_names: None })
    }

    /// Attaches human-readable view names (for reports only).
    pub fn with_view_names(mut self, names: Vec<String>) -> Self {
        self.view_names = Some(names);
        self
    }

    /// Number of views `n_v`.
    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Number of observations `N` shared by all views.
    pub fn n_obs(&self) -> usize {
        self.views[0].dim().1
    }

    /// The `s`-th view as a plain array (`M_s × N`).
    pub fn view(&self, s: usize) -> &Array2<f64> {
        self.views[s].array()
    }

    /// All views in order.
    pub fn views(&self) -> impl Iterator<Item = &Array2<f64>> {
        self.views.iter().map(|v| v.array())
    }

    /// `(M_s, N)` for each view.
    pub fn view_dims(&self) -> Vec<(usize, usize)> {
        self.views.iter().map(|v| v.dim()).collect()
    }

    /// Ground-truth labels, if attached.
    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// View names, if attached.
    pub fn view_names(&self) -> Option<&[String]> {
        self.view_names.as_deref()
    }

    /// Returns a copy with each view rescaled so its entries sum to 1.
    ///
    /// Idempotent: normalizing an already normalized dataset changes nothing
    /// beyond [`NORMALIZATION_TOL`].
    pub fn normalized(&self) -> Result<Self> {
        let mut views = Vec::with_capacity(self.views.len());
        for (s, view) in self.views.iter().enumerate() {
            let sum = view.array().sum();
            if sum <= 0.0 {
                return Err(Error::ZeroSumView { view: s });
            }
            let scaled = view.array() / sum;
            views.push(NonnegMatrix::new(scaled, &format!("view {s}"))?);
        }
        Ok(MultiViewDataset {
            views,
            labels: self.labels.clone(),
            view_names: self.view_names.clone(),
        })
    }

    /// Stacks all views into a single `(Σ M_s) × N` view, keeping labels.
    ///
    /// This is the input to the concatenated k-means baseline.
    pub fn concatenated(&self) -> Result<Self> {
        let n = self.n_obs();
        let total_rows: usize = self.view_dims().iter().map(|&(m, _)| m).sum();
        let mut stacked = Array2::<f64>::zeros((total_rows, n));
        let mut offset = 0;
        for view in self.views() {
            let m = view.nrows();
            stacked.slice_mut(ndarray::s![offset..offset + m, ..]).assign(view);
            offset += m;
        }
        MultiViewDataset::new(vec![stacked], self.labels.clone())
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Reads a numeric matrix from a delimited text file.
///
/// Every line must contain the same number of fields; blank lines are
/// ignored. Returns the values laid out exactly as in the file (rows × cols).
pub fn read_matrix_csv(path: &Path, delimiter: char) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(delimiter) {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                reason: format!("`{}` is not a number", field.trim()),
            })?;
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    reason: format!("expected {w} fields, found {}", row.len()),
                });
            }
            _ => {}
        }
        rows.push(row);
    }
    let n_rows = rows.len();
    let n_cols = width.unwrap_or(0);
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 0,
            reason: "file contains no data".to_string(),
        });
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((n_rows, n_cols), flat).expect("row lengths were checked"))
}

/// Writes a numeric matrix as delimited text, one row per line.
///
/// Values are printed with Rust's shortest round-trip float formatting, so
/// reading the file back reproduces the matrix bitwise.
pub fn write_matrix_csv(path: &Path, matrix: &Array2<f64>, delimiter: char) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for row in matrix.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(&delimiter.to_string())).map_err(|e| io_error(path, e))?;
    }
    out.flush().map_err(|e| io_error(path, e))
}

/// Reads integer labels, one per line.
pub fn read_labels_csv(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let label: usize = line.trim().parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            reason: format!("`{}` is not a nonnegative integer label", line.trim()),
        })?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 0,
            reason: "file contains no labels".to_string(),
        });
    }
    Ok(labels)
}

/// Writes integer labels, one per line.
pub fn write_labels_csv(path: &Path, labels: &[usize]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for label in labels {
        writeln!(out, "{label}").map_err(|e| io_error(path, e))?;
    }
    out.flush().map_err(|e| io_error(path, e))
}
