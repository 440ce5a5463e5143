//! Synthetic multi-view data generation.
//!
//! Each view draws cluster means entrywise from a two-stage scheme (a
//! uniform location followed by unit-variance Gaussian jitter) and covers
//! each cluster with a Toeplitz-correlated Gaussian: a per-cluster base
//! `b ~ U[0.1, 1)` gives `Σ_ij = var_scale · b^{|i−j|}`. Views can also be
//! copies of an earlier view, and any view may corrupt a prefix or suffix
//! of its observations with additive or replacement Gaussian noise — the
//! ingredients for benchmark datasets with redundant and unreliable views.
//!
//! Generation is deterministic per seed: the draw order is labels first,
//! then per view (in order) the cluster means and covariances, then one
//! noise vector per observation, then corruption noise. Copied views
//! consume no randomness beyond their corruption.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::matrix::symmetric_eigen_ascending;

/// Eigenvalue floor when taking the covariance square root, so numerically
/// indefinite Toeplitz matrices stay usable.
pub const COVARIANCE_EIGEN_FLOOR: f64 = 1e-8;

/// Half-width of the uniform interval for the per-entry mean location.
pub const MEAN_SPREAD: f64 = 10.0;

/// How to handle negative entries produced by noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativePolicy {
    /// Clamp negative entries to zero (default).
    Clip,
    /// Shift the whole view up by the magnitude of its minimum entry,
    /// preserving pairwise distances.
    MinShift,
}

impl Default for NegativePolicy {
    fn default() -> Self {
        NegativePolicy::Clip
    }
}

/// Where a view's clean data comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViewSource {
    /// Draw fresh data from the cluster model.
    Fresh,
    /// Duplicate the clean (pre-corruption) data of an earlier view.
    CopyOf(usize),
}

impl Default for ViewSource {
    fn default() -> Self {
        ViewSource::Fresh
    }
}

/// Which observations a corruption touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservationRange {
    /// The first `k` observation columns.
    First(usize),
    /// The last `k` observation columns.
    Last(usize),
}

impl ObservationRange {
    /// Number of observations covered.
    pub fn len(&self) -> usize {
        match *self {
            ObservationRange::First(k) | ObservationRange::Last(k) => k,
        }
    }

    /// True when the range covers no observations.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column indices covered, given `n_obs` total observations.
    pub fn indices(&self, n_obs: usize) -> std::ops::Range<usize> {
        match *self {
            ObservationRange::First(k) => 0..k.min(n_obs),
            ObservationRange::Last(k) => n_obs.saturating_sub(k)..n_obs,
        }
    }
}

/// How corruption noise combines with the clean entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionMode {
    /// Add the noise draw to the entry.
    Additive,
    /// Replace the entry with the noise draw.
    Replace,
}

/// Gaussian corruption applied to part of a view.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    /// Additive or replacement noise.
    pub mode: CorruptionMode,
    /// Mean of the noise distribution.
    pub mean: f64,
    /// Standard deviation of the noise distribution.
    pub sd: f64,
    /// Which observations are corrupted.
    pub range: ObservationRange,
}

/// Specification of one view.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViewSpec {
    /// Number of features (rows) in the view.
    pub n_features: usize,
    /// Lower end `a` of the U[a, a+10) interval for per-entry mean
    /// locations. Ignored for copied views.
    pub mean_low: f64,
    /// Multiplier on the Toeplitz covariance (1 = unit-scale noise).
    /// Ignored for copied views.
    #[serde(default = "default_var_scale")]
    pub var_scale: f64,
    /// Fresh draw or copy of an earlier view.
    #[serde(default)]
    pub source: ViewSource,
    /// Optional corruption applied after the clean data is produced.
    #[serde(default)]
    pub corruption: Option<CorruptionSpec>,
}

fn default_var_scale() -> f64 {
    1.0
}

impl ViewSpec {
    /// A fresh view with unit covariance scale and no corruption.
    pub fn fresh(n_features: usize, mean_low: f64) -> Self {
        ViewSpec {
            n_features,
            mean_low,
            var_scale: 1.0,
            source: ViewSource::Fresh,
            corruption: None,
        }
    }

    /// A copy of view `source` (0-based index into the spec's view list).
    pub fn copy_of(source: usize, n_features: usize) -> Self {
        ViewSpec {
            n_features,
            mean_low: 0.0,
            var_scale: 1.0,
            source: ViewSource::CopyOf(source),
            corruption: None,
        }
    }

    /// Attaches a corruption spec.
    pub fn corrupted(mut self, corruption: CorruptionSpec) -> Self {
        self.corruption = Some(corruption);
        self
    }

    /// Sets the covariance scale.
    pub fn with_var_scale(mut self, var_scale: f64) -> Self {
        self.var_scale = var_scale;
        self
    }
}

/// Full specification of a synthetic multi-view dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Number of observations N.
    pub n_obs: usize,
    /// Number of ground-truth clusters K.
    pub n_clusters: usize,
    /// Per-view specifications, in generation order.
    pub views: Vec<ViewSpec>,
    /// RNG seed; equal specs with equal seeds reproduce bitwise.
    pub seed: u64,
    /// Negative-entry policy applied after corruption.
    #[serde(default)]
    pub negatives: NegativePolicy,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n_clusters == 0 {
            return Err(Error::InvalidSpec { reason: "n_clusters must be at least 1".to_string() });
        }
        if self.n_obs < self.n_clusters {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "{} observations cannot cover {} clusters",
                    self.n_obs, self.n_clusters
                ),
            });
        }
        if self.views.is_empty() {
            return Err(Error::InvalidSpec { reason: "at least one view is required".to_string() });
        }
        for (s, view) in self.views.iter().enumerate() {
            if view.n_features == 0 {
                return Err(Error::InvalidSpec {
                    reason: format!("view {s} has zero features"),
                });
            }
            if !view.mean_low.is_finite() {
                return Err(Error::InvalidSpec {
                    reason: format!("view {s} has non-finite mean_low"),
                });
            }
            if !(view.var_scale.is_finite() && view.var_scale > 0.0) {
                return Err(Error::InvalidSpec {
                    reason: format!("view {s} has non-positive var_scale"),
                });
            }
            if let ViewSource::CopyOf(source) = view.source {
                if source >= s {
                    return Err(Error::InvalidSpec {
                        reason: format!("view {s} copies view {source}, which does not precede it"),
                    });
                }
                if self.views[source].n_features != view.n_features {
                    return Err(Error::InvalidSpec {
                        reason: format!(
                            "view {s} copies view {source} but declares {} features instead of {}",
                            view.n_features, self.views[source].n_features
                        ),
                    });
                }
            }
            if let Some(corruption) = &view.corruption {
                if !(corruption.sd.is_finite() && corruption.sd >= 0.0) {
                    return Err(Error::InvalidSpec {
                        reason: format!("view {s} corruption has invalid sd {}", corruption.sd),
                    });
                }
                if !corruption.mean.is_finite() {
                    return Err(Error::InvalidSpec {
                        reason: format!("view {s} corruption has non-finite mean"),
                    });
                }
                if corruption.range.len() > self.n_obs {
                    return Err(Error::InvalidSpec {
                        reason: format!(
                            "view {s} corruption covers {} observations but only {} exist",
                            corruption.range.len(),
                            self.n_obs
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Balanced ground-truth labels: cluster sizes differ by at most one, and
/// the assignment order is a seeded shuffle.
fn balanced_labels(n_obs: usize, n_clusters: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let base = n_obs / n_clusters;
    let extra = n_obs % n_clusters;
    let mut labels = Vec::with_capacity(n_obs);
    for cluster in 0..n_clusters {
        let size = base + usize::from(cluster < extra);
        labels.extend(std::iter::repeat(cluster).take(size));
    }
    labels.shuffle(rng);
    labels
}

/// Symmetric square root with an eigenvalue floor.
fn covariance_sqrt(sigma: &Array2<f64>) -> Result<Array2<f64>> {
    let (values, vectors) = symmetric_eigen_ascending(sigma)?;
    let sqrt_values = values.mapv(|v| v.max(COVARIANCE_EIGEN_FLOOR).sqrt());
    // E · diag(√λ) · Eᵀ, with the diagonal folded into the left factor.
    let scaled = &vectors * &sqrt_values;
    Ok(scaled.dot(&vectors.t()))
}

/// Applies Gaussian corruption to a copy of `view` (features × observations),
/// clipping the result to nonnegative values.
///
/// Noise is drawn feature-by-feature for each covered observation in
/// ascending column order, deterministically per seed. Inside [`generate`]
/// the negative-entry policy is applied instead, so corruption and the
/// clip/shift decision stay separable there.
pub fn corrupt(
    view: &Array2<f64>,
    range: ObservationRange,
    mean: f64,
    sd: f64,
    mode: CorruptionMode,
    seed: u64,
) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corrupted = view.clone();
    corrupt_in_place(&mut corrupted, &CorruptionSpec { mode, mean, sd, range }, &mut rng);
    apply_negative_policy(&mut corrupted, NegativePolicy::Clip);
    corrupted
}

fn corrupt_in_place(view: &mut Array2<f64>, spec: &CorruptionSpec, rng: &mut ChaCha8Rng) {
    let n_obs = view.ncols();
    let n_features = view.nrows();
    for col in spec.range.indices(n_obs) {
        for row in 0..n_features {
            let z: f64 = rng.sample(StandardNormal);
            let noise = spec.mean + spec.sd * z;
            view[[row, col]] = match spec.mode {
                CorruptionMode::Additive => view[[row, col]] + noise,
                CorruptionMode::Replace => noise,
            };
        }
    }
}

fn apply_negative_policy(view: &mut Array2<f64>, policy: NegativePolicy) {
    match policy {
        NegativePolicy::Clip => view.mapv_inplace(|v| v.max(0.0)),
        NegativePolicy::MinShift => {
            let min = view.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                view.mapv_inplace(|v| v - min);
            }
        }
    }
}

/// Generates a labeled multi-view dataset from a spec.
///
/// Views come out as features × observations with shared column order, and
/// the returned dataset carries the balanced ground-truth labels.
pub fn generate(spec: &SynthSpec) -> Result<MultiViewDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels = balanced_labels(spec.n_obs, spec.n_clusters, &mut rng);

    // Clean (pre-corruption) matrices, kept so copies share the source's
    // uncorrupted data.
    let mut clean: Vec<Array2<f64>> = Vec::with_capacity(spec.views.len());
    let mut views: Vec<Array2<f64>> = Vec::with_capacity(spec.views.len());

    for view_spec in &spec.views {
        let m = view_spec.n_features;
        let mut matrix = match view_spec.source {
            ViewSource::CopyOf(source) => clean[source].clone(),
            ViewSource::Fresh => {
                // Per-cluster means and covariance square roots.
                let mut means: Vec<Array1<f64>> = Vec::with_capacity(spec.n_clusters);
                let mut roots: Vec<Array2<f64>> = Vec::with_capacity(spec.n_clusters);
                for _ in 0..spec.n_clusters {
                    let mean = Array1::from_shape_fn(m, |_| {
                        let location: f64 =
                            rng.random_range(view_spec.mean_low..view_spec.mean_low + MEAN_SPREAD);
                        let jitter: f64 = rng.sample(StandardNormal);
                        location + jitter
                    });
                    let base: f64 = rng.random_range(0.1..1.0);
                    let sigma = Array2::from_shape_fn((m, m), |(i, j)| {
                        view_spec.var_scale * base.powi((i as i64 - j as i64).unsigned_abs() as i32)
                    });
                    means.push(mean);
                    roots.push(covariance_sqrt(&sigma)?);
                }
                let mut matrix = Array2::zeros((m, spec.n_obs));
                let mut z = Array1::zeros(m);
                for (i, &cluster) in labels.iter().enumerate() {
                    for entry in z.iter_mut() {
                        *entry = rng.sample::<f64, _>(StandardNormal);
                    }
                    let column = &means[cluster] + &roots[cluster].dot(&z);
                    matrix.column_mut(i).assign(&column);
                }
                matrix
            }
        };
        clean.push(matrix.clone());
        if let Some(corruption) = &view_spec.corruption {
            corrupt_in_place(&mut matrix, corruption, &mut rng);
        }
        apply_negative_policy(&mut matrix, spec.negatives);
        views.push(matrix);
    }

    let names = (1..=views.len()).map(|s| format!("view{s}")).collect();
    Ok(MultiViewDataset::new(views, Some(labels))?.with_view_names(names))
}

/// Six-view benchmark: four informative fresh views plus two corrupted
/// copies (views 5 and 6 duplicate views 1 and 3, then overwrite a prefix
/// of observations with added noise of variance 5 and 10).
pub fn synth1(n_clusters: usize, seed: u64) -> SynthSpec {
    SynthSpec {
        n_obs: 5000,
        n_clusters,
        views: vec![
            ViewSpec::fresh(100, 10.0),
            ViewSpec::fresh(150, 20.0),
            ViewSpec::fresh(50, 30.0),
            ViewSpec::fresh(200, 40.0),
            ViewSpec::copy_of(0, 100).corrupted(CorruptionSpec {
                mode: CorruptionMode::Additive,
                mean: 0.0,
                sd: 5.0_f64.sqrt(),
                range: ObservationRange::First(300),
            }),
            ViewSpec::copy_of(2, 50).corrupted(CorruptionSpec {
                mode: CorruptionMode::Additive,
                mean: 0.0,
                sd: 10.0_f64.sqrt(),
                range: ObservationRange::First(1000),
            }),
        ],
        seed,
        negatives: NegativePolicy::Clip,
    }
}

/// Desk-scale variant of [`synth1`]: 800 observations with the corrupted
/// prefixes shrunk proportionally (48 and 160 observations).
pub fn synth1_desk(n_clusters: usize, seed: u64) -> SynthSpec {
    let mut spec = synth1(n_clusters, seed);
    spec.n_obs = 800;
    spec.views[4].corruption.as_mut().expect("view 5 is corrupted").range =
        ObservationRange::First(48);
    spec.views[5].corruption.as_mut().expect("view 6 is corrupted").range =
        ObservationRange::First(160);
    spec
}

/// Four-view, ten-cluster benchmark: view 2 has a 10× covariance scale and
/// view 4 adds mean-45 noise (variance 20) to the last quarter of
/// observations.
pub fn synth2(seed: u64) -> SynthSpec {
    SynthSpec {
        n_obs: 2000,
        n_clusters: 10,
        views: vec![
            ViewSpec::fresh(100, 10.0),
            ViewSpec::fresh(100, 20.0).with_var_scale(10.0),
            ViewSpec::fresh(100, 30.0),
            ViewSpec::fresh(100, 40.0).corrupted(CorruptionSpec {
                mode: CorruptionMode::Additive,
                mean: 45.0,
                sd: 20.0_f64.sqrt(),
                range: ObservationRange::Last(500),
            }),
        ],
        seed,
        negatives: NegativePolicy::Clip,
    }
}

/// Desk-scale variant of [`synth2`]: 800 observations with the corrupted
/// suffix shrunk proportionally (200 observations).
pub fn synth2_desk(seed: u64) -> SynthSpec {
    let mut spec = synth2(seed);
    spec.n_obs = 800;
    spec.views[3].corruption.as_mut().expect("view 4 is corrupted").range =
        ObservationRange::Last(200);
    spec
}

/// Looks up a preset spec by name.
///
/// Known names: `synth1`, `synth1-desk`, `synth2`, `synth2-desk`.
/// `n_clusters` overrides the preset's cluster count (defaults: 4 for the
/// synth1 family, 10 for synth2).
pub fn preset(name: &str, n_clusters: Option<usize>, seed: u64) -> Result<SynthSpec> {
    let spec = match name {
        "synth1" => synth1(n_clusters.unwrap_or(4), seed),
        "synth1-desk" => synth1_desk(n_clusters.unwrap_or(4), seed),
        "synth2" => {
            let mut spec = synth2(seed);
            if let Some(k) = n_clusters {
                spec.n_clusters = k;
            }
            spec
        }
        "synth2-desk" => {
            let mut spec = synth2_desk(seed);
            if let Some(k) = n_clusters {
                spec.n_clusters = k;
            }
            spec
        }
        other => {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "unknown preset '{other}' (expected synth1, synth1-desk, synth2, or synth2-desk)"
                ),
            })
        }
    };
    Ok(spec)
}
