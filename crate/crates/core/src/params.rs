//! Hyperparameters, solver modes, and their defaults.
//!
//! All tolerances and default values used by the solver live here as named
//! constants so that tests, the CLI, and documentation agree on a single
//! source of truth.

use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};

/// Default exponent on the view weights.
pub const DEFAULT_P: f64 = 5.0;
/// Default manifold regularization strength.
pub const DEFAULT_BETA: f64 = 0.01;
/// Default neighbor count for the Gaussian kNN graph.
pub const DEFAULT_KNN: usize = 5;
/// Default Gaussian kernel bandwidth (squared).
pub const DEFAULT_SIGMA_SQ: f64 = 1.0;
/// Default convergence threshold on the absolute objective decrease.
pub const DEFAULT_CONV_THRESHOLD: f64 = 9e-8;
/// Default additive guard applied to every multiplicative-update denominator.
pub const DEFAULT_DENOM_GUARD: f64 = 1e-12;
/// Default cap on per-view inner iterations within one outer iteration.
pub const DEFAULT_INNER_MAX: usize = 10;
/// Default cap on outer iterations.
pub const DEFAULT_OUTER_MAX: usize = 200;
/// Lower edge of the strictly positive initialization interval (floor, 1].
pub const INIT_FLOOR: f64 = 1e-6;
/// Fixed per-view weight used by the MultiNMF2 ablation mode.
pub const MULTINMF2_ALPHA: f64 = 0.01;

/// Which quantities the solver learns versus holds fixed.
///
/// The full model learns both weight families; the remaining modes are the
/// ablations used for comparison studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMode {
    /// Learn view weights α and observation weights W; manifold term active.
    #[serde(rename = "wm-nmf")]
    WmNmf,
    /// Learn α, hold W at its initial value; manifold term active.
    #[serde(rename = "nmf-w1")]
    NmfW1,
    /// Learn α, hold W fixed, disable the manifold term (β = 0).
    #[serde(rename = "nmf-w2")]
    NmfW2,
    /// Hold α = 1/n_v and W fixed, β = 0.
    #[serde(rename = "multinmf1")]
    MultiNmf1,
    /// Hold α_s = 0.01 for every view and W fixed, β = 0. The fixed α is
    /// deliberately off the simplex, so the simplex invariant is suspended.
    #[serde(rename = "multinmf2")]
    MultiNmf2,
}

impl SolverMode {
    /// Whether this mode updates α each outer iteration.
    pub fn learns_alpha(self) -> bool {
        matches!(self, SolverMode::WmNmf | SolverMode::NmfW1 | SolverMode::NmfW2)
    }

    /// Whether this mode updates W each outer iteration.
    pub fn learns_w(self) -> bool {
        matches!(self, SolverMode::WmNmf)
    }

    /// Whether the manifold (graph Laplacian) term is active.
    pub fn uses_manifold(self) -> bool {
        matches!(self, SolverMode::WmNmf | SolverMode::NmfW1)
    }

    /// The fixed per-view weight this mode pins α to, if any.
    pub fn pinned_alpha(self, n_views: usize) -> Option<f64> {
        match self {
            SolverMode::MultiNmf1 => Some(1.0 / n_views as f64),
            SolverMode::MultiNmf2 => Some(MULTINMF2_ALPHA),
            _ => None,
        }
    }

    /// Whether α is constrained to the probability simplex in this mode.
    pub fn alpha_on_simplex(self) -> bool {
        !matches!(self, SolverMode::MultiNmf2)
    }

    /// All modes, in a fixed order (useful for sweeps).
    pub const ALL: [SolverMode; 5] = [
        SolverMode::WmNmf,
        SolverMode::NmfW1,
        SolverMode::NmfW2,
        SolverMode::MultiNmf1,
        SolverMode::MultiNmf2,
    ];
}

impl std::fmt::Display for SolverMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SolverMode::WmNmf => "wm-nmf",
            SolverMode::NmfW1 => "nmf-w1",
            SolverMode::NmfW2 => "nmf-w2",
            SolverMode::MultiNmf1 => "multinmf1",
            SolverMode::MultiNmf2 => "multinmf2",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wm-nmf" => Ok(SolverMode::WmNmf),
            "nmf-w1" => Ok(SolverMode::NmfW1),
            "nmf-w2" => Ok(SolverMode::NmfW2),
            "multinmf1" => Ok(SolverMode::MultiNmf1),
            "multinmf2" => Ok(SolverMode::MultiNmf2),
            other => Err(Error::InvalidHyperParam {
                reason: format!(
                    "unknown mode `{other}` (expected wm-nmf, nmf-w1, nmf-w2, multinmf1, or multinmf2)"
                ),
            }),
        }
    }
}

fn default_p() -> f64 {
    DEFAULT_P
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_knn() -> usize {
    DEFAULT_KNN
}
fn default_sigma_sq() -> f64 {
    DEFAULT_SIGMA_SQ
}
fn default_conv_threshold() -> f64 {
    DEFAULT_CONV_THRESHOLD
}
fn default_denom_guard() -> f64 {
    DEFAULT_DENOM_GUARD
}
fn default_inner_max() -> usize {
    DEFAULT_INNER_MAX
}
fn default_outer_max() -> usize {
    DEFAULT_OUTER_MAX
}
fn default_mode() -> SolverMode {
    SolverMode::WmNmf
}

/// Full configuration of one solver run.
///
/// Serializes to/from JSON; a serialized configuration fed back into the
/// solver reproduces the run exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Factorization rank K (number of clusters sought).
    pub k: usize,
    /// Exponent p ≥ 1 on the view weights.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Manifold regularization strength β ≥ 0.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Neighbor count for the per-view similarity graphs.
    #[serde(default = "default_knn")]
    pub knn: usize,
    /// Squared bandwidth of the Gaussian kernel.
    #[serde(default = "default_sigma_sq")]
    pub sigma_sq: f64,
    /// Cap on per-view inner iterations per outer iteration.
    #[serde(default = "default_inner_max")]
    pub inner_max: usize,
    /// Cap on outer iterations. Zero returns the initial state untouched.
    #[serde(default = "default_outer_max")]
    pub outer_max: usize,
    /// Convergence threshold on the absolute objective decrease, used for
    /// both the inner (per-view) and outer loops.
    #[serde(default = "default_conv_threshold")]
    pub conv_threshold: f64,
    /// Additive guard on multiplicative-update denominators.
    #[serde(default = "default_denom_guard")]
    pub denom_guard: f64,
    /// Which quantities are learned versus held fixed.
    #[serde(default = "default_mode")]
    pub mode: SolverMode,
    /// Override for the fixed view weights in fixed-α modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_alpha: Option<Vec<f64>>,
    /// Override for the initial observation weights (N rows × n_v columns).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_w: Option<Vec<Vec<f64>>>,
    /// RNG seed controlling initialization (and any seeded downstream step).
    #[serde(default)]
    pub seed: u64,
}

impl HyperParams {
    /// A configuration with rank `k` and every other field at its default.
    pub fn with_rank(k: usize) -> Self {
        HyperParams {
            k,
            p: DEFAULT_P,
            beta: DEFAULT_BETA,
            knn: DEFAULT_KNN,
            sigma_sq: DEFAULT_SIGMA_SQ,
            inner_max: DEFAULT_INNER_MAX,
            outer_max: DEFAULT_OUTER_MAX,
            conv_threshold: DEFAULT_CONV_THRESHOLD,
            denom_guard: DEFAULT_DENOM_GUARD,
            mode: SolverMode::WmNmf,
            fixed_alpha: None,
            fixed_w: None,
            seed: 0,
        }
    }

    /// Checks the dataset-independent parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidHyperParam { reason });
        if self.k == 0 {
            return fail("rank k must be at least 1".to_string());
        }
        if !self.p.is_finite() || self.p < 1.0 {
            return fail(format!("exponent p must be finite and ≥ 1, found {}", self.p));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return fail(format!("beta must be finite and ≥ 0, found {}", self.beta));
        }
        if self.knn == 0 {
            return fail("knn must be at least 1".to_string());
        }
        if !self.sigma_sq.is_finite() || self.sigma_sq <= 0.0 {
            return fail(format!("sigma_sq must be finite and > 0, found {}", self.sigma_sq));
        }
        if self.inner_max == 0 {
            return fail("inner_max must be at least 1".to_string());
        }
        if !self.conv_threshold.is_finite() || self.conv_threshold <= 0.0 {
            return fail(format!(
                "conv_threshold must be finite and > 0, found {}",
                self.conv_threshold
            ));
        }
        if !self.denom_guard.is_finite() || self.denom_guard <= 0.0 {
            return fail(format!(
                "denom_guard must be finite and > 0, found {}",
                self.denom_guard
            ));
        }
        Ok(())
    }

    /// Checks ranges plus compatibility with a concrete dataset.
    pub fn validate_for(&self, ds: &MultiViewDataset) -> Result<()> {
        self.validate()?;
        let limit = ds
            .view_dims()
            .iter()
            .map(|&(rows, cols)| rows.min(cols))
            .min()
            .expect("dataset has at least one view");
        if self.k >= limit {
            return Err(Error::RankTooLarge { k: self.k, limit });
        }
        if let Some(alpha) = &self.fixed_alpha {
            if alpha.len() != ds.n_views() {
                return Err(Error::InvalidHyperParam {
                    reason: format!(
                        "fixed_alpha has {} entries but the dataset has {} views",
                        alpha.len(),
                        ds.n_views()
                    ),
                });
            }
            if alpha.iter().any(|&a| !a.is_finite() || a < 0.0) {
                return Err(Error::InvalidHyperParam {
                    reason: "fixed_alpha entries must be finite and ≥ 0".to_string(),
                });
            }
        }
        if let Some(w) = &self.fixed_w {
            if w.len() != ds.n_obs() || w.iter().any(|row| row.len() != ds.n_views()) {
                return Err(Error::InvalidHyperParam {
                    reason: format!(
                        "fixed_w must be {} rows of {} entries",
                        ds.n_obs(),
                        ds.n_views()
                    ),
                });
            }
            for row in w {
                if row.iter().any(|&x| !x.is_finite() || x < 0.0) {
                    return Err(Error::InvalidHyperParam {
                        reason: "fixed_w entries must be finite and ≥ 0".to_string(),
                    });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidHyperParam {
                        reason: format!("fixed_w rows must sum to 1, found {sum}"),
                    });
                }
            }
        }
        Ok(())
    }
}
