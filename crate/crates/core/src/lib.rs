//! Weighted multi-view nonnegative matrix factorization (WM-NMF).
//!
//! This crate factorizes several nonnegative views of the same observations
//! into per-view basis/coefficient pairs tied together by a shared
//! consensus matrix. Two sets of learned weights make the integration
//! robust: per-view weights α (closed form, with an exponent p that
//! controls their sparsity) downweight views that disagree with the
//! consensus, and per-observation weights W downweight corrupted
//! observations inside each view. A graph-Laplacian penalty keeps the
//! per-view embeddings faithful to the local geometry of the data.
//!
//! The pieces are exposed as composable modules:
//!
//! - [`dataset`]: multi-view container, normalization, CSV interchange;
//! - [`params`]: hyper-parameters and solver modes (including reduced
//!   baselines that pin α, W, or the manifold term);
//! - [`graph`]: kNN Gaussian similarity graphs and Laplacians;
//! - [`updates`]: the multiplicative update rules, closed-form weight and
//!   consensus solvers, and the objective evaluators;
//! - [`solver`]: the alternating optimization loop with convergence
//!   tracking, a monotonicity auditor, and a scaling benchmark;
//! - [`clustering`]: consensus-based label extraction (argmax, spectral)
//!   and six agreement metrics against reference labels;
//! - [`synth`]: seeded synthetic multi-view benchmark generators;
//! - [`theory`]: generalization-bound calculators plus perturbation and
//!   sparsity probes.
//!
//! Everything is deterministic per seed and single-threaded; fitting twice
//! with the same inputs reproduces results bitwise.
//!
//! ```
//! use wmnmf::params::HyperParams;
//! use wmnmf::solver::fit;
//! use wmnmf::synth::{generate, SynthSpec, ViewSpec, NegativePolicy};
//!
//! let spec = SynthSpec {
//!     n_obs: 60,
//!     n_clusters: 3,
//!     views: vec![ViewSpec::fresh(8, 10.0), ViewSpec::fresh(6, 20.0)],
//!     seed: 7,
//!     negatives: NegativePolicy::Clip,
//! };
//! let ds = generate(&spec).unwrap();
//! let mut hp = HyperParams::with_rank(3);
//! hp.outer_max = 10;
//! let run = fit(&ds, &hp).unwrap();
//! assert_eq!(run.final_state.consensus.dim(), (60, 3));
//! ```

pub mod clustering;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod params;
pub mod solver;
pub mod state;
pub mod synth;
pub mod theory;
pub mod updates;

pub use clustering::{argmax_assign, kmeans, score, spectral_assign, ClusteringReport};
pub use dataset::MultiViewDataset;
pub use error::{Error, Result};
pub use matrix::NonnegMatrix;
pub use params::{HyperParams, SolverMode};
pub use solver::{audit_monotonicity, fit, fit_observed, SolverRun};
pub use state::FactorizationState;
pub use synth::{generate, SynthSpec};
pub use theory::{dim_dependent_bound, dim_independent_bound, BoundInputs};
pub use updates::ObjectiveBreakdown;
