//! Random-forest engine for studying the bias of impurity-based feature
//! importance.
//!
//! The crate grows CART trees on bootstrap or subsample draws, keeps the
//! in-bag/out-of-bag bookkeeping for every tree, and evaluates a family of
//! importance estimators on the trained forest:
//!
//! * classic mean decrease impurity (MDI),
//! * the covariance form of MDI built from per-feature path contributions,
//! * MDI-oob, the covariance form evaluated on out-of-bag rows,
//! * naive-oob, impurity decreases recomputed from out-of-bag rows,
//! * permutation importance (MDA) and split counts.
//!
//! On top of the estimators sit the synthetic generators, the leaf-size and
//! depth sweeps that measure the noise mass `G0`, and the replicated AUC
//! experiment runner.

pub mod data;
pub mod error;
pub mod eval;
pub mod forest;
pub mod importance;
pub mod rng;
pub mod tree;

pub use data::{Dataset, FeatureKind, Response, SampleSplit, Sampling, Task};
pub use error::{Error, Result};
pub use forest::{Forest, ForestParams};
pub use importance::{ImportanceVector, Method};
pub use rng::Rng;
pub use tree::{TieBreak, Tree, TreeParams};
