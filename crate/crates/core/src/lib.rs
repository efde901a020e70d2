//! Decision-tree toolkit for student retention data.
//!
//! Implements three classifiers over a shared nominal/numeric dataset
//! model — ID3 (information gain), C4.5 (gain ratio, numeric thresholds,
//! missing values, pessimistic pruning) and the alternating decision tree
//! (boosted splitter nodes scored by summing every satisfied path) —
//! together with ARFF I/O, the Table-style student schema and encoders, a
//! reproducible synthetic cohort generator, stratified k-fold
//! cross-validation and JSON model persistence.

pub mod adtree;
pub mod arff;
pub mod c45;
pub mod dataset;
mod error;
pub mod eval;
pub mod id3;
pub mod model;
pub mod schema;
pub mod stats;
pub mod tree;

pub use dataset::{Attribute, AttributeKind, Cell, Dataset, Instance};
pub use error::{Error, Result};
pub use eval::{AlgoSpec, ConfusionMatrix, EvalReport};
pub use tree::{Prediction, TreeModel};
