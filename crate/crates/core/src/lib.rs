//! Counterfactual explanations for tabular black-box classifiers, searched by
//! an evolutionary algorithm under either Pareto or lexicographic selection.

pub mod bench;
pub mod data;
pub mod ea;
pub mod error;
pub mod model;
pub mod objectives;
pub mod selection;

pub use data::{Class, Dataset, FeatureKind, FeatureSchema, FeatureStats, Instance, Schema, Value};
pub use ea::{Candidate, EAConfig, EAResult, EaContext, Strategy};
pub use error::{Error, ErrorKind, Result};
pub use model::{Classifier, LearnerConfig, Model};
pub use objectives::{Objective, ObjectiveVector};
pub use selection::{ComparisonOutcome, LexParams, ObjectiveOrdering};
