//! Connectionist expert systems built from a deep model and a noise model.
//!
//! * [`scenario`] describes the problem and samples noisy training examples.
//! * [`pocket`] trains an integer winner-take-all learning matrix.
//! * [`engine`] runs consultations against that matrix.
//! * [`eval`] scores a matrix against its scenario.

pub mod engine;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod model;
pub mod pocket;
pub mod rng;
pub mod scenario;

pub use engine::{dominance_bound, Event, Justification, Literal, Rule, Session, Verdict};
pub use error::{Error, Result};
pub use eval::{baselines, clean_accuracy, evaluate, figure_of_merit, EvalReport};
pub use model::{Assignment, KnowledgeBase, TruthValue, VariableKind, VariableSpec};
pub use pocket::{train, PocketState, Trained, TrainerConfig};
pub use rng::Rng;
pub use scenario::{inject_noise, Example, NoiseModel, Scenario};
