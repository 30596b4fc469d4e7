//! Rough-mereological decision prediction for open-world decision systems.
//!
//! The crate is layered bottom-up:
//!
//! - [`data_model`]: decision tables, indiscernibility classes, consistency.
//! - [`mereology`]: the finite-set model of mereology, the weighted Tarski
//!   algebra and rough inclusion degrees, all in exact rational arithmetic.
//! - [`laws`]: the executable law suite over a weighted universe.
//! - [`tnorm`]: the t-norm contract and the Łukasiewicz operator family.
//! - [`syllogistic`]: premisses, moods and their semantic validity in
//!   Euler-cell models.
//! - [`vc`]: touching sets, ε-component families and exact VC-dimension.
//! - [`predictor`]: per-object forecasts, rewards, winners and regret.
//! - [`mistakes`]: mistake accounting and the radius-shrinking localization.
//! - [`session`]: the leave-one-out harness and session reports.

pub mod data_model;
pub mod error;
pub mod laws;
pub mod mereology;
pub mod mistakes;
pub mod predictor;
pub mod session;
pub mod syllogistic;
pub mod tnorm;
pub mod vc;

pub use data_model::{DecisionSystem, Descriptor, NewObject, ObjectId};
pub use error::{Error, ErrorKind, Result};
pub use predictor::{PredictionConfig, TieStrategy, TrialResult};
pub use vc::{Epsilon, Mode};
