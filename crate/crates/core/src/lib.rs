//! Maximum-likelihood learning of Ising models restricted to parameter
//! sets where Gibbs sampling mixes rapidly.
//!
//! * [`model`]: the exponential family, exact inference for small graphs.
//! * [`sampler`]: random-scan Gibbs chains and mixing-time certificates.
//! * [`projection`]: projection onto box and spectral-norm sets.
//! * [`learner`]: projected stochastic gradient descent and schedules.
//! * [`verifier`]: numerical checks of the theoretical guarantees.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod learner;
pub mod model;
pub mod projection;
pub mod sampler;
pub mod vecops;
pub mod verifier;

pub use error::{Error, Result};
pub use learner::{train, Mode, RunLengths, Schedule, TrainConfig, TrainingTrace};
pub use model::{Dataset, GraphTopology, IsingModel, Parameters, SpinConfiguration, StatVector};
pub use projection::{project, ConstraintSet};
pub use sampler::{ChainConfig, ChainInit, MixingCertificate};
