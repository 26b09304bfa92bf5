//! Learning by projected gradient descent with Gibbs-estimated gradients,
//! and the planners that choose `(K, M, v)`.

pub mod plan;
mod trace;
mod train;

pub use plan::{
    compare_c_conventions, convex_schedule_value, derive_constants, plan_convex,
    plan_convex_objective, plan_strongly_convex, strongly_convex_chain_length,
    work_lower_bound_convex, work_lower_bound_strongly_convex, Betas, ConventionComparison, Mode,
    ModelQuantities, ProblemConstants, RawSchedule, RunLengths, Schedule,
};
pub use trace::{IterationRecord, TrainingTrace};
pub use train::{
    approximate_gradient, batch_mean, gradient_error_sum, pgd_step, train, GradientSource,
    Instrumentation, TrainConfig,
};
