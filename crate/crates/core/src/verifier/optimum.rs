use crate::error::{invalid, Error, Result};
use crate::learner::pgd_step;
use crate::model::{
    exact_mean_stats, lipschitz_constant, stat_norm_bound, Dataset, IsingModel, Parameters,
    StatVector,
};
use crate::projection::ConstraintSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumOptions {
    pub tolerance: f64,
    /// Step size `1/L`; defaults to `4R₂² + λ`.
    pub lipschitz: Option<f64>,
    pub max_iterations: usize,
}

impl OptimumOptions {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            lipschitz: None,
            max_iterations: 200_000,
        }
    }
}

/// `argmin_{θ ∈ Θ} f(θ)` by projected gradient descent with exact
/// gradients and step `1/L`, stopped once `‖θ_k − θ_{k−1}‖₂ < tol`.
pub fn exact_optimum(
    model: &IsingModel,
    data: &Dataset,
    set: &ConstraintSet,
    lambda: f64,
    tol: f64,
) -> Result<Parameters> {
    exact_optimum_with(model, data, set, lambda, &OptimumOptions::new(tol))
}

pub fn exact_optimum_with(
    model: &IsingModel,
    data: &Dataset,
    set: &ConstraintSet,
    lambda: f64,
    opts: &OptimumOptions,
) -> Result<Parameters> {
    exact_optimum_for_mean(model, data.empirical_mean(), set, lambda, opts)
}

/// As [`exact_optimum_with`], for data summarized by its mean statistic.
pub fn exact_optimum_for_mean(
    model: &IsingModel,
    empirical_mean: &StatVector,
    set: &ConstraintSet,
    lambda: f64,
    opts: &OptimumOptions,
) -> Result<Parameters> {
    if empirical_mean.len() != model.dim() {
        return invalid("empirical mean does not match the model");
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!("λ = {lambda} must be finite and ≥ 0"));
    }
    if !(opts.tolerance > 0.0) {
        return invalid(format!("tolerance {} must be positive", opts.tolerance));
    }
    let lipschitz = opts
        .lipschitz
        .unwrap_or_else(|| lipschitz_constant(&stat_norm_bound(model), lambda));
    let mut theta = Parameters::zeros(model.dim());
    let mut step = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let mut g = exact_mean_stats(model, &theta)?.into_vec();
        for ((gi, ti), th) in g
            .iter_mut()
            .zip(empirical_mean.as_slice())
            .zip(theta.as_slice())
        {
            *gi += lambda * th - ti;
        }
        let next = pgd_step(model, &theta, &StatVector::from_vec(g), lipschitz, set)?;
        step = next.distance(&theta);
        theta = next;
        if !step.is_finite() {
            break;
        }
        if step < opts.tolerance {
            return Ok(theta);
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        residual: step,
    })
}
