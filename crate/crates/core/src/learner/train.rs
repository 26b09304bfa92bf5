//! Projected stochastic gradient descent with Gibbs-sampled gradients.

use serde::{Deserialize, Serialize};

use super::plan::RunLengths;
use super::trace::{IterationRecord, TrainingTrace};
use crate::error::{invalid, Error, Result};
use crate::model::{
    accumulate_stats, exact_gradient, expected_stats, negative_log_likelihood, Dataset, IsingModel,
    Parameters, SpinConfiguration, StatVector, ENUMERATION_LIMIT,
};
use crate::projection::{project, ConstraintSet};
use crate::sampler::{chain_distribution, draw_batch, ChainConfig, ChainInit, TRANSITION_LIMIT};

/// Where each iteration's gradient comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GradientSource {
    /// Batch of `M` Gibbs chains of length `v`.
    #[default]
    Sampled,
    /// Exact gradient by enumeration; `M` and `v` are ignored.
    Exact,
}

/// Extra per-iteration measurements taken with exact inference.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Instrumentation {
    /// Record `f(θ_k)` and `‖e_k‖` (needs enumeration).
    pub exact: bool,
    /// Record `‖d_k‖`, the batch mean's distance to `E_{q_k}[t]`, where
    /// `q_k = M_θ^v r` is computed exactly.
    pub chain_law: bool,
    /// Record `‖θ_k − θ*‖₂` against this reference.
    pub reference: Option<Parameters>,
}

impl Instrumentation {
    /// Everything the model size allows.
    pub fn auto(model: &IsingModel, reference: Option<Parameters>) -> Self {
        Self {
            exact: model.num_nodes() <= ENUMERATION_LIMIT,
            chain_law: false,
            reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lengths: RunLengths,
    pub lambda: f64,
    /// Step size is `1/L`.
    pub lipschitz: f64,
    pub set: ConstraintSet,
    pub init: ChainInit,
    pub seed: u64,
    pub theta0: Option<Parameters>,
    pub gradient: GradientSource,
    pub instrumentation: Instrumentation,
}

impl TrainConfig {
    pub fn new(
        lengths: RunLengths,
        lambda: f64,
        lipschitz: f64,
        set: ConstraintSet,
        seed: u64,
    ) -> Self {
        Self {
            lengths,
            lambda,
            lipschitz,
            set,
            init: ChainInit::Uniform,
            seed,
            theta0: None,
            gradient: GradientSource::Sampled,
            instrumentation: Instrumentation::default(),
        }
    }

    pub fn validate(&self, model: &IsingModel) -> Result<()> {
        let RunLengths {
            iterations,
            samples,
            chain_length,
        } = self.lengths;
        if iterations == 0 || samples == 0 || chain_length == 0 {
            return invalid(format!(
                "K, M, v = ({iterations}, {samples}, {chain_length}) must all be at least 1"
            ));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return invalid(format!("λ = {} must be finite and ≥ 0", self.lambda));
        }
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return invalid(format!("L = {} must be positive", self.lipschitz));
        }
        self.set.validate()?;
        if let Some(t0) = &self.theta0 {
            if t0.len() != model.dim() {
                return invalid(format!(
                    "θ₀ has length {}, model dimension is {}",
                    t0.len(),
                    model.dim()
                ));
            }
        }
        if let Some(r) = &self.instrumentation.reference {
            if r.len() != model.dim() {
                return invalid("reference θ* does not match the model dimension");
            }
        }
        if self.instrumentation.chain_law && model.num_nodes() > TRANSITION_LIMIT {
            return Err(Error::Capacity {
                nodes: model.num_nodes(),
                limit: TRANSITION_LIMIT,
            });
        }
        ChainConfig::new(chain_length, self.init.clone(), self.seed).validate(model)
    }
}

/// `(1/M) Σ_j t(X^j) − t̄ + λθ`.
pub fn approximate_gradient(
    model: &IsingModel,
    samples: &[SpinConfiguration],
    empirical_mean: &StatVector,
    lambda: f64,
    theta: &Parameters,
) -> Result<StatVector> {
    if samples.is_empty() {
        return invalid("cannot estimate a gradient from an empty batch");
    }
    let mut g = batch_mean(model, samples)?.into_vec();
    for ((gi, ti), th) in g
        .iter_mut()
        .zip(empirical_mean.as_slice())
        .zip(theta.as_slice())
    {
        *gi += lambda * th - ti;
    }
    Ok(StatVector::from_vec(g))
}

/// `(1/M) Σ_j t(X^j)`.
pub fn batch_mean(model: &IsingModel, samples: &[SpinConfiguration]) -> Result<StatVector> {
    if samples.is_empty() {
        return invalid("empty batch");
    }
    let mut acc = vec![0.0; model.dim()];
    for x in samples {
        if x.len() != model.num_nodes() {
            return invalid(format!(
                "sample has {} spins, model has {} nodes",
                x.len(),
                model.num_nodes()
            ));
        }
        accumulate_stats(model, x.spins(), &mut acc);
    }
    let m = samples.len() as f64;
    acc.iter_mut().for_each(|v| *v /= m);
    Ok(StatVector::from_vec(acc))
}

/// `Π_Θ[θ − g/L]`.
pub fn pgd_step(
    model: &IsingModel,
    theta: &Parameters,
    gradient: &StatVector,
    lipschitz: f64,
    set: &ConstraintSet,
) -> Result<Parameters> {
    if gradient.len() != theta.len() {
        return invalid("gradient and parameter lengths differ");
    }
    let moved: Vec<f64> = theta
        .as_slice()
        .iter()
        .zip(gradient.as_slice())
        .map(|(t, g)| t - g / lipschitz)
        .collect();
    project(model, &Parameters::from_vec(moved), set)
}

/// Runs `K` projected gradient steps from `θ₀` (zero by default) and
/// returns every iterate with its measurements.
pub fn train(model: &IsingModel, data: &Dataset, cfg: &TrainConfig) -> Result<TrainingTrace> {
    cfg.validate(model)?;
    if data.empirical_mean().len() != model.dim() {
        return invalid("dataset does not match the model");
    }
    let theta0 = match &cfg.theta0 {
        Some(t) => t.clone(),
        None => Parameters::zeros(model.dim()),
    };
    let inst = &cfg.instrumentation;
    let chain_cfg = ChainConfig::new(cfg.lengths.chain_length, cfg.init.clone(), cfg.seed);
    let samples = usize::try_from(cfg.lengths.samples)
        .map_err(|_| Error::InvalidInput("M does not fit in memory".into()))?;

    let initial_objective = if inst.exact {
        Some(negative_log_likelihood(model, &theta0, data, cfg.lambda)?)
    } else {
        None
    };
    let mut theta = theta0.clone();
    let mut sum = vec![0.0; model.dim()];
    let mut records = Vec::with_capacity(cfg.lengths.iterations as usize);

    for k in 1..=cfg.lengths.iterations {
        let (grad, sampling_error) = match cfg.gradient {
            GradientSource::Exact => (exact_gradient(model, &theta, data, cfg.lambda)?, None),
            GradientSource::Sampled => {
                let batch = draw_batch(model, &theta, samples, &chain_cfg, k)?;
                let grad =
                    approximate_gradient(model, &batch, data.empirical_mean(), cfg.lambda, &theta)?;
                let sampling_error = if inst.chain_law {
                    let law =
                        chain_distribution(model, &theta, &cfg.init, cfg.lengths.chain_length)?;
                    let target = expected_stats(model, &law)?;
                    Some(batch_mean(model, &batch)?.distance(&target))
                } else {
                    None
                };
                (grad, sampling_error)
            }
        };
        if !grad.is_finite() {
            return Err(Error::Numeric {
                iteration: k,
                what: "gradient estimate is not finite".into(),
            });
        }
        let gradient_error = if inst.exact {
            let exact = exact_gradient(model, &theta, data, cfg.lambda)?;
            Some(grad.distance(&exact))
        } else {
            None
        };
        theta = pgd_step(model, &theta, &grad, cfg.lipschitz, &cfg.set)?;
        if !theta.is_finite() {
            return Err(Error::Numeric {
                iteration: k,
                what: "iterate is not finite".into(),
            });
        }
        for (s, t) in sum.iter_mut().zip(theta.as_slice()) {
            *s += t;
        }
        let objective = if inst.exact {
            Some(negative_log_likelihood(model, &theta, data, cfg.lambda)?)
        } else {
            None
        };
        records.push(IterationRecord {
            iteration: k,
            theta: theta.clone(),
            gradient_estimate: grad,
            objective,
            gradient_error,
            sampling_error,
            reference_distance: inst.reference.as_ref().map(|r| theta.distance(r)),
        });
    }

    let k = cfg.lengths.iterations as f64;
    let average = Parameters::from_vec(sum.into_iter().map(|s| s / k).collect());
    let average_objective = if inst.exact {
        Some(negative_log_likelihood(model, &average, data, cfg.lambda)?)
    } else {
        None
    };
    Ok(TrainingTrace {
        config: cfg.clone(),
        theta0,
        initial_objective,
        records,
        average,
        average_objective,
    })
}

/// `Σ_k ‖e_k‖` when every iteration recorded its gradient error.
pub fn gradient_error_sum(trace: &TrainingTrace) -> Option<f64> {
    trace.records.iter().map(|r| r.gradient_error).sum()
}
