use serde::{Deserialize, Serialize};

use super::analytic::curvature;
use super::optimum::{exact_optimum_with, OptimumOptions};
use super::{binomial_allowance, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::learner::{
    derive_constants, plan_convex_objective, plan_strongly_convex, train, Betas, Instrumentation,
    Mode, ModelQuantities, RunLengths, Schedule, TrainConfig, TrainingTrace,
};
use crate::model::{negative_log_likelihood, stat_norm_bound, Dataset, IsingModel, Parameters};
use crate::projection::ConstraintSet;
use crate::sampler::{gibbs_certificate, CConvention};

/// Quantities entering the high-probability convergence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeInputs {
    pub r2: f64,
    pub lipschitz: f64,
    pub lambda: f64,
    /// `‖θ₀ − θ*‖₂`.
    pub initial_distance: f64,
    pub big_c: f64,
    pub alpha: f64,
}

/// Right-hand side of the convergence theorem for `mode`:
///
/// * convex: `(8R₂²/(KL))·(L‖θ₀−θ*‖/(4R₂) + ln(1/δ) + K/√M + KCα^v)²`,
///   bounding `f(θ̄) − f(θ*)`;
/// * strongly convex: `(1−λ/L)^K‖θ₀−θ*‖ + (L/λ)(√(R₂/(2M))(1 + √(2 ln(K/δ))) + 2R₂Cα^v)`,
///   bounding `‖θ_K − θ*‖₂`.
pub fn convergence_envelope(
    mode: Mode,
    inputs: &EnvelopeInputs,
    lengths: RunLengths,
    delta: f64,
) -> Result<f64> {
    let EnvelopeInputs {
        r2,
        lipschitz: l,
        lambda,
        initial_distance: d0,
        big_c,
        alpha,
    } = *inputs;
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1]"));
    }
    let k = lengths.iterations as f64;
    let m = lengths.samples as f64;
    let bias = big_c * alpha.powf(lengths.chain_length as f64);
    match mode {
        Mode::Convex => {
            let inner = l * d0 / (4.0 * r2) + (1.0 / delta).ln() + k / m.sqrt() + k * bias;
            Ok(8.0 * r2 * r2 / (k * l) * inner * inner)
        }
        Mode::StronglyConvex => {
            if !(lambda > 0.0) {
                return Err(Error::Mode("strongly-convex envelope needs λ > 0".into()));
            }
            let tail = 1.0 + (2.0 * (k / delta).ln().max(0.0)).sqrt();
            Ok((1.0 - lambda / l).powf(k) * d0
                + l / lambda * ((r2 / (2.0 * m)).sqrt() * tail + 2.0 * r2 * bias))
        }
    }
}

/// `(L/(2K))(‖θ₀−θ*‖ + 2Σ‖e_k‖/L)²`, the inexact projected-gradient bound
/// on `f(θ̄) − f(θ*)`.
pub fn inexact_convex_envelope(lipschitz: f64, k: u64, d0: f64, error_sum: f64) -> f64 {
    let inner = d0 + 2.0 * error_sum / lipschitz;
    lipschitz / (2.0 * k as f64) * inner * inner
}

/// `(1−λ/L)^K‖θ₀−θ*‖ + rL/λ` with `r = max_k ‖e_k‖`.
pub fn inexact_strongly_convex_envelope(
    lipschitz: f64,
    lambda: f64,
    k: u64,
    d0: f64,
    max_error: f64,
) -> f64 {
    (1.0 - lambda / lipschitz).powf(k as f64) * d0 + max_error * lipschitz / lambda
}

/// Checks the inexact-gradient bounds run by run against measured `‖e_k‖`.
pub fn check_inexact_envelopes(
    mode: Mode,
    traces: &[TrainingTrace],
    optimum: &Parameters,
    optimum_objective: f64,
) -> Result<BoundReport> {
    let mut report = BoundReport::new(match mode {
        Mode::Convex => "inexact-pgd-convex",
        Mode::StronglyConvex => "inexact-pgd-strongly-convex",
    });
    for trace in traces {
        let cfg = &trace.config;
        let errors: Option<Vec<f64>> = trace.records.iter().map(|r| r.gradient_error).collect();
        let errors = errors
            .ok_or_else(|| Error::InvalidInput("runs must record exact gradient errors".into()))?;
        let d0 = trace.theta0.distance(optimum);
        let k = cfg.lengths.iterations;
        match mode {
            Mode::Convex => {
                let gap = trace.average_objective.ok_or_else(|| {
                    Error::InvalidInput("runs must record exact objectives".into())
                })? - optimum_objective;
                let bound = inexact_convex_envelope(cfg.lipschitz, k, d0, errors.iter().sum());
                report.record(gap, bound, 1e-9);
            }
            Mode::StronglyConvex => {
                let r = errors.iter().copied().fold(0.0, f64::max);
                let bound = inexact_strongly_convex_envelope(cfg.lipschitz, cfg.lambda, k, d0, r);
                report.record(trace.final_theta().distance(optimum), bound, 1e-9);
            }
        }
    }
    Ok(report)
}

/// A coverage experiment: plan a schedule for a box-constrained problem,
/// run it repeatedly, and count how often the theorem's bound holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRig {
    pub mode: Mode,
    pub beta: f64,
    pub lambda: f64,
    pub lipschitz: f64,
    /// `ε_f` (convex) or `ε_θ` (strongly convex).
    pub epsilon: f64,
    pub delta: f64,
    pub betas: Betas,
    pub runs: usize,
    pub seed: u64,
    pub optimum_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageOutcome {
    pub schedule: Schedule,
    pub envelope: f64,
    pub optimum: Parameters,
    pub optimum_objective: f64,
    /// Per run: `‖θ_K − θ*‖₂` or `f(θ̄) − f(θ*)`.
    pub observed: Vec<f64>,
    /// Envelope coverage, allowing `δ` plus binomial slack failures.
    pub coverage: BoundReport,
    /// Inexact-gradient bounds, which must hold on every run.
    pub inexact: BoundReport,
    /// `λ_max(f'') ≤ L` along every iterate.
    pub smoothness: BoundReport,
}

pub fn envelope_coverage(
    model: &IsingModel,
    data: &Dataset,
    rig: &CoverageRig,
) -> Result<CoverageOutcome> {
    if rig.runs == 0 {
        return invalid("coverage needs at least one run");
    }
    let set = ConstraintSet::boxed(rig.beta);
    let mut opts = OptimumOptions::new(rig.optimum_tolerance);
    opts.lipschitz = Some(rig.lipschitz);
    let optimum = exact_optimum_with(model, data, &set, rig.lambda, &opts)?;
    let optimum_objective = negative_log_likelihood(model, &optimum, data, rig.lambda)?;
    let theta0 = Parameters::zeros(model.dim());
    let d0 = theta0.distance(&optimum);
    let cert = gibbs_certificate(&model.topology, rig.beta, CConvention::Exact)?;
    let r2 = stat_norm_bound(model).r2;
    let quantities = ModelQuantities {
        lipschitz: rig.lipschitz,
        lambda: rig.lambda,
        r2,
        big_c: cert.big_c,
        alpha: cert.alpha,
        big_d: d0.max(1e-12),
        delta: rig.delta,
    };
    let consts = derive_constants(rig.mode, &quantities)?;
    let schedule = match rig.mode {
        Mode::Convex => plan_convex_objective(&consts, rig.epsilon, rig.betas)?,
        Mode::StronglyConvex => plan_strongly_convex(&consts, rig.epsilon, rig.delta, rig.betas)?,
    };
    let inputs = EnvelopeInputs {
        r2,
        lipschitz: rig.lipschitz,
        lambda: rig.lambda,
        initial_distance: d0,
        big_c: cert.big_c,
        alpha: cert.alpha,
    };
    let envelope = convergence_envelope(rig.mode, &inputs, schedule.lengths, rig.delta)?;

    let mut traces = Vec::with_capacity(rig.runs);
    let mut coverage = BoundReport::new(match rig.mode {
        Mode::Convex => "envelope-coverage-convex",
        Mode::StronglyConvex => "envelope-coverage-strongly-convex",
    });
    coverage.allowed_violations = binomial_allowance(rig.runs, rig.delta);
    let mut smoothness = BoundReport::new("smoothness-constant");
    let mut observed = Vec::with_capacity(rig.runs);
    for i in 0..rig.runs {
        let mut cfg = TrainConfig::new(
            schedule.lengths,
            rig.lambda,
            rig.lipschitz,
            set,
            rig.seed.wrapping_add(i as u64),
        );
        cfg.instrumentation = Instrumentation {
            exact: true,
            chain_law: false,
            reference: Some(optimum.clone()),
        };
        let trace = train(model, data, &cfg)?;
        let value = match rig.mode {
            Mode::Convex => trace.average_objective.unwrap_or(f64::NAN) - optimum_objective,
            Mode::StronglyConvex => trace.final_theta().distance(&optimum),
        };
        coverage.record(value, envelope, 0.0);
        observed.push(value);
        for r in &trace.records {
            smoothness.record(curvature(model, &r.theta, rig.lambda)?, rig.lipschitz, 0.0);
        }
        traces.push(trace);
    }
    let worst = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    coverage.note(format!(
        "K = {}, M = {}, v = {}, envelope {envelope:.5}, worst observed {worst:.5}",
        schedule.lengths.iterations, schedule.lengths.samples, schedule.lengths.chain_length
    ));
    let inexact = check_inexact_envelopes(rig.mode, &traces, &optimum, optimum_objective)?;
    Ok(CoverageOutcome {
        schedule,
        envelope,
        optimum,
        optimum_objective,
        observed,
        coverage,
        inexact,
        smoothness,
    })
}
