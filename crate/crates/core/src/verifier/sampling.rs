use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{binomial_allowance, hoeffding_radius, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::learner::{batch_mean, train, Instrumentation, RunLengths, TrainConfig, TrainingTrace};
use crate::model::{
    exact_distribution, expected_stats, stat_norm_bound, state_to_config, Dataset, IsingModel,
    Parameters, SpinConfiguration, StatVector,
};
use crate::projection::ConstraintSet;
use crate::sampler::{chain_distribution, draw_batch, ChainConfig, ChainInit};

/// How the independent draws `X_1, …, X_M` are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSource {
    /// Exactly from `p_θ`, by inverting the enumerated distribution.
    Exact,
    /// Independent Gibbs chains of this length from uniform starts; the
    /// mean is then `E_q[t]` with `q` the exact `v`-step law.
    Chain { steps: u64 },
}

/// `count` independent exact draws from `p_θ`.
pub fn draw_exact_samples<R: Rng + ?Sized>(
    model: &IsingModel,
    theta: &Parameters,
    count: usize,
    rng: &mut R,
) -> Result<Vec<SpinConfiguration>> {
    let p = exact_distribution(model, theta)?;
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for v in &p {
        acc += v;
        cdf.push(acc);
    }
    let n = model.num_nodes();
    Ok((0..count)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let s = cdf.partition_point(|c| *c <= u).min(p.len() - 1);
            state_to_config(n, s)
        })
        .collect())
}

struct Draws {
    mean: StatVector,
    source: SampleSource,
    model: IsingModel,
    theta: Parameters,
    seed: u64,
    rng: ChaCha8Rng,
}

impl Draws {
    fn new(
        model: &IsingModel,
        theta: &Parameters,
        source: SampleSource,
        seed: u64,
    ) -> Result<Self> {
        let mean = match source {
            SampleSource::Exact => expected_stats(model, &exact_distribution(model, theta)?)?,
            SampleSource::Chain { steps } => expected_stats(
                model,
                &chain_distribution(model, theta, &ChainInit::Uniform, steps)?,
            )?,
        };
        Ok(Self {
            mean,
            source,
            model: model.clone(),
            theta: theta.clone(),
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// `‖(1/M) Σ t(X_i) − μ‖₂` for trial `trial`.
    fn deviation(&mut self, m: usize, trial: u64) -> Result<f64> {
        let batch = match self.source {
            SampleSource::Exact => draw_exact_samples(&self.model, &self.theta, m, &mut self.rng)?,
            SampleSource::Chain { steps } => {
                let cfg = ChainConfig::new(steps, ChainInit::Uniform, self.seed);
                draw_batch(&self.model, &self.theta, m, &cfg, trial)?
            }
        };
        Ok(batch_mean(&self.model, &batch)?.distance(&self.mean))
    }
}

/// Over `trials` batches of size `M`, checks the mean bound
/// `E‖X̄ − μ‖ ≤ 2R₂/√M` and the variance bound `V‖X̄ − μ‖ ≤ 2R₂²/M`.
/// Each fails only if the Monte-Carlo estimate exceeds its bound by more
/// than three standard errors.
pub fn check_estimation_moments(
    model: &IsingModel,
    theta: &Parameters,
    m: usize,
    trials: usize,
    source: SampleSource,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    if m == 0 || trials < 2 {
        return invalid("need M ≥ 1 and at least two trials");
    }
    let r2 = stat_norm_bound(model).r2;
    let mut draws = Draws::new(model, theta, source, seed)?;
    let mut devs = Vec::with_capacity(trials);
    for trial in 0..trials {
        devs.push(draws.deviation(m, trial as u64)?);
    }
    let n = trials as f64;
    let mean = devs.iter().sum::<f64>() / n;
    let var = devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fourth = devs.iter().map(|d| (d - mean).powi(4)).sum::<f64>() / n;
    let mean_se = (var / n).sqrt();
    let var_se = ((fourth - var * var).max(0.0) / n).sqrt();

    let mut first = BoundReport::new("estimation-mean");
    first.record(mean - 3.0 * mean_se, 2.0 * r2 / (m as f64).sqrt(), 0.0);
    first.note(format!(
        "M = {m}, trials = {trials}: E‖X̄−μ‖ ≈ {mean:.5} ± {mean_se:.5}, bound {:.5}",
        2.0 * r2 / (m as f64).sqrt()
    ));
    let mut second = BoundReport::new("estimation-variance");
    second.record(var - 3.0 * var_se, 2.0 * r2 * r2 / m as f64, 0.0);
    second.note(format!(
        "V‖X̄−μ‖ ≈ {var:.3e} ± {var_se:.3e}, bound {:.3e}",
        2.0 * r2 * r2 / m as f64
    ));
    Ok(vec![first, second])
}

/// Fraction of `trials` batches with `‖X̄ − μ‖ > hoeffding_radius(2R₂, M, δ)`
/// must stay within `δ` plus three binomial standard deviations.
pub fn check_hoeffding_coverage(
    model: &IsingModel,
    theta: &Parameters,
    m: usize,
    delta: f64,
    trials: usize,
    source: SampleSource,
    seed: u64,
) -> Result<BoundReport> {
    if m == 0 || trials == 0 {
        return invalid("need M ≥ 1 and at least one trial");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1]"));
    }
    let r2 = stat_norm_bound(model).r2;
    let radius = hoeffding_radius(2.0 * r2, m as u64, delta);
    let mut draws = Draws::new(model, theta, source, seed)?;
    let mut report = BoundReport::new("hoeffding-coverage");
    report.allowed_violations = binomial_allowance(trials, delta);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let d = draws.deviation(m, trial as u64)?;
        worst = worst.max(d);
        report.record(d, radius, 0.0);
    }
    report.note(format!(
        "radius {radius:.5}, largest deviation {worst:.5}, {} of {trials} outside",
        report.violations
    ));
    Ok(report)
}

/// `runs` training runs recording `‖d_k‖` against the exact chain law.
#[allow(clippy::too_many_arguments)]
pub fn run_sum_error_experiment(
    model: &IsingModel,
    data: &Dataset,
    lengths: RunLengths,
    set: ConstraintSet,
    lambda: f64,
    lipschitz: f64,
    runs: usize,
    seed: u64,
) -> Result<Vec<TrainingTrace>> {
    (0..runs)
        .map(|i| {
            let mut cfg =
                TrainConfig::new(lengths, lambda, lipschitz, set, seed.wrapping_add(i as u64));
            cfg.instrumentation = Instrumentation {
                exact: false,
                chain_law: true,
                reference: None,
            };
            train(model, data, &cfg)
        })
        .collect()
}

/// Per run, `Σ_k ‖d_k‖ ≤ 2R₂(K/√M + ln(1/δ))`; the fraction of violating
/// runs may exceed `δ` only by binomial slack. Needs `M ≥ 3K/ln(1/δ)`.
pub fn check_sum_error_bound(
    model: &IsingModel,
    runs: &[TrainingTrace],
    delta: f64,
) -> Result<BoundReport> {
    if runs.is_empty() {
        return invalid("no runs to check");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1]"));
    }
    let r2 = stat_norm_bound(model).r2;
    let mut report = BoundReport::new("sum-error");
    report.allowed_violations = binomial_allowance(runs.len(), delta);
    for trace in runs {
        let RunLengths {
            iterations: k,
            samples: m,
            ..
        } = trace.config.lengths;
        let log_inv = (1.0 / delta).ln();
        if delta < 1.0 && (m as f64) < 3.0 * k as f64 / log_inv {
            return Err(Error::Config(format!(
                "M = {m} is below 3K/ln(1/δ) = {:.2}",
                3.0 * k as f64 / log_inv
            )));
        }
        let total: Option<f64> = trace.records.iter().map(|r| r.sampling_error).sum();
        let total = total.ok_or_else(|| {
            Error::InvalidInput(
                "runs must record sampling errors against the exact chain law".into(),
            )
        })?;
        let bound = 2.0 * r2 * (k as f64 / (m as f64).sqrt() + log_inv);
        report.record(total, bound, 0.0);
    }
    report.note(format!(
        "{} of {} runs above the bound",
        report.violations,
        runs.len()
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphTopology;

    fn grid22() -> IsingModel {
        IsingModel::couplings_only(GraphTopology::grid(2, 2).unwrap())
    }

    #[test]
    fn exact_sampler_matches_distribution() {
        let model = grid22();
        let theta = Parameters::from_vec(vec![0.5, -0.3, 0.2, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs = draw_exact_samples(&model, &theta, 40_000, &mut rng).unwrap();
        let mut counts = vec![0.0; 16];
        for x in &xs {
            counts[x.state_index()] += 1.0 / 40_000.0;
        }
        let p = exact_distribution(&model, &theta).unwrap();
        assert!(super::super::tv_distance(&counts, &p).unwrap() < 0.02);
    }

    #[test]
    fn single_sample_moments() {
        let model = grid22();
        let theta = Parameters::from_vec(vec![0.1; 4]);
        let reports =
            check_estimation_moments(&model, &theta, 1, 200, SampleSource::Exact, 3).unwrap();
        assert!(reports.iter().all(|r| r.passed()));
    }

    #[test]
    fn sum_error_precondition() {
        let model = grid22();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data = Dataset::random(&model, 5, &mut rng).unwrap();
        let runs = run_sum_error_experiment(
            &model,
            &data,
            RunLengths::new(10, 5, 5),
            ConstraintSet::boxed(0.2),
            0.0,
            10.0,
            1,
            0,
        )
        .unwrap();
        assert!(matches!(
            check_sum_error_bound(&model, &runs, 0.2),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn single_step_sum_error() {
        let model = grid22();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = Dataset::random(&model, 5, &mut rng).unwrap();
        let runs = run_sum_error_experiment(
            &model,
            &data,
            RunLengths::new(1, 50, 10),
            ConstraintSet::boxed(0.2),
            0.0,
            10.0,
            20,
            7,
        )
        .unwrap();
        let r = check_sum_error_bound(&model, &runs, 0.5).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }
}
