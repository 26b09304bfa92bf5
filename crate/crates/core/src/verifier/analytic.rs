use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tv_distance, BoundReport};
use crate::error::{Error, Result};
use crate::learner::approximate_gradient;
use crate::model::{
    exact_distribution, exact_gradient, exact_log_partition, exact_mean_stats, lipschitz_constant,
    negative_log_likelihood, stat_norm_bound, state_to_config, Dataset, IsingModel, Parameters,
};
use crate::sampler::{
    draw_batch, exact_transition_matrix, ChainConfig, ChainInit, MixingCertificate,
};

/// Largest node count for [`check_mixing_certificate`].
pub const MIXING_LIMIT: usize = 10;
/// Absolute slack on `d(v) ≤ Cα^v`, covering round-off in `d(v)`.
pub const MIXING_TOLERANCE: f64 = 1e-12;

const ANALYTIC_TOLERANCE: f64 = 1e-10;

fn random_params<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> Parameters {
    Parameters::from_vec(
        (0..dim)
            .map(|_| rng.random_range(-radius..=radius))
            .collect(),
    )
}

/// Checks, with `a = b = 2` and `R₂ = √dim`, on `sample_count` random
/// pairs with `‖θ‖_∞, ‖φ‖_∞ ≤ radius`:
///
/// * `‖f'(θ) − f'(φ)‖₂ ≤ (4R₂² + λ)‖θ − φ‖₂`
/// * `‖E_φ t − E_θ t‖₂ ≤ 2R₂ ‖p_φ − p_θ‖_TV`
/// * `|A(θ) − A(φ)| ≤ R₂ ‖θ − φ‖₂`
/// * `‖p_θ − p_φ‖_TV ≤ 2R₂ ‖θ − φ‖₂`
pub fn check_analytic_bounds(
    model: &IsingModel,
    sample_count: usize,
    radius: f64,
    lambda: f64,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Parameters, Parameters)> = (0..sample_count)
        .map(|_| {
            let a = random_params(model.dim(), radius, &mut rng);
            let b = random_params(model.dim(), radius, &mut rng);
            (a, b)
        })
        .collect();
    check_pairs(model, &pairs, lambda)
}

pub(crate) fn check_pairs(
    model: &IsingModel,
    pairs: &[(Parameters, Parameters)],
    lambda: f64,
) -> Result<Vec<BoundReport>> {
    let r2 = stat_norm_bound(model).r2;
    let lip = lipschitz_constant(&stat_norm_bound(model), lambda);
    let mut lipschitz = BoundReport::new("gradient-lipschitz");
    let mut mean_tv = BoundReport::new("mean-vs-tv");
    let mut log_partition = BoundReport::new("log-partition-lipschitz");
    let mut tv_param = BoundReport::new("tv-vs-parameter");
    // f' differences do not depend on the data
    let data = Dataset::new(
        model,
        vec![crate::model::SpinConfiguration::all_up(model.num_nodes())],
    )?;
    for (theta, phi) in pairs {
        let dist = theta.distance(phi);
        let p = exact_distribution(model, theta)?;
        let q = exact_distribution(model, phi)?;
        let tv = tv_distance(&p, &q)?;
        let g_theta = exact_gradient(model, theta, &data, lambda)?;
        let g_phi = exact_gradient(model, phi, &data, lambda)?;
        lipschitz.record(g_theta.distance(&g_phi), lip * dist, ANALYTIC_TOLERANCE);
        let mu_theta = exact_mean_stats(model, theta)?;
        let mu_phi = exact_mean_stats(model, phi)?;
        mean_tv.record(
            mu_phi.distance(&mu_theta),
            2.0 * r2 * tv,
            ANALYTIC_TOLERANCE,
        );
        let da = (exact_log_partition(model, theta)? - exact_log_partition(model, phi)?).abs();
        log_partition.record(da, r2 * dist, ANALYTIC_TOLERANCE);
        tv_param.record(tv, 2.0 * r2 * dist, ANALYTIC_TOLERANCE);
    }
    Ok(vec![lipschitz, mean_tv, log_partition, tv_param])
}

/// `d(v) = max_x ‖M^v δ_x − p_θ‖_TV` for `v = 0, 1, …` up to `v_max`,
/// stopping early once `d(v) ≤ floor` (later values can only be smaller).
pub fn mixing_profile(
    model: &IsingModel,
    theta: &Parameters,
    v_max: u64,
    floor: f64,
) -> Result<Vec<f64>> {
    if model.num_nodes() > MIXING_LIMIT {
        return Err(Error::Capacity {
            nodes: model.num_nodes(),
            limit: MIXING_LIMIT,
        });
    }
    let matrix = exact_transition_matrix(model, theta)?;
    let p = exact_distribution(model, theta)?;
    let s = p.len();
    // rows[x] is the law after v steps from state x
    let mut rows: Vec<Vec<f64>> = (0..s)
        .map(|x| {
            let mut r = vec![0.0; s];
            r[x] = 1.0;
            r
        })
        .collect();
    let mut next = vec![0.0; s];
    let worst = |rows: &[Vec<f64>]| {
        rows.iter()
            .map(|r| 0.5 * r.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut profile = vec![worst(&rows)];
    for _ in 0..v_max {
        if *profile.last().unwrap() <= floor {
            break;
        }
        for r in rows.iter_mut() {
            matrix.step_into(r, &mut next);
            std::mem::swap(r, &mut next);
        }
        profile.push(worst(&rows));
    }
    Ok(profile)
}

/// Checks `d(v) ≤ Cα^v` for `v = 0, …, v_max`. Once `d(v)` drops below
/// the tolerance the remaining `v` are certified by monotonicity.
pub fn check_mixing_certificate(
    model: &IsingModel,
    theta: &Parameters,
    cert: &MixingCertificate,
    v_max: u64,
) -> Result<BoundReport> {
    cert.validate()?;
    let profile = mixing_profile(model, theta, v_max, 0.1 * MIXING_TOLERANCE)?;
    let mut report = BoundReport::new("mixing-certificate");
    let mut monotone = true;
    for (v, d) in profile.iter().enumerate() {
        report.record(*d, cert.tv_bound(v as u64), MIXING_TOLERANCE);
        if v > 0 && *d > profile[v - 1] + MIXING_TOLERANCE {
            monotone = false;
        }
    }
    let computed = profile.len() as u64 - 1;
    if computed < v_max {
        let last = *profile.last().unwrap();
        for v in computed + 1..=v_max {
            report.record(last, cert.tv_bound(v) + MIXING_TOLERANCE, MIXING_TOLERANCE);
        }
        report.note(format!(
            "d(v) ≤ {last:.3e} at v = {computed}; v in ({computed}, {v_max}] bounded by monotonicity"
        ));
    }
    if !monotone {
        report.violations += 1;
        report.note("d(v) increased somewhere");
    }
    report.note(format!(
        "C = {}, α = {}, d(1) = {:.6}, d({computed}) = {:.3e}",
        cert.big_c,
        cert.alpha,
        profile.get(1).copied().unwrap_or(profile[0]),
        profile.last().unwrap()
    ));
    Ok(report)
}

/// `Cov_{p_θ}[t(X)]` by enumeration.
pub fn exact_stat_covariance(model: &IsingModel, theta: &Parameters) -> Result<DMatrix<f64>> {
    let p = exact_distribution(model, theta)?;
    let mu = exact_mean_stats(model, theta)?;
    let d = model.dim();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for (s, &w) in p.iter().enumerate() {
        let t = crate::model::sufficient_stats(model, &state_to_config(model.num_nodes(), s))?;
        let c: Vec<f64> = t
            .as_slice()
            .iter()
            .zip(mu.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += w * c[i] * c[j];
            }
        }
    }
    Ok(cov)
}

/// Largest eigenvalue of `f''(θ) = Cov_θ[t] + λI`.
pub fn curvature(model: &IsingModel, theta: &Parameters, lambda: f64) -> Result<f64> {
    let cov = exact_stat_covariance(model, theta)?;
    let eig = SymmetricEigen::new(cov);
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        + lambda)
}

/// Central differences of the likelihood against [`exact_gradient`] at
/// `instances` random points (random θ in `[−1, 1]^d`, random data).
pub fn check_finite_differences(
    model: &IsingModel,
    instances: usize,
    tolerance: f64,
    seed: u64,
) -> Result<BoundReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BoundReport::new("gradient-finite-differences");
    let h = 1e-5;
    for _ in 0..instances {
        let theta = random_params(model.dim(), 1.0, &mut rng);
        let count = rng.random_range(1..=10);
        let data = Dataset::random(model, count, &mut rng)?;
        let lambda = rng.random_range(0.0..2.0);
        let g = exact_gradient(model, &theta, &data, lambda)?;
        let mut worst: f64 = 0.0;
        for i in 0..model.dim() {
            let mut up = theta.clone();
            up.as_mut_slice()[i] += h;
            let mut down = theta.clone();
            down.as_mut_slice()[i] -= h;
            let fd = (negative_log_likelihood(model, &up, &data, lambda)?
                - negative_log_likelihood(model, &down, &data, lambda)?)
                / (2.0 * h);
            worst = worst.max((fd - g[i]).abs());
        }
        report.record(worst, tolerance, 0.0);
    }
    Ok(report)
}

/// `‖approximate − exact gradient‖₂ ≤ tolerance` for one large batch.
#[allow(clippy::too_many_arguments)]
pub fn check_gradient_convergence(
    model: &IsingModel,
    theta: &Parameters,
    data: &Dataset,
    lambda: f64,
    samples: usize,
    chain_length: u64,
    tolerance: f64,
    seed: u64,
) -> Result<BoundReport> {
    let cfg = ChainConfig::new(chain_length, ChainInit::Uniform, seed);
    let batch = draw_batch(model, theta, samples, &cfg, 0)?;
    let approx = approximate_gradient(model, &batch, data.empirical_mean(), lambda, theta)?;
    let exact = exact_gradient(model, theta, data, lambda)?;
    let err = approx.distance(&exact);
    let mut report = BoundReport::new("gradient-convergence");
    report.record(err, tolerance, 0.0);
    report.note(format!(
        "M = {samples}, v = {chain_length}, error = {err:.3e}"
    ));
    Ok(report)
}
