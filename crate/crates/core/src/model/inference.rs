//! Exact inference by exhaustive enumeration of `{−1, +1}^N`.
//!
//! State `s` encodes `x_i = +1` when bit `i` of `s` is set. Sums over the
//! state space are split into fixed-size blocks that may run in parallel;
//! block results are always combined in block order so the output does
//! not depend on the thread count.

use rayon::prelude::*;

use super::{Dataset, IsingModel, Parameters, SpinConfiguration, StatBounds, StatVector};
use crate::error::{invalid, Error, Result};
use crate::vecops;

/// Largest node count accepted by the enumeration routines.
pub const ENUMERATION_LIMIT: usize = 25;

const BLOCK: usize = 1 << 12;

pub(crate) fn check_guard(model: &IsingModel, limit: usize) -> Result<()> {
    if model.num_nodes() > limit {
        return Err(Error::Capacity {
            nodes: model.num_nodes(),
            limit,
        });
    }
    Ok(())
}

fn check_params(model: &IsingModel, theta: &Parameters) -> Result<()> {
    if theta.len() != model.dim() {
        return invalid(format!(
            "parameter vector has {} entries, model expects {}",
            theta.len(),
            model.dim()
        ));
    }
    Ok(())
}

pub fn state_to_config(num_nodes: usize, state: usize) -> SpinConfiguration {
    SpinConfiguration::from_raw(
        (0..num_nodes)
            .map(|i| if (state >> i) & 1 == 1 { 1 } else { -1 })
            .collect(),
    )
}

/// θ·t(x) for the state with index `s`.
#[inline]
pub(crate) fn state_score(model: &IsingModel, theta: &[f64], s: usize) -> f64 {
    let mut acc = 0.0;
    for (w, &(i, j)) in theta.iter().zip(model.topology.edges()) {
        if ((s >> i) ^ (s >> j)) & 1 == 0 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    if model.fields {
        let e = model.num_edges();
        for (i, h) in theta[e..].iter().enumerate() {
            if (s >> i) & 1 == 1 {
                acc += h;
            } else {
                acc -= h;
            }
        }
    }
    acc
}

#[inline]
fn add_state_stats(model: &IsingModel, s: usize, weight: f64, acc: &mut [f64]) {
    let e = model.num_edges();
    for (a, &(i, j)) in acc.iter_mut().zip(model.topology.edges()) {
        if ((s >> i) ^ (s >> j)) & 1 == 0 {
            *a += weight;
        } else {
            *a -= weight;
        }
    }
    if model.fields {
        for (i, a) in acc[e..].iter_mut().enumerate() {
            if (s >> i) & 1 == 1 {
                *a += weight;
            } else {
                *a -= weight;
            }
        }
    }
}

fn blocks(num_states: usize) -> impl IndexedParallelIterator<Item = std::ops::Range<usize>> {
    let nblocks = num_states.div_ceil(BLOCK);
    (0..nblocks)
        .into_par_iter()
        .map(move |b| b * BLOCK..((b + 1) * BLOCK).min(num_states))
}

/// `A(θ) = ln Σ_x exp(θ·t(x))`, with a max-shift per block.
pub fn exact_log_partition(model: &IsingModel, theta: &Parameters) -> Result<f64> {
    check_guard(model, ENUMERATION_LIMIT)?;
    check_params(model, theta)?;
    let th = theta.as_slice();
    let partials: Vec<(f64, f64)> = blocks(1 << model.num_nodes())
        .map(|range| {
            let scores: Vec<f64> = range.map(|s| state_score(model, th, s)).collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = scores.iter().map(|v| (v - max).exp()).sum();
            (max, sum)
        })
        .collect();
    let max = partials
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = partials.iter().map(|(m, s)| s * (m - max).exp()).sum();
    Ok(max + total.ln())
}

/// Probability of every state, indexed by state number.
pub fn exact_distribution(model: &IsingModel, theta: &Parameters) -> Result<Vec<f64>> {
    let log_z = exact_log_partition(model, theta)?;
    let th = theta.as_slice();
    let n = 1usize << model.num_nodes();
    let mut p = vec![0.0; n];
    p.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        for (k, v) in chunk.iter_mut().enumerate() {
            *v = (state_score(model, th, b * BLOCK + k) - log_z).exp();
        }
    });
    Ok(p)
}

/// `E_{p_θ}[t(X)]`.
pub fn exact_mean_stats(model: &IsingModel, theta: &Parameters) -> Result<StatVector> {
    let log_z = exact_log_partition(model, theta)?;
    let th = theta.as_slice();
    let dim = model.dim();
    let partials: Vec<Vec<f64>> = blocks(1 << model.num_nodes())
        .map(|range| {
            let mut acc = vec![0.0; dim];
            for s in range {
                let w = (state_score(model, th, s) - log_z).exp();
                add_state_stats(model, s, w, &mut acc);
            }
            acc
        })
        .collect();
    let mut mean = vec![0.0; dim];
    for part in partials {
        for (m, v) in mean.iter_mut().zip(part) {
            *m += v;
        }
    }
    Ok(StatVector::from_vec(mean))
}

/// `E_q[t(X)]` for a law `q` given as probabilities over states.
pub fn expected_stats(model: &IsingModel, law: &[f64]) -> Result<StatVector> {
    check_guard(model, ENUMERATION_LIMIT)?;
    if law.len() != 1usize << model.num_nodes() {
        return invalid(format!(
            "law has {} entries, expected 2^{}",
            law.len(),
            model.num_nodes()
        ));
    }
    let mut acc = vec![0.0; model.dim()];
    for (s, &w) in law.iter().enumerate() {
        if w != 0.0 {
            add_state_stats(model, s, w, &mut acc);
        }
    }
    Ok(StatVector::from_vec(acc))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!(
            "regularization λ = {lambda} must be finite and ≥ 0"
        ));
    }
    Ok(())
}

/// `f(θ) = A(θ) − θ·t̄ + (λ/2)‖θ‖₂²`.
pub fn negative_log_likelihood(
    model: &IsingModel,
    theta: &Parameters,
    data: &Dataset,
    lambda: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    let a = exact_log_partition(model, theta)?;
    let th = theta.as_slice();
    Ok(a - vecops::dot(th, data.empirical_mean().as_slice()) + 0.5 * lambda * vecops::dot(th, th))
}

/// `f'(θ) = E_{p_θ}[t(X)] − t̄ + λθ`.
pub fn exact_gradient(
    model: &IsingModel,
    theta: &Parameters,
    data: &Dataset,
    lambda: f64,
) -> Result<StatVector> {
    check_lambda(lambda)?;
    let mut g = exact_mean_stats(model, theta)?.into_vec();
    for ((gi, ti), th) in g
        .iter_mut()
        .zip(data.empirical_mean().as_slice())
        .zip(theta.as_slice())
    {
        *gi += lambda * th - ti;
    }
    Ok(StatVector::from_vec(g))
}

/// Lipschitz constant `4R₂² + λ` of the regularized likelihood gradient.
pub fn lipschitz_constant(bounds: &StatBounds, lambda: f64) -> f64 {
    4.0 * bounds.r2 * bounds.r2 + lambda
}

/// Every statistic is ±1, so `‖t(x)‖₂ = √dim` for every configuration.
pub fn stat_norm_bound(model: &IsingModel) -> StatBounds {
    StatBounds {
        r2: (model.dim() as f64).sqrt(),
        ra_general: None,
    }
}

/// `max_x ‖t(x)‖₂` by enumeration.
pub fn max_enumerated_stat_norm(model: &IsingModel) -> Result<f64> {
    check_guard(model, ENUMERATION_LIMIT)?;
    let mut buf = Vec::with_capacity(model.dim());
    let mut best: f64 = 0.0;
    for s in 0..(1usize << model.num_nodes()) {
        let x = state_to_config(model.num_nodes(), s);
        super::write_stats(model, x.spins(), &mut buf);
        best = best.max(vecops::norm2(&buf));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sufficient_stats, GraphTopology};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Straightforward enumerator: explicit spin vectors, explicit statistics,
    /// naive sums. Shares nothing with the bit-twiddling path above.
    fn naive_log_partition(model: &IsingModel, theta: &Parameters) -> f64 {
        let n = model.num_nodes();
        let mut scores = Vec::new();
        for s in 0..(1usize << n) {
            let spins: Vec<i8> = (0..n)
                .map(|i| if s & (1 << i) != 0 { 1 } else { -1 })
                .collect();
            let x = SpinConfiguration::new(spins).unwrap();
            let t = sufficient_stats(model, &x).unwrap();
            scores.push(vecops::dot(t.as_slice(), theta.as_slice()));
        }
        vecops::log_sum_exp(&scores)
    }

    fn random_params(model: &IsingModel, scale: f64, rng: &mut ChaCha8Rng) -> Parameters {
        Parameters::from_vec(
            (0..model.dim())
                .map(|_| rng.random_range(-scale..scale))
                .collect(),
        )
    }

    #[test]
    fn zero_parameters_give_n_ln2() {
        let model = IsingModel::couplings_only(GraphTopology::grid(3, 3).unwrap());
        let a = exact_log_partition(&model, &Parameters::zeros(model.dim())).unwrap();
        assert!((a - 9.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_edge_closed_form() {
        let model = IsingModel::couplings_only(GraphTopology::chain(2).unwrap());
        for beta in [-1.3, -0.2, 0.0, 0.7, 3.0] {
            let theta = Parameters::from_vec(vec![beta]);
            let a = exact_log_partition(&model, &theta).unwrap();
            let expected = (2.0 * f64::exp(beta) + 2.0 * f64::exp(-beta)).ln();
            assert!((a - expected).abs() < 1e-12);
            let mean = exact_mean_stats(&model, &theta).unwrap();
            assert!((mean[0] - beta.tanh()).abs() < 1e-12);
        }
    }

    #[test]
    fn grid3x3_matches_naive_enumerator() {
        let model = IsingModel::couplings_only(GraphTopology::grid(3, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let theta = random_params(&model, 0.2, &mut rng);
            let fast = exact_log_partition(&model, &theta).unwrap();
            let slow = naive_log_partition(&model, &theta);
            assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
        }
        let with_fields = IsingModel::new(GraphTopology::grid(3, 3).unwrap(), true);
        let theta = random_params(&with_fields, 0.5, &mut rng);
        assert!(
            (exact_log_partition(&with_fields, &theta).unwrap()
                - naive_log_partition(&with_fields, &theta))
            .abs()
                < 1e-10
        );
    }

    #[test]
    fn large_parameters_do_not_overflow() {
        let model = IsingModel::couplings_only(GraphTopology::grid(2, 2).unwrap());
        let theta = Parameters::from_vec(vec![400.0; 4]);
        let a = exact_log_partition(&model, &theta).unwrap();
        assert!(a.is_finite());
        assert!((a - (1600.0 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn zero_parameters_have_zero_mean_statistics() {
        let model = IsingModel::new(GraphTopology::grid(2, 3).unwrap(), true);
        let mean = exact_mean_stats(&model, &Parameters::zeros(model.dim())).unwrap();
        assert!(mean.as_slice().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn mean_stats_match_finite_differences_of_log_partition() {
        let model = IsingModel::new(GraphTopology::grid(2, 2).unwrap(), true);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-5;
        for _ in 0..5 {
            let theta = random_params(&model, 0.6, &mut rng);
            let mean = exact_mean_stats(&model, &theta).unwrap();
            for k in 0..model.dim() {
                let mut up = theta.clone();
                up.as_mut_slice()[k] += h;
                let mut dn = theta.clone();
                dn.as_mut_slice()[k] -= h;
                let fd = (exact_log_partition(&model, &up).unwrap()
                    - exact_log_partition(&model, &dn).unwrap())
                    / (2.0 * h);
                assert!((fd - mean[k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn distribution_normalizes() {
        let model = IsingModel::new(GraphTopology::grid(3, 3).unwrap(), true);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let theta = random_params(&model, 1.0, &mut rng);
        let p = exact_distribution(&model, &theta).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn capacity_guard() {
        let model = IsingModel::couplings_only(GraphTopology::chain(26).unwrap());
        let theta = Parameters::zeros(model.dim());
        assert!(matches!(
            exact_log_partition(&model, &theta),
            Err(Error::Capacity {
                nodes: 26,
                limit: 25
            })
        ));
    }

    #[test]
    fn nll_at_zero_and_ridge_difference() {
        let model = IsingModel::couplings_only(GraphTopology::grid(2, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let data = Dataset::random(&model, 5, &mut rng).unwrap();
        let zero = Parameters::zeros(model.dim());
        let f0 = negative_log_likelihood(&model, &zero, &data, 2.0).unwrap();
        assert!((f0 - 6.0 * 2f64.ln()).abs() < 1e-12);

        let theta = random_params(&model, 0.4, &mut rng);
        let f_plain = negative_log_likelihood(&model, &theta, &data, 0.0).unwrap();
        let f_ridge = negative_log_likelihood(&model, &theta, &data, 0.7).unwrap();
        let sq = vecops::dot(theta.as_slice(), theta.as_slice());
        assert!((f_ridge - f_plain - 0.35 * sq).abs() < 1e-12);

        assert!(negative_log_likelihood(&model, &theta, &data, -1.0).is_err());
    }

    #[test]
    fn gradient_at_zero_and_ridge_difference() {
        let model = IsingModel::couplings_only(GraphTopology::grid(3, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let data = Dataset::random(&model, 4, &mut rng).unwrap();
        let g0 = exact_gradient(&model, &Parameters::zeros(model.dim()), &data, 0.0).unwrap();
        for (g, t) in g0.as_slice().iter().zip(data.empirical_mean().as_slice()) {
            assert!((g + t).abs() < 1e-14);
        }
        let theta = random_params(&model, 0.3, &mut rng);
        let g_plain = exact_gradient(&model, &theta, &data, 0.0).unwrap();
        let g_ridge = exact_gradient(&model, &theta, &data, 1.0).unwrap();
        for k in 0..model.dim() {
            assert!((g_ridge[k] - g_plain[k] - theta[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn lipschitz_constant_values() {
        let b = StatBounds {
            r2: 24f64.sqrt(),
            ra_general: None,
        };
        assert!((lipschitz_constant(&b, 1.0) - 97.0).abs() < 1e-12);
        assert!((lipschitz_constant(&b, 0.0) - 96.0).abs() < 1e-12);
        let zero = StatBounds {
            r2: 0.0,
            ra_general: None,
        };
        assert_eq!(lipschitz_constant(&zero, 0.3), 0.3);
    }

    #[test]
    fn stat_norm_bound_values() {
        let grid = IsingModel::couplings_only(GraphTopology::grid(4, 4).unwrap());
        assert!((stat_norm_bound(&grid).r2 - 24f64.sqrt()).abs() < 1e-15);
        let edge = IsingModel::couplings_only(GraphTopology::chain(2).unwrap());
        assert_eq!(stat_norm_bound(&edge).r2, 1.0);
        let chain = IsingModel::new(GraphTopology::chain(3).unwrap(), true);
        assert!((stat_norm_bound(&chain).r2 - 5f64.sqrt()).abs() < 1e-15);
        assert!((max_enumerated_stat_norm(&chain).unwrap() - 5f64.sqrt()).abs() < 1e-15);
    }
}
