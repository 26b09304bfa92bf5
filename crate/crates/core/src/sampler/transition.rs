//! The random-scan Gibbs kernel as an explicit matrix over `{−1,+1}^N`.
//! Used as an oracle: exact chain marginals `M_θ^v r` and stationarity.

use super::{ChainInit, GibbsKernel};
use crate::error::{Error, Result};
use crate::model::{IsingModel, Parameters};

/// Largest node count for which the transition matrix is materialized.
pub const TRANSITION_LIMIT: usize = 12;

/// Row-stochastic matrix stored by rows; each row has at most `N + 1`
/// nonzeros (stay, or flip one of the `N` sites).
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    num_states: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn row(&self, s: usize) -> &[(usize, f64)] {
        &self.rows[s]
    }

    pub fn row_sum(&self, s: usize) -> f64 {
        self.rows[s].iter().map(|&(_, p)| p).sum()
    }

    /// Row vector times matrix: the distribution after one more transition.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_states];
        self.step_into(dist, &mut out);
        out
    }

    pub fn step_into(&self, dist: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (s, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for &(t, p) in &self.rows[s] {
                out[t] += mass * p;
            }
        }
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.num_states]; self.num_states];
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, p) in row {
                m[s][t] += p;
            }
        }
        m
    }
}

fn check_size(model: &IsingModel) -> Result<()> {
    if model.num_nodes() > TRANSITION_LIMIT {
        return Err(Error::Capacity {
            nodes: model.num_nodes(),
            limit: TRANSITION_LIMIT,
        });
    }
    Ok(())
}

/// With probability `1/N` pick site `i`, then resample it from its
/// conditional.
pub fn exact_transition_matrix(model: &IsingModel, theta: &Parameters) -> Result<TransitionMatrix> {
    check_size(model)?;
    let kernel = GibbsKernel::new(model, theta)?;
    let n = model.num_nodes();
    let num_states = 1usize << n;
    let pick = 1.0 / n as f64;
    let mut spins = vec![0i8; n];
    let rows = (0..num_states)
        .map(|s| {
            for (i, x) in spins.iter_mut().enumerate() {
                *x = if (s >> i) & 1 == 1 { 1 } else { -1 };
            }
            let mut stay = 0.0;
            let mut row = Vec::with_capacity(n + 1);
            for i in 0..n {
                let up = kernel.prob_up(&spins, i);
                let (keep, flip) = if spins[i] == 1 {
                    (up, 1.0 - up)
                } else {
                    (1.0 - up, up)
                };
                stay += pick * keep;
                if flip > 0.0 {
                    row.push((s ^ (1 << i), pick * flip));
                }
            }
            row.push((s, stay));
            row
        })
        .collect();
    Ok(TransitionMatrix { num_states, rows })
}

/// The starting distribution `r` as a vector over states.
pub fn initial_distribution(model: &IsingModel, init: &ChainInit) -> Result<Vec<f64>> {
    check_size(model)?;
    let num_states = 1usize << model.num_nodes();
    let mut r = vec![0.0; num_states];
    match init {
        ChainInit::Uniform => r.iter_mut().for_each(|v| *v = 1.0 / num_states as f64),
        ChainInit::Empirical(data) => {
            let w = 1.0 / data.len() as f64;
            for x in data.examples() {
                r[x.state_index()] += w;
            }
        }
        ChainInit::Fixed(x) => r[x.state_index()] = 1.0,
    }
    Ok(r)
}

/// Exact law of the chain after `steps` transitions from `init`.
pub fn chain_distribution(
    model: &IsingModel,
    theta: &Parameters,
    init: &ChainInit,
    steps: u64,
) -> Result<Vec<f64>> {
    let matrix = exact_transition_matrix(model, theta)?;
    let mut dist = initial_distribution(model, init)?;
    let mut next = vec![0.0; dist.len()];
    for _ in 0..steps {
        matrix.step_into(&dist, &mut next);
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exact_distribution, GraphTopology, SpinConfiguration};
    use nalgebra::{DMatrix, SymmetricEigen};

    fn grid22() -> IsingModel {
        IsingModel::couplings_only(GraphTopology::grid(2, 2).unwrap())
    }

    #[test]
    fn rows_sum_to_one() {
        let model = IsingModel::new(GraphTopology::grid(2, 3).unwrap(), true);
        let theta = Parameters::from_vec((0..model.dim()).map(|k| 0.1 * k as f64 - 0.4).collect());
        let m = exact_transition_matrix(&model, &theta).unwrap();
        for s in 0..m.num_states() {
            assert!((m.row_sum(s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_distribution_is_fixed_point() {
        let model = IsingModel::new(GraphTopology::grid(2, 2).unwrap(), true);
        let theta = Parameters::from_vec(vec![0.3, -0.2, 0.15, 0.25, 0.1, -0.1, 0.05, 0.0]);
        let p = exact_distribution(&model, &theta).unwrap();
        let m = exact_transition_matrix(&model, &theta).unwrap();
        let next = m.step(&p);
        for (a, b) in p.iter().zip(&next) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_parameters_give_lazy_kernel_with_spectral_gap() {
        let model = grid22();
        let m = exact_transition_matrix(&model, &Parameters::zeros(4)).unwrap();
        let dense = m.dense();
        for (s, row) in dense.iter().enumerate() {
            assert!((row[s] - 0.5).abs() < 1e-15);
        }
        let mat = DMatrix::from_fn(16, 16, |i, j| dense[i][j]);
        let mut eig: Vec<f64> = SymmetricEigen::new(mat)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12);
        let gap = 1.0 - eig[1];
        assert!(gap > 0.1, "gap {gap}");
    }

    #[test]
    fn zero_steps_keep_initial_law() {
        let model = grid22();
        let th = Parameters::from_vec(vec![0.2; 4]);
        let uniform = chain_distribution(&model, &th, &ChainInit::Uniform, 0).unwrap();
        assert!(uniform.iter().all(|&v| (v - 1.0 / 16.0).abs() < 1e-15));
        let x = SpinConfiguration::new(vec![1, 1, -1, 1]).unwrap();
        let point = chain_distribution(&model, &th, &ChainInit::Fixed(x.clone()), 0).unwrap();
        assert_eq!(point[x.state_index()], 1.0);
    }

    #[test]
    fn capacity_limit() {
        let model = IsingModel::couplings_only(GraphTopology::chain(13).unwrap());
        assert!(matches!(
            exact_transition_matrix(&model, &Parameters::zeros(12)),
            Err(Error::Capacity { .. })
        ));
    }
}
