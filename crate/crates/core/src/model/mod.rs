//! The Ising exponential family `p_θ(x) = exp(θ·t(x) − A(θ))` over ±1 spins.
//!
//! Every parameter and statistic vector shares one layout: one entry per
//! edge in edge-list order, followed by one entry per node when fields are
//! enabled.

mod inference;
mod io;
mod topology;

use serde::{Deserialize, Serialize};

pub use inference::{
    exact_distribution, exact_gradient, exact_log_partition, exact_mean_stats, expected_stats,
    lipschitz_constant, max_enumerated_stat_norm, negative_log_likelihood, stat_norm_bound,
    state_to_config, ENUMERATION_LIMIT,
};
pub use io::{parse_dataset, parse_topology, read_dataset, read_topology, write_dataset};
pub use topology::{GraphTopology, IsingModel};

use crate::error::{invalid, Result};
use crate::vecops;

/// A point `x ∈ {−1, +1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return invalid(format!("spin value {bad} is not ±1"));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        Self(spins)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub(crate) fn spins_mut(&mut self) -> &mut [i8] {
        &mut self.0
    }

    /// Index in the enumerated state space: bit `i` is set when `x_i = +1`.
    pub fn state_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0usize, |acc, (i, _)| acc | (1 << i))
    }
}

macro_rules! flat_vector {
    ($name:ident) => {
        impl $name {
            pub fn from_vec(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn as_mut_slice(&mut self) -> &mut [f64] {
                &mut self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn norm2(&self) -> f64 {
                vecops::norm2(&self.0)
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

/// Natural parameters θ (couplings, then fields).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters(Vec<f64>);

/// A vector in sufficient-statistic space: `t(x)`, a mean of statistics,
/// or a gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatVector(Vec<f64>);

flat_vector!(Parameters);
flat_vector!(StatVector);

impl Parameters {
    /// Checks the layout against `model` and that all entries are finite.
    pub fn for_model(model: &IsingModel, values: Vec<f64>) -> Result<Self> {
        if values.len() != model.dim() {
            return invalid(format!(
                "parameter vector has {} entries, model expects {}",
                values.len(),
                model.dim()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("parameters must be finite");
        }
        Ok(Self(values))
    }

    pub fn couplings<'a>(&'a self, model: &IsingModel) -> &'a [f64] {
        &self.0[..model.num_edges()]
    }

    /// Node fields; empty when the model has fields disabled.
    pub fn fields<'a>(&'a self, model: &IsingModel) -> &'a [f64] {
        &self.0[model.num_edges()..]
    }

    pub fn distance(&self, other: &Parameters) -> f64 {
        vecops::dist2(&self.0, &other.0)
    }
}

impl StatVector {
    pub fn distance(&self, other: &StatVector) -> f64 {
        vecops::dist2(&self.0, &other.0)
    }
}

/// Norm bounds on `t(x)` over the whole state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatBounds {
    /// Euclidean bound `R₂ ≥ ‖t(x)‖₂`.
    pub r2: f64,
    /// Bound in some other norm, when known.
    pub ra_general: Option<f64>,
}

/// Training set with its cached mean statistic `t̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    examples: Vec<SpinConfiguration>,
    empirical_mean: StatVector,
}

impl Dataset {
    pub fn new(model: &IsingModel, examples: Vec<SpinConfiguration>) -> Result<Self> {
        if examples.is_empty() {
            return invalid("dataset must contain at least one example");
        }
        let mut mean = vec![0.0; model.dim()];
        for x in &examples {
            let t = sufficient_stats(model, x)?;
            for (m, v) in mean.iter_mut().zip(t.as_slice()) {
                *m += v;
            }
        }
        let d = examples.len() as f64;
        mean.iter_mut().for_each(|m| *m /= d);
        Ok(Self {
            examples,
            empirical_mean: StatVector(mean),
        })
    }

    /// `count` configurations with independent uniform spins.
    pub fn random<R: rand::Rng + ?Sized>(
        model: &IsingModel,
        count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let n = model.num_nodes();
        let examples = (0..count)
            .map(|_| {
                SpinConfiguration::from_raw(
                    (0..n)
                        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                        .collect(),
                )
            })
            .collect();
        Self::new(model, examples)
    }

    pub fn examples(&self) -> &[SpinConfiguration] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn empirical_mean(&self) -> &StatVector {
        &self.empirical_mean
    }
}

/// `t(x)`: `x_i x_j` for every edge, then `x_i` for every node when fields
/// are enabled.
pub fn sufficient_stats(model: &IsingModel, x: &SpinConfiguration) -> Result<StatVector> {
    if x.len() != model.num_nodes() {
        return invalid(format!(
            "configuration has {} spins, model has {} nodes",
            x.len(),
            model.num_nodes()
        ));
    }
    let mut out = Vec::with_capacity(model.dim());
    write_stats(model, x.spins(), &mut out);
    Ok(StatVector(out))
}

pub(crate) fn write_stats(model: &IsingModel, spins: &[i8], out: &mut Vec<f64>) {
    out.clear();
    out.extend(
        model
            .topology
            .edges()
            .iter()
            .map(|&(i, j)| f64::from(spins[i] * spins[j])),
    );
    if model.fields {
        out.extend(spins.iter().map(|&s| f64::from(s)));
    }
}

/// Adds `t(x)` into `acc` without allocating.
pub(crate) fn accumulate_stats(model: &IsingModel, spins: &[i8], acc: &mut [f64]) {
    let e = model.num_edges();
    for (a, &(i, j)) in acc.iter_mut().zip(model.topology.edges()) {
        *a += f64::from(spins[i] * spins[j]);
    }
    if model.fields {
        for (a, &s) in acc[e..].iter_mut().zip(spins) {
            *a += f64::from(s);
        }
    }
}
