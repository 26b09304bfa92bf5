use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::train::TrainConfig;
use crate::model::{Parameters, StatVector};
use crate::projection::ConstraintSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// `k`, starting at 1.
    pub iteration: u64,
    /// `θ_k`.
    pub theta: Parameters,
    /// The gradient used to produce `θ_k` (evaluated at `θ_{k−1}`).
    pub gradient_estimate: StatVector,
    /// `f(θ_k)`.
    pub objective: Option<f64>,
    /// `‖e_k‖`: estimate minus exact gradient at `θ_{k−1}`.
    pub gradient_error: Option<f64>,
    /// `‖d_k‖`: batch mean minus `E_{q_k}[t]`.
    pub sampling_error: Option<f64>,
    /// `‖θ_k − θ*‖₂`.
    pub reference_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub config: TrainConfig,
    pub theta0: Parameters,
    pub initial_objective: Option<f64>,
    pub records: Vec<IterationRecord>,
    /// `θ̄ = (1/K) Σ_k θ_k`.
    pub average: Parameters,
    pub average_objective: Option<f64>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TrainingTrace {
    pub fn final_theta(&self) -> &Parameters {
        self.records
            .last()
            .map(|r| &r.theta)
            .unwrap_or(&self.theta0)
    }

    /// One row per iteration after `#`-prefixed lines echoing the run
    /// settings. Row 0 is `θ₀`. Output is a pure function of the trace.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let set = match c.set {
            ConstraintSet::Box { beta, field_bound } => match field_bound {
                Some(fb) => format!("box(beta={beta},fields={fb})"),
                None => format!("box(beta={beta})"),
            },
            ConstraintSet::Spectral { c, tolerance } => {
                format!("spectral(c={c},tol={tolerance})")
            }
        };
        let _ = writeln!(
            out,
            "# K={} M={} v={} lambda={} L={} seed={} set={} gradient={:?}",
            c.lengths.iterations,
            c.lengths.samples,
            c.lengths.chain_length,
            c.lambda,
            c.lipschitz,
            c.seed,
            set,
            c.gradient
        );
        if let Some(f) = self.average_objective {
            let _ = writeln!(out, "# f_average={f}");
        }
        out.push_str("iter,f_exact,param_dist_exact,grad_err_norm");
        for i in 0..self.theta0.len() {
            let _ = write!(out, ",theta_{i}");
        }
        out.push('\n');

        let reference = c.instrumentation.reference.as_ref();
        let row = |out: &mut String,
                   k: u64,
                   f: Option<f64>,
                   d: Option<f64>,
                   e: Option<f64>,
                   th: &Parameters| {
            let _ = write!(out, "{k},{},{},{}", cell(f), cell(d), cell(e));
            for v in th.as_slice() {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        };
        row(
            &mut out,
            0,
            self.initial_objective,
            reference.map(|r| self.theta0.distance(r)),
            None,
            &self.theta0,
        );
        for r in &self.records {
            row(
                &mut out,
                r.iteration,
                r.objective,
                r.reference_distance,
                r.gradient_error,
                &r.theta,
            );
        }
        out
    }
}
