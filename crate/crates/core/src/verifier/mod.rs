//! Brute-force oracles and statistical harnesses for the bounds behind the
//! learner. Deterministic inequalities must hold on every instance;
//! probabilistic ones are checked as frequencies with binomial slack.

mod analytic;
mod envelope;
mod optimum;
pub mod oracle;
mod sampling;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use analytic::{
    check_analytic_bounds, check_finite_differences, check_gradient_convergence,
    check_mixing_certificate, curvature, exact_stat_covariance, mixing_profile, MIXING_LIMIT,
    MIXING_TOLERANCE,
};
pub use envelope::{
    check_inexact_envelopes, convergence_envelope, envelope_coverage, inexact_convex_envelope,
    inexact_strongly_convex_envelope, CoverageOutcome, CoverageRig, EnvelopeInputs,
};
pub use optimum::{exact_optimum, exact_optimum_for_mean, exact_optimum_with, OptimumOptions};
pub use sampling::{
    check_estimation_moments, check_hoeffding_coverage, check_sum_error_bound, draw_exact_samples,
    run_sum_error_experiment, SampleSource,
};

/// Outcome of checking one inequality over many instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub instances_checked: usize,
    /// Instances where observed exceeded bound plus tolerance.
    pub violations: usize,
    /// Violations tolerated before the check fails (zero for
    /// deterministic bounds).
    pub allowed_violations: usize,
    /// Minimum over instances of bound minus observed.
    pub max_slack: f64,
    pub details: Vec<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            instances_checked: 0,
            violations: 0,
            allowed_violations: 0,
            max_slack: f64::INFINITY,
            details: Vec::new(),
        }
    }

    /// Records `observed ≤ bound + tolerance`.
    pub fn record(&mut self, observed: f64, bound: f64, tolerance: f64) -> bool {
        self.instances_checked += 1;
        let slack = bound - observed;
        if slack < self.max_slack || slack.is_nan() {
            self.max_slack = slack;
        }
        let ok = observed <= bound + tolerance;
        if !ok {
            self.violations += 1;
        }
        ok
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.violations <= self.allowed_violations && !self.max_slack.is_nan()
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} instances, {} violations (allowed {}), min slack {:.6e} [{}]",
            self.name,
            self.instances_checked,
            self.violations,
            self.allowed_violations,
            self.max_slack,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// `½ Σ |p − q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return invalid(format!(
            "distributions have different support sizes ({} vs {})",
            p.len(),
            q.len()
        ));
    }
    for (name, d) in [("p", p), ("q", q)] {
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > 1e-9 || d.iter().any(|v| *v < 0.0) {
            return invalid(format!("{name} is not a distribution (sums to {total})"));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Radius `√(c/(4M))·(1 + √(2 ln(1/δ)))` within which a mean of `M`
/// independent vectors with `‖X_i − μ‖ ≤ c` lies with probability `1 − δ`.
pub fn hoeffding_radius(c: f64, m: u64, delta: f64) -> f64 {
    (c / (4.0 * m as f64)).sqrt() * (1.0 + (2.0 * (1.0 / delta).ln()).sqrt())
}

/// Failures tolerated out of `n` trials of an event with probability at
/// most `p`: `n·(p + 3√(p(1−p)/n))`.
pub fn binomial_allowance(n: usize, p: f64) -> usize {
    let nf = n as f64;
    let slack = 3.0 * (p * (1.0 - p) / nf).sqrt();
    (nf * (p + slack)).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        let u = [0.25; 4];
        assert_eq!(tv_distance(&u, &u).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((tv_distance(&u, &[1.0, 0.0, 0.0, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!(tv_distance(&u, &[0.5, 0.5]).is_err());
        assert!(tv_distance(&[0.5, 0.4], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn hoeffding_examples() {
        assert!((hoeffding_radius(3.0, 7, 1.0) - (3.0f64 / 28.0).sqrt()).abs() < 1e-15);
        let r1 = hoeffding_radius(2.0, 100, 0.1);
        let r4 = hoeffding_radius(2.0, 400, 0.1);
        assert!((r1 / r4 - 2.0).abs() < 1e-12);
        let r = hoeffding_radius(2.0 * 24f64.sqrt(), 1533, 0.1 / 46.0);
        assert!(r > 0.0 && r < 0.2);
    }

    #[test]
    fn allowance_examples() {
        assert_eq!(binomial_allowance(100, 0.0), 0);
        // 0.2 + 3·0.04 = 0.32
        assert_eq!(binomial_allowance(100, 0.2), 32);
    }

    #[test]
    fn report_bookkeeping() {
        let mut r = BoundReport::new("x");
        assert!(r.record(1.0, 2.0, 0.0));
        assert!(!r.record(3.0, 2.0, 0.5));
        assert_eq!((r.instances_checked, r.violations), (2, 1));
        assert_eq!(r.max_slack, -1.0);
        assert!(!r.passed());
        r.allowed_violations = 1;
        assert!(r.passed());
    }
}
