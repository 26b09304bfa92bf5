//! The default verification suite: every check at its standard size.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{box_projection_oracle, spectral_projection_oracle};
use super::{
    check_analytic_bounds, check_estimation_moments, check_finite_differences,
    check_gradient_convergence, check_hoeffding_coverage, check_mixing_certificate,
    check_sum_error_bound, envelope_coverage, run_sum_error_experiment, BoundReport, CoverageRig,
    SampleSource,
};
use crate::error::{Error, Result};
use crate::learner::{Betas, Mode, RunLengths};
use crate::model::{Dataset, GraphTopology, IsingModel, Parameters};
use crate::projection::{coupling_matrix, project, project_box, ConstraintSet};
use crate::sampler::{gibbs_certificate, CConvention};
use crate::vecops::max_abs_diff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    Analytic,
    Mixing,
    Concentration,
    SumError,
    Envelope,
    Gradient,
    Projection,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Analytic,
        Check::Mixing,
        Check::Concentration,
        Check::SumError,
        Check::Envelope,
        Check::Gradient,
        Check::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Analytic => "analytic",
            Check::Mixing => "mixing",
            Check::Concentration => "concentration",
            Check::SumError => "sum-error",
            Check::Envelope => "envelope",
            Check::Gradient => "gradient",
            Check::Projection => "projection",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `all` or one check name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    All,
    Only(Check),
}

impl Suite {
    pub fn checks(self) -> Vec<Check> {
        match self {
            Suite::All => Check::ALL.to_vec(),
            Suite::Only(c) => vec![c],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(Suite::All);
        }
        Check::ALL
            .iter()
            .find(|c| c.name() == s)
            .map(|c| Suite::Only(*c))
            .ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!(
                    "unknown suite '{s}'; expected 'all' or one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub reports: Result<Vec<BoundReport>>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(&self.reports, Ok(rs) if rs.iter().all(BoundReport::passed))
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckOutcome> {
    suite
        .checks()
        .into_iter()
        .map(|check| CheckOutcome {
            check,
            reports: run_check(check, seed),
        })
        .collect()
}

pub fn run_check(check: Check, seed: u64) -> Result<Vec<BoundReport>> {
    match check {
        Check::Analytic => check_analytic_bounds(&grid(3, 3)?, 200, 0.5, 1.0, seed),
        Check::Mixing => mixing_check(seed),
        Check::Concentration => concentration_checks(seed),
        Check::SumError => sum_error_check(seed),
        Check::Envelope => envelope_checks(seed),
        Check::Gradient => gradient_checks(seed),
        Check::Projection => check_projection_oracles(20, seed),
    }
}

fn grid(rows: usize, cols: usize) -> Result<IsingModel> {
    Ok(IsingModel::couplings_only(GraphTopology::grid(rows, cols)?))
}

/// Couplings uniform in `[−β, β]` with the first pinned at `β`.
pub fn random_box_point(model: &IsingModel, beta: f64, seed: u64) -> Parameters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..model.dim())
        .map(|_| rng.random_range(-beta..=beta))
        .collect();
    v[0] = beta;
    Parameters::from_vec(v)
}

pub fn mixing_check(seed: u64) -> Result<Vec<BoundReport>> {
    let model = grid(2, 2)?;
    let beta = 0.2;
    let cert = gibbs_certificate(&model.topology, beta, CConvention::Exact)?;
    let mut reports = Vec::new();
    for (label, theta) in [
        (
            "all couplings at β",
            Parameters::from_vec(vec![beta; model.dim()]),
        ),
        ("random in box", random_box_point(&model, beta, seed)),
    ] {
        let mut r = check_mixing_certificate(&model, &theta, &cert, 5000)?;
        r.name = format!("mixing-certificate ({label})");
        reports.push(r);
    }
    Ok(reports)
}

pub fn concentration_checks(seed: u64) -> Result<Vec<BoundReport>> {
    let model = grid(2, 2)?;
    let theta = random_box_point(&model, 0.2, seed);
    let mut reports = vec![check_hoeffding_coverage(
        &model,
        &theta,
        100,
        0.1,
        300,
        SampleSource::Exact,
        seed,
    )?];
    let at_100 = check_estimation_moments(&model, &theta, 100, 2000, SampleSource::Exact, seed)?;
    let at_400 = check_estimation_moments(
        &model,
        &theta,
        400,
        2000,
        SampleSource::Exact,
        seed ^ 0x5a5a,
    )?;
    reports.extend(at_100);
    reports.extend(at_400);
    Ok(reports)
}

pub fn sum_error_check(seed: u64) -> Result<Vec<BoundReport>> {
    let model = grid(2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Dataset::random(&model, 5, &mut rng)?;
    let runs = run_sum_error_experiment(
        &model,
        &data,
        RunLengths::new(10, 200, 20),
        ConstraintSet::boxed(0.2),
        0.0,
        10.0,
        200,
        seed,
    )?;
    Ok(vec![check_sum_error_bound(&model, &runs, 0.2)?])
}

/// The two coverage rigs on a 3×3 grid with `δ = 0.2`.
pub fn coverage_rigs(seed: u64) -> [CoverageRig; 2] {
    [
        CoverageRig {
            mode: Mode::StronglyConvex,
            beta: 0.2,
            lambda: 1.0,
            lipschitz: 10.0,
            epsilon: 2.0,
            delta: 0.2,
            betas: Betas(0.1, 0.8, 0.1),
            runs: 100,
            seed,
            optimum_tolerance: 1e-10,
        },
        CoverageRig {
            mode: Mode::Convex,
            beta: 0.2,
            lambda: 0.0,
            lipschitz: 10.0,
            epsilon: 5.0,
            delta: 0.2,
            betas: Betas(0.66, 0.33, 0.01),
            runs: 100,
            seed: seed.wrapping_add(1000),
            optimum_tolerance: 1e-10,
        },
    ]
}

pub fn envelope_checks(seed: u64) -> Result<Vec<BoundReport>> {
    let model = grid(3, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Dataset::random(&model, 10, &mut rng)?;
    let mut reports = Vec::new();
    for rig in coverage_rigs(seed) {
        let out = envelope_coverage(&model, &data, &rig)?;
        reports.push(out.coverage);
        reports.push(out.inexact);
        reports.push(out.smoothness);
    }
    Ok(reports)
}

pub fn gradient_checks(seed: u64) -> Result<Vec<BoundReport>> {
    let model = IsingModel::new(GraphTopology::grid(3, 3)?, true);
    let fd = check_finite_differences(&model, 50, 1e-5, seed)?;
    let small = grid(2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Dataset::random(&small, 5, &mut rng)?;
    let theta = random_box_point(&small, 0.2, seed);
    let conv = check_gradient_convergence(&small, &theta, &data, 0.0, 100_000, 5000, 1e-2, seed)?;
    Ok(vec![fd, conv])
}

fn random_graph<R: Rng>(rng: &mut R) -> Result<IsingModel> {
    let n = rng.random_range(2..=9usize);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, n - 1));
    }
    let fields = rng.random_bool(0.5);
    Ok(IsingModel::new(GraphTopology::new(n, edges)?, fields))
}

/// Box projection against the QP oracle and spectral projection against
/// the cutting-plane oracle on `instances` random graphs with `N ≤ 9`.
pub fn check_projection_oracles(instances: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boxed = BoundReport::new("box-vs-qp-oracle");
    let mut feasible = BoundReport::new("spectral-feasibility");
    let mut idempotent = BoundReport::new("spectral-idempotence");
    let mut agreement = BoundReport::new("spectral-vs-cutting-plane-oracle");
    let mut bracket = BoundReport::new("spectral-within-oracle-bracket");
    for _ in 0..instances {
        let model = random_graph(&mut rng)?;
        let theta = Parameters::from_vec(
            (0..model.dim())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect(),
        );
        let beta = rng.random_range(0.1..0.5);
        let ours = project_box(&model, &theta, beta, None);
        let oracle = box_projection_oracle(&model, &theta, beta)?;
        // the oracle's x₀ − (x₀ − β) may differ from β in the last bit
        boxed.record(max_abs_diff(ours.as_slice(), oracle.as_slice()), 0.0, 1e-15);

        let c = rng.random_range(0.2..0.8);
        let set = ConstraintSet::spectral(c);
        let p = project(&model, &theta, &set)?;
        feasible.record(coupling_matrix(&model, &p).spectral_norm(), c, 1e-6);
        let pp = project(&model, &p, &set)?;
        idempotent.record(pp.distance(&p), 0.0, 1e-6);
        let o = spectral_projection_oracle(&model, &theta, c, 1e-4, 20_000)?;
        let ours_dist = p.distance(&theta);
        let rel = if o.upper == 0.0 {
            ours_dist
        } else {
            (ours_dist - o.lower).abs() / o.lower
        };
        agreement.record(rel, 1e-3, 0.0);
        // ours must not beat the certified lower bound, nor lose to the
        // oracle's feasible point, beyond the projection tolerance
        bracket.record(o.lower - ours_dist, 0.0, 1e-7);
        bracket.record(ours_dist - o.upper, 0.0, 1e-7);
        agreement.note(format!(
            "N = {}, E = {}, c = {c:.3}: ours {ours_dist:.8}, oracle [{:.8}, {:.8}] after {} cuts",
            model.num_nodes(),
            model.num_edges(),
            o.lower,
            o.upper,
            o.cuts
        ));
    }
    Ok(vec![boxed, feasible, idempotent, agreement, bracket])
}
