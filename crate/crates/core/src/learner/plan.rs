//! Schedules `(K, M, v)` from the convergence theorems, and the matching
//! lower bounds on total work `K·M·v`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::GraphTopology;
use crate::sampler::{gibbs_certificate, tau_bound_gibbs, CConvention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Guarantee on the objective gap of the averaged iterate.
    Convex,
    /// Guarantee on `‖θ_K − θ*‖₂`; needs `λ > 0`.
    StronglyConvex,
}

/// Split `(β₁, β₂, β₃)` of the error budget between optimization,
/// sampling noise and chain bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Betas(pub f64, pub f64, pub f64);

impl Betas {
    /// Each share must be positive. Shares summing to `s ≠ 1` are
    /// accepted; the plans then guarantee `s·ε` instead of `ε`.
    pub fn validate(&self) -> Result<()> {
        let Betas(b1, b2, b3) = *self;
        if !(b1 > 0.0 && b2 > 0.0 && b3 > 0.0) || !(b1 + b2 + b3).is_finite() {
            return invalid(format!("betas ({b1}, {b2}, {b3}) must all be positive"));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.0 + self.1 + self.2
    }
}

/// Model-level quantities the planners are derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelQuantities {
    pub lipschitz: f64,
    pub lambda: f64,
    pub r2: f64,
    pub big_c: f64,
    pub alpha: f64,
    /// `D ≥ ‖θ₀ − θ*‖₂`.
    pub big_d: f64,
    pub delta: f64,
}

/// The abstract constants `(a, b, c, γ)` of a schedule theorem together
/// with the model quantities that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub mode: Mode,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Contraction `1 − λ/L`; strongly-convex mode only.
    pub gamma: Option<f64>,
    pub alpha: f64,
    pub quantities: ModelQuantities,
}

impl ProblemConstants {
    /// Constants for direct use of the convex schedule theorem.
    pub fn abstract_convex(a: f64, b: f64, c: f64, alpha: f64, delta: f64) -> Self {
        Self {
            mode: Mode::Convex,
            a,
            b,
            c,
            gamma: None,
            alpha,
            quantities: ModelQuantities {
                lipschitz: f64::NAN,
                lambda: 0.0,
                r2: f64::NAN,
                big_c: c,
                alpha,
                big_d: f64::NAN,
                delta,
            },
        }
    }
}

fn check_quantities(q: &ModelQuantities) -> Result<()> {
    if !(q.lipschitz > 0.0) {
        return invalid(format!(
            "Lipschitz constant L = {} must be positive",
            q.lipschitz
        ));
    }
    if !(q.lambda >= 0.0) {
        return invalid(format!("λ = {} must be non-negative", q.lambda));
    }
    if !(q.r2 > 0.0) {
        return invalid(format!("R₂ = {} must be positive", q.r2));
    }
    if !(q.big_c > 0.0) {
        return invalid(format!("C = {} must be positive", q.big_c));
    }
    if !(q.alpha > 0.0 && q.alpha < 1.0) {
        return invalid(format!("α = {} must lie in (0, 1)", q.alpha));
    }
    if !(q.big_d > 0.0) {
        return invalid(format!("D = {} must be positive", q.big_d));
    }
    if !(q.delta > 0.0 && q.delta <= 1.0) {
        return invalid(format!("δ = {} must lie in (0, 1]", q.delta));
    }
    Ok(())
}

/// Convex: `a = LD/(4R₂) + ln(1/δ)`, `b = 1`, `c = C`.
/// Strongly convex: `γ = 1 − λ/L`, `a = D`, `b = (L/λ)√(R₂/2)`,
/// `c = 2LR₂C/λ`.
pub fn derive_constants(mode: Mode, q: &ModelQuantities) -> Result<ProblemConstants> {
    check_quantities(q)?;
    match mode {
        Mode::Convex => Ok(ProblemConstants {
            mode,
            a: q.lipschitz * q.big_d / (4.0 * q.r2) + (1.0 / q.delta).ln(),
            b: 1.0,
            c: q.big_c,
            gamma: None,
            alpha: q.alpha,
            quantities: *q,
        }),
        Mode::StronglyConvex => {
            if !(q.lambda > 0.0) {
                return Err(Error::Mode(
                    "strongly-convex planning needs λ > 0; use the convex planner for λ = 0".into(),
                ));
            }
            if q.lambda >= q.lipschitz {
                return invalid(format!(
                    "λ = {} must be below L = {} so that γ = 1 − λ/L lies in (0, 1)",
                    q.lambda, q.lipschitz
                ));
            }
            let ratio = q.lipschitz / q.lambda;
            Ok(ProblemConstants {
                mode,
                a: q.big_d,
                b: ratio * (q.r2 / 2.0).sqrt(),
                c: 2.0 * ratio * q.r2 * q.big_c,
                gamma: Some(1.0 - q.lambda / q.lipschitz),
                alpha: q.alpha,
                quantities: *q,
            })
        }
    }
}

/// Real-valued schedule before rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSchedule {
    pub big_k: f64,
    pub big_m: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLengths {
    pub iterations: u64,
    pub samples: u64,
    pub chain_length: u64,
}

impl RunLengths {
    pub fn new(iterations: u64, samples: u64, chain_length: u64) -> Self {
        Self {
            iterations,
            samples,
            chain_length,
        }
    }

    pub fn total_work(&self) -> f64 {
        self.iterations as f64 * self.samples as f64 * self.chain_length as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lengths: RunLengths,
    pub raw: RawSchedule,
    pub mode: Mode,
    pub betas: Betas,
    /// `ε` in the units of the schedule theorem (for convex plans built
    /// from an objective target this is `ε_f L / (8R₂²)`).
    pub epsilon: f64,
    pub delta: f64,
    pub constants: ProblemConstants,
}

impl Schedule {
    pub fn total_work(&self) -> f64 {
        self.lengths.total_work()
    }
}

/// Ceiling that ignores round-off just above an integer, so that e.g.
/// `ln 32 / ln 2` rounds to 5 rather than 6.
fn ceil_count(x: f64) -> u64 {
    let snapped = x - 1e-9 * x.abs().max(1.0);
    snapped.ceil().max(1.0) as u64
}

fn check_target(epsilon: f64, alpha: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return invalid(format!("ε = {epsilon} must be positive"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("α = {alpha} must lie in (0, 1)"));
    }
    Ok(())
}

/// `K = a²/(β₁²ε)`, `M = (ab/(β₁β₂ε))²`, `v = ln(ac/(β₁β₃ε))/(−ln α)`,
/// which make `(1/K)(a + bK/√M + Kcα^v)² ≤ ε`. `M` is additionally
/// floored at `3K/ln(1/δ)` when `δ < 1`, the sample-size condition of the
/// convex convergence theorem.
pub fn plan_convex(consts: &ProblemConstants, epsilon: f64, betas: Betas) -> Result<Schedule> {
    betas.validate()?;
    check_target(epsilon, consts.alpha)?;
    let (a, b, c) = (consts.a, consts.b, consts.c);
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return invalid(format!("a, b, c = ({a}, {b}, {c}) must be positive"));
    }
    let Betas(b1, b2, b3) = betas;
    let big_k = a * a / (b1 * b1 * epsilon);
    let big_m = (a * b / (b1 * b2 * epsilon)).powi(2);
    let v = (a * c / (b1 * b3 * epsilon)).ln() / -consts.alpha.ln();
    let iterations = ceil_count(big_k);
    let mut samples = ceil_count(big_m);
    let delta = consts.quantities.delta;
    if delta < 1.0 {
        let floor = 3.0 * iterations as f64 / (1.0 / delta).ln();
        samples = samples.max(ceil_count(floor));
    }
    Ok(Schedule {
        lengths: RunLengths::new(iterations, samples, ceil_count(v)),
        raw: RawSchedule { big_k, big_m, v },
        mode: Mode::Convex,
        betas,
        epsilon,
        delta,
        constants: *consts,
    })
}

/// Convex plan for an objective-gap target `ε_f`, via `ε = ε_f L/(8R₂²)`.
pub fn plan_convex_objective(
    consts: &ProblemConstants,
    epsilon_f: f64,
    betas: Betas,
) -> Result<Schedule> {
    let q = &consts.quantities;
    plan_convex(consts, epsilon_f * q.lipschitz / (8.0 * q.r2 * q.r2), betas)
}

/// `(1/K)(a + bK/√M + Kcα^v)²`, the quantity bounded by [`plan_convex`].
pub fn convex_schedule_value(a: f64, b: f64, c: f64, alpha: f64, k: f64, m: f64, v: f64) -> f64 {
    (a + b * k / m.sqrt() + k * c * alpha.powf(v)).powi(2) / k
}

/// Chain length `v = ln(c/(β₃ε))/(1 − α)` of the strongly-convex plan.
pub fn strongly_convex_chain_length(c: f64, alpha: f64, beta3: f64, epsilon: f64) -> f64 {
    (c / (beta3 * epsilon)).ln() / (1.0 - alpha)
}

/// `K = ln(a/(β₁ε))/(1 − γ)`, `M = b²/(ε²β₂²)·(1 + √(2 ln(K/δ)))²` using
/// the rounded `K`, and `v = ln(c/(β₃ε))/(1 − α)`. With the constants of
/// [`derive_constants`] these are `K = (L/λ) ln(D/(β₁ε))`,
/// `M = L²R₂/(2ε²β₂²λ²)·(…)²` and `v = ln(2LR₂C/(β₃ελ))/(1 − α)`.
pub fn plan_strongly_convex(
    consts: &ProblemConstants,
    epsilon: f64,
    delta: f64,
    betas: Betas,
) -> Result<Schedule> {
    betas.validate()?;
    check_target(epsilon, consts.alpha)?;
    let gamma = match (consts.mode, consts.gamma) {
        (Mode::StronglyConvex, Some(g)) => g,
        _ => {
            return Err(Error::Mode(
                "strongly-convex planning needs λ > 0 constants; use the convex planner".into(),
            ))
        }
    };
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1)"));
    }
    let Betas(b1, b2, b3) = betas;
    let big_k = (consts.a / (b1 * epsilon)).ln() / (1.0 - gamma);
    let iterations = ceil_count(big_k);
    let tail = 1.0 + (2.0 * (iterations as f64 / delta).ln()).sqrt();
    let big_m = consts.b * consts.b / (epsilon * epsilon * b2 * b2) * tail * tail;
    let v = strongly_convex_chain_length(consts.c, consts.alpha, b3, epsilon);
    Ok(Schedule {
        lengths: RunLengths::new(iterations, ceil_count(big_m), ceil_count(v)),
        raw: RawSchedule { big_k, big_m, v },
        mode: Mode::StronglyConvex,
        betas,
        epsilon,
        delta,
        constants: *consts,
    })
}

/// Any `(K, M, v)` with `(1/K)(a + bK/√M + Kcα^v)² ≤ ε` has
/// `KMv ≥ (a⁴b²/ε³)·ln(ac/ε)/(−ln α)` (zero once `ε ≥ ac`).
pub fn work_lower_bound_convex(a: f64, b: f64, c: f64, alpha: f64, epsilon: f64) -> Result<f64> {
    check_target(epsilon, alpha)?;
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return invalid(format!("a, b, c = ({a}, {b}, {c}) must be positive"));
    }
    let log_factor = (a * c / epsilon).ln().max(0.0);
    Ok(a.powi(4) * b * b / epsilon.powi(3) * log_factor / -alpha.ln())
}

/// Any `(K, M, v)` with `γ^K a + (b/√M)√(ln(K/δ)) + cα^v ≤ ε` has
/// `KMv ≥ (b²/ε²)·ln(a/ε) ln(c/ε)/((−ln γ)(−ln α))·ln(ln(a/ε)/(δ(−ln γ)))`.
///
/// Returns zero when `ε ≥ a` or `ε ≥ c` (the `K` or `v` requirement is
/// vacuous). A non-positive final logarithm is a domain error.
pub fn work_lower_bound_strongly_convex(
    a: f64,
    b: f64,
    c: f64,
    gamma: f64,
    alpha: f64,
    epsilon: f64,
    delta: f64,
) -> Result<f64> {
    check_target(epsilon, alpha)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return invalid(format!("γ = {gamma} must lie in (0, 1)"));
    }
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return invalid(format!("a, b, c = ({a}, {b}, {c}) must be positive"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1]"));
    }
    let log_a = (a / epsilon).ln();
    let log_c = (c / epsilon).ln();
    if log_a <= 0.0 || log_c <= 0.0 {
        return Ok(0.0);
    }
    let inner = log_a / (delta * -gamma.ln());
    if inner <= 1.0 {
        return Err(Error::Domain(format!(
            "ln(ln(a/ε)/(δ(−ln γ))) = ln({inner}) is not positive"
        )));
    }
    Ok(b * b / (epsilon * epsilon) * log_a * log_c / (-gamma.ln() * -alpha.ln()) * inner.ln())
}

/// The strongly-convex plan for a box set `|θ_ij| ≤ β` under both
/// conventions for the mixing constant `C`, next to the Gibbs mixing
/// time `τ(ε_mix)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionComparison {
    pub exact: Schedule,
    pub log_n: Schedule,
    pub tau: u64,
    pub tau_epsilon: f64,
}

impl ConventionComparison {
    pub fn lines(&self) -> Vec<String> {
        let show = |name: &str, s: &Schedule| {
            format!(
                "{name}: C = {:.6}, α = {:.8}, K = {}, M = {}, v = {} (raw {:.2})",
                s.constants.quantities.big_c,
                s.constants.alpha,
                s.lengths.iterations,
                s.lengths.samples,
                s.lengths.chain_length,
                s.raw.v
            )
        };
        vec![
            show("C = exp(a/b) = N", &self.exact),
            show("C = ln N", &self.log_n),
            format!(
                "Gibbs mixing time τ({}) = {}; neither C reading reproduces v = {} from the chain-length formula",
                self.tau_epsilon, self.tau, self.tau
            ),
        ]
    }
}

/// Plans with `C` and `α` taken from the Gibbs certificate of the box
/// `|θ_ij| ≤ β` on `topology`, once per [`CConvention`]. The `big_c` and
/// `alpha` fields of `q` are ignored.
pub fn compare_c_conventions(
    topology: &GraphTopology,
    beta: f64,
    q: &ModelQuantities,
    epsilon: f64,
    betas: Betas,
    tau_epsilon: f64,
) -> Result<ConventionComparison> {
    let plan_with = |convention| -> Result<Schedule> {
        let cert = gibbs_certificate(topology, beta, convention)?;
        let quantities = ModelQuantities {
            big_c: cert.big_c,
            alpha: cert.alpha,
            ..*q
        };
        let consts = derive_constants(Mode::StronglyConvex, &quantities)?;
        plan_strongly_convex(&consts, epsilon, q.delta, betas)
    };
    Ok(ConventionComparison {
        exact: plan_with(CConvention::Exact)?,
        log_n: plan_with(CConvention::LogN)?,
        tau: tau_bound_gibbs(
            topology.num_nodes(),
            topology.max_degree(),
            beta,
            tau_epsilon,
        )?,
        tau_epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_example_quantities(big_c: f64) -> ModelQuantities {
        ModelQuantities {
            lipschitz: 10.0,
            lambda: 1.0,
            r2: 24f64.sqrt(),
            big_c,
            alpha: (-(1.0 - 4.0 * 0.2f64.tanh()) / 16.0).exp(),
            big_d: (24.0 * 0.4f64 * 0.4).sqrt(),
            delta: 0.1,
        }
    }

    #[test]
    fn grid_example_schedule() {
        let consts =
            derive_constants(Mode::StronglyConvex, &grid_example_quantities(16.0)).unwrap();
        let s = plan_strongly_convex(&consts, 2.0, 0.1, Betas(0.01, 0.9, 0.1)).unwrap();
        assert_eq!(s.lengths.iterations, 46);
        assert_eq!(s.lengths.samples, 1533);
        // ln(2LR₂C/(β₃ελ))/(1−α) with C = 16
        assert_eq!(s.lengths.chain_length, 687);

        let consts =
            derive_constants(Mode::StronglyConvex, &grid_example_quantities(16f64.ln())).unwrap();
        let s = plan_strongly_convex(&consts, 2.0, 0.1, Betas(0.01, 0.9, 0.1)).unwrap();
        assert_eq!((s.lengths.iterations, s.lengths.samples), (46, 1533));
        assert_eq!(s.lengths.chain_length, 552);
    }

    #[test]
    fn convention_comparison_on_grid() {
        let topology = GraphTopology::grid(4, 4).unwrap();
        let q = grid_example_quantities(f64::NAN);
        let cmp =
            compare_c_conventions(&topology, 0.2, &q, 2.0, Betas(0.01, 0.9, 0.1), 0.01).unwrap();
        assert_eq!(cmp.exact.lengths.chain_length, 687);
        assert_eq!(cmp.log_n.lengths.chain_length, 552);
        assert_eq!(cmp.tau, 561);
        assert_eq!(cmp.lines().len(), 3);
    }

    #[test]
    fn strongly_convex_constants() {
        let consts =
            derive_constants(Mode::StronglyConvex, &grid_example_quantities(16.0)).unwrap();
        assert!((consts.gamma.unwrap() - 0.9).abs() < 1e-15);
        assert!((consts.b - 10.0 * (24f64.sqrt() / 2.0).sqrt()).abs() < 1e-12);
        assert!((consts.b - 15.651).abs() < 1e-3);
        assert!((consts.c - 2.0 * 10.0 * 24f64.sqrt() * 16.0).abs() < 1e-9);
        assert_eq!(consts.a, grid_example_quantities(16.0).big_d);
    }

    #[test]
    fn convex_constants() {
        let mut q = grid_example_quantities(16.0);
        q.delta = 1.0;
        let consts = derive_constants(Mode::Convex, &q).unwrap();
        assert!((consts.a - q.lipschitz * q.big_d / (4.0 * q.r2)).abs() < 1e-15);
        assert_eq!(consts.b, 1.0);
        assert_eq!(consts.c, q.big_c);
    }

    #[test]
    fn zero_lambda_is_a_mode_error() {
        let mut q = grid_example_quantities(16.0);
        q.lambda = 0.0;
        assert!(matches!(
            derive_constants(Mode::StronglyConvex, &q),
            Err(Error::Mode(_))
        ));
        let convex = derive_constants(Mode::Convex, &q).unwrap();
        assert!(matches!(
            plan_strongly_convex(&convex, 1.0, 0.1, Betas(0.2, 0.6, 0.2)),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn k_is_at_least_one_when_already_close() {
        let mut q = grid_example_quantities(16.0);
        q.big_d = 0.01 * 2.0;
        let consts = derive_constants(Mode::StronglyConvex, &q).unwrap();
        let s = plan_strongly_convex(&consts, 2.0, 0.1, Betas(0.01, 0.9, 0.1)).unwrap();
        assert!(s.raw.big_k.abs() < 1e-12);
        assert_eq!(s.lengths.iterations, 1);
    }

    #[test]
    fn unit_convex_example() {
        let consts = ProblemConstants::abstract_convex(1.0, 1.0, 1.0, 0.5, 0.5);
        let s = plan_convex(&consts, 0.25, Betas(0.5, 0.25, 0.25)).unwrap();
        assert_eq!(s.lengths.iterations, 16);
        assert_eq!(s.lengths.samples, 1024);
        assert_eq!(s.lengths.chain_length, 5);
        let value = convex_schedule_value(1.0, 1.0, 1.0, 0.5, s.raw.big_k, s.raw.big_m, s.raw.v);
        assert!(value <= 0.25 * (1.0 + 1e-12));
        let lower = work_lower_bound_convex(1.0, 1.0, 1.0, 0.5, 0.25).unwrap();
        assert!((lower - 128.0).abs() < 1e-9);
        assert!(s.total_work() >= lower);
    }

    #[test]
    fn convex_bound_is_met_with_equality_by_raw_schedule() {
        // a(1 + β₂/β₁ + β₃/β₁) inside the square gives exactly ε
        let (a, b, c, alpha, eps) = (2.3, 0.7, 4.1, 0.93, 0.05);
        let betas = Betas(0.66, 0.33, 0.01);
        let consts = ProblemConstants::abstract_convex(a, b, c, alpha, 1.0);
        let s = plan_convex(&consts, eps, betas).unwrap();
        let value = convex_schedule_value(a, b, c, alpha, s.raw.big_k, s.raw.big_m, s.raw.v);
        assert!((value - eps).abs() < 1e-12 * eps.max(1.0));
    }

    #[test]
    fn raw_convex_work_over_lower_bound() {
        let (a, b, c, alpha, eps) = (3.0, 1.0, 16.0, 0.987, 0.02);
        let betas = Betas(0.66, 0.33, 0.01);
        let Betas(b1, b2, b3) = betas;
        let consts = ProblemConstants::abstract_convex(a, b, c, alpha, 1.0);
        let s = plan_convex(&consts, eps, betas).unwrap();
        let raw_work = s.raw.big_k * s.raw.big_m * s.raw.v;
        let lower = work_lower_bound_convex(a, b, c, alpha, eps).unwrap();
        let log_ac = (a * c / eps).ln();
        let ratio = (log_ac + (1.0 / (b1 * b3)).ln()) / log_ac / (b1.powi(4) * b2 * b2);
        assert!((raw_work / lower - ratio).abs() < 1e-9 * ratio);
    }

    #[test]
    fn convex_sample_floor() {
        // a tiny M from the theorem gets raised to 3K/ln(1/δ)
        let consts = ProblemConstants::abstract_convex(1.0, 0.01, 1.0, 0.5, 0.5);
        let s = plan_convex(&consts, 0.5, Betas(0.5, 0.25, 0.25)).unwrap();
        let floor = 3.0 * s.lengths.iterations as f64 / 2f64.ln();
        assert!(s.lengths.samples as f64 >= floor);
        assert!(s.raw.big_m < floor);
    }

    #[test]
    fn invalid_betas() {
        let consts = ProblemConstants::abstract_convex(1.0, 1.0, 1.0, 0.5, 0.5);
        assert!(plan_convex(&consts, 0.25, Betas(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn strongly_convex_lower_bound_properties() {
        let lb = |b: f64, eps: f64| {
            work_lower_bound_strongly_convex(5.0, b, 40.0, 0.9, 0.98, eps, 0.1).unwrap()
        };
        assert!((lb(2.0, 0.1) / lb(1.0, 0.1) - 4.0).abs() < 1e-12);
        assert_eq!(lb(1.0, 5.0), 0.0);
        assert!(lb(1.0, 0.25) > lb(1.0, 0.5));
        assert!(matches!(
            work_lower_bound_strongly_convex(1.2, 1.0, 40.0, 0.5, 0.98, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lower_bound_vanishes_when_eps_reaches_ac() {
        assert_eq!(
            work_lower_bound_convex(2.0, 1.0, 3.0, 0.9, 6.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn grid_example_dominates_lower_bound() {
        let consts =
            derive_constants(Mode::StronglyConvex, &grid_example_quantities(16.0)).unwrap();
        let s = plan_strongly_convex(&consts, 2.0, 0.1, Betas(0.01, 0.9, 0.1)).unwrap();
        let lb = work_lower_bound_strongly_convex(
            consts.a,
            consts.b,
            consts.c,
            consts.gamma.unwrap(),
            consts.alpha,
            2.0,
            0.1,
        )
        .unwrap();
        assert!(s.total_work() >= lb);
    }

    #[test]
    fn ceil_count_snaps_roundoff() {
        assert_eq!(ceil_count(5.000000000000001), 5);
        assert_eq!(ceil_count(5.01), 6);
        assert_eq!(ceil_count(-3.0), 1);
        assert_eq!(ceil_count(45.85), 46);
    }
}
