//! Mixing-time bounds and their conversion to geometric-decay certificates
//! `‖M_θ^v q − p_θ‖_TV ≤ C α^v`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::GraphTopology;

/// Parameter set a certificate applies to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CertifiedSet {
    /// `|θ_ij| ≤ beta` on a graph of maximum degree `max_degree`.
    Box { beta: f64, max_degree: usize },
    /// `‖R(θ)‖₂ ≤ c`.
    Spectral { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingCertificate {
    pub big_c: f64,
    pub alpha: f64,
    pub constraint: Option<CertifiedSet>,
}

impl MixingCertificate {
    pub fn new(big_c: f64, alpha: f64, constraint: Option<CertifiedSet>) -> Result<Self> {
        let cert = Self {
            big_c,
            alpha,
            constraint,
        };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("certificate α = {} must lie in (0, 1)", self.alpha));
        }
        if !(self.big_c > 0.0) || !self.big_c.is_finite() {
            return invalid(format!("certificate C = {} must be positive", self.big_c));
        }
        Ok(())
    }

    /// `C α^v`.
    pub fn tv_bound(&self, v: u64) -> f64 {
        self.big_c * self.alpha.powf(v as f64)
    }
}

/// Which constant to report as `C` for the Gibbs bound.
///
/// `Exact` is `exp(a/b) = N`, the value implied by the τ → (C, α)
/// conversion. `LogN` is `ln N`, the value quoted for the 4×4 grid example;
/// it is kept only to reproduce that schedule and is not a valid
/// certificate in general.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CConvention {
    #[default]
    Exact,
    LogN,
}

fn contraction_gap(max_degree: usize, beta: f64) -> Result<f64> {
    let gap = 1.0 - max_degree as f64 * beta.tanh();
    if !(gap > 0.0) {
        return Err(Error::NoCertificate(format!(
            "Δ·tanh(β) = {}·tanh({beta}) = {:.6} ≥ 1, the Gibbs mixing bound is vacuous",
            max_degree,
            max_degree as f64 * beta.tanh()
        )));
    }
    Ok(gap)
}

fn tau_from_gap(n: usize, gap: f64, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return invalid(format!("ε = {epsilon} must be positive"));
    }
    let n = n as f64;
    let raw = n * (n / epsilon).ln() / gap;
    // ε ≥ N makes the logarithm non-positive; zero steps already suffice.
    Ok(raw.ceil().max(0.0) as u64)
}

/// `⌈N ln(N/ε) / (1 − Δ tanh β)⌉`, the random-scan Gibbs mixing time bound
/// for `|θ_ij| ≤ β`.
pub fn tau_bound_gibbs(n: usize, max_degree: usize, beta: f64, epsilon: f64) -> Result<u64> {
    tau_from_gap(n, contraction_gap(max_degree, beta)?, epsilon)
}

/// `⌈N ln(N/ε) / (1 − ‖R(θ)‖)⌉`.
pub fn tau_bound_spectral(norm_of_r: f64, n: usize, epsilon: f64) -> Result<u64> {
    let gap = 1.0 - norm_of_r;
    if !(gap > 0.0) {
        return Err(Error::NoCertificate(format!(
            "‖R(θ)‖ = {norm_of_r} ≥ 1, the spectral mixing bound is vacuous"
        )));
    }
    tau_from_gap(n, gap, epsilon)
}

/// From `τ(ε) ≤ ⌈a + b ln(1/ε)⌉`: `C = exp(a/b)`, `α = exp(−1/b)`.
pub fn certificate_from_tau(a: f64, b: f64) -> Result<MixingCertificate> {
    if !(b > 0.0) {
        return invalid(format!("b = {b} must be positive"));
    }
    MixingCertificate::new((a / b).exp(), (-1.0 / b).exp(), None)
}

fn certificate_from_gap(
    n: usize,
    gap: f64,
    convention: CConvention,
    constraint: CertifiedSet,
) -> Result<MixingCertificate> {
    let nf = n as f64;
    let a = nf * nf.ln() / gap;
    let b = nf / gap;
    let mut cert = certificate_from_tau(a, b)?;
    cert.constraint = Some(constraint);
    if convention == CConvention::LogN {
        cert.big_c = nf.ln();
        cert.validate()?;
    }
    Ok(cert)
}

/// Certificate for random-scan Gibbs on the box `|θ_ij| ≤ β`:
/// `C = N`, `α = exp(−(1 − Δ tanh β)/N)`.
pub fn gibbs_certificate(
    topology: &GraphTopology,
    beta: f64,
    convention: CConvention,
) -> Result<MixingCertificate> {
    let gap = contraction_gap(topology.max_degree(), beta)?;
    certificate_from_gap(
        topology.num_nodes(),
        gap,
        convention,
        CertifiedSet::Box {
            beta,
            max_degree: topology.max_degree(),
        },
    )
}

/// Certificate for the spectral set `‖R(θ)‖₂ ≤ c`.
pub fn spectral_certificate(
    num_nodes: usize,
    c: f64,
    convention: CConvention,
) -> Result<MixingCertificate> {
    if !(c < 1.0) {
        return Err(Error::NoCertificate(format!(
            "spectral bound c = {c} must be below 1"
        )));
    }
    certificate_from_gap(num_nodes, 1.0 - c, convention, CertifiedSet::Spectral { c })
}
