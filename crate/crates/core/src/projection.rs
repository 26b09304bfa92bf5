//! Euclidean projection onto fast-mixing parameter sets.
//!
//! Only couplings are constrained; node fields pass through unchanged
//! (unless a box set carries an explicit field bound).

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{IsingModel, Parameters};

pub const DEFAULT_SPECTRAL_TOLERANCE: f64 = 1e-8;
pub const MAX_DYKSTRA_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConstraintSet {
    /// `|θ_ij| ≤ beta`, and `|θ_i| ≤ field_bound` when one is given.
    Box { beta: f64, field_bound: Option<f64> },
    /// `‖R(θ)‖₂ ≤ c` with `R_ij = |θ_ij|`.
    Spectral { c: f64, tolerance: f64 },
}

impl ConstraintSet {
    pub fn boxed(beta: f64) -> Self {
        Self::Box {
            beta,
            field_bound: None,
        }
    }

    pub fn spectral(c: f64) -> Self {
        Self::Spectral {
            c,
            tolerance: DEFAULT_SPECTRAL_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Box { beta, field_bound } => {
                if !(beta > 0.0) || !beta.is_finite() {
                    return invalid(format!("box radius β = {beta} must be positive"));
                }
                if let Some(fb) = field_bound {
                    if !(fb > 0.0) {
                        return invalid(format!("field bound {fb} must be positive"));
                    }
                }
            }
            Self::Spectral { c, tolerance } => {
                if !(c > 0.0 && c < 1.0) {
                    return invalid(format!("spectral bound c = {c} must lie in (0, 1)"));
                }
                if !(tolerance > 0.0) {
                    return invalid(format!("tolerance {tolerance} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Euclidean diameter of the set, or `None` when it is unbounded (free
    /// node fields).
    pub fn diameter(&self, model: &IsingModel) -> Option<f64> {
        let e = model.num_edges() as f64;
        let n = model.num_nodes() as f64;
        match *self {
            Self::Box { beta, field_bound } => {
                let edges = 4.0 * beta * beta * e;
                if !model.fields {
                    Some(edges.sqrt())
                } else {
                    field_bound.map(|fb| (edges + 4.0 * fb * fb * n).sqrt())
                }
            }
            // |θ_ij| ≤ c on every edge, and 2‖θ‖² = ‖R‖_F² ≤ N c²
            Self::Spectral { c, .. } => {
                (!model.fields).then(|| (2.0 * c * e.sqrt()).min(c * (2.0 * n).sqrt()))
            }
        }
    }

    /// Membership test, allowing `slack` on every inequality.
    pub fn contains(&self, model: &IsingModel, theta: &Parameters, slack: f64) -> bool {
        match *self {
            Self::Box { beta, field_bound } => {
                theta
                    .couplings(model)
                    .iter()
                    .all(|w| w.abs() <= beta + slack)
                    && field_bound
                        .is_none_or(|fb| theta.fields(model).iter().all(|h| h.abs() <= fb + slack))
            }
            Self::Spectral { c, .. } => coupling_matrix(model, theta).spectral_norm() <= c + slack,
        }
    }
}

/// `R(θ)`: symmetric, nonnegative, zero diagonal, `|θ_ij|` on edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix(DMatrix<f64>);

impl CouplingMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Largest singular value; for a symmetric matrix, the largest
    /// eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn coupling_matrix(model: &IsingModel, theta: &Parameters) -> CouplingMatrix {
    let n = model.num_nodes();
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), w) in model.topology.edges().iter().zip(theta.couplings(model)) {
        m[(i, j)] = w.abs();
        m[(j, i)] = w.abs();
    }
    CouplingMatrix(m)
}

/// Clip every coupling into `[−β, β]` (and fields into the field bound).
pub fn project_box(
    model: &IsingModel,
    theta: &Parameters,
    beta: f64,
    field_bound: Option<f64>,
) -> Parameters {
    let e = model.num_edges();
    let mut out = theta.clone();
    let v = out.as_mut_slice();
    for w in &mut v[..e] {
        *w = w.clamp(-beta, beta);
    }
    if let Some(fb) = field_bound {
        for h in &mut v[e..] {
            *h = h.clamp(-fb, fb);
        }
    }
    out
}

/// Projection of a symmetric matrix onto `{X : ‖X‖₂ ≤ c}` by clipping its
/// eigenvalues.
fn clip_spectrum(x: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let clipped = eig.eigenvalues.map(|l| l.clamp(-c, c));
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}

/// Projection onto symmetric nonnegative matrices supported on the edge set.
fn restrict_to_edges(y: &DMatrix<f64>, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let n = y.nrows();
    let mut out = DMatrix::zeros(n, n);
    for &(i, j) in edges {
        let v = (0.5 * (y[(i, j)] + y[(j, i)])).max(0.0);
        out[(i, j)] = v;
        out[(j, i)] = v;
    }
    out
}

/// Projection onto `{θ : ‖R(θ)‖₂ ≤ c}`.
///
/// Works on the magnitudes `|θ_ij|`: Dykstra's alternating projections
/// between the spectral ball and the set of nonnegative symmetric matrices
/// supported on the edges, run until both the step and the gap between the
/// two iterates fall below `tolerance`. Original signs are then restored.
/// The Frobenius norm on edge-supported matrices counts each edge twice, so
/// the matrix-space projection coincides with the one in parameter space.
pub fn project_spectral(
    model: &IsingModel,
    theta: &Parameters,
    c: f64,
    tolerance: f64,
) -> Result<Parameters> {
    ConstraintSet::Spectral { c, tolerance }.validate()?;
    let start = coupling_matrix(model, theta).0;
    if spectral_norm(&start) <= c {
        return Ok(theta.clone());
    }
    let edges = model.topology.edges();
    let n = start.nrows();
    let mut x = start.clone();
    let mut p = DMatrix::zeros(n, n);
    let mut q = DMatrix::zeros(n, n);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..MAX_DYKSTRA_ITERATIONS {
        let y = clip_spectrum(&(&x + &p), c);
        p = &x + &p - &y;
        let x_next = restrict_to_edges(&(&y + &q), edges);
        q = &y + &q - &x_next;
        residual = (&x_next - &x).norm().max((&y - &x_next).norm());
        x = x_next;
        if residual < tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: MAX_DYKSTRA_ITERATIONS,
            residual,
        });
    }
    // The last iterate sits on the edge-supported side and may exceed c by
    // O(tolerance); pull it onto the ball.
    let norm = spectral_norm(&x);
    if norm > c {
        x *= c / norm;
    }
    let mut out = theta.clone();
    for (w, &(i, j)) in out.as_mut_slice().iter_mut().zip(edges) {
        *w = w.signum() * x[(i, j)];
    }
    Ok(out)
}

/// `Π_Θ[θ] = argmin_{φ ∈ Θ} ‖φ − θ‖₂`.
pub fn project(model: &IsingModel, theta: &Parameters, set: &ConstraintSet) -> Result<Parameters> {
    set.validate()?;
    match *set {
        ConstraintSet::Box { beta, field_bound } => {
            Ok(project_box(model, theta, beta, field_bound))
        }
        ConstraintSet::Spectral { c, tolerance } => project_spectral(model, theta, c, tolerance),
    }
}
