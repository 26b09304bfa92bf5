//! Projection oracles that share no code with [`crate::projection`].
//!
//! Both reduce to `min ½‖x − x₀‖²` over an intersection of halfspaces,
//! solved by Hildreth's dual coordinate ascent.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::model::{IsingModel, Parameters};

/// `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Hildreth's method with warm-startable multipliers.
#[derive(Debug, Clone)]
pub struct HildrethQp {
    target: Vec<f64>,
    constraints: Vec<Halfspace>,
    norms: Vec<f64>,
    multipliers: Vec<f64>,
}

impl HildrethQp {
    pub fn new(target: Vec<f64>) -> Self {
        Self {
            target,
            constraints: Vec::new(),
            norms: Vec::new(),
            multipliers: Vec::new(),
        }
    }

    pub fn add(&mut self, h: Halfspace) -> Result<()> {
        if h.normal.len() != self.target.len() {
            return invalid("halfspace dimension does not match the target");
        }
        let norm2: f64 = h.normal.iter().map(|v| v * v).sum();
        if norm2 == 0.0 {
            return invalid("halfspace normal is zero");
        }
        self.constraints.push(h);
        self.norms.push(norm2);
        self.multipliers.push(0.0);
        Ok(())
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = self.target.clone();
        for (h, &mu) in self.constraints.iter().zip(&self.multipliers) {
            if mu != 0.0 {
                for (xi, ai) in x.iter_mut().zip(&h.normal) {
                    *xi -= mu * ai;
                }
            }
        }
        x
    }

    /// One pass of coordinate ascent over all multipliers; returns the
    /// largest resulting move of `x`.
    fn sweep(&mut self, x: &mut [f64]) -> f64 {
        let mut moved: f64 = 0.0;
        for ((h, &n2), mu) in self
            .constraints
            .iter()
            .zip(&self.norms)
            .zip(self.multipliers.iter_mut())
        {
            let ax: f64 = h.normal.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            let next = (*mu + (ax - h.offset) / n2).max(0.0);
            let change = next - *mu;
            if change != 0.0 {
                for (xi, ai) in x.iter_mut().zip(&h.normal) {
                    *xi -= change * ai;
                }
                *mu = next;
                moved = moved.max(change.abs() * n2.sqrt());
            }
        }
        moved
    }

    /// Runs `sweeps` passes and returns the primal point.
    pub fn ascend(&mut self, sweeps: usize) -> Vec<f64> {
        let mut x = self.primal();
        for _ in 0..sweeps {
            self.sweep(&mut x);
        }
        x
    }

    /// Dual objective `Σ μ_k(a_k·x₀ − b_k) − ½‖Σ μ_k a_k‖²`. By weak
    /// duality it never exceeds the optimal value `½‖x* − x₀‖²`.
    pub fn dual_value(&self) -> f64 {
        let x = self.primal();
        let linear: f64 = self
            .constraints
            .iter()
            .zip(&self.multipliers)
            .map(|(h, mu)| {
                mu * (h
                    .normal
                    .iter()
                    .zip(&self.target)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    - h.offset)
            })
            .sum();
        let shift: f64 = x
            .iter()
            .zip(&self.target)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        linear - 0.5 * shift
    }

    /// Sweeps until no multiplier moves `x` by more than `tol` and every
    /// constraint holds within `tol`.
    pub fn solve(&mut self, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
        let mut x = self.primal();
        for _ in 0..max_sweeps {
            let moved = self.sweep(&mut x);
            if moved <= tol {
                let worst = self
                    .constraints
                    .iter()
                    .map(|h| h.normal.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - h.offset)
                    .fold(f64::NEG_INFINITY, f64::max);
                if worst <= tol {
                    return Ok(x);
                }
            }
        }
        Err(Error::Convergence {
            iterations: max_sweeps,
            residual: f64::NAN,
        })
    }
}

/// Box projection as a QP with `2E` halfspaces `±θ_e ≤ β`.
pub fn box_projection_oracle(
    model: &IsingModel,
    theta: &Parameters,
    beta: f64,
) -> Result<Parameters> {
    let d = model.dim();
    let mut qp = HildrethQp::new(theta.as_slice().to_vec());
    for e in 0..model.num_edges() {
        for sign in [1.0, -1.0] {
            let mut normal = vec![0.0; d];
            normal[e] = sign;
            qp.add(Halfspace {
                normal,
                offset: beta,
            })?;
        }
    }
    Ok(Parameters::from_vec(qp.solve(1e-15, 1000)?))
}

/// Result of [`spectral_projection_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOracle {
    /// The feasible point `θ_outer · c/‖R(θ_outer)‖₂` (when needed).
    pub feasible: Parameters,
    /// Certified lower bound on the true projection distance.
    pub lower: f64,
    /// Distance from the input to `feasible`: an upper bound.
    pub upper: f64,
    pub cuts: usize,
}

fn edge_matrix(model: &IsingModel, w: &[f64]) -> DMatrix<f64> {
    let n = model.num_nodes();
    let mut r = DMatrix::<f64>::zeros(n, n);
    for (&v, &(i, j)) in w.iter().zip(model.topology.edges()) {
        r[(i, j)] = v;
        r[(j, i)] = v;
    }
    r
}

fn top_eigenpair(m: DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m);
    let (idx, val) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    (
        val,
        eig.eigenvectors
            .column(idx)
            .iter()
            .map(|v| v.abs())
            .collect(),
    )
}

/// Projection of `θ` onto `{‖R(θ)‖₂ ≤ c}` by Kelley cutting planes in the
/// coupling magnitudes `w = |θ_E|`: each round solves the QP over
/// `w ≥ 0` and the cuts so far, then adds the subgradient cut
/// `Σ_e 2u_i u_j w_e ≤ c` from the Perron vector `u` of `R(w)`. Stops
/// once the relative gap between the lower and upper distances is below
/// `rel_gap`. The lower distance comes from the dual objective, so it is
/// valid whether or not the inner QP has fully converged.
pub fn spectral_projection_oracle(
    model: &IsingModel,
    theta: &Parameters,
    c: f64,
    rel_gap: f64,
    max_cuts: usize,
) -> Result<SpectralOracle> {
    if !(c > 0.0) {
        return invalid(format!("c = {c} must be positive"));
    }
    let e = model.num_edges();
    let signs: Vec<f64> = theta.as_slice()[..e]
        .iter()
        .map(|v| if *v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let w0: Vec<f64> = theta.as_slice()[..e].iter().map(|v| v.abs()).collect();
    let assemble = |w: &[f64]| {
        let mut out = theta.as_slice().to_vec();
        for ((o, wi), s) in out.iter_mut().zip(w).zip(&signs) {
            *o = s * wi;
        }
        Parameters::from_vec(out)
    };
    let dist = |w: &[f64]| {
        w.iter()
            .zip(&w0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    let (norm0, _) = top_eigenpair(edge_matrix(model, &w0));
    if norm0 <= c {
        return Ok(SpectralOracle {
            feasible: theta.clone(),
            lower: 0.0,
            upper: 0.0,
            cuts: 0,
        });
    }
    let mut qp = HildrethQp::new(w0.clone());
    for k in 0..e {
        let mut normal = vec![0.0; e];
        normal[k] = -1.0;
        qp.add(Halfspace {
            normal,
            offset: 0.0,
        })?;
    }
    let mut best_upper = f64::INFINITY;
    let mut best_feasible = theta.clone();
    let mut lower: f64 = 0.0;
    for cut in 0..=max_cuts {
        let x = qp.ascend(20);
        lower = lower.max(2.0 * qp.dual_value()).max(0.0);
        let w: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let (norm, u) = top_eigenpair(edge_matrix(model, &w));
        let scaled: Vec<f64> = if norm > c {
            w.iter().map(|v| v * c / norm).collect()
        } else {
            w.clone()
        };
        let upper = dist(&scaled);
        if upper < best_upper {
            best_upper = upper;
            best_feasible = assemble(&scaled);
        }
        let lower_dist = lower.sqrt();
        if best_upper - lower_dist <= rel_gap * lower_dist {
            return Ok(SpectralOracle {
                feasible: best_feasible,
                lower: lower_dist,
                upper: best_upper,
                cuts: cut,
            });
        }
        if norm > c {
            let normal: Vec<f64> = model
                .topology
                .edges()
                .iter()
                .map(|&(i, j)| 2.0 * u[i] * u[j])
                .collect();
            qp.add(Halfspace { normal, offset: c })?;
        }
    }
    Err(Error::Convergence {
        iterations: max_cuts,
        residual: best_upper - lower.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphTopology;

    #[test]
    fn hildreth_projects_onto_simplex_face() {
        // x + y ≤ 1 from (1, 1) gives (0.5, 0.5)
        let mut qp = HildrethQp::new(vec![1.0, 1.0]);
        qp.add(Halfspace {
            normal: vec![1.0, 1.0],
            offset: 1.0,
        })
        .unwrap();
        let x = qp.solve(1e-14, 100).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-14 && (x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hildreth_corner() {
        // x ≤ 0, y ≤ 0, x + 2y ≤ −1 from (1, 1): KKT point (0, −0.5) with
        // multipliers 1/4 on x ≤ 0 and 3/4 on the slanted face
        let mut qp = HildrethQp::new(vec![1.0, 1.0]);
        for (normal, offset) in [
            (vec![1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 0.0),
            (vec![1.0, 2.0], -1.0),
        ] {
            qp.add(Halfspace { normal, offset }).unwrap();
        }
        let x = qp.solve(1e-13, 100_000).unwrap();
        assert!(x[0].abs() < 1e-10 && (x[1] + 0.5).abs() < 1e-10, "{x:?}");
    }

    #[test]
    fn single_edge_spectral_oracle() {
        let model = IsingModel::couplings_only(GraphTopology::chain(2).unwrap());
        let out =
            spectral_projection_oracle(&model, &Parameters::from_vec(vec![-0.9]), 0.5, 1e-9, 100)
                .unwrap();
        assert!((out.feasible[0] + 0.5).abs() < 1e-9);
        assert!((out.lower - 0.4).abs() < 1e-8);
    }

    #[test]
    fn box_oracle_clips() {
        let model = IsingModel::new(GraphTopology::chain(3).unwrap(), true);
        let theta = Parameters::from_vec(vec![0.7, -0.1, 3.0, -2.0, 0.0]);
        let out = box_projection_oracle(&model, &theta, 0.3).unwrap();
        let expected = [0.3, -0.1, 3.0, -2.0, 0.0];
        for (a, b) in out.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
