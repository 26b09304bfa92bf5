//! Python module `fastmix`.

use fastmix::learner::{
    derive_constants, plan_convex_objective, plan_strongly_convex, train as train_rs, Betas,
    GradientSource, Instrumentation, Mode, ModelQuantities, RunLengths, TrainConfig, TrainingTrace,
};
use fastmix::model::{
    exact_gradient, exact_log_partition, exact_mean_stats, lipschitz_constant,
    negative_log_likelihood, stat_norm_bound, Dataset as DatasetRs, GraphTopology as TopologyRs,
    IsingModel as ModelRs, Parameters, SpinConfiguration,
};
use fastmix::projection::{project, ConstraintSet as SetRs, DEFAULT_SPECTRAL_TOLERANCE};
use fastmix::sampler::{
    draw_batch as draw_batch_rs, gibbs_certificate, spectral_certificate, tau_bound_gibbs,
    CConvention, ChainConfig, ChainInit, MixingCertificate as CertificateRs,
};
use fastmix::verifier::suite::{run_check as run_check_rs, Suite};
use fastmix::verifier::{exact_optimum_with, OptimumOptions};
use fastmix::Error;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Capacity { .. } => PyMemoryError::new_err(e.to_string()),
        Error::Convergence { .. } | Error::Numeric { .. } | Error::Io { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for fastmix::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn convention(name: &str) -> PyResult<CConvention> {
    match name {
        "exact" => Ok(CConvention::Exact),
        "log-n" => Ok(CConvention::LogN),
        other => Err(PyValueError::new_err(format!(
            "convention must be 'exact' or 'log-n', got '{other}'"
        ))),
    }
}

fn mode(name: &str) -> PyResult<Mode> {
    match name {
        "convex" => Ok(Mode::Convex),
        "strongly-convex" => Ok(Mode::StronglyConvex),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'convex' or 'strongly-convex', got '{other}'"
        ))),
    }
}

fn params(model: &ModelRs, theta: Vec<f64>) -> PyResult<Parameters> {
    Parameters::for_model(model, theta).py()
}

#[pyclass(
    name = "GraphTopology",
    module = "fastmix",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct GraphTopology(TopologyRs);

#[pymethods]
impl GraphTopology {
    #[new]
    fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        TopologyRs::new(num_nodes, edges).py().map(Self)
    }

    #[staticmethod]
    fn grid(rows: usize, cols: usize) -> PyResult<Self> {
        TopologyRs::grid(rows, cols).py().map(Self)
    }

    #[staticmethod]
    fn chain(num_nodes: usize) -> PyResult<Self> {
        TopologyRs::chain(num_nodes).py().map(Self)
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.0.num_nodes()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.0.num_edges()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.0.max_degree()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "GraphTopology(N={}, E={})",
            self.0.num_nodes(),
            self.0.num_edges()
        )
    }
}

#[pyclass(name = "IsingModel", module = "fastmix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct IsingModel(ModelRs);

#[pymethods]
impl IsingModel {
    #[new]
    #[pyo3(signature = (topology, fields = false))]
    fn new(topology: &GraphTopology, fields: bool) -> Self {
        Self(ModelRs::new(topology.0.clone(), fields))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.0.num_nodes()
    }

    #[getter]
    fn topology(&self) -> GraphTopology {
        GraphTopology(self.0.topology.clone())
    }

    /// `R₂`, the bound on `‖t(x)‖₂`.
    #[getter]
    fn r2(&self) -> f64 {
        stat_norm_bound(&self.0).r2
    }

    fn lipschitz(&self, lam: f64) -> f64 {
        lipschitz_constant(&stat_norm_bound(&self.0), lam)
    }

    fn log_partition(&self, theta: Vec<f64>) -> PyResult<f64> {
        exact_log_partition(&self.0, &params(&self.0, theta)?).py()
    }

    fn mean_stats(&self, theta: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(exact_mean_stats(&self.0, &params(&self.0, theta)?)
            .py()?
            .into_vec())
    }

    fn objective(&self, theta: Vec<f64>, data: &Dataset, lam: f64) -> PyResult<f64> {
        negative_log_likelihood(&self.0, &params(&self.0, theta)?, &data.0, lam).py()
    }

    fn gradient(&self, theta: Vec<f64>, data: &Dataset, lam: f64) -> PyResult<Vec<f64>> {
        Ok(
            exact_gradient(&self.0, &params(&self.0, theta)?, &data.0, lam)
                .py()?
                .into_vec(),
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "IsingModel(N={}, E={}, fields={})",
            self.0.num_nodes(),
            self.0.num_edges(),
            self.0.fields
        )
    }
}

#[pyclass(name = "Dataset", module = "fastmix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Dataset(DatasetRs);

#[pymethods]
impl Dataset {
    #[new]
    fn new(model: &IsingModel, examples: Vec<Vec<i8>>) -> PyResult<Self> {
        let configs = examples
            .into_iter()
            .map(SpinConfiguration::new)
            .collect::<fastmix::Result<Vec<_>>>()
            .py()?;
        DatasetRs::new(&model.0, configs).py().map(Self)
    }

    /// Uniformly random ±1 examples.
    #[staticmethod]
    fn random(model: &IsingModel, count: usize, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DatasetRs::random(&model.0, count, &mut rng).py().map(Self)
    }

    #[getter]
    fn examples(&self) -> Vec<Vec<i8>> {
        self.0
            .examples()
            .iter()
            .map(|x| x.spins().to_vec())
            .collect()
    }

    #[getter]
    fn empirical_mean(&self) -> Vec<f64> {
        self.0.empirical_mean().as_slice().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(
    name = "ConstraintSet",
    module = "fastmix",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct ConstraintSet(SetRs);

#[pymethods]
impl ConstraintSet {
    #[staticmethod]
    #[pyo3(signature = (beta, field_bound = None))]
    fn boxed(beta: f64, field_bound: Option<f64>) -> PyResult<Self> {
        let set = SetRs::Box { beta, field_bound };
        set.validate().py()?;
        Ok(Self(set))
    }

    #[staticmethod]
    #[pyo3(signature = (c, tolerance = DEFAULT_SPECTRAL_TOLERANCE))]
    fn spectral(c: f64, tolerance: f64) -> PyResult<Self> {
        let set = SetRs::Spectral { c, tolerance };
        set.validate().py()?;
        Ok(Self(set))
    }

    fn project(&self, model: &IsingModel, theta: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(project(&model.0, &params(&model.0, theta)?, &self.0)
            .py()?
            .into_vec())
    }

    #[pyo3(signature = (model, theta, slack = 0.0))]
    fn contains(&self, model: &IsingModel, theta: Vec<f64>, slack: f64) -> PyResult<bool> {
        Ok(self.0.contains(&model.0, &params(&model.0, theta)?, slack))
    }

    fn diameter(&self, model: &IsingModel) -> Option<f64> {
        self.0.diameter(&model.0)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(
    name = "MixingCertificate",
    module = "fastmix",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct MixingCertificate(CertificateRs);

#[pymethods]
impl MixingCertificate {
    #[new]
    fn new(big_c: f64, alpha: f64) -> PyResult<Self> {
        CertificateRs::new(big_c, alpha, None).py().map(Self)
    }

    /// Random-scan Gibbs on the box `|θ_ij| ≤ β`.
    #[staticmethod]
    #[pyo3(signature = (topology, beta, convention = "exact"))]
    fn gibbs(topology: &GraphTopology, beta: f64, convention: &str) -> PyResult<Self> {
        gibbs_certificate(&topology.0, beta, self::convention(convention)?)
            .py()
            .map(Self)
    }

    #[staticmethod]
    #[pyo3(signature = (num_nodes, c, convention = "exact"))]
    fn spectral(num_nodes: usize, c: f64, convention: &str) -> PyResult<Self> {
        spectral_certificate(num_nodes, c, self::convention(convention)?)
            .py()
            .map(Self)
    }

    #[getter]
    fn big_c(&self) -> f64 {
        self.0.big_c
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    /// `C·α^v`.
    fn tv_bound(&self, v: u64) -> f64 {
        self.0.tv_bound(v)
    }

    fn __repr__(&self) -> String {
        format!(
            "MixingCertificate(C={}, alpha={})",
            self.0.big_c, self.0.alpha
        )
    }
}

#[pyclass(name = "Trace", module = "fastmix", frozen, skip_from_py_object)]
struct Trace(TrainingTrace);

#[pymethods]
impl Trace {
    #[getter]
    fn thetas(&self) -> Vec<Vec<f64>> {
        self.0
            .records
            .iter()
            .map(|r| r.theta.as_slice().to_vec())
            .collect()
    }

    #[getter]
    fn final_theta(&self) -> Vec<f64> {
        self.0.final_theta().as_slice().to_vec()
    }

    #[getter]
    fn average(&self) -> Vec<f64> {
        self.0.average.as_slice().to_vec()
    }

    #[getter]
    fn objectives(&self) -> Vec<Option<f64>> {
        self.0.records.iter().map(|r| r.objective).collect()
    }

    #[getter]
    fn distances(&self) -> Vec<Option<f64>> {
        self.0
            .records
            .iter()
            .map(|r| r.reference_distance)
            .collect()
    }

    #[getter]
    fn gradient_errors(&self) -> Vec<Option<f64>> {
        self.0.records.iter().map(|r| r.gradient_error).collect()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.records.len()
    }
}

#[pyfunction]
fn tau_gibbs(num_nodes: usize, max_degree: usize, beta: f64, epsilon: f64) -> PyResult<u64> {
    tau_bound_gibbs(num_nodes, max_degree, beta, epsilon).py()
}

/// Schedule `(K, M, v)` for a target `ε_θ` (strongly convex) or `ε_f`
/// (convex). Returns a dict with the rounded and raw values.
#[pyfunction]
#[pyo3(signature = (mode, lipschitz, lam, r2, certificate, diameter, delta, epsilon, betas = (0.01, 0.9, 0.1)))]
#[allow(clippy::too_many_arguments)]
fn plan<'py>(
    py: Python<'py>,
    mode: &str,
    lipschitz: f64,
    lam: f64,
    r2: f64,
    certificate: &MixingCertificate,
    diameter: f64,
    delta: f64,
    epsilon: f64,
    betas: (f64, f64, f64),
) -> PyResult<Bound<'py, PyDict>> {
    let mode = self::mode(mode)?;
    let q = ModelQuantities {
        lipschitz,
        lambda: lam,
        r2,
        big_c: certificate.0.big_c,
        alpha: certificate.0.alpha,
        big_d: diameter,
        delta,
    };
    let consts = derive_constants(mode, &q).py()?;
    let betas = Betas(betas.0, betas.1, betas.2);
    let s = match mode {
        Mode::Convex => plan_convex_objective(&consts, epsilon, betas),
        Mode::StronglyConvex => plan_strongly_convex(&consts, epsilon, delta, betas),
    }
    .py()?;
    let d = PyDict::new(py);
    d.set_item("K", s.lengths.iterations)?;
    d.set_item("M", s.lengths.samples)?;
    d.set_item("v", s.lengths.chain_length)?;
    d.set_item("raw", (s.raw.big_k, s.raw.big_m, s.raw.v))?;
    d.set_item("a", consts.a)?;
    d.set_item("b", consts.b)?;
    d.set_item("c", consts.c)?;
    d.set_item("epsilon", s.epsilon)?;
    Ok(d)
}

/// `M` configurations, each the end of a `v`-step chain from a uniform start.
#[pyfunction]
#[pyo3(signature = (model, theta, m, v, seed, iteration = 0))]
fn draw_batch(
    model: &IsingModel,
    theta: Vec<f64>,
    m: usize,
    v: u64,
    seed: u64,
    iteration: u64,
) -> PyResult<Vec<Vec<i8>>> {
    let cfg = ChainConfig::new(v, ChainInit::Uniform, seed);
    let batch = draw_batch_rs(&model.0, &params(&model.0, theta)?, m, &cfg, iteration).py()?;
    Ok(batch.into_iter().map(|x| x.spins().to_vec()).collect())
}

#[pyfunction]
#[pyo3(signature = (model, data, set, iterations, samples, chain_length, lam, lipschitz, seed, exact_gradient = false, reference = None))]
#[allow(clippy::too_many_arguments)]
fn train(
    py: Python<'_>,
    model: &IsingModel,
    data: &Dataset,
    set: &ConstraintSet,
    iterations: u64,
    samples: u64,
    chain_length: u64,
    lam: f64,
    lipschitz: f64,
    seed: u64,
    exact_gradient: bool,
    reference: Option<Vec<f64>>,
) -> PyResult<Trace> {
    let reference = reference.map(|r| params(&model.0, r)).transpose()?;
    let mut cfg = TrainConfig::new(
        RunLengths::new(iterations, samples, chain_length),
        lam,
        lipschitz,
        set.0,
        seed,
    );
    if exact_gradient {
        cfg.gradient = GradientSource::Exact;
    }
    cfg.instrumentation = Instrumentation::auto(&model.0, reference);
    let (m, d) = (&model.0, &data.0);
    py.detach(|| train_rs(m, d, &cfg)).py().map(Trace)
}

#[pyfunction]
#[pyo3(signature = (model, data, set, lam, tolerance = 1e-8, lipschitz = None))]
fn exact_optimum(
    py: Python<'_>,
    model: &IsingModel,
    data: &Dataset,
    set: &ConstraintSet,
    lam: f64,
    tolerance: f64,
    lipschitz: Option<f64>,
) -> PyResult<Vec<f64>> {
    let mut opts = OptimumOptions::new(tolerance);
    opts.lipschitz = lipschitz;
    let (m, d, s) = (&model.0, &data.0, &set.0);
    Ok(py
        .detach(|| exact_optimum_with(m, d, s, lam, &opts))
        .py()?
        .into_vec())
}

/// Runs one verification check by name; returns one dict per report.
#[pyfunction]
fn run_check<'py>(py: Python<'py>, name: &str, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let check = match name.parse::<Suite>().py()? {
        Suite::Only(c) => c,
        Suite::All => return Err(PyValueError::new_err("name a single check")),
    };
    let reports = py.detach(|| run_check_rs(check, seed)).py()?;
    reports
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", &r.name)?;
            d.set_item("instances", r.instances_checked)?;
            d.set_item("violations", r.violations)?;
            d.set_item("allowed", r.allowed_violations)?;
            d.set_item("min_slack", r.max_slack)?;
            d.set_item("passed", r.passed())?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "fastmix")]
fn fastmix_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GraphTopology>()?;
    m.add_class::<IsingModel>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<ConstraintSet>()?;
    m.add_class::<MixingCertificate>()?;
    m.add_class::<Trace>()?;
    m.add_function(wrap_pyfunction!(tau_gibbs, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(draw_batch, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(exact_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
