//! Run configuration files.
//!
//! TOML with sections `[model]`, `[data]`, `[constraint]`, `[learner]`,
//! `[certificate]` and `[run]`. Every key is optional; an empty file
//! describes the 4×4 grid experiment (5 random examples, box β = 0.2,
//! λ = 1, L = 10, ε_θ = 2, δ = 0.1).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use fastmix::learner::{
    derive_constants, plan_convex_objective, plan_strongly_convex, work_lower_bound_convex,
    work_lower_bound_strongly_convex, Betas, GradientSource, Mode, ModelQuantities, RunLengths,
    Schedule,
};
use fastmix::model::{
    lipschitz_constant, read_dataset, read_topology, stat_norm_bound, Dataset, GraphTopology,
    IsingModel,
};
use fastmix::projection::{ConstraintSet, DEFAULT_SPECTRAL_TOLERANCE};
use fastmix::sampler::{gibbs_certificate, spectral_certificate, CConvention, MixingCertificate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Convex,
    StronglyConvex,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Convex => Mode::Convex,
            ModeName::StronglyConvex => Mode::StronglyConvex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    #[default]
    Box,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionName {
    #[default]
    Exact,
    LogN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientName {
    #[default]
    Sampled,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// `[rows, cols]`.
    pub grid: Option<[usize; 2]>,
    /// Topology file (`N E` header, then edges).
    pub topology: Option<PathBuf>,
    pub fields: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    /// Number of uniformly random ±1 examples.
    pub count: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintSection {
    pub kind: SetKind,
    pub beta: Option<f64>,
    pub field_bound: Option<f64>,
    pub c: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub mode: ModeName,
    pub lambda: f64,
    /// Defaults to `4R₂² + λ`.
    pub lipschitz: Option<f64>,
    /// `ε_θ` in strongly-convex mode, `ε_f` in convex mode.
    pub epsilon: f64,
    pub delta: f64,
    pub betas: [f64; 3],
    pub convention: ConventionName,
    pub gradient: GradientName,
    pub iterations: Option<u64>,
    pub samples: Option<u64>,
    pub chain_length: Option<u64>,
}

impl Default for LearnerSection {
    fn default() -> Self {
        Self {
            mode: ModeName::StronglyConvex,
            lambda: 1.0,
            lipschitz: Some(10.0),
            epsilon: 2.0,
            delta: 0.1,
            betas: [0.01, 0.9, 0.1],
            convention: ConventionName::Exact,
            gradient: GradientName::Sampled,
            iterations: None,
            samples: None,
            chain_length: None,
        }
    }
}

/// Replaces the certificate derived from the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSection {
    pub big_c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub data: DataSection,
    pub constraint: ConstraintSection,
    pub learner: LearnerSection,
    pub certificate: Option<CertificateSection>,
    pub run: RunSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub mode: Option<ModeName>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.run.seed = Some(seed);
        }
        if let Some(out) = &o.out {
            self.run.out = Some(out.clone());
        }
        if let Some(mode) = o.mode {
            self.learner.mode = mode;
        }
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn seed(&self) -> u64 {
        self.run.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.run.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn model(&self) -> Result<IsingModel> {
        let topology = match (&self.model.grid, &self.model.topology) {
            (Some(_), Some(_)) => bail!("[model] takes either `grid` or `topology`, not both"),
            (Some([r, c]), None) => GraphTopology::grid(*r, *c)?,
            (None, Some(p)) => read_topology(self.resolve_path(p))?,
            (None, None) => GraphTopology::grid(4, 4)?,
        };
        Ok(IsingModel::new(topology, self.model.fields))
    }

    pub fn dataset(&self, model: &IsingModel) -> Result<Dataset> {
        match (&self.data.path, self.data.count) {
            (Some(_), Some(_)) => bail!("[data] takes either `path` or `count`, not both"),
            (Some(p), None) => Ok(read_dataset(self.resolve_path(p), model)?),
            (None, count) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.data.seed.unwrap_or(DEFAULT_SEED));
                Ok(Dataset::random(model, count.unwrap_or(5), &mut rng)?)
            }
        }
    }

    pub fn constraint(&self) -> Result<ConstraintSet> {
        let c = &self.constraint;
        let set = match c.kind {
            SetKind::Box => {
                if c.c.is_some() || c.tolerance.is_some() {
                    bail!("`c` and `tolerance` apply to spectral sets only");
                }
                ConstraintSet::Box {
                    beta: c.beta.unwrap_or(0.2),
                    field_bound: c.field_bound,
                }
            }
            SetKind::Spectral => {
                if c.beta.is_some() || c.field_bound.is_some() {
                    bail!("`beta` and `field_bound` apply to box sets only");
                }
                ConstraintSet::Spectral {
                    c: c.c.context("spectral constraint needs `c`")?,
                    tolerance: c.tolerance.unwrap_or(DEFAULT_SPECTRAL_TOLERANCE),
                }
            }
        };
        set.validate()?;
        Ok(set)
    }

    pub fn certificate(&self, model: &IsingModel) -> Result<MixingCertificate> {
        if let Some(cs) = self.certificate {
            return MixingCertificate::new(cs.big_c, cs.alpha, None)
                .context("invalid [certificate]");
        }
        let convention = match self.learner.convention {
            ConventionName::Exact => CConvention::Exact,
            ConventionName::LogN => CConvention::LogN,
        };
        let cert = match self.constraint()? {
            ConstraintSet::Box { beta, .. } => gibbs_certificate(&model.topology, beta, convention),
            ConstraintSet::Spectral { c, .. } => {
                spectral_certificate(model.num_nodes(), c, convention)
            }
        };
        cert.context(
            "the constraint set has no mixing certificate: a box needs Δ·tanh β < 1 \
             (Δ the maximum degree) and a spectral set needs c < 1",
        )
    }

    pub fn lipschitz(&self, model: &IsingModel) -> f64 {
        self.learner
            .lipschitz
            .unwrap_or_else(|| lipschitz_constant(&stat_norm_bound(model), self.learner.lambda))
    }

    pub fn gradient(&self) -> GradientSource {
        match self.learner.gradient {
            GradientName::Sampled => GradientSource::Sampled,
            GradientName::Exact => GradientSource::Exact,
        }
    }

    /// `(K, M, v)` given explicitly in `[learner]`, if all three are.
    pub fn explicit_lengths(&self) -> Result<Option<RunLengths>> {
        let l = &self.learner;
        match (l.iterations, l.samples, l.chain_length) {
            (Some(k), Some(m), Some(v)) => Ok(Some(RunLengths::new(k, m, v))),
            (None, None, None) => Ok(None),
            _ => bail!("[learner] needs all of `iterations`, `samples`, `chain_length` or none"),
        }
    }

    /// Validates everything a run needs before any work starts.
    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        self.dataset(&model)?;
        self.constraint()?;
        self.certificate(&model)?;
        let l = &self.learner;
        if !(l.lambda >= 0.0) || !l.lambda.is_finite() {
            bail!("λ = {} must be finite and ≥ 0", l.lambda);
        }
        if let Some(lengths) = self.explicit_lengths()? {
            if lengths.iterations == 0 || lengths.samples == 0 || lengths.chain_length == 0 {
                bail!(
                    "K, M, v = ({}, {}, {}) must all be at least 1",
                    lengths.iterations,
                    lengths.samples,
                    lengths.chain_length
                );
            }
        }
        Ok(())
    }

    pub fn quantities(&self, model: &IsingModel) -> Result<ModelQuantities> {
        let cert = self.certificate(model)?;
        let set = self.constraint()?;
        let big_d = set.diameter(model).context(
            "the constraint set is unbounded (free node fields); set [constraint] field_bound",
        )?;
        Ok(ModelQuantities {
            lipschitz: self.lipschitz(model),
            lambda: self.learner.lambda,
            r2: stat_norm_bound(model).r2,
            big_c: cert.big_c,
            alpha: cert.alpha,
            big_d,
            delta: self.learner.delta,
        })
    }

    pub fn plan(&self, model: &IsingModel) -> Result<Planned> {
        let q = self.quantities(model)?;
        let mode: Mode = self.learner.mode.into();
        let consts = derive_constants(mode, &q)?;
        let [b1, b2, b3] = self.learner.betas;
        let betas = Betas(b1, b2, b3);
        let (schedule, lower) = match mode {
            Mode::Convex => {
                let s = plan_convex_objective(&consts, self.learner.epsilon, betas)?;
                let lb =
                    work_lower_bound_convex(consts.a, consts.b, consts.c, consts.alpha, s.epsilon)
                        .map_err(anyhow::Error::from);
                (s, lb)
            }
            Mode::StronglyConvex => {
                let s = plan_strongly_convex(&consts, self.learner.epsilon, q.delta, betas)?;
                let lb = work_lower_bound_strongly_convex(
                    consts.a,
                    consts.b,
                    consts.c,
                    consts.gamma.unwrap_or(f64::NAN),
                    consts.alpha,
                    s.epsilon,
                    s.delta,
                )
                .map_err(anyhow::Error::from);
                (s, lb)
            }
        };
        Ok(Planned { schedule, lower })
    }
}

pub struct Planned {
    pub schedule: Schedule,
    pub lower: Result<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_grid_experiment() {
        let cfg = RunConfig::parse("").unwrap();
        let model = cfg.model().unwrap();
        assert_eq!(model.num_nodes(), 16);
        assert_eq!(cfg.dataset(&model).unwrap().len(), 5);
        let p = cfg.plan(&model).unwrap();
        assert_eq!(p.schedule.lengths.iterations, 46);
        assert_eq!(p.schedule.lengths.samples, 1533);
        assert!(p.lower.unwrap() <= p.schedule.total_work());
    }

    #[test]
    fn shipped_example_matches_defaults() {
        let cfg = RunConfig::parse(include_str!("../../../configs/grid4x4.toml")).unwrap();
        let model = cfg.model().unwrap();
        let default = RunConfig::default();
        assert_eq!(
            cfg.dataset(&model).unwrap(),
            default.dataset(&model).unwrap()
        );
        assert_eq!(cfg.constraint().unwrap(), default.constraint().unwrap());
        assert_eq!(cfg.learner, default.learner);
        assert_eq!(cfg.seed(), default.seed());
    }

    #[test]
    fn conflicting_sources_are_rejected() {
        let cfg = RunConfig::parse("[model]\ngrid = [2, 2]\ntopology = \"t.txt\"").unwrap();
        assert!(cfg.model().is_err());
        let cfg = RunConfig::parse("[data]\npath = \"d.txt\"\ncount = 3").unwrap();
        assert!(cfg.dataset(&cfg.model().unwrap()).is_err());
        assert!(RunConfig::parse("[learner]\nbogus = 1").is_err());
        let cfg = RunConfig::parse("[constraint]\nkind = \"box\"\nc = 0.5").unwrap();
        assert!(cfg.constraint().is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::parse("[run]\nseed = 3\n[learner]\nmode = \"convex\"").unwrap();
        cfg.apply(&Overrides {
            seed: Some(9),
            out: Some("x".into()),
            mode: Some(ModeName::StronglyConvex),
        });
        assert_eq!(cfg.seed(), 9);
        assert_eq!(cfg.out_dir(), PathBuf::from("x"));
        assert_eq!(cfg.learner.mode, ModeName::StronglyConvex);
    }

    #[test]
    fn partial_lengths_are_rejected() {
        let cfg = RunConfig::parse("[learner]\niterations = 3").unwrap();
        assert!(cfg.explicit_lengths().is_err());
    }

    #[test]
    fn spectral_and_convex_plans() {
        let cfg = RunConfig::parse(
            "[model]\ngrid = [3, 3]\n[constraint]\nkind = \"spectral\"\nc = 0.5\n\
             [learner]\nmode = \"convex\"\nlambda = 0.0\nepsilon = 5.0\nbetas = [0.5, 0.3, 0.2]",
        )
        .unwrap();
        let model = cfg.model().unwrap();
        let p = cfg.plan(&model).unwrap();
        assert_eq!(p.schedule.mode, Mode::Convex);
        assert!(p.schedule.lengths.iterations >= 1);
    }

    #[test]
    fn fields_need_a_field_bound_for_planning() {
        let cfg = RunConfig::parse("[model]\ngrid = [2, 2]\nfields = true").unwrap();
        let model = cfg.model().unwrap();
        assert!(cfg.plan(&model).is_err());
        let cfg = RunConfig::parse(
            "[model]\ngrid = [2, 2]\nfields = true\n[constraint]\nfield_bound = 1.0",
        )
        .unwrap();
        assert!(cfg.plan(&model).is_ok());
    }
}
