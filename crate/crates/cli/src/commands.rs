use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fastmix::learner::{
    compare_c_conventions, train, Betas, Instrumentation, Mode, ModelQuantities, RunLengths,
    TrainConfig, TrainingTrace,
};
use fastmix::model::{
    negative_log_likelihood, write_dataset, Dataset, GraphTopology, IsingModel, Parameters,
    ENUMERATION_LIMIT,
};
use fastmix::projection::ConstraintSet;
use fastmix::verifier::suite::{run_suite, Suite};
use fastmix::verifier::{exact_optimum_with, OptimumOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, DEFAULT_SEED};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Convex => "convex",
        Mode::StronglyConvex => "strongly-convex",
    }
}

pub fn plan(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let model = cfg.model()?;
    let planned = cfg.plan(&model)?;
    let s = &planned.schedule;
    let c = &s.constants;
    let q = &c.quantities;
    let mut out = String::new();
    writeln!(out, "mode: {}", mode_name(s.mode))?;
    writeln!(
        out,
        "model: N = {}, E = {}, R2 = {:.6}, L = {}, lambda = {}, D = {:.6}",
        model.num_nodes(),
        model.num_edges(),
        q.r2,
        q.lipschitz,
        q.lambda,
        q.big_d
    )?;
    writeln!(
        out,
        "certificate: C = {:.6}, alpha = {:.8}",
        q.big_c, q.alpha
    )?;
    match c.gamma {
        Some(g) => writeln!(
            out,
            "constants: a = {:.6}, b = {:.6}, c = {:.6}, gamma = {g:.6}",
            c.a, c.b, c.c
        )?,
        None => writeln!(
            out,
            "constants: a = {:.6}, b = {:.6}, c = {:.6}",
            c.a, c.b, c.c
        )?,
    }
    writeln!(out, "epsilon = {}, delta = {}", s.epsilon, s.delta)?;
    writeln!(
        out,
        "raw: K = {:.4}, M = {:.4}, v = {:.4}",
        s.raw.big_k, s.raw.big_m, s.raw.v
    )?;
    writeln!(out, "K = {}", s.lengths.iterations)?;
    writeln!(out, "M = {}", s.lengths.samples)?;
    writeln!(out, "v = {}", s.lengths.chain_length)?;
    writeln!(out, "KMv = {:.6e}", s.total_work())?;
    match &planned.lower {
        Ok(lb) => writeln!(out, "lower bound = {lb:.6e}")?,
        Err(e) => writeln!(out, "lower bound: unavailable ({e})")?,
    }
    Ok(out)
}

struct Reference {
    theta: Parameters,
    objective: f64,
}

fn reference(
    model: &IsingModel,
    data: &Dataset,
    set: &ConstraintSet,
    lambda: f64,
    lipschitz: f64,
) -> Option<Reference> {
    if model.num_nodes() > ENUMERATION_LIMIT {
        return None;
    }
    let mut opts = OptimumOptions::new(1e-8);
    opts.lipschitz = Some(lipschitz);
    let theta = exact_optimum_with(model, data, set, lambda, &opts).ok()?;
    let objective = negative_log_likelihood(model, &theta, data, lambda).ok()?;
    Some(Reference { theta, objective })
}

fn summarize(trace: &TrainingTrace, reference: Option<&Reference>) -> String {
    let l = trace.config.lengths;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "K = {}, M = {}, v = {}",
        l.iterations, l.samples, l.chain_length
    );
    match reference {
        Some(r) => {
            let _ = writeln!(out, "f* = {:.10}", r.objective);
            let _ = writeln!(
                out,
                "final distance = {:.6e}",
                trace.final_theta().distance(&r.theta)
            );
            if let Some(f) = trace.records.last().and_then(|rec| rec.objective) {
                let _ = writeln!(out, "final f gap = {:.6e}", f - r.objective);
            }
            if let Some(f) = trace.average_objective {
                let _ = writeln!(out, "average f gap = {:.6e}", f - r.objective);
            }
        }
        None => {
            let _ = writeln!(out, "no exact reference (model too large for enumeration)");
        }
    }
    out
}

pub fn train_command(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let model = cfg.model()?;
    let data = cfg.dataset(&model)?;
    let set = cfg.constraint()?;
    let lengths = match cfg.explicit_lengths()? {
        Some(l) => l,
        None => cfg.plan(&model)?.schedule.lengths,
    };
    let lipschitz = cfg.lipschitz(&model);
    let reference = reference(&model, &data, &set, cfg.learner.lambda, lipschitz);
    let mut tc = TrainConfig::new(lengths, cfg.learner.lambda, lipschitz, set, cfg.seed());
    tc.gradient = cfg.gradient();
    tc.instrumentation = Instrumentation::auto(&model, reference.as_ref().map(|r| r.theta.clone()));
    let trace = train(&model, &data, &tc)?;

    let dir = cfg.out_dir();
    write_file(&dir.join("trace.csv"), &trace.to_csv())?;
    write_file(
        &dir.join("trace.json"),
        &serde_json::to_string_pretty(&trace)?,
    )?;
    let summary = summarize(&trace, reference.as_ref());
    write_file(&dir.join("summary.txt"), &summary)?;
    Ok(format!("{summary}wrote {}\n", dir.display()))
}

/// Returns the printed report and whether every check passed.
pub fn verify(
    cfg: Option<&RunConfig>,
    suite: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<(String, bool)> {
    if let Some(cfg) = cfg {
        cfg.validate()?;
    }
    let suite: Suite = suite.parse()?;
    let mut report = String::new();
    let mut tsv =
        String::from("check\treport\tinstances\tviolations\tallowed\tmin_slack\tstatus\n");
    let mut all_passed = true;
    for outcome in run_suite(suite, seed) {
        let name = outcome.check.name();
        match &outcome.reports {
            Ok(reports) => {
                writeln!(report, "{name}")?;
                for r in reports {
                    writeln!(report, "  {}", r.summary())?;
                    for d in &r.details {
                        writeln!(report, "    {d}")?;
                    }
                    writeln!(
                        tsv,
                        "{name}\t{}\t{}\t{}\t{}\t{:e}\t{}",
                        r.name,
                        r.instances_checked,
                        r.violations,
                        r.allowed_violations,
                        r.max_slack,
                        if r.passed() { "PASS" } else { "FAIL" }
                    )?;
                }
            }
            Err(e) => {
                writeln!(report, "{name}\n  error: {e}")?;
                writeln!(tsv, "{name}\t-\t0\t0\t0\tNaN\tERROR")?;
            }
        }
        all_passed &= outcome.passed();
    }
    writeln!(
        report,
        "overall: {}",
        if all_passed { "PASS" } else { "FAIL" }
    )?;
    if let Some(dir) = out {
        write_file(&dir.join("report.txt"), &report)?;
        write_file(&dir.join("summary.tsv"), &tsv)?;
    }
    Ok((report, all_passed))
}

pub const REPRODUCTION_RUNS: u64 = 5;
pub const REPRODUCTION_CHAIN_LENGTH: u64 = 561;
pub const REPRODUCTION_EPSILON: f64 = 2.0;

/// Returns the printed report and whether every run ended within `ε_θ`.
pub fn reproduce(seed: Option<u64>, out: &Path) -> Result<(String, bool)> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let topology = GraphTopology::grid(4, 4)?;
    let model = IsingModel::couplings_only(topology.clone());
    let (beta, lambda, lipschitz, delta) = (0.2, 1.0, 10.0, 0.1);
    let set = ConstraintSet::boxed(beta);
    let q = ModelQuantities {
        lipschitz,
        lambda,
        r2: (model.dim() as f64).sqrt(),
        big_c: f64::NAN,
        alpha: f64::NAN,
        big_d: set.diameter(&model).context("box diameter")?,
        delta,
    };
    let cmp = compare_c_conventions(
        &topology,
        beta,
        &q,
        REPRODUCTION_EPSILON,
        Betas(0.01, 0.9, 0.1),
        0.01,
    )?;
    let mut report = String::new();
    for line in cmp.lines() {
        writeln!(report, "{line}")?;
    }
    let lengths = RunLengths::new(
        cmp.exact.lengths.iterations,
        cmp.exact.lengths.samples,
        REPRODUCTION_CHAIN_LENGTH,
    );
    writeln!(
        report,
        "K={}, M={}, v={} (pinned)",
        lengths.iterations, lengths.samples, lengths.chain_length
    )?;
    write_file(&out.join("plan.txt"), &report)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Dataset::random(&model, 5, &mut rng)?;
    write_file(&out.join("data.txt"), &write_dataset(&data))?;
    let reference = reference(&model, &data, &set, lambda, lipschitz)
        .context("exact optimum did not converge")?;

    let mut all_within = true;
    for run in 0..REPRODUCTION_RUNS {
        let mut tc = TrainConfig::new(lengths, lambda, lipschitz, set, seed.wrapping_add(run));
        tc.instrumentation = Instrumentation::auto(&model, Some(reference.theta.clone()));
        let trace = train(&model, &data, &tc)?;
        write_file(&out.join(format!("run{run}_trace.csv")), &trace.to_csv())?;
        write_file(
            &out.join(format!("run{run}_curves.csv")),
            &curves(&trace, &reference),
        )?;
        let dist = trace.final_theta().distance(&reference.theta);
        all_within &= dist <= REPRODUCTION_EPSILON;
        writeln!(report, "run {run}: final distance = {dist:.6}")?;
    }
    writeln!(
        report,
        "all runs within epsilon_theta = {REPRODUCTION_EPSILON}: {}",
        if all_within { "yes" } else { "no" }
    )?;
    write_file(&out.join("summary.txt"), &report)?;
    Ok((report, all_within))
}

/// `iter,f_gap,param_dist` with row 0 at `θ₀`.
fn curves(trace: &TrainingTrace, reference: &Reference) -> String {
    let mut out = String::from("iter,f_gap,param_dist\n");
    let gap = |f: Option<f64>| {
        f.map_or(String::from("NaN"), |f| {
            format!("{:e}", f - reference.objective)
        })
    };
    let _ = writeln!(
        out,
        "0,{},{:e}",
        gap(trace.initial_objective),
        trace.theta0.distance(&reference.theta)
    );
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{:e}",
            r.iteration,
            gap(r.objective),
            r.theta.distance(&reference.theta)
        );
    }
    out
}

pub fn export(input: &Path, out: Option<&Path>) -> Result<Option<String>> {
    let text =
        fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let trace: TrainingTrace = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a training trace", input.display()))?;
    if trace.records.is_empty() {
        bail!("{} holds no iterations", input.display());
    }
    let csv = trace.to_csv();
    match out {
        Some(dir) => {
            let stem = input
                .file_stem()
                .map_or("trace".into(), |s| s.to_string_lossy().into_owned());
            let path: PathBuf = dir.join(format!("{stem}.csv"));
            write_file(&path, &csv)?;
            Ok(None)
        }
        None => Ok(Some(csv)),
    }
}
