//! The experiment pipelines behind each subcommand.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use stability_core::{
    boost, boost_params, cube_witness, estimators::stability_report_at, exact_output_distribution,
    find_hard_distribution, find_hollow_star, hollow_star_number, hollow_star_witness, list_coverage,
    littlestone_dimension, output_histogram, vc_dimension, CertificateStatus, ConceptClass, Hypothesis,
    InstabilityWitness, Learner, Limits, Seed, SolverConfig,
};

use crate::error::{CliError, CliResult};
use crate::report::{num, Report, Table};
use crate::spec::{build_distributions, build_learner, parse_class, read_file, BuildContext, BuiltLearner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Dims,
    Estimate,
    Boost,
    Adversary,
    Oracle,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Dims => "dims",
            Pipeline::Estimate => "estimate",
            Pipeline::Boost => "boost",
            Pipeline::Adversary => "adversary",
            Pipeline::Oracle => "oracle",
        }
    }
}

/// Everything one run needs. Fields a pipeline does not use are ignored;
/// missing fields it needs are config errors naming the field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    /// `cube`, `hollow-star` or a witness file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert_trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(pipeline: Pipeline) -> Self {
        ExperimentConfig {
            pipeline,
            learner: None,
            class: None,
            dist: None,
            n: None,
            trials: None,
            seed: None,
            beta: None,
            rho: None,
            eps: None,
            delta: None,
            n0: None,
            witness: None,
            tol: None,
            damping: None,
            mc: None,
            max_sweeps: None,
            cert_trials: None,
            threads: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config("experiment config", e.to_string()))
    }

    /// The config as echoed into reports: execution details that cannot
    /// change results are left out so reruns stay byte-identical.
    fn echo(&self) -> Json {
        let mut c = self.clone();
        c.threads = None;
        c.out = None;
        serde_json::to_value(c).expect("config serializes")
    }

    fn seed(&self) -> CliResult<Seed> {
        self.seed
            .map(Seed)
            .ok_or_else(|| CliError::config("--seed", format!("required by the {} pipeline", self.pipeline.name())))
    }

    fn trials(&self) -> CliResult<u64> {
        match self.trials {
            Some(0) => Err(CliError::config("--trials", "must be at least 1")),
            Some(t) => Ok(t),
            None => Err(CliError::config("--trials", "missing")),
        }
    }

    fn class(&self) -> CliResult<Option<Arc<ConceptClass>>> {
        self.class
            .as_deref()
            .map(|c| parse_class(c, "--class").map(Arc::new))
            .transpose()
    }

    fn learner(&self, class: Option<Arc<ConceptClass>>) -> CliResult<BuiltLearner> {
        let text = self.learner.as_deref().ok_or_else(|| CliError::config("--learner", "missing"))?;
        build_learner(text, &BuildContext { class, n: self.n })
    }

    fn dist(&self) -> CliResult<&str> {
        self.dist.as_deref().ok_or_else(|| CliError::config("--dist", "missing"))
    }

    fn beta(&self) -> CliResult<f64> {
        let b = self.beta.unwrap_or(stability_core::estimators::DEFAULT_BETA);
        if b > 0.0 && b < 1.0 {
            Ok(b)
        } else {
            Err(CliError::config("--beta", format!("{b} must lie in (0, 1)")))
        }
    }
}

/// Runs the configured pipeline and, when `out` is set, writes
/// `<pipeline>.csv` and `<pipeline>.json` there.
pub fn run_experiment(config: &ExperimentConfig) -> CliResult<Report> {
    let report = match config.threads {
        Some(0) => return Err(CliError::config("--threads", "must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::config("--threads", e.to_string()))?
            .install(|| dispatch(config))?,
        None => dispatch(config)?,
    };
    if let Some(dir) = &config.out {
        report.write_to(dir)?;
    }
    Ok(report)
}

fn dispatch(config: &ExperimentConfig) -> CliResult<Report> {
    let (table, results, unconverged) = match config.pipeline {
        Pipeline::Dims => dims(config)?,
        Pipeline::Estimate => estimate(config)?,
        Pipeline::Boost => boost_pipeline(config)?,
        Pipeline::Adversary => adversary(config)?,
        Pipeline::Oracle => oracle(config)?,
    };
    let name = config.pipeline.name();
    let doc = json!({
        "report": "stability-lab",
        "version": crate::report::SCHEMA_VERSION,
        "pipeline": name,
        "config": config.echo(),
        "results": results,
    });
    Ok(Report {
        pipeline: name.to_string(),
        csv: table.to_csv(name),
        json: serde_json::to_string_pretty(&doc).expect("report serializes") + "\n",
        unconverged,
    })
}

type Output = (Table, Json, bool);

fn dims(config: &ExperimentConfig) -> CliResult<Output> {
    let text = config.class.as_deref().ok_or_else(|| CliError::config("--class", "missing"))?;
    let c = parse_class(text, "--class")?;
    let cap = c.domain().len().min(Limits::default().hollow_cap);
    let vc = vc_dimension(&c)?;
    let ldim = littlestone_dimension(&c)?;
    let star = find_hollow_star(&c, cap)?;
    let hs = hollow_star_number(&c, cap)?;
    let mut t = Table::new(vec!["class", "points", "hypotheses", "vc", "ldim", "hollow_star"]);
    t.push(vec![
        text.to_string(),
        c.domain().len().to_string(),
        c.len().to_string(),
        vc.to_string(),
        ldim.to_string(),
        hs.to_string(),
    ]);
    let star_json = star.map(|s| {
        json!({
            "points": s.points.iter().map(|&p| c.domain().name(p)).collect::<Vec<_>>(),
            "center": s.center.iter().map(|l| l.sign()).collect::<Vec<_>>(),
        })
    });
    let results = json!({
        "class": text,
        "points": c.domain().len(),
        "hypotheses": c.len(),
        "vc": vc,
        "ldim": ldim,
        "hollow_star": hs,
        "hollow_star_witness": star_json,
    });
    Ok((t, results, false))
}

fn sample_size(config: &ExperimentConfig, learner: &dyn Learner) -> CliResult<usize> {
    match (config.n, learner.required_sample_size()) {
        (Some(0), _) => Err(CliError::config("--n", "must be at least 1")),
        (Some(n), Some(req)) if n < req => Err(CliError::config(
            "--n",
            format!("{n} is below the {req} examples {} needs", learner.name()),
        )),
        (Some(n), _) => Ok(n),
        (None, Some(req)) => Ok(req),
        (None, None) => Err(CliError::config("--n", "missing")),
    }
}

fn estimate(config: &ExperimentConfig) -> CliResult<Output> {
    let class = config.class()?;
    let built = config.learner(class.clone())?;
    let n = sample_size(config, built.learner.as_ref())?;
    let trials = config.trials()?;
    let seed = config.seed()?;
    let beta = config.beta()?;
    let dists = build_distributions(config.dist()?, class.as_deref().or(built.class.as_deref()))?;
    let mut t = Table::new(vec!["learner", "distribution", "n", "trials", "rho_hat", "collision_hat", "ci", "modal_id"]);
    let mut results = Vec::new();
    for (i, (name, d)) in dists.iter().enumerate() {
        let hist = output_histogram(built.learner.as_ref(), d, n, trials, seed.child(i as u64, "distribution"))?;
        let r = stability_report_at(&hist, beta)?;
        t.push(vec![
            built.spec.clone(),
            name.clone(),
            n.to_string(),
            trials.to_string(),
            num(r.rho_hat),
            num(r.collision_hat),
            num(r.ci_half_width),
            r.modal.to_string(),
        ]);
        results.push(json!({
            "distribution": name,
            "report": r,
            "histogram": histogram_json(&hist.ranked()),
        }));
    }
    Ok((t, Json::Array(results), false))
}

fn histogram_json(ranked: &[(Hypothesis, u64)]) -> Json {
    Json::Array(ranked.iter().map(|(h, c)| json!({"hypothesis": h.to_string(), "count": c})).collect())
}

fn boost_pipeline(config: &ExperimentConfig) -> CliResult<Output> {
    let class = config.class()?;
    let inner = config.learner(class.clone())?;
    let need = |v: Option<f64>, p: &str| v.ok_or_else(|| CliError::config(p, "missing"));
    let (rho, eps, delta) = (need(config.rho, "--rho")?, need(config.eps, "--eps")?, need(config.delta, "--delta")?);
    let n0 = match config.n0.or(inner.learner.required_sample_size()) {
        Some(n0) => n0,
        None => return Err(CliError::config("--n0", "missing and not implied by the inner learner")),
    };
    let params = boost_params(rho, eps, delta, n0)?;
    let boosted = boost(inner.learner.clone(), params, Hypothesis::all_plus(inner.learner.domain_len()))?;
    let n = params.sample_size();
    let trials = config.trials()?;
    let seed = config.seed()?;
    let dists = build_distributions(config.dist()?, class.as_deref().or(inner.class.as_deref()))?;
    let mut t = Table::new(vec![
        "learner",
        "distribution",
        "list_size",
        "alpha",
        "batches",
        "n0",
        "n1",
        "n2",
        "trials",
        "rho_hat",
        "list_coverage",
        "fallback_rate",
        "modal_id",
    ]);
    let mut results = Vec::new();
    for (i, (name, d)) in dists.iter().enumerate() {
        let hist = output_histogram(&boosted, d, n, trials, seed.child(i as u64, "distribution"))?;
        let r = stability_report_at(&hist, config.beta()?)?;
        let list = hist.top(params.list_size).into_iter().collect();
        let coverage = list_coverage(&hist, &list);
        let fallback_rate = hist.fallbacks() as f64 / trials as f64;
        t.push(vec![
            inner.spec.clone(),
            name.clone(),
            params.list_size.to_string(),
            num(params.alpha),
            params.batches.to_string(),
            n0.to_string(),
            params.n1.to_string(),
            params.n2.to_string(),
            trials.to_string(),
            num(r.rho_hat),
            num(coverage),
            num(fallback_rate),
            r.modal.to_string(),
        ]);
        results.push(json!({
            "distribution": name,
            "params": params,
            "report": r,
            "list": list.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "list_coverage": coverage,
            "fallback_rate": fallback_rate,
            "histogram": histogram_json(&hist.ranked()),
        }));
    }
    Ok((t, Json::Array(results), false))
}

fn adversary(config: &ExperimentConfig) -> CliResult<Output> {
    let class = config.class()?;
    let built = config.learner(class.clone())?;
    let class = class
        .or(built.class.clone())
        .ok_or_else(|| CliError::config("--class", "missing and not implied by the learner"))?;
    let seed = config.seed()?;
    let witness = match config.witness.as_deref().unwrap_or("cube") {
        "cube" => cube_witness(class.domain().len())?,
        "hollow-star" => {
            let cap = class.domain().len().min(Limits::default().hollow_cap);
            let star = find_hollow_star(&class, cap)?
                .ok_or_else(|| CliError::config("--witness", "the class has no hollow star"))?;
            hollow_star_witness(&class, &star.points)?
        }
        path => InstabilityWitness::from_json(&read_file(path, "--witness")?)?,
    };
    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        damping: config.damping.unwrap_or(defaults.damping),
        n: config.n.unwrap_or(defaults.n),
        mc: config.mc.unwrap_or(defaults.mc),
        tol: config.tol.unwrap_or(defaults.tol),
        max_sweeps: config.max_sweeps.unwrap_or(defaults.max_sweeps),
        cert_trials: config.cert_trials.unwrap_or(defaults.cert_trials),
        beta: config.beta()?,
        ..defaults
    };
    let cert = find_hard_distribution(built.learner.as_ref(), &witness, &class, &class, &solver, seed)?;
    let unconverged = cert.status == CertificateStatus::Unconverged;
    let mut t = Table::new(vec![
        "learner",
        "class",
        "k",
        "status",
        "residual",
        "t_star",
        "max_frequency",
        "ci",
        "bound",
        "other_frequency",
    ]);
    let status = if unconverged { "unconverged" } else { "converged" };
    t.push(vec![
        built.spec.clone(),
        config.class.clone().unwrap_or_default(),
        witness.k().to_string(),
        status.to_string(),
        num(cert.residual),
        cert.t_star.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"),
        num(cert.max_frequency),
        num(cert.ci),
        num(cert.bound),
        num(cert.other_frequency),
    ]);
    let results = json!({
        "witness": serde_json::from_str::<Json>(&witness.to_json()).expect("witness json"),
        "solver": solver,
        "certificate": cert.to_json_value(),
    });
    Ok((t, results, unconverged))
}

fn oracle(config: &ExperimentConfig) -> CliResult<Output> {
    let class = config.class()?;
    let built = config.learner(class.clone())?;
    let n = sample_size(config, built.learner.as_ref())?;
    let dists = build_distributions(config.dist()?, class.as_deref().or(built.class.as_deref()))?;
    let mut t = Table::new(vec!["learner", "distribution", "n", "hypothesis", "probability"]);
    let mut results = Vec::new();
    for (name, d) in &dists {
        let law = exact_output_distribution(built.learner.as_ref(), d, n)?;
        for (h, p) in law.ranked() {
            t.push(vec![built.spec.clone(), name.clone(), n.to_string(), h.to_string(), num(p)]);
        }
        results.push(json!({
            "distribution": name,
            "max": law.max(),
            "collision": law.collision(),
            "total": law.total(),
            "law": law.ranked().iter().map(|(h, p)| json!({"hypothesis": h.to_string(), "probability": p})).collect::<Vec<_>>(),
        }));
    }
    Ok((t, Json::Array(results), false))
}
