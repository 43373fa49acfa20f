//! Experiment orchestration: build instances from a declarative spec, run a
//! list of placement algorithms over seeds, and emit deterministic CSV.

use super::demand::{build_instance, DemandLaw, DemandParams};
use super::fileio::{fmt_g9, parse_instance};
use super::oracle::{brute_force_opt, rnd_placement, DEFAULT_ORACLE_CAP};
use super::topology::{abilene_instance, fig3_instance, gen_topology, TopologyKind};
use super::BenchError;
use crate::costs::{CostModel, EdgeCosts};
use crate::gradient::{gain, Expansion};
use crate::model::{CacheNetwork, Placement};
use crate::optimize::{continuous_greedy, greedy, CgConfig, GradEstimator};
use crate::rounding::{pipage_round, swap_round, GainEvaluator, RoundingError};
use crate::wdnf::DEFAULT_TERM_CAP;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySpec {
    ErdosRenyi { n: usize, p: f64 },
    Hypercube { dim: u32 },
    Star { n: usize },
    PathFig3 {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_m")]
        m: f64,
    },
    Abilene,
    AbileneTwoRequests,
    Geant,
    Dtelekom,
    File { path: String },
}

fn default_delta() -> f64 {
    0.5
}

fn default_m() -> f64 {
    200.0
}

impl TopologySpec {
    pub fn label(&self) -> String {
        match self {
            TopologySpec::ErdosRenyi { n, p } => format!("er-{n}-{p}"),
            TopologySpec::Hypercube { dim } => format!("hc-{dim}"),
            TopologySpec::Star { n } => format!("star-{n}"),
            TopologySpec::PathFig3 { .. } => "path".into(),
            TopologySpec::Abilene => "abilene".into(),
            TopologySpec::AbileneTwoRequests => "abilene-2r".into(),
            TopologySpec::Geant => "geant".into(),
            TopologySpec::Dtelekom => "dtelekom".into(),
            TopologySpec::File { path } => path.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemandSpec {
    pub catalog: usize,
    pub requests: usize,
    pub sources: usize,
    pub capacity: usize,
    #[serde(default = "default_law")]
    pub law: String,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default = "default_rate")]
    pub rate: f64,
}

fn default_law() -> String {
    "power-law".into()
}

fn default_exponent() -> f64 {
    1.2
}

fn default_rate() -> f64 {
    1.0
}

impl DemandSpec {
    fn params(&self) -> Result<DemandParams, BenchError> {
        let law = match self.law.as_str() {
            "uniform" => DemandLaw::Uniform,
            "power-law" | "powerlaw" => DemandLaw::PowerLaw { exponent: self.exponent },
            other => return Err(BenchError::BadParams(format!("unknown demand law '{other}'"))),
        };
        Ok(DemandParams {
            catalog: self.catalog,
            num_requests: self.requests,
            num_sources: self.sources,
            capacity: self.capacity,
            law,
            rate: self.rate,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    /// One of: greedy, brute, rnd, cg-taylor, cg-power, cg-sample.
    pub alg: String,
    /// Expansion order L for the closed-form estimators.
    #[serde(default)]
    pub order: Option<usize>,
    /// Sample count T for the sampling estimator.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Iteration count K (step size 1/K).
    #[serde(default)]
    pub steps: Option<usize>,
    /// Fixed step size; overrides `steps` when set.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// swap (default) or pipage.
    #[serde(default)]
    pub rounding: Option<String>,
}

impl AlgorithmSpec {
    pub fn named(alg: &str) -> Self {
        Self {
            alg: alg.into(),
            order: None,
            samples: None,
            steps: None,
            gamma: None,
            rounding: None,
        }
    }

    pub fn label(&self) -> String {
        match self.alg.as_str() {
            "cg-taylor" => format!("cg-taylor-L{}", self.order.unwrap_or(1)),
            "cg-power" => format!("cg-power-L{}", self.order.unwrap_or(1)),
            "cg-sample" => format!("cg-sample-T{}", self.samples.unwrap_or(500)),
            other => other.to_string(),
        }
    }

    pub fn params_json(&self) -> String {
        // Stable field order comes from the struct definition.
        serde_json::to_string(self).expect("spec serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: String,
    pub topology: TopologySpec,
    /// Demand generation parameters; required for skeleton topologies,
    /// ignored for self-contained instances.
    #[serde(default)]
    pub demand: Option<DemandSpec>,
    /// Cost kind: delay, queue-size, load, md1, mmk-prob:K, mmk-size:K.
    #[serde(default = "default_cost")]
    pub cost: String,
    pub algorithms: Vec<AlgorithmSpec>,
    pub seeds: Vec<u64>,
    /// When set to "rnd", gains are also reported normalized by the
    /// random baseline's 10-draw mean for the same seed.
    #[serde(default)]
    pub normalize: Option<String>,
}

fn default_cost() -> String {
    "delay".into()
}

/// One result cell of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub topology: String,
    pub algorithm: String,
    pub seed: u64,
    pub gain: f64,
    pub normalized_gain: Option<f64>,
    pub wallclock_seconds: f64,
    pub params_json: String,
}

/// Build the instance a spec describes for one seed.
pub fn build_spec_instance(spec: &ExperimentSpec, seed: u64) -> Result<CacheNetwork, BenchError> {
    match &spec.topology {
        TopologySpec::PathFig3 { delta, m } => Ok(fig3_instance(*delta, *m)),
        TopologySpec::Abilene => abilene_instance(true),
        TopologySpec::AbileneTwoRequests => abilene_instance(false),
        TopologySpec::File { path } => parse_instance(&std::fs::read_to_string(path)?),
        skeleton => {
            let kind = match skeleton {
                TopologySpec::ErdosRenyi { n, p } => TopologyKind::ErdosRenyi { n: *n, p: *p, seed },
                TopologySpec::Hypercube { dim } => TopologyKind::Hypercube { dim: *dim },
                TopologySpec::Star { n } => TopologyKind::Star { n: *n },
                TopologySpec::Geant => TopologyKind::Geant,
                TopologySpec::Dtelekom => TopologyKind::Dtelekom,
                _ => unreachable!(),
            };
            let topo = gen_topology(&kind)?;
            let demand = spec.demand.as_ref().ok_or_else(|| {
                BenchError::BadParams("skeleton topology needs a demand block".into())
            })?;
            build_instance(&topo, &demand.params()?, seed)
        }
    }
}

/// Resolve a cost kind string to per-edge models.
pub fn cost_assignment(net: &CacheNetwork, cost: &str) -> Result<EdgeCosts, BenchError> {
    let model = match cost {
        "delay" => return Ok(EdgeCosts::delay(net)),
        "queue-size" => CostModel::queue_size(),
        "load" => CostModel::load_linear(),
        "md1" => CostModel::md1_queue_size(),
        other => {
            if let Some(k) = other.strip_prefix("mmk-prob:") {
                CostModel::mmk_queue_prob(k.parse().map_err(|_| {
                    BenchError::BadParams(format!("bad server count in '{other}'"))
                })?)
            } else if let Some(k) = other.strip_prefix("mmk-size:") {
                CostModel::mmk_queue_size(k.parse().map_err(|_| {
                    BenchError::BadParams(format!("bad server count in '{other}'"))
                })?)
            } else {
                return Err(BenchError::BadParams(format!("unknown cost kind '{other}'")));
            }
        }
    };
    Ok(EdgeCosts::uniform(net, model))
}

/// Outcome of one algorithm run.
#[derive(Debug, Clone)]
pub struct AlgorithmOutcome {
    pub placement: Option<Placement>,
    pub gain: f64,
    /// Continuous-greedy run details, when that family ran.
    pub cg: Option<CgRunInfo>,
}

/// Continuous-greedy diagnostics surfaced to reports.
#[derive(Debug, Clone)]
pub struct CgRunInfo {
    pub steps: usize,
    pub diagnostics: crate::optimize::CgDiagnostics,
}

/// Run one placement algorithm on a built instance. The random baseline
/// reports the mean gain of 10 seeded draws and no single placement.
pub fn run_algorithm(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    alg: &AlgorithmSpec,
    seed: u64,
    term_cap: usize,
) -> Result<AlgorithmOutcome, BenchError> {
    match alg.alg.as_str() {
        "greedy" => {
            let run = greedy(net, costs, x0)?;
            let g = gain(net, costs, x0, &run.placement)?;
            Ok(AlgorithmOutcome { placement: Some(run.placement), gain: g, cg: None })
        }
        "brute" => {
            let (x, g) = brute_force_opt(net, costs, x0, DEFAULT_ORACLE_CAP)?;
            Ok(AlgorithmOutcome { placement: Some(x), gain: g, cg: None })
        }
        "rnd" => {
            let mut total = 0.0;
            for j in 0..10u64 {
                let x = rnd_placement(net, seed.wrapping_mul(1000).wrapping_add(j));
                total += gain(net, costs, x0, &x)?;
            }
            Ok(AlgorithmOutcome { placement: None, gain: total / 10.0, cg: None })
        }
        cg @ ("cg-taylor" | "cg-power" | "cg-sample") => {
            let order = alg.order.unwrap_or(1);
            let estimator = match cg {
                "cg-taylor" => GradEstimator::Taylor { order, expansion: Expansion::AtCurrentLoad },
                "cg-power" => GradEstimator::Taylor { order, expansion: Expansion::PowerSeries },
                _ => GradEstimator::Sampling { samples: alg.samples.unwrap_or(500), seed },
            };
            let mut cfg = match alg.gamma {
                Some(gamma) => CgConfig::with_gamma(gamma, estimator),
                None => CgConfig::with_steps(alg.steps.unwrap_or(100), estimator),
            };
            cfg.term_cap = term_cap;
            let trace = continuous_greedy(net, costs, x0, &cfg)?;
            let x = match alg.rounding.as_deref().unwrap_or("swap") {
                "pipage" => {
                    match pipage_round(net, costs, x0, &trace.y, GainEvaluator::Exact { cap: 20 }) {
                        Ok(x) => x,
                        Err(RoundingError::UseSwapRounding { .. }) => pipage_round(
                            net,
                            costs,
                            x0,
                            &trace.y,
                            GainEvaluator::TaylorSurrogate { order },
                        )?,
                        Err(e) => return Err(e.into()),
                    }
                }
                _ => swap_round(net, &trace, seed)?,
            };
            let g = gain(net, costs, x0, &x)?;
            let info = CgRunInfo { steps: trace.steps.len(), diagnostics: trace.diagnostics.clone() };
            Ok(AlgorithmOutcome { placement: Some(x), gain: g, cg: Some(info) })
        }
        other => Err(BenchError::BadParams(format!("unknown algorithm '{other}'"))),
    }
}

/// Run every (seed, algorithm) cell of the spec. `jobs` bounds concurrent
/// cells; results are assembled in (seed, algorithm) order regardless of
/// completion order.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<Vec<ResultRow>, BenchError> {
    let jobs = jobs.max(1);
    let mut rows = Vec::with_capacity(spec.seeds.len() * spec.algorithms.len());
    for &seed in &spec.seeds {
        let net = build_spec_instance(spec, seed)?;
        let costs = cost_assignment(&net, &spec.cost)?;
        let x0 = Placement::empty(&net);
        let normalizer = if spec.normalize.as_deref() == Some("rnd") {
            let rnd = run_algorithm(&net, &costs, &x0, &AlgorithmSpec::named("rnd"), seed, DEFAULT_TERM_CAP)?;
            Some(rnd.gain)
        } else {
            None
        };

        let outcomes: Vec<Result<(f64, f64), BenchError>> = if jobs == 1 {
            spec.algorithms
                .iter()
                .map(|alg| run_cell(&net, &costs, &x0, alg, seed))
                .collect()
        } else {
            run_cells_parallel(&net, &costs, &x0, &spec.algorithms, seed, jobs)
        };

        for (alg, outcome) in spec.algorithms.iter().zip(outcomes) {
            let (gain, secs) = outcome?;
            rows.push(ResultRow {
                experiment_id: spec.id.clone(),
                topology: spec.topology.label(),
                algorithm: alg.label(),
                seed,
                gain,
                normalized_gain: normalizer.map(|r| if r == 0.0 { 0.0 } else { gain / r }),
                wallclock_seconds: secs,
                params_json: alg.params_json(),
            });
        }
    }
    Ok(rows)
}

fn run_cell(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    alg: &AlgorithmSpec,
    seed: u64,
) -> Result<(f64, f64), BenchError> {
    let start = std::time::Instant::now();
    let outcome = run_algorithm(net, costs, x0, alg, seed, DEFAULT_TERM_CAP)?;
    Ok((outcome.gain, start.elapsed().as_secs_f64()))
}

type CellOutcome = Result<(f64, f64), BenchError>;

fn run_cells_parallel(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    algorithms: &[AlgorithmSpec],
    seed: u64,
    jobs: usize,
) -> Vec<CellOutcome> {
    let next = std::sync::atomic::AtomicUsize::new(0);
    let collected: Vec<(usize, CellOutcome)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.min(algorithms.len()))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if idx >= algorithms.len() {
                            break;
                        }
                        local.push((idx, run_cell(net, costs, x0, &algorithms[idx], seed)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker does not panic"))
            .collect()
    });
    let mut results: Vec<Option<CellOutcome>> = (0..algorithms.len()).map(|_| None).collect();
    for (idx, r) in collected {
        results[idx] = Some(r);
    }
    results.into_iter().map(|r| r.expect("every cell ran")).collect()
}

/// Render rows as CSV. Identical inputs yield identical bytes; the
/// wallclock column is the only run-dependent field.
pub fn write_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "experiment_id,topology,algorithm,seed,gain,normalized_gain,wallclock_seconds,params_json\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.experiment_id,
            r.topology,
            r.algorithm,
            r.seed,
            fmt_g9(r.gain),
            r.normalized_gain.map(fmt_g9).unwrap_or_default(),
            fmt_g9(r.wallclock_seconds),
            csv_quote(&r.params_json),
        ));
    }
    out
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
