//! Batch CLI over the cache-placement library: generate instances, compute
//! placements, and compare algorithms into CSV.
//!
//! Exit codes: 0 success, 2 usage or parse failure, 3 infeasible or
//! unstable input, 4 resource cap exceeded.

use clap::{Args, Parser, Subcommand};
use kellycache::bench::{
    self, fmt_g9, parse_instance, write_instance, AlgorithmSpec, BenchError, DemandLaw,
    DemandParams, ExperimentSpec, TopologyKind,
};
use kellycache::costs::{expected_system_delay, EdgeCosts};
use kellycache::gradient::GradientError;
use kellycache::model::{CacheNetwork, Placement};
use kellycache::optimize::OptimizeError;
use kellycache::rounding::RoundingError;
use kellycache::wdnf::{WdnfError, DEFAULT_TERM_CAP};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kellycache", version, about = "Cache placement over networks of queues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file (topology, demands, service rates).
    Generate(GenerateArgs),
    /// Compute a placement on an instance and report its gain.
    Place(PlaceArgs),
    /// Run an experiment spec over algorithms and seeds, emitting CSV.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Topology: path-fig3, star, hypercube, erdos-renyi, abilene,
    /// abilene-2r, geant, dtelekom, from-file.
    #[arg(long)]
    kind: String,
    /// Node count (star, erdos-renyi).
    #[arg(long)]
    n: Option<usize>,
    /// Link probability (erdos-renyi).
    #[arg(long)]
    p: Option<f64>,
    /// Dimension (hypercube).
    #[arg(long)]
    dim: Option<u32>,
    /// Edge-list file with one `u v` link per line (from-file).
    #[arg(long)]
    file: Option<String>,
    /// Arrival rate of the two path classes (path-fig3).
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// High-bandwidth service rate (path-fig3).
    #[arg(long, default_value_t = 200.0)]
    m: f64,
    /// Catalog size (skeleton topologies).
    #[arg(long, default_value_t = 10)]
    catalog: usize,
    /// Number of request classes.
    #[arg(long, default_value_t = 100)]
    requests: usize,
    /// Number of request source nodes.
    #[arg(long, default_value_t = 4)]
    sources: usize,
    /// Uniform cache capacity.
    #[arg(long, default_value_t = 2)]
    capacity: usize,
    /// Demand law: uniform or power-law.
    #[arg(long, default_value = "power-law")]
    law: String,
    /// Power-law exponent.
    #[arg(long, default_value_t = 1.2)]
    exponent: f64,
    /// Arrival rate per class.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output instance file.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct PlaceArgs {
    /// Instance file to optimize.
    #[arg(long)]
    instance: String,
    /// Algorithm: greedy, cg-sample, cg-taylor, cg-power, rnd, brute.
    #[arg(long)]
    alg: String,
    /// Cost kind: delay, queue-size, load, md1, mmk-prob:K, mmk-size:K.
    #[arg(long, default_value = "delay")]
    cost: String,
    /// Expansion order for cg-taylor / cg-power.
    #[arg(long = "L")]
    order: Option<usize>,
    /// Sample count for cg-sample.
    #[arg(long = "T")]
    samples: Option<usize>,
    /// Iteration count for the continuous-greedy family.
    #[arg(long = "K")]
    steps: Option<usize>,
    /// Fixed step size (overrides --K).
    #[arg(long)]
    gamma: Option<f64>,
    /// Rounding scheme: swap or pipage.
    #[arg(long, default_value = "swap")]
    rounding: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment spec file (JSON).
    #[arg(long)]
    spec: String,
    /// Normalize gains by this baseline (only "rnd" is supported).
    #[arg(long)]
    normalize: Option<String>,
    /// Concurrent experiment cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    };
    std::process::exit(code);
}

struct CliError {
    exit_code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { exit_code: 2, message: message.into() }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        Self { exit_code: 3, message: message.into() }
    }

    fn resource(message: impl Into<String>) -> Self {
        Self { exit_code: 4, message: message.into() }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        let code = match &e {
            BenchError::Parse { .. } | BenchError::BadParams(_) | BenchError::Model(_) => 2,
            BenchError::Disconnected { .. } => 3,
            BenchError::OracleCapExceeded { .. } => 4,
            BenchError::Io(_) => 2,
            BenchError::Optimize(op) => return op_error(op),
            BenchError::Gradient(g) => return gradient_error(g),
            BenchError::Rounding(r) => match r {
                RoundingError::Gradient(g) => return gradient_error(g),
                _ => 4,
            },
        };
        Self { exit_code: code, message: e.to_string() }
    }
}

fn op_error(e: &OptimizeError) -> CliError {
    match e {
        OptimizeError::UnstableStart => {
            CliError::infeasible("no stable starting placement given")
        }
        OptimizeError::Gradient(g) => gradient_error(g),
    }
}

fn gradient_error(e: &GradientError) -> CliError {
    match e {
        GradientError::Wdnf(WdnfError::TermCapExceeded { .. })
        | GradientError::EnumerationInfeasible { .. } => CliError::resource(e.to_string()),
        GradientError::DominationViolated => CliError::infeasible(e.to_string()),
        other => CliError::usage(other.to_string()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Place(args) => cmd_place(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn term_cap() -> usize {
    std::env::var("KELLYCACHE_TERM_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_TERM_CAP)
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let comment = format!("generated: kind={} seed={}", args.kind, args.seed);
    let net = match args.kind.as_str() {
        "path-fig3" => bench::fig3_instance(args.delta, args.m),
        "abilene" => bench::abilene_instance(true)?,
        "abilene-2r" => bench::abilene_instance(false)?,
        skeleton => {
            let kind = match skeleton {
                "star" => TopologyKind::Star {
                    n: args.n.ok_or_else(|| CliError::usage("star needs --n"))?,
                },
                "hypercube" => TopologyKind::Hypercube {
                    dim: args.dim.ok_or_else(|| CliError::usage("hypercube needs --dim"))?,
                },
                "erdos-renyi" => TopologyKind::ErdosRenyi {
                    n: args.n.ok_or_else(|| CliError::usage("erdos-renyi needs --n"))?,
                    p: args.p.ok_or_else(|| CliError::usage("erdos-renyi needs --p"))?,
                    seed: args.seed,
                },
                "geant" => TopologyKind::Geant,
                "dtelekom" => TopologyKind::Dtelekom,
                "from-file" => TopologyKind::FromFile {
                    path: args
                        .file
                        .clone()
                        .ok_or_else(|| CliError::usage("from-file needs --file"))?,
                },
                other => return Err(CliError::usage(format!("unknown topology kind '{other}'"))),
            };
            let topo = bench::gen_topology(&kind)?;
            let law = match args.law.as_str() {
                "uniform" => DemandLaw::Uniform,
                "power-law" | "powerlaw" => DemandLaw::PowerLaw { exponent: args.exponent },
                other => return Err(CliError::usage(format!("unknown demand law '{other}'"))),
            };
            let params = DemandParams {
                catalog: args.catalog,
                num_requests: args.requests,
                num_sources: args.sources,
                capacity: args.capacity,
                law,
                rate: args.rate,
            };
            bench::build_instance(&topo, &params, args.seed)?
        }
    };
    std::fs::write(&args.out, write_instance(&net, &comment))
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", args.out)))?;
    println!(
        "wrote {} ({} nodes, {} edges, {} requests, seed {})",
        args.out,
        net.num_nodes(),
        net.num_edges(),
        net.requests().len(),
        args.seed
    );
    Ok(())
}

fn cmd_place(args: PlaceArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.instance)))?;
    let net = parse_instance(&text)?;
    let x0 = Placement::empty(&net);
    if !net.is_stable(&x0) {
        return Err(CliError::infeasible("no stable starting placement given"));
    }
    let costs = bench::cost_assignment(&net, &args.cost)?;
    let spec = AlgorithmSpec {
        alg: args.alg.clone(),
        order: args.order,
        samples: args.samples,
        steps: args.steps,
        gamma: args.gamma,
        rounding: Some(args.rounding.clone()),
    };
    let outcome = bench::run_algorithm(&net, &costs, &x0, &spec, args.seed, term_cap())?;
    let report = place_report(&net, &costs, &x0, &args, &spec, &outcome)?;
    let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
    match &args.out {
        Some(path) => std::fs::write(path, rendered + "\n")
            .map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?,
        None => println!("{rendered}"),
    }
    Ok(())
}

fn place_report(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    args: &PlaceArgs,
    spec: &AlgorithmSpec,
    outcome: &bench::AlgorithmOutcome,
) -> Result<Value, CliError> {
    let g9 = |x: f64| -> Value {
        // Round to 9 significant digits before serializing.
        json!(fmt_g9(x).parse::<f64>().unwrap_or(x))
    };
    let baseline_cost = kellycache::gradient::total_cost(net, costs, x0).map_err(|e| gradient_error(&e))?;
    let mut report = json!({
        "instance": args.instance,
        "algorithm": spec.label(),
        "cost_kind": args.cost,
        "seed": args.seed,
        "gain": g9(outcome.gain),
        "baseline_cost": g9(baseline_cost),
        "params": serde_json::from_str::<Value>(&spec.params_json()).unwrap(),
    });
    if let Some(x) = &outcome.placement {
        let rho = net.load(x);
        let cost = kellycache::gradient::total_cost(net, costs, x).map_err(|e| gradient_error(&e))?;
        let mut contents: Vec<Value> = Vec::new();
        for v in 0..net.num_nodes() {
            let objs: Vec<usize> = (0..net.catalog_size()).filter(|&i| x.get(v, i)).collect();
            if !objs.is_empty() {
                contents.push(json!({ "node": net.node_name(v), "objects": objs }));
            }
        }
        report["placement"] = Value::Array(contents);
        report["cost"] = g9(cost);
        report["max_load"] = g9(rho.max_load());
        report["stable"] = json!(rho.is_stable());
        report["expected_system_delay"] =
            g9(expected_system_delay(net, x).map_err(|e| CliError::usage(e.to_string()))?);
    }
    if let Some(cg) = &outcome.cg {
        report["diagnostics"] = json!({
            "steps": cg.steps,
            "rounding": args.rounding,
            "lipschitz_p": g9(cg.diagnostics.lipschitz_p),
            "diameter": g9(cg.diagnostics.diameter),
            "diameter_loose": g9(cg.diagnostics.diameter_loose),
            "bias_bound": cg.diagnostics.bias_bound.map(g9).unwrap_or(Value::Null),
        });
    }
    Ok(report)
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.spec)))?;
    let mut spec: ExperimentSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("malformed experiment spec: {e}")))?;
    if let Some(norm) = &args.normalize {
        if norm != "rnd" {
            return Err(CliError::usage(format!("unsupported normalizer '{norm}'")));
        }
        spec.normalize = Some(norm.clone());
    }
    let rows = bench::run_experiment(&spec, args.jobs)?;
    let csv = bench::write_csv(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?,
        None => print!("{csv}"),
    }
    Ok(())
}
