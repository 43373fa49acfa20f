//! Benchmark harness: topology generators, demand and service-rate
//! assignment, brute-force and random baselines, the finite-queue
//! counterexample, instance file I/O, and experiment orchestration.

mod demand;
mod experiment;
mod fileio;
mod mm1k;
mod oracle;
mod topology;

pub use demand::{
    assign_service_rates, build_instance, gen_demands, scale_request_rates, DemandLaw,
    DemandParams, DemandSet,
};
pub use experiment::{
    build_spec_instance, cost_assignment, run_algorithm, run_experiment, write_csv,
    AlgorithmOutcome, AlgorithmSpec, CgRunInfo, DemandSpec, ExperimentSpec, ResultRow,
    TopologySpec,
};
pub use fileio::{fmt_g9, parse_instance, write_instance};
pub use mm1k::{mm1k_counterexample, mm1k_drop_probability, Mm1kReport, Mm1kRow};
pub use oracle::{
    brute_force_opt, enumerate_vertices_objective, random_small_instance, rnd_placement,
    single_cache_instance, DEFAULT_ORACLE_CAP,
};
pub use topology::{
    abilene_instance, dtelekom_topology, fig3_instance, gen_topology, geant_topology,
    parse_edge_list, Topology, TopologyKind,
};

use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no path from {from} to {to}")]
    Disconnected { from: String, to: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance too large for oracle: {combinations} feasible placements exceed cap {cap}")]
    OracleCapExceeded { combinations: u128, cap: u128 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Optimize(#[from] crate::optimize::OptimizeError),
    #[error(transparent)]
    Gradient(#[from] crate::gradient::GradientError),
    #[error(transparent)]
    Rounding(#[from] crate::rounding::RoundingError),
}
