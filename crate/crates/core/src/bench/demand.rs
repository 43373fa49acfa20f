//! Demand and service-rate assignment: designated servers and request
//! sources drawn uniformly, objects by a uniform or power-law rank
//! distribution, shortest-path routing, and the low/high service-rate rule
//! that keeps the empty placement stable.

use super::topology::Topology;
use super::BenchError;
use crate::model::{CacheNetwork, RequestClass};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DemandLaw {
    Uniform,
    PowerLaw { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandParams {
    pub catalog: usize,
    pub num_requests: usize,
    pub num_sources: usize,
    pub capacity: usize,
    pub law: DemandLaw,
    pub rate: f64,
}

/// Generated demand side of an instance.
#[derive(Debug, Clone)]
pub struct DemandSet {
    pub designated_servers: Vec<Vec<usize>>,
    pub sources: Vec<usize>,
    pub requests: Vec<RequestClass>,
}

/// Draw designated servers, request sources, and request classes. Paths are
/// hop-count shortest with ties broken toward the lowest next-node index,
/// truncated at the first designated-server occurrence so every path stays
/// well-routed.
pub fn gen_demands(
    topo: &Topology,
    params: &DemandParams,
    seed: u64,
) -> Result<DemandSet, BenchError> {
    if params.catalog == 0 || params.num_requests == 0 || params.num_sources == 0 {
        return Err(BenchError::BadParams("counts must be at least 1".into()));
    }
    if let DemandLaw::PowerLaw { exponent } = params.law {
        if exponent <= 1.0 {
            return Err(BenchError::BadParams(format!(
                "power-law exponent must exceed 1, got {exponent}"
            )));
        }
    }
    let n = topo.num_nodes();
    if params.num_sources > n {
        return Err(BenchError::BadParams(format!(
            "{} sources requested over {n} nodes",
            params.num_sources
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adj = topo.adjacency();

    let servers: Vec<usize> = (0..params.catalog).map(|_| rng.random_range(0..n)).collect();
    let sources = sample_distinct(&mut rng, n, params.num_sources);

    // Hop distances from every designated server, reused across requests.
    let mut dist_from_server: Vec<Option<Vec<u32>>> = vec![None; n];
    let law_weights = match params.law {
        DemandLaw::Uniform => None,
        DemandLaw::PowerLaw { exponent } => Some(zipf_cumulative(params.catalog, exponent)),
    };

    let mut requests = Vec::with_capacity(params.num_requests);
    for _ in 0..params.num_requests {
        let object = match &law_weights {
            None => rng.random_range(0..params.catalog),
            Some(cdf) => sample_rank(cdf, rng.random::<f64>()),
        };
        let source = sources[rng.random_range(0..sources.len())];
        let server = servers[object];
        let dist = dist_from_server[server]
            .get_or_insert_with(|| bfs_distances(&adj, server));
        if dist[source] == u32::MAX {
            return Err(BenchError::Disconnected {
                from: topo.node_names[source].clone(),
                to: topo.node_names[server].clone(),
            });
        }
        let mut path = vec![source];
        let mut here = source;
        while here != server {
            // Lowest-index neighbor strictly closer to the server.
            let next = adj[here]
                .iter()
                .copied()
                .find(|&nb| dist[nb] + 1 == dist[here])
                .expect("a closer neighbor exists on a finite-distance node");
            path.push(next);
            here = next;
        }
        // Guard: stop at the first designated server of this object. With
        // one server per object the loop above already ends there.
        if let Some(cut) = path.iter().position(|&v| v == server) {
            path.truncate(cut + 1);
        }
        requests.push(RequestClass::new(object, path, params.rate));
    }

    Ok(DemandSet {
        designated_servers: servers.into_iter().map(|s| vec![s]).collect(),
        sources,
        requests,
    })
}

/// Per-edge service rates: congested edges (those attaining the maximum
/// no-cache load) get the low rate `1.05 * lambda_max`; every other edge
/// gets the low rate with probability 0.7 and the high rate
/// `200 * lambda_max` otherwise. The empty placement is stable by
/// construction.
pub fn assign_service_rates(topo: &Topology, requests: &[RequestClass], seed: u64) -> Vec<f64> {
    let mut edge_index = std::collections::HashMap::new();
    for (idx, &(u, v)) in topo.edges.iter().enumerate() {
        edge_index.insert((u, v), idx);
    }
    let mut arrival = vec![0.0f64; topo.edges.len()];
    for req in requests {
        for step in req.path.windows(2) {
            // Responses traverse the reverse edge of every path step.
            if let Some(&e) = edge_index.get(&(step[1], step[0])) {
                arrival[e] += req.rate;
            }
        }
    }
    let lambda_max = arrival.iter().copied().fold(0.0, f64::max);
    if lambda_max == 0.0 {
        return vec![1.0; topo.edges.len()];
    }
    let (mu_low, mu_high) = (1.05 * lambda_max, 200.0 * lambda_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    arrival
        .iter()
        .map(|&lam| {
            // Congested edges never draw; the rest go low w.p. 0.7.
            if lam == lambda_max || rng.random::<f64>() < 0.7 {
                mu_low
            } else {
                mu_high
            }
        })
        .collect()
}

/// Compose demand generation and rate assignment into a full instance with
/// uniform capacities.
pub fn build_instance(
    topo: &Topology,
    params: &DemandParams,
    seed: u64,
) -> Result<CacheNetwork, BenchError> {
    let demand = gen_demands(topo, params, seed)?;
    let rates = assign_service_rates(topo, &demand.requests, seed.wrapping_add(1));
    let edges = topo
        .edges
        .iter()
        .zip(&rates)
        .map(|(&(u, v), &mu)| (u, v, mu))
        .collect();
    Ok(CacheNetwork::new(
        topo.node_names.clone(),
        edges,
        vec![params.capacity; topo.num_nodes()],
        params.catalog,
        demand.designated_servers,
        demand.requests,
    )?)
}

/// Rebuild a network with every request rate multiplied by `factor`,
/// keeping topology, capacities, and service rates fixed.
pub fn scale_request_rates(net: &CacheNetwork, factor: f64) -> CacheNetwork {
    CacheNetwork::new(
        net.node_names().to_vec(),
        net.edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| (u, v, net.service_rate(e)))
            .collect(),
        net.capacities().to_vec(),
        net.catalog_size(),
        (0..net.catalog_size()).map(|i| net.servers(i).to_vec()).collect(),
        net.requests()
            .iter()
            .map(|r| RequestClass::new(r.object, r.path.clone(), r.rate * factor))
            .collect(),
    )
    .expect("scaling rates preserves structural validity")
}

fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<usize> {
    // Partial Fisher-Yates over the index range.
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + rng.random_range(0..n - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

/// Cumulative weights of the rank distribution `P(rank i) ~ i^(-s)`.
fn zipf_cumulative(catalog: usize, exponent: f64) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(catalog);
    let mut acc = 0.0;
    for rank in 1..=catalog {
        acc += (rank as f64).powf(-exponent);
        cdf.push(acc);
    }
    let total = acc;
    for c in cdf.iter_mut() {
        *c /= total;
    }
    cdf
}

fn sample_rank(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c < u).min(cdf.len() - 1)
}

fn bfs_distances(adj: &[Vec<usize>], start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}
