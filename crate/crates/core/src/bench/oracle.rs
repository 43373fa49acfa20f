//! Exhaustive and randomized baselines: the brute-force optimum, uniform
//! random placements, and small random instances for oracle-driven tests.

use super::demand::{build_instance, DemandLaw, DemandParams};
use super::topology::Topology;
use super::BenchError;
use crate::costs::EdgeCosts;
use crate::gradient::gain;
use crate::model::{CacheNetwork, Placement, RequestClass};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default cap on the number of feasible placements the oracle enumerates.
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

/// Exhaustive optimum of the caching gain over feasible placements
/// dominating `x0`; ties break toward the lexicographically smallest
/// placement. Errors when the feasible count exceeds `cap`.
pub fn brute_force_opt(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    cap: u128,
) -> Result<(Placement, f64), BenchError> {
    // Per-node candidate contents: every superset of the baseline fitting
    // the capacity, as object lists.
    let mut node_choices: Vec<Vec<Vec<usize>>> = Vec::with_capacity(net.num_nodes());
    let mut combinations: u128 = 1;
    for v in 0..net.num_nodes() {
        let fixed: Vec<usize> = (0..net.catalog_size()).filter(|&i| x0.get(v, i)).collect();
        let free: Vec<usize> = (0..net.catalog_size()).filter(|&i| !x0.get(v, i)).collect();
        let slack = net.capacity(v).saturating_sub(fixed.len());
        let mut choices = Vec::new();
        subsets_up_to(&free, slack, &mut Vec::new(), &mut choices);
        combinations = combinations.saturating_mul(choices.len() as u128);
        if combinations > cap {
            return Err(BenchError::OracleCapExceeded { combinations, cap });
        }
        node_choices.push(choices);
    }

    let mut best: Option<(Placement, f64)> = None;
    let mut pick = vec![0usize; net.num_nodes()];
    loop {
        let mut x = x0.clone();
        for (v, &c) in pick.iter().enumerate() {
            for &obj in &node_choices[v][c] {
                x.set(v, obj, true);
            }
        }
        let f = gain(net, costs, x0, &x)?;
        let better = match &best {
            None => true,
            Some((bx, bf)) => {
                f > *bf || (f == *bf && x.lex_cmp(bx) == std::cmp::Ordering::Less)
            }
        };
        if better {
            best = Some((x, f));
        }
        // Odometer over per-node choices.
        let mut v = 0;
        loop {
            if v == pick.len() {
                let (bx, bf) = best.unwrap();
                return Ok((bx, bf));
            }
            pick[v] += 1;
            if pick[v] < node_choices[v].len() {
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}

fn subsets_up_to(
    items: &[usize],
    max_len: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(current.clone());
    if current.len() == max_len {
        return;
    }
    let start = current
        .last()
        .map(|&last| items.iter().position(|&i| i == last).unwrap() + 1)
        .unwrap_or(0);
    for idx in start..items.len() {
        current.push(items[idx]);
        subsets_up_to(items, max_len, current, out);
        current.pop();
    }
}

/// Uniform random placement: each node caches a uniform random
/// capacity-sized subset of the catalog.
pub fn rnd_placement(net: &CacheNetwork, seed: u64) -> Placement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Placement::empty(net);
    let catalog = net.catalog_size();
    for v in 0..net.num_nodes() {
        let take = net.capacity(v).min(catalog);
        if take == 0 {
            continue;
        }
        // Partial Fisher-Yates over the catalog.
        let mut pool: Vec<usize> = (0..catalog).collect();
        for i in 0..take {
            let j = i + rng.random_range(0..catalog - i);
            pool.swap(i, j);
            x.set(v, pool[i], true);
        }
    }
    x
}

/// Maximum of `<m, g>` over integral vertices dominating `x0`, by per-node
/// exhaustive subset enumeration (the polytope is a product over nodes).
pub fn enumerate_vertices_objective(net: &CacheNetwork, x0: &Placement, g: &[f64]) -> f64 {
    let mut total = 0.0;
    for v in 0..net.num_nodes() {
        let fixed: f64 = (0..net.catalog_size())
            .filter(|&i| x0.get(v, i))
            .map(|i| g[net.var(v, i)])
            .sum();
        let free: Vec<usize> = (0..net.catalog_size()).filter(|&i| !x0.get(v, i)).collect();
        let slack = net.capacity(v).saturating_sub(x0.node_count(v));
        let mut choices = Vec::new();
        subsets_up_to(&free, slack, &mut Vec::new(), &mut choices);
        let best = choices
            .iter()
            .map(|c| c.iter().map(|&i| g[net.var(v, i)]).sum::<f64>())
            .fold(f64::MIN, f64::max);
        total += fixed + best;
    }
    total
}

/// Small random instance for oracle-driven tests: a connected topology of 3
/// to 6 nodes, catalog 2, unit capacities, a few unit-rate requests, and
/// service rates that keep the empty placement stable. The number of free
/// placement bits (nodes times catalog) stays within `max_bits`.
pub fn random_small_instance(seed: u64, max_bits: usize) -> CacheNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let catalog = 2;
    let n = (3 + (rng.random::<u64>() % 4) as usize).min(max_bits / catalog);
    // Random tree plus one extra link when possible.
    let mut topo = Topology {
        node_names: (0..n).map(|i| i.to_string()).collect(),
        edges: Vec::new(),
    };
    let mut links = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = (rng.random::<u64>() % v as u64) as usize;
        links.insert((u, v));
    }
    for _ in 0..2 {
        let a = (rng.random::<u64>() % n as u64) as usize;
        let b = (rng.random::<u64>() % n as u64) as usize;
        if a != b {
            links.insert((a.min(b), a.max(b)));
        }
    }
    for &(u, v) in &links {
        topo.edges.push((u, v));
        topo.edges.push((v, u));
    }
    let params = DemandParams {
        catalog,
        num_requests: 2 + (seed % 3) as usize,
        num_sources: 1 + (seed % 2) as usize,
        capacity: 1,
        law: DemandLaw::Uniform,
        rate: 1.0,
    };
    // A draw can put every request's source on its designated server,
    // leaving the network idle; redraw demands until traffic exists.
    let mut demand_seed = seed;
    loop {
        let net = build_instance(&topo, &params, demand_seed).expect("small instances are connected");
        if net.load(&Placement::empty(&net)).max_load() > 0.0 {
            return net;
        }
        demand_seed = demand_seed.wrapping_add(0x9e37_79b9);
    }
}

/// Two-node instance with one cache node: node 0 caches, node 1 serves
/// every object, and object `i` is requested from node 0 at rate
/// `base_rate * (i + 1)` so single-object gains differ.
pub fn single_cache_instance(capacity: usize, catalog: usize, base_rate: f64) -> CacheNetwork {
    let total: f64 = (1..=catalog).map(|i| i as f64 * base_rate).sum();
    let mu = 1.05 * total;
    CacheNetwork::new(
        vec!["cache".into(), "server".into()],
        vec![(0, 1, mu), (1, 0, mu)],
        vec![capacity, 0],
        catalog,
        (0..catalog).map(|_| vec![1]).collect(),
        (0..catalog)
            .map(|i| RequestClass::new(i, vec![0, 1], base_rate * (i + 1) as f64))
            .collect(),
    )
    .expect("single-cache instance is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::CostModel;

    #[test]
    fn brute_force_fig3_optimum() {
        let net = crate::bench::fig3_instance(0.5, 200.0);
        let costs = EdgeCosts::delay(&net);
        let x0 = Placement::empty(&net);
        let (best, opt) = brute_force_opt(&net, &costs, &x0, DEFAULT_ORACLE_CAP).unwrap();
        assert!((opt - 4.0).abs() < 1e-12);
        assert!(best.get(0, 0) && best.get(2, 1));
    }

    #[test]
    fn brute_force_zero_capacity() {
        let net = single_cache_instance(0, 2, 0.3);
        let costs = EdgeCosts::uniform(&net, CostModel::queue_size());
        let x0 = Placement::empty(&net);
        let (best, opt) = brute_force_opt(&net, &costs, &x0, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(best, x0);
        assert_eq!(opt, 0.0);
    }

    #[test]
    fn brute_force_cap_exceeded() {
        let net = crate::bench::fig3_instance(0.5, 200.0);
        let costs = EdgeCosts::delay(&net);
        let x0 = Placement::empty(&net);
        assert!(matches!(
            brute_force_opt(&net, &costs, &x0, 2).unwrap_err(),
            BenchError::OracleCapExceeded { .. }
        ));
    }

    #[test]
    fn brute_force_dominates_greedy_on_random_instances() {
        for seed in 0..8u64 {
            let net = random_small_instance(seed, 12);
            let costs = EdgeCosts::uniform(&net, CostModel::queue_size());
            let x0 = Placement::empty(&net);
            let run = crate::optimize::greedy(&net, &costs, &x0).unwrap();
            let greedy_gain = gain(&net, &costs, &x0, &run.placement).unwrap();
            let (_, opt) = brute_force_opt(&net, &costs, &x0, DEFAULT_ORACLE_CAP).unwrap();
            assert!(opt >= greedy_gain - 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn rnd_placement_uniform_edges() {
        let net = single_cache_instance(2, 2, 0.3);
        // Capacity covers the whole catalog: deterministic full cache.
        let x = rnd_placement(&net, 99);
        assert!(x.get(0, 0) && x.get(0, 1));
        // Zero capacity: empty.
        let net0 = single_cache_instance(0, 2, 0.3);
        assert_eq!(rnd_placement(&net0, 5).count_ones(), 0);
    }

    #[test]
    fn rnd_placement_feasible_and_seeded() {
        let net = random_small_instance(3, 12);
        let a = rnd_placement(&net, 7);
        let b = rnd_placement(&net, 7);
        assert_eq!(a, b);
        assert!(a.is_feasible(&net));
        for v in 0..net.num_nodes() {
            assert_eq!(a.node_count(v), net.capacity(v).min(net.catalog_size()));
        }
    }
}
