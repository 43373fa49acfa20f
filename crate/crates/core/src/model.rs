//! Cache network model: graph, request classes, placements, and edge loads.
//!
//! Nodes and objects are dense 0-based indices; external names map through a
//! symbol table kept on the network. A placement decides which objects each
//! node caches; the per-edge load induced by response traffic is a function
//! of the placement, and the system is stable when every load is below 1.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Dense node index.
pub type NodeId = usize;
/// Dense object (catalog) index.
pub type ObjectId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("edge ({u},{v}) has no reverse edge; the graph must be symmetric")]
    AsymmetricEdge { u: NodeId, v: NodeId },
    #[error("edge ({u},{v}) duplicated")]
    DuplicateEdge { u: NodeId, v: NodeId },
    #[error("edge ({u},{v}) has non-positive service rate {mu}")]
    NonPositiveServiceRate { u: NodeId, v: NodeId, mu: f64 },
    #[error("edge ({u},{v}) references a node out of range")]
    EdgeNodeOutOfRange { u: NodeId, v: NodeId },
    #[error("object {object} has no designated server")]
    EmptyServerSet { object: ObjectId },
    #[error("designated server {node} for object {object} out of range")]
    ServerOutOfRange { object: ObjectId, node: NodeId },
    #[error("request {request} has a negative arrival rate")]
    NegativeRate { request: usize },
    #[error("request {request} has an empty path")]
    EmptyPath { request: usize },
    #[error("request {request} repeats node {node}; paths must be simple")]
    PathNotSimple { request: usize, node: NodeId },
    #[error("request {request} uses edge ({u},{v}) which is not in the graph")]
    PathEdgeMissing { request: usize, u: NodeId, v: NodeId },
    #[error("request {request} does not terminate at a designated server of its object")]
    BadTerminal { request: usize },
    #[error("request {request} passes designated server {node} before its terminal")]
    EarlyServer { request: usize, node: NodeId },
    #[error("request {request} references object {object} outside the catalog")]
    ObjectOutOfRange { request: usize, object: ObjectId },
    #[error("request {request} path node {node} out of range")]
    PathNodeOutOfRange { request: usize, node: NodeId },
    #[error("class {request} does not traverse edge ({u},{v})")]
    ClassNotOnEdge { request: usize, u: NodeId, v: NodeId },
}

/// One request class: an object, the simple path its requests follow, and a
/// Poisson arrival rate. Responses travel the path in reverse from wherever
/// the object is found.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestClass {
    pub object: ObjectId,
    pub path: Vec<NodeId>,
    pub rate: f64,
}

impl RequestClass {
    pub fn new(object: ObjectId, path: Vec<NodeId>, rate: f64) -> Self {
        Self { object, path, rate }
    }

    /// Source node (first node of the path).
    pub fn source(&self) -> NodeId {
        self.path[0]
    }
}

/// Immutable cache network: symmetric directed graph with per-edge service
/// rates, per-node cache capacities, a catalog with designated servers, and
/// a set of request classes. Construction validates every structural
/// invariant; afterwards the network is safely shareable across threads.
#[derive(Debug, Clone)]
pub struct CacheNetwork {
    node_names: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
    service_rates: Vec<f64>,
    edge_index: HashMap<(NodeId, NodeId), usize>,
    capacities: Vec<usize>,
    catalog_size: usize,
    designated_servers: Vec<Vec<NodeId>>,
    requests: Vec<RequestClass>,
    // Per request: (edge index, prefix length k) for every response edge
    // (p_{k+1}, p_k); the response rate on that edge carries the product of
    // (1 - x) over the first k path nodes.
    response_edges: Vec<Vec<(usize, usize)>>,
}

impl CacheNetwork {
    /// Build a network from parts, validating symmetry, service rates,
    /// server sets, and that every request path is simple, well-routed, and
    /// walks existing edges.
    pub fn new(
        node_names: Vec<String>,
        edges: Vec<(NodeId, NodeId, f64)>,
        capacities: Vec<usize>,
        catalog_size: usize,
        designated_servers: Vec<Vec<NodeId>>,
        requests: Vec<RequestClass>,
    ) -> Result<Self, ModelError> {
        let n = node_names.len();
        assert_eq!(capacities.len(), n, "capacities must cover every node");
        assert_eq!(
            designated_servers.len(),
            catalog_size,
            "server sets must cover the catalog"
        );

        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut plain_edges = Vec::with_capacity(edges.len());
        let mut service_rates = Vec::with_capacity(edges.len());
        for &(u, v, mu) in &edges {
            if u >= n || v >= n {
                return Err(ModelError::EdgeNodeOutOfRange { u, v });
            }
            if mu <= 0.0 || !mu.is_finite() {
                return Err(ModelError::NonPositiveServiceRate { u, v, mu });
            }
            if edge_index.insert((u, v), plain_edges.len()).is_some() {
                return Err(ModelError::DuplicateEdge { u, v });
            }
            plain_edges.push((u, v));
            service_rates.push(mu);
        }
        for &(u, v) in &plain_edges {
            if !edge_index.contains_key(&(v, u)) {
                return Err(ModelError::AsymmetricEdge { u, v });
            }
        }

        let mut servers_sorted = designated_servers;
        for (i, servers) in servers_sorted.iter_mut().enumerate() {
            if servers.is_empty() {
                return Err(ModelError::EmptyServerSet { object: i });
            }
            for &s in servers.iter() {
                if s >= n {
                    return Err(ModelError::ServerOutOfRange { object: i, node: s });
                }
            }
            servers.sort_unstable();
            servers.dedup();
        }

        let mut response_edges = Vec::with_capacity(requests.len());
        for (r, req) in requests.iter().enumerate() {
            if !req.rate.is_finite() || req.rate < 0.0 {
                return Err(ModelError::NegativeRate { request: r });
            }
            if req.object >= catalog_size {
                return Err(ModelError::ObjectOutOfRange {
                    request: r,
                    object: req.object,
                });
            }
            if req.path.is_empty() {
                return Err(ModelError::EmptyPath { request: r });
            }
            let mut seen = vec![false; n];
            for &node in &req.path {
                if node >= n {
                    return Err(ModelError::PathNodeOutOfRange { request: r, node });
                }
                if seen[node] {
                    return Err(ModelError::PathNotSimple { request: r, node });
                }
                seen[node] = true;
            }
            let servers = &servers_sorted[req.object];
            let last = *req.path.last().unwrap();
            if servers.binary_search(&last).is_err() {
                return Err(ModelError::BadTerminal { request: r });
            }
            for &node in &req.path[..req.path.len() - 1] {
                if servers.binary_search(&node).is_ok() {
                    return Err(ModelError::EarlyServer { request: r, node });
                }
            }
            let mut revs = Vec::with_capacity(req.path.len().saturating_sub(1));
            for k in 1..req.path.len() {
                let (a, b) = (req.path[k - 1], req.path[k]);
                if !edge_index.contains_key(&(a, b)) {
                    return Err(ModelError::PathEdgeMissing { request: r, u: a, v: b });
                }
                // Response edge for path step (p_k, p_{k+1}) is (p_{k+1}, p_k);
                // its traffic survives caches on the first k path nodes.
                let eidx = *edge_index
                    .get(&(b, a))
                    .ok_or(ModelError::AsymmetricEdge { u: a, v: b })?;
                revs.push((eidx, k));
            }
            response_edges.push(revs);
        }

        Ok(Self {
            node_names,
            edges: plain_edges,
            service_rates,
            edge_index,
            capacities,
            catalog_size,
            designated_servers: servers_sorted,
            requests,
            response_edges,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn catalog_size(&self) -> usize {
        self.catalog_size
    }

    /// Number of placement coordinates, `|V| * |C|`.
    pub fn num_vars(&self) -> usize {
        self.num_nodes() * self.catalog_size
    }

    /// Dense coordinate of the (node, object) placement bit.
    pub fn var(&self, node: NodeId, object: ObjectId) -> usize {
        debug_assert!(node < self.num_nodes() && object < self.catalog_size);
        node * self.catalog_size + object
    }

    /// Inverse of [`Self::var`].
    pub fn var_pair(&self, var: usize) -> (NodeId, ObjectId) {
        (var / self.catalog_size, var % self.catalog_size)
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v]
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (NodeId, NodeId) {
        self.edges[idx]
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edge_index.get(&(u, v)).copied()
    }

    pub fn service_rate(&self, edge: usize) -> f64 {
        self.service_rates[edge]
    }

    pub fn capacity(&self, v: NodeId) -> usize {
        self.capacities[v]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn servers(&self, object: ObjectId) -> &[NodeId] {
        &self.designated_servers[object]
    }

    pub fn requests(&self) -> &[RequestClass] {
        &self.requests
    }

    /// Total exogenous arrival rate over all classes.
    pub fn total_arrival_rate(&self) -> f64 {
        self.requests.iter().map(|r| r.rate).sum()
    }

    /// Response edges of request `r` as (edge index, surviving prefix length).
    pub(crate) fn response_edges(&self, r: usize) -> &[(usize, usize)] {
        &self.response_edges[r]
    }

    /// Arrival rate of class `r` responses on edge `(u,v)`.
    ///
    /// The edge must be the reverse of a step on the request path; the rate
    /// is the class rate times the product of `(1 - x)` over every path node
    /// up to and including `v`, so it vanishes as soon as any of those nodes
    /// caches the object.
    pub fn class_rate_on_edge(
        &self,
        r: usize,
        edge: (NodeId, NodeId),
        x: &Placement,
    ) -> Result<f64, ModelError> {
        let req = &self.requests[r];
        let eidx = self
            .edge_index(edge.0, edge.1)
            .ok_or(ModelError::ClassNotOnEdge { request: r, u: edge.0, v: edge.1 })?;
        let &(_, prefix) = self.response_edges[r]
            .iter()
            .find(|&&(e, _)| e == eidx)
            .ok_or(ModelError::ClassNotOnEdge { request: r, u: edge.0, v: edge.1 })?;
        for &node in &req.path[..prefix] {
            if x.get(node, req.object) {
                return Ok(0.0);
            }
        }
        Ok(req.rate)
    }

    /// Per-edge loads induced by placement `x`. Edges traversed by no class
    /// keep load 0.
    pub fn load(&self, x: &Placement) -> LoadVector {
        let mut rho = vec![0.0; self.edges.len()];
        for (r, req) in self.requests.iter().enumerate() {
            if req.rate == 0.0 {
                continue;
            }
            let mut survives = true;
            let mut prefix = 0usize;
            for &(eidx, k) in &self.response_edges[r] {
                // Extend the cache-miss prefix product up to path node k.
                while survives && prefix < k {
                    if x.get(req.path[prefix], req.object) {
                        survives = false;
                    }
                    prefix += 1;
                }
                if !survives {
                    break;
                }
                rho[eidx] += req.rate / self.service_rates[eidx];
            }
        }
        LoadVector(rho)
    }

    /// True iff every edge load under `x` is strictly below 1.
    pub fn is_stable(&self, x: &Placement) -> bool {
        self.is_stable_with_margin(x, 0.0)
    }

    /// Stability with a configurable margin: every load must satisfy
    /// `rho < 1 - margin`.
    pub fn is_stable_with_margin(&self, x: &Placement, margin: f64) -> bool {
        self.load(x).iter().all(|rho| rho < 1.0 - margin)
    }
}

/// Binary placement: one bit per (node, object) pair in dense order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    bits: Vec<bool>,
    num_nodes: usize,
    catalog_size: usize,
}

impl fmt::Debug for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Placement{:?}", self.iter_ones().collect::<Vec<_>>())
    }
}

impl Placement {
    /// All-zero placement shaped for `net`.
    pub fn empty(net: &CacheNetwork) -> Self {
        Self {
            bits: vec![false; net.num_vars()],
            num_nodes: net.num_nodes(),
            catalog_size: net.catalog_size(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (NodeId, ObjectId)>>(
        net: &CacheNetwork,
        pairs: I,
    ) -> Self {
        let mut p = Self::empty(net);
        for (v, i) in pairs {
            p.set(v, i, true);
        }
        p
    }

    pub fn get(&self, node: NodeId, object: ObjectId) -> bool {
        self.bits[node * self.catalog_size + object]
    }

    pub fn set(&mut self, node: NodeId, object: ObjectId, value: bool) {
        self.bits[node * self.catalog_size + object] = value;
    }

    pub fn get_var(&self, var: usize) -> bool {
        self.bits[var]
    }

    pub fn set_var(&mut self, var: usize, value: bool) {
        self.bits[var] = value;
    }

    pub fn num_vars(&self) -> usize {
        self.bits.len()
    }

    /// Dense coordinates of all set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// Number of objects cached at `node`.
    pub fn node_count(&self, node: NodeId) -> usize {
        let start = node * self.catalog_size;
        self.bits[start..start + self.catalog_size]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Capacity feasibility: every node caches at most its capacity.
    pub fn is_feasible(&self, net: &CacheNetwork) -> bool {
        (0..self.num_nodes).all(|v| self.node_count(v) <= net.capacity(v))
    }

    /// Component-wise domination `self >= other`.
    pub fn dominates(&self, other: &Placement) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a || !b)
    }

    /// Lexicographic comparison of the dense bit sequence, used for
    /// deterministic tie-breaking among equal-gain placements.
    pub fn lex_cmp(&self, other: &Placement) -> std::cmp::Ordering {
        self.bits.cmp(&other.bits)
    }
}

/// Per-edge loads, parallel with the network's edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector(pub Vec<f64>);

impl LoadVector {
    pub fn get(&self, edge: usize) -> f64 {
        self.0[edge]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn max_load(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.0.iter().all(|&rho| rho < 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;

    fn three_node_chain(rate: f64) -> CacheNetwork {
        // v1 - v2 - v3, object 0 served at v3, requests from v1.
        CacheNetwork::new(
            vec!["v1".into(), "v2".into(), "v3".into()],
            vec![
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
            ],
            vec![1, 1, 0],
            1,
            vec![vec![2]],
            vec![RequestClass::new(0, vec![0, 1, 2], rate)],
        )
        .unwrap()
    }

    #[test]
    fn empty_placement_passes_full_rate() {
        let net = three_node_chain(2.0);
        let x = Placement::empty(&net);
        assert_eq!(net.class_rate_on_edge(0, (1, 0), &x).unwrap(), 2.0);
        assert_eq!(net.class_rate_on_edge(0, (2, 1), &x).unwrap(), 2.0);
    }

    #[test]
    fn caching_at_path_head_kills_rate() {
        let net = three_node_chain(2.0);
        let x = Placement::from_pairs(&net, [(0, 0)]);
        assert_eq!(net.class_rate_on_edge(0, (1, 0), &x).unwrap(), 0.0);
        assert_eq!(net.class_rate_on_edge(0, (2, 1), &x).unwrap(), 0.0);
    }

    #[test]
    fn class_rate_matches_product_on_all_patterns() {
        // Exhaustive oracle: evaluate the prefix product directly for every
        // cache pattern over the three path nodes.
        let net = three_node_chain(2.0);
        for mask in 0u32..8 {
            let mut x = Placement::empty(&net);
            for v in 0..3 {
                if mask >> v & 1 == 1 {
                    x.set(v, 0, true);
                }
            }
            // Edge (v3,v2): survives iff neither v1 nor v2 caches the object.
            let expect = if mask & 0b011 == 0 { 2.0 } else { 0.0 };
            assert_eq!(net.class_rate_on_edge(0, (2, 1), &x).unwrap(), expect);
            // Edge (v2,v1): survives iff v1 does not cache.
            let expect = if mask & 0b001 == 0 { 2.0 } else { 0.0 };
            assert_eq!(net.class_rate_on_edge(0, (1, 0), &x).unwrap(), expect);
            // Loads agree with the per-class rates.
            let rho = net.load(&x);
            let e21 = net.edge_index(2, 1).unwrap();
            assert_eq!(rho.get(e21), net.class_rate_on_edge(0, (2, 1), &x).unwrap());
        }
    }

    #[test]
    fn edge_off_reverse_path_errors() {
        let net = three_node_chain(1.0);
        let x = Placement::empty(&net);
        let err = net.class_rate_on_edge(0, (0, 1), &x).unwrap_err();
        assert_eq!(err, ModelError::ClassNotOnEdge { request: 0, u: 0, v: 1 });
    }

    #[test]
    fn load_is_rate_over_mu_on_reverse_path() {
        let net = three_node_chain(0.5);
        let rho = net.load(&Placement::empty(&net));
        assert_eq!(rho.get(net.edge_index(1, 0).unwrap()), 0.5);
        assert_eq!(rho.get(net.edge_index(2, 1).unwrap()), 0.5);
        // Forward edges carry no response traffic.
        assert_eq!(rho.get(net.edge_index(0, 1).unwrap()), 0.0);
    }

    #[test]
    fn caching_at_source_zeroes_all_loads() {
        let net = three_node_chain(0.5);
        let x = Placement::from_pairs(&net, [(0, 0)]);
        assert!(net.load(&x).iter().all(|r| r == 0.0));
    }

    #[test]
    fn fig3_empty_placement_loads() {
        let net = bench::fig3_instance(0.5, 200.0);
        let rho = net.load(&Placement::empty(&net));
        let (u, v, w, z) = (0, 1, 2, 3);
        assert_eq!(rho.get(net.edge_index(v, u).unwrap()), 0.5);
        assert_eq!(rho.get(net.edge_index(z, w).unwrap()), 0.5);
        assert_eq!(rho.get(net.edge_index(w, u).unwrap()), 0.5 / 200.0);
    }

    #[test]
    fn stability_is_strict() {
        let net = three_node_chain(1.0); // mu = 1.0 = lambda: rho = 1 exactly
        assert!(!net.is_stable(&Placement::empty(&net)));
        let net = three_node_chain(1.0 / 1.05);
        assert!(net.is_stable(&Placement::empty(&net)));
    }

    #[test]
    fn stability_margin_flag() {
        let net = three_node_chain(0.9);
        let x = Placement::empty(&net);
        assert!(net.is_stable_with_margin(&x, 0.05));
        assert!(!net.is_stable_with_margin(&x, 0.2));
    }

    #[test]
    fn load_monotone_and_supermodular_exhaustive() {
        // rho_e is non-increasing in x and supermodular as a set function;
        // checked exhaustively on a 6-bit instance via the pairwise
        // characterization of supermodularity.
        let net = bench::fig3_instance(0.5, 200.0);
        let nv = net.num_vars();
        assert!(nv <= 10);
        let loads: Vec<LoadVector> = (0u32..1 << nv)
            .map(|mask| {
                let mut x = Placement::empty(&net);
                for b in 0..nv {
                    if mask >> b & 1 == 1 {
                        x.set_var(b, true);
                    }
                }
                net.load(&x)
            })
            .collect();
        for mask in 0u32..1 << nv {
            for a in 0..nv {
                if mask >> a & 1 == 1 {
                    continue;
                }
                let with_a = mask | 1 << a;
                for e in 0..net.num_edges() {
                    assert!(loads[with_a as usize].get(e) <= loads[mask as usize].get(e) + 1e-15);
                }
                for b in (a + 1)..nv {
                    if mask >> b & 1 == 1 {
                        continue;
                    }
                    let with_b = mask | 1 << b;
                    let with_ab = with_a | 1 << b;
                    for e in 0..net.num_edges() {
                        let d_small = loads[with_a as usize].get(e) - loads[mask as usize].get(e);
                        let d_large =
                            loads[with_ab as usize].get(e) - loads[with_b as usize].get(e);
                        assert!(
                            d_small <= d_large + 1e-12,
                            "load on edge {e} not supermodular"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn stability_monotone_in_placement() {
        let net = three_node_chain(0.95);
        let nv = net.num_vars();
        for mask in 0u32..1 << nv {
            for sup in 0u32..1 << nv {
                if mask & sup != mask {
                    continue;
                }
                let build = |m: u32| {
                    let mut x = Placement::empty(&net);
                    for b in 0..nv {
                        if m >> b & 1 == 1 {
                            x.set_var(b, true);
                        }
                    }
                    x
                };
                if net.is_stable(&build(mask)) {
                    assert!(net.is_stable(&build(sup)));
                }
            }
        }
    }

    #[test]
    fn constructor_rejects_asymmetric_graph() {
        let err = CacheNetwork::new(
            vec!["a".into(), "b".into()],
            vec![(0, 1, 1.0)],
            vec![0, 0],
            1,
            vec![vec![1]],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::AsymmetricEdge { u: 0, v: 1 });
    }

    #[test]
    fn constructor_rejects_bad_requests() {
        let mk = |reqs: Vec<RequestClass>| {
            CacheNetwork::new(
                vec!["a".into(), "b".into(), "c".into()],
                vec![
                    (0, 1, 1.0),
                    (1, 0, 1.0),
                    (1, 2, 1.0),
                    (2, 1, 1.0),
                ],
                vec![1, 1, 1],
                2,
                vec![vec![2], vec![1]],
                reqs,
            )
        };
        assert_eq!(
            mk(vec![RequestClass::new(0, vec![0, 1], 1.0)]).unwrap_err(),
            ModelError::BadTerminal { request: 0 }
        );
        assert_eq!(
            mk(vec![RequestClass::new(0, vec![0, 0, 2], 1.0)]).unwrap_err(),
            ModelError::PathNotSimple { request: 0, node: 0 }
        );
        assert_eq!(
            mk(vec![RequestClass::new(0, vec![0, 2], 1.0)]).unwrap_err(),
            ModelError::PathEdgeMissing { request: 0, u: 0, v: 2 }
        );
    }

    #[test]
    fn constructor_rejects_early_server() {
        // Object 0 is served at both b and c; a path ending at c must not
        // pass b on the way.
        let err = CacheNetwork::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
            ],
            vec![1, 1, 1],
            1,
            vec![vec![1, 2]],
            vec![RequestClass::new(0, vec![0, 1, 2], 1.0)],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::EarlyServer { request: 0, node: 1 });
    }

    #[test]
    fn placement_feasibility_and_domination() {
        let net = three_node_chain(0.5);
        let mut x = Placement::empty(&net);
        x.set(0, 0, true);
        assert!(x.is_feasible(&net));
        let y = Placement::empty(&net);
        assert!(x.dominates(&y));
        assert!(!y.dominates(&x));
        // Node 2 has capacity 0.
        let mut z = Placement::empty(&net);
        z.set(2, 0, true);
        assert!(!z.is_feasible(&net));
    }
}
