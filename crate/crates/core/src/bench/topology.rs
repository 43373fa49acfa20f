//! Topology generators and checked-in backbone reconstructions.

use super::BenchError;
use crate::model::{CacheNetwork, RequestClass};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A graph skeleton: named nodes and a symmetric directed edge list,
/// without rates, demands, or capacities.
#[derive(Debug, Clone)]
pub struct Topology {
    pub node_names: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Insert both directions of an undirected link.
    fn push_link(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
        self.edges.push((v, u));
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopologyKind {
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    Hypercube { dim: u32 },
    Star { n: usize },
    Geant,
    Dtelekom,
    /// Edge-list file: one `u v` link per line, `#` comments.
    FromFile { path: String },
}

/// Generate a symmetric directed graph skeleton.
pub fn gen_topology(kind: &TopologyKind) -> Result<Topology, BenchError> {
    match *kind {
        TopologyKind::FromFile { ref path } => {
            let text = std::fs::read_to_string(path)?;
            parse_edge_list(&text)
        }
        TopologyKind::ErdosRenyi { n, p, seed } => {
            if n < 2 || !(0.0..=1.0).contains(&p) {
                return Err(BenchError::BadParams(format!(
                    "erdos-renyi needs n >= 2 and p in [0,1], got n={n} p={p}"
                )));
            }
            let mut topo = named(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random::<f64>() < p {
                        topo.push_link(u, v);
                    }
                }
            }
            Ok(topo)
        }
        TopologyKind::Hypercube { dim } => {
            if dim == 0 || dim > 20 {
                return Err(BenchError::BadParams(format!("hypercube dim {dim} out of range")));
            }
            let n = 1usize << dim;
            let mut topo = named(n);
            for u in 0..n {
                for b in 0..dim {
                    let v = u ^ (1 << b);
                    if v > u {
                        topo.push_link(u, v);
                    }
                }
            }
            Ok(topo)
        }
        TopologyKind::Star { n } => {
            if n < 2 {
                return Err(BenchError::BadParams(format!("star needs n >= 2, got {n}")));
            }
            let mut topo = named(n);
            for leaf in 1..n {
                topo.push_link(0, leaf);
            }
            Ok(topo)
        }
        TopologyKind::Geant => Ok(parse_edge_fixture(include_str!("fixtures/geant.edges"))),
        TopologyKind::Dtelekom => Ok(parse_edge_fixture(include_str!("fixtures/dtelekom.edges"))),
    }
}

fn named(n: usize) -> Topology {
    Topology {
        node_names: (0..n).map(|i| i.to_string()).collect(),
        edges: Vec::new(),
    }
}

fn parse_edge_fixture(text: &str) -> Topology {
    parse_edge_list(text).expect("checked-in fixtures parse")
}

/// Parse an undirected edge list (`u v` per line, `#` comments) into a
/// symmetric directed skeleton; node indices follow first appearance.
pub fn parse_edge_list(text: &str) -> Result<Topology, BenchError> {
    let mut names: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut topo = Topology { node_names: Vec::new(), edges: Vec::new() };
    let mut seen = std::collections::HashSet::new();
    let lookup = |names: &mut Vec<String>,
                  index: &mut std::collections::HashMap<String, usize>,
                  token: &str| {
        *index.entry(token.to_string()).or_insert_with(|| {
            names.push(token.to_string());
            names.len() - 1
        })
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut content = raw;
        if let Some(pos) = content.find('#') {
            content = &content[..pos];
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(BenchError::Parse {
                line,
                msg: format!("expected 'u v', got {} tokens", tokens.len()),
            });
        }
        let u = lookup(&mut names, &mut index, tokens[0]);
        let v = lookup(&mut names, &mut index, tokens[1]);
        if u == v {
            return Err(BenchError::Parse { line, msg: "self-loop link".into() });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(BenchError::Parse {
                line,
                msg: format!("duplicate link {} {}", tokens[0], tokens[1]),
            });
        }
        topo.push_link(u, v);
    }
    if names.is_empty() {
        return Err(BenchError::Parse { line: 0, msg: "empty edge list".into() });
    }
    topo.node_names = names;
    Ok(topo)
}

/// The geant backbone reconstruction (22 nodes, 66 directed edges).
pub fn geant_topology() -> Topology {
    gen_topology(&TopologyKind::Geant).unwrap()
}

/// The dtelekom backbone reconstruction (68 nodes, 546 directed edges).
pub fn dtelekom_topology() -> Topology {
    gen_topology(&TopologyKind::Dtelekom).unwrap()
}

/// The four-node path instance on which greedy's 1/2 factor is tight:
/// nodes u, v, w, z with unit-rate links (u,v) and (w,z), a high-rate link
/// (u,w), requests for objects 1 and 2 from u at rate `delta`, servers at v
/// and z, and one cache slot at u and w each.
pub fn fig3_instance(delta: f64, m: f64) -> CacheNetwork {
    let names = ["u", "v", "w", "z"];
    let (u, v, w, z) = (0, 1, 2, 3);
    CacheNetwork::new(
        names.iter().map(|s| s.to_string()).collect(),
        vec![
            (u, v, 1.0),
            (v, u, 1.0),
            (u, w, m),
            (w, u, m),
            (w, z, 1.0),
            (z, w, 1.0),
        ],
        vec![1, 0, 1, 0],
        2,
        vec![vec![v], vec![z]],
        vec![
            RequestClass::new(0, vec![u, v], delta),
            RequestClass::new(1, vec![u, w, z], delta),
        ],
    )
    .expect("path instance is well-formed")
}

/// The Abilene reconstruction. `four_requests` selects the four-class
/// variant; otherwise the two-class variant loads.
pub fn abilene_instance(four_requests: bool) -> Result<CacheNetwork, BenchError> {
    let text = if four_requests {
        include_str!("fixtures/abilene_fig4.instance")
    } else {
        include_str!("fixtures/abilene_table1.instance")
    };
    super::fileio::parse_instance(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypercube_matches_reference_counts() {
        let topo = gen_topology(&TopologyKind::Hypercube { dim: 7 }).unwrap();
        assert_eq!(topo.num_nodes(), 128);
        assert_eq!(topo.num_edges(), 896);
    }

    #[test]
    fn star_matches_reference_counts() {
        let topo = gen_topology(&TopologyKind::Star { n: 100 }).unwrap();
        assert_eq!(topo.num_nodes(), 100);
        assert_eq!(topo.num_edges(), 198);
    }

    #[test]
    fn erdos_renyi_edge_count_near_expectation() {
        let topo = gen_topology(&TopologyKind::ErdosRenyi { n: 100, p: 0.1, seed: 1 }).unwrap();
        assert_eq!(topo.num_nodes(), 100);
        // 2 * C(100,2) * 0.1 = 990 directed edges expected; accept 10%.
        let expect = 990.0;
        let got = topo.num_edges() as f64;
        assert!((got - expect).abs() <= 0.10 * expect, "got {got}");
        // Deterministic in the seed.
        let again = gen_topology(&TopologyKind::ErdosRenyi { n: 100, p: 0.1, seed: 1 }).unwrap();
        assert_eq!(topo.edges, again.edges);
    }

    #[test]
    fn backbone_fix01_counts() {
        let geant = geant_topology();
        assert_eq!((geant.num_nodes(), geant.num_edges()), (22, 66));
        let dt = dtelekom_topology();
        assert_eq!((dt.num_nodes(), dt.num_edges()), (68, 546));
    }

    #[test]
    fn abilene_counts_and_shape() {
        let net = abilene_instance(true).unwrap();
        assert_eq!(net.num_nodes(), 11);
        assert_eq!(net.num_edges(), 28);
        assert_eq!(net.catalog_size(), 4);
        assert_eq!(net.requests().len(), 4);
        let net2 = abilene_instance(false).unwrap();
        assert_eq!(net2.requests().len(), 2);
        // Stable without caching.
        assert!(net.is_stable(&crate::model::Placement::empty(&net)));
    }

    #[test]
    fn fig3_shape() {
        let net = fig3_instance(0.5, 200.0);
        assert_eq!(net.num_nodes(), 4);
        assert_eq!(net.num_edges(), 6);
        assert_eq!(net.capacity(0), 1);
        assert_eq!(net.capacity(2), 1);
        assert!(net.is_stable(&crate::model::Placement::empty(&net)));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(gen_topology(&TopologyKind::Star { n: 1 }).is_err());
        assert!(gen_topology(&TopologyKind::ErdosRenyi { n: 10, p: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn edge_list_parse_and_errors() {
        let topo = parse_edge_list("# demo\na b\nb c # trailing\n").unwrap();
        assert_eq!(topo.num_nodes(), 3);
        assert_eq!(topo.num_edges(), 4);
        match parse_edge_list("a b\nc\n") {
            Err(crate::bench::BenchError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_edge_list("a b\na b\n") {
            Err(crate::bench::BenchError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected duplicate error, got {other:?}"),
        }
        assert!(parse_edge_list("a a\n").is_err());
    }
}
