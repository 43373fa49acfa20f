//! Placement algorithms: greedy marginal-gain allocation and the
//! continuous-greedy (conditional gradient) method over the relaxed
//! placement polytope, with pluggable gradient estimators.

use crate::costs::EdgeCosts;
use crate::gradient::{
    self, total_cost, Expansion, FractionalPlacement, GradientError, GradientVector,
};
use crate::model::{CacheNetwork, Placement};
use crate::wdnf::DEFAULT_TERM_CAP;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("no stable starting placement given")]
    UnstableStart,
    #[error(transparent)]
    Gradient(#[from] GradientError),
}

/// Greedy run record: the final placement and every pick with its marginal
/// gain, in order.
#[derive(Debug, Clone)]
pub struct GreedyRun {
    pub placement: Placement,
    pub picks: Vec<GreedyPick>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPick {
    pub node: usize,
    pub object: usize,
    pub marginal_gain: f64,
}

/// Greedy placement: starting from `x0`, repeatedly add the (node, object)
/// pair with the largest marginal gain until every cache is full. Ties break
/// toward the lowest (node, object) pair so runs are reproducible.
///
/// A candidate only changes the loads on response edges of its own object's
/// requests past the candidate node, so each marginal gain is evaluated
/// over exactly those edges instead of the whole network.
pub fn greedy(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
) -> Result<GreedyRun, OptimizeError> {
    if !net.is_stable(x0) {
        return Err(OptimizeError::UnstableStart);
    }
    let mut x = x0.clone();
    let mut picks = Vec::new();
    let mut slack: Vec<usize> = (0..net.num_nodes())
        .map(|v| net.capacity(v).saturating_sub(x.node_count(v)))
        .collect();
    // Per placement coordinate: the requests whose paths pass that node for
    // that object, with the node's 1-based path position.
    let mut touching: Vec<Vec<(usize, usize)>> = vec![Vec::new(); net.num_vars()];
    for (r, req) in net.requests().iter().enumerate() {
        if req.rate == 0.0 {
            continue;
        }
        for (pos, &node) in req.path.iter().enumerate() {
            touching[net.var(node, req.object)].push((r, pos + 1));
        }
    }
    let mut scratch = RemovedTraffic::new(net.num_edges());
    loop {
        let rho = net.load(&x);
        let active = active_class_counts(net, &x);
        let mut best: Option<(usize, usize, f64)> = None;
        for v in 0..net.num_nodes() {
            if slack[v] == 0 {
                continue;
            }
            for i in 0..net.catalog_size() {
                if x.get(v, i) {
                    continue;
                }
                let delta = marginal_gain(
                    net,
                    costs,
                    &x,
                    &rho,
                    &active,
                    &touching[net.var(v, i)],
                    i,
                    &mut scratch,
                )?;
                if best.is_none_or(|(_, _, b)| delta > b) {
                    best = Some((v, i, delta));
                }
            }
        }
        match best {
            Some((v, i, delta)) => {
                x.set(v, i, true);
                slack[v] -= 1;
                picks.push(GreedyPick { node: v, object: i, marginal_gain: delta });
            }
            None => break,
        }
    }
    Ok(GreedyRun { placement: x, picks })
}

/// Per-edge removed traffic for one candidate: load and class count,
/// tracked with a touched-edge list so resets cost only what was used.
struct RemovedTraffic {
    load: Vec<f64>,
    classes: Vec<usize>,
    touched: Vec<usize>,
}

impl RemovedTraffic {
    fn new(num_edges: usize) -> Self {
        Self { load: vec![0.0; num_edges], classes: vec![0; num_edges], touched: Vec::new() }
    }

    fn add(&mut self, edge: usize, load: f64) {
        if self.classes[edge] == 0 {
            self.touched.push(edge);
        }
        self.load[edge] += load;
        self.classes[edge] += 1;
    }

    fn reset(&mut self) {
        for &e in &self.touched {
            self.load[e] = 0.0;
            self.classes[e] = 0;
        }
        self.touched.clear();
    }
}

/// Number of classes currently contributing traffic to each edge.
fn active_class_counts(net: &CacheNetwork, x: &Placement) -> Vec<usize> {
    let mut counts = vec![0usize; net.num_edges()];
    for (r, req) in net.requests().iter().enumerate() {
        if req.rate == 0.0 {
            continue;
        }
        let mut checked = 0usize;
        'edges: for &(eidx, k) in net.response_edges(r) {
            while checked < k {
                if x.get(req.path[checked], req.object) {
                    break 'edges;
                }
                checked += 1;
            }
            counts[eidx] += 1;
        }
    }
    counts
}

/// Cost drop from caching `object` at the node whose touching list is
/// given, against the current placement and loads.
#[allow(clippy::too_many_arguments)]
fn marginal_gain(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x: &Placement,
    rho: &crate::model::LoadVector,
    active: &[usize],
    touching: &[(usize, usize)],
    object: usize,
    scratch: &mut RemovedTraffic,
) -> Result<f64, OptimizeError> {
    if touching.is_empty() {
        return Ok(0.0);
    }
    scratch.reset();
    for &(r, k_here) in touching {
        let req = &net.requests()[r];
        // Traffic reaches this node only if no earlier path node caches.
        if req.path[..k_here].iter().any(|&n| x.get(n, object)) {
            continue;
        }
        // Response edges at or past this position lose the class, as long
        // as it currently survives to them.
        let mut checked = k_here;
        'edges: for &(eidx, k) in net.response_edges(r) {
            if k < k_here {
                continue;
            }
            while checked < k {
                if x.get(req.path[checked], object) {
                    break 'edges;
                }
                checked += 1;
            }
            scratch.add(eidx, req.rate / net.service_rate(eidx));
        }
    }
    let mut delta = 0.0;
    for &eidx in &scratch.touched {
        let before = rho.get(eidx);
        // When every remaining class is removed the edge goes exactly idle;
        // otherwise guard the subtraction against rounding below zero.
        let after = if scratch.classes[eidx] == active[eidx] {
            0.0
        } else {
            (before - scratch.load[eidx]).max(0.0)
        };
        let model = costs.model(eidx);
        delta += model.value(before).map_err(GradientError::from)?
            - model.value(after).map_err(GradientError::from)?;
    }
    Ok(delta)
}

/// Linear maximization over the relaxed polytope: the maximizer of
/// `<m, g>` is integral and separable per node. Baseline coordinates are
/// always included; remaining slots fill with the node's largest strictly
/// positive gradient coordinates, ties toward the lowest object index.
pub fn lp_direction(net: &CacheNetwork, x0: &Placement, g: &[f64]) -> Placement {
    let mut m = x0.clone();
    for v in 0..net.num_nodes() {
        let mut slots = net.capacity(v).saturating_sub(x0.node_count(v));
        if slots == 0 {
            continue;
        }
        let mut candidates: Vec<(usize, f64)> = (0..net.catalog_size())
            .filter(|&i| !x0.get(v, i))
            .map(|i| (i, g[net.var(v, i)]))
            .filter(|&(_, gv)| gv > 0.0)
            .collect();
        candidates.sort_unstable_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then_with(|| a.0.cmp(&b.0))
        });
        for (i, _) in candidates {
            if slots == 0 {
                break;
            }
            m.set(v, i, true);
            slots -= 1;
        }
    }
    m
}

/// Gradient estimator selection for the continuous-greedy loop.
#[derive(Debug, Clone, PartialEq)]
pub enum GradEstimator {
    /// Exact enumeration over free coordinates (the oracle path).
    Exact { max_fractional: usize },
    /// Monte-Carlo sampling with a per-iteration deterministic seed.
    Sampling { samples: usize, seed: u64 },
    /// Closed-form W-DNF estimator of the given expansion order.
    Taylor { order: usize, expansion: Expansion },
}

/// Continuous-greedy configuration. The step rule either takes `steps`
/// uniform steps of exactly `1/steps` total weight each, or a fixed `gamma`
/// with the final step clipped so the weights sum to exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub enum StepRule {
    Uniform { steps: usize },
    Gamma { gamma: f64 },
}

#[derive(Debug, Clone)]
pub struct CgConfig {
    pub step: StepRule,
    pub estimator: GradEstimator,
    pub term_cap: usize,
}

impl CgConfig {
    pub fn with_steps(steps: usize, estimator: GradEstimator) -> Self {
        assert!(steps >= 1);
        Self { step: StepRule::Uniform { steps }, estimator, term_cap: DEFAULT_TERM_CAP }
    }

    pub fn with_gamma(gamma: f64, estimator: GradEstimator) -> Self {
        assert!(gamma > 0.0 && gamma <= 1.0, "step size must be in (0,1]");
        Self { step: StepRule::Gamma { gamma }, estimator, term_cap: DEFAULT_TERM_CAP }
    }
}

/// One continuous-greedy step: the chosen vertex and its step weight.
#[derive(Debug, Clone)]
pub struct CgStep {
    pub direction: Placement,
    pub weight: f64,
}

/// Diagnostics of a continuous-greedy run.
#[derive(Debug, Clone)]
pub struct CgDiagnostics {
    /// Lipschitz constant of the extension gradient, `2 C(x0)`.
    pub lipschitz_p: f64,
    /// Exact polytope diameter bound, `sqrt(sum_v c_v)`.
    pub diameter: f64,
    /// The looser reported bound `|V| * max_v c_v`.
    pub diameter_loose: f64,
    /// Max estimator bias bound over iterations, when known.
    pub bias_bound: Option<f64>,
    /// Per-iteration scalar estimates of the extension value.
    pub value_estimates: Vec<f64>,
}

/// Continuous-greedy run record: the step decomposition (consumed by swap
/// rounding), the final fractional point, and diagnostics.
#[derive(Debug, Clone)]
pub struct CgTrace {
    pub steps: Vec<CgStep>,
    pub y: FractionalPlacement,
    pub diagnostics: CgDiagnostics,
}

impl CgTrace {
    /// Sum of executed step weights (exactly 1 for a completed run).
    pub fn total_weight(&self) -> f64 {
        self.steps.iter().map(|s| s.weight).sum()
    }

    /// The iterate after `k` steps, reconstructed by replaying the step
    /// decomposition in order (bitwise identical to the live iterate).
    /// `iterate(0)` is the baseline relaxation; `iterate(steps.len())` is
    /// the final point.
    pub fn iterate(&self, net: &CacheNetwork, x0: &Placement, k: usize) -> FractionalPlacement {
        let mut y = FractionalPlacement::from_placement(net, x0);
        for step in &self.steps[..k.min(self.steps.len())] {
            for var in step.direction.iter_ones() {
                if !x0.get_var(var) {
                    let c = &mut y.coords_mut()[var];
                    *c = (*c + step.weight).min(1.0);
                }
            }
        }
        y
    }
}

/// Continuous-greedy: ascend the multilinear extension along linear-oracle
/// directions with total step weight exactly 1. Baseline coordinates are
/// pinned to 1 from the start and excluded from accumulation, which is
/// equivalent to carrying them in every direction vector.
pub fn continuous_greedy(
    net: &CacheNetwork,
    costs: &EdgeCosts,
    x0: &Placement,
    cfg: &CgConfig,
) -> Result<CgTrace, OptimizeError> {
    if !net.is_stable(x0) {
        return Err(OptimizeError::UnstableStart);
    }
    let mut y = FractionalPlacement::from_placement(net, x0);
    let mut steps = Vec::new();
    let mut bias: Option<f64> = None;
    let mut value_estimates = Vec::new();

    // Precomputed gain table for the exact estimator: every free coordinate
    // assignment, reused across iterations.
    let exact_table = match cfg.estimator {
        GradEstimator::Exact { max_fractional } => {
            Some(ExactTable::build(net, costs, x0, max_fractional)?)
        }
        _ => None,
    };

    let weights: Vec<f64> = match cfg.step {
        StepRule::Uniform { steps } => {
            let k = steps as f64;
            // Differences of the exact grid points telescope to exactly 1.
            (0..steps)
                .map(|j| (j + 1) as f64 / k - j as f64 / k)
                .collect()
        }
        StepRule::Gamma { gamma } => {
            let mut out = Vec::new();
            let mut t = 0.0;
            while t < 1.0 {
                let w = gamma.min(1.0 - t);
                out.push(w);
                t += w;
            }
            out
        }
    };

    for (k, &weight) in weights.iter().enumerate() {
        let grad = match &cfg.estimator {
            GradEstimator::Exact { .. } => {
                exact_table.as_ref().unwrap().gradient(net, &y)
            }
            GradEstimator::Sampling { samples, seed } => gradient::grad_sampling(
                net,
                costs,
                x0,
                &y,
                *samples,
                seed.wrapping_add(k as u64),
            )?,
            GradEstimator::Taylor { order, expansion } => gradient::grad_taylor_capped(
                net,
                costs,
                x0,
                &y,
                *order,
                *expansion,
                cfg.term_cap,
            )?,
        };
        if let Some(b) = grad.bias_bound {
            bias = Some(bias.map_or(b, |prev: f64| prev.max(b)));
        }
        if let Some(v) = grad.value_estimate {
            value_estimates.push(v);
        }
        let m = lp_direction(net, x0, &grad.g);
        for var in m.iter_ones() {
            if !x0.get_var(var) {
                let c = &mut y.coords_mut()[var];
                *c = (*c + weight).min(1.0);
            }
        }
        steps.push(CgStep { direction: m, weight });
    }

    let p = 2.0 * total_cost(net, costs, x0)?;
    let total_capacity: usize = net.capacities().iter().sum();
    let diameter = (total_capacity as f64).sqrt();
    let diameter_loose =
        net.num_nodes() as f64 * net.capacities().iter().copied().max().unwrap_or(0) as f64;
    Ok(CgTrace {
        steps,
        y,
        diagnostics: CgDiagnostics {
            lipschitz_p: p,
            diameter,
            diameter_loose,
            bias_bound: bias,
            value_estimates,
        },
    })
}

/// Gain table over the free coordinates (capacity-positive, not pinned by
/// the baseline), giving exact extension gradients by weighted sums.
struct ExactTable {
    free: Vec<usize>,
    gains: Vec<f64>,
}

impl ExactTable {
    fn build(
        net: &CacheNetwork,
        costs: &EdgeCosts,
        x0: &Placement,
        cap: usize,
    ) -> Result<Self, GradientError> {
        let free: Vec<usize> = (0..net.num_vars())
            .filter(|&var| {
                let (v, _) = net.var_pair(var);
                net.capacity(v) > 0 && !x0.get_var(var)
            })
            .collect();
        if free.len() > cap {
            return Err(GradientError::EnumerationInfeasible { fractional: free.len(), cap });
        }
        let mut gains = Vec::with_capacity(1 << free.len());
        let mut x = x0.clone();
        for mask in 0u64..1 << free.len() {
            for (bit, &var) in free.iter().enumerate() {
                x.set_var(var, mask >> bit & 1 == 1);
            }
            gains.push(gradient::gain_raw(net, costs, x0, &x)?);
        }
        Ok(Self { free, gains })
    }

    fn gradient(&self, net: &CacheNetwork, y: &FractionalPlacement) -> GradientVector {
        let nv = net.num_vars();
        let mut g = vec![0.0; nv];
        let mut value = 0.0;
        let n = self.free.len();
        for mask in 0u64..1 << n {
            let mut weight = 1.0;
            for (bit, &var) in self.free.iter().enumerate() {
                let p = y.get(var);
                weight *= if mask >> bit & 1 == 1 { p } else { 1.0 - p };
                if weight == 0.0 {
                    break;
                }
            }
            if weight == 0.0 {
                continue;
            }
            let f = self.gains[mask as usize];
            value += weight * f;
            for (bit, &var) in self.free.iter().enumerate() {
                let up = self.gains[(mask | 1 << bit) as usize];
                let down = self.gains[(mask & !(1 << bit)) as usize];
                g[var] += weight * (up - down);
            }
        }
        GradientVector {
            g,
            strategy: gradient::GradientStrategy::Exact,
            bias_bound: Some(0.0),
            value_estimate: Some(value),
        }
    }
}
