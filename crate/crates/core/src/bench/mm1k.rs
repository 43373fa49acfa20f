//! Finite-queue counterexample: a three-node line of M/M/1/k queues where
//! the load is neither monotone nor sub/supermodular in the placement, so no
//! strictly monotone cost of the load can be either.

/// Packet drop probability of an M/M/1/k queue at load `rho`:
/// `rho^k (1 - rho) / (1 - rho^(k+1))`.
pub fn mm1k_drop_probability(rho: f64, k: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    if (rho - 1.0).abs() < 1e-12 {
        // Limit as rho -> 1.
        return 1.0 / (k + 1) as f64;
    }
    rho.powi(k as i32) * (1.0 - rho) / (1.0 - rho.powi(k as i32 + 1))
}

/// One row of the counterexample table: the caching configuration at nodes
/// 1 and 2, and the induced loads on queues (3,2) and (2,1).
#[derive(Debug, Clone, PartialEq)]
pub struct Mm1kRow {
    pub x11: bool,
    pub x21: bool,
    pub rho32: f64,
    pub rho21: f64,
}

/// Counterexample report: the four configuration rows plus witnesses of the
/// failed monotonicity and modularity inequalities.
#[derive(Debug, Clone)]
pub struct Mm1kReport {
    pub lambda: f64,
    pub mu32: f64,
    pub mu21: f64,
    pub queue_capacity: usize,
    pub rows: [Mm1kRow; 4],
    /// rho_(2,1) increases when node 2 caches the object.
    pub rho21_monotonicity_violated: bool,
    /// Adding the node-2 bit to the empty set decreases rho_(3,2) more than
    /// adding it to {node-1 bit}: submodularity fails.
    pub rho32_submodularity_violated: bool,
    /// Adding the node-2 bit to the empty set increases rho_(2,1) while
    /// adding it to {node-1 bit} does nothing: supermodularity fails.
    pub rho21_supermodularity_violated: bool,
}

/// Build the three-node M/M/1/k line (node 1 requests the object from node
/// 3 at rate `lambda`) and evaluate both queue loads under the four caching
/// configurations. Dropped packets at queue (3,2) thin the arrivals seen
/// downstream, which is what breaks monotonicity.
pub fn mm1k_counterexample(lambda: f64, mu32: f64, mu21: f64, k: usize) -> Mm1kReport {
    let loads = |x11: bool, x21: bool| -> (f64, f64) {
        let pass1 = if x11 { 0.0 } else { 1.0 };
        let pass2 = if x21 { 0.0 } else { 1.0 };
        let rho32 = lambda * pass1 * pass2 / mu32;
        let drop = mm1k_drop_probability(rho32, k);
        let rho21 = lambda * pass1 * (1.0 - drop) / mu21;
        (rho32, rho21)
    };
    let configs = [(false, false), (true, false), (false, true), (true, true)];
    let rows: [Mm1kRow; 4] = configs.map(|(x11, x21)| {
        let (rho32, rho21) = loads(x11, x21);
        Mm1kRow { x11, x21, rho32, rho21 }
    });
    // Sets over ground {bit1 = cache at node 1, bit2 = cache at node 2}:
    // A = {} and B = {bit1}, adding bit2 to each.
    let d32_empty = rows[2].rho32 - rows[0].rho32;
    let d32_with1 = rows[3].rho32 - rows[1].rho32;
    let d21_empty = rows[2].rho21 - rows[0].rho21;
    let d21_with1 = rows[3].rho21 - rows[1].rho21;
    let rho21_monotonicity_violated = rows[2].rho21 > rows[0].rho21;
    Mm1kReport {
        lambda,
        mu32,
        mu21,
        queue_capacity: k,
        rows,
        rho21_monotonicity_violated,
        rho32_submodularity_violated: d32_empty < d32_with1,
        rho21_supermodularity_violated: d21_empty > d21_with1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_probability_values() {
        assert_eq!(mm1k_drop_probability(0.0, 2), 0.0);
        // rho = 0.9, k = 2: 0.81 * 0.1 / (1 - 0.729).
        let expect = 0.81 * 0.1 / (1.0 - 0.729);
        assert!((mm1k_drop_probability(0.9, 2) - expect).abs() < 1e-15);
        assert!((mm1k_drop_probability(1.0, 2) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn table_pattern() {
        let r = mm1k_counterexample(0.9, 1.0, 1.0, 2);
        let p = mm1k_drop_probability(0.9, 2);
        // [0,0]: lambda/mu, lambda(1-p)/mu.
        assert!((r.rows[0].rho32 - 0.9).abs() < 1e-15);
        assert!((r.rows[0].rho21 - 0.9 * (1.0 - p)).abs() < 1e-15);
        // [1,0]: both zero.
        assert_eq!((r.rows[1].rho32, r.rows[1].rho21), (0.0, 0.0));
        // [0,1]: 0, lambda/mu.
        assert_eq!(r.rows[2].rho32, 0.0);
        assert!((r.rows[2].rho21 - 0.9).abs() < 1e-15);
        // [1,1]: both zero.
        assert_eq!((r.rows[3].rho32, r.rows[3].rho21), (0.0, 0.0));
    }

    #[test]
    fn violations_witnessed() {
        let r = mm1k_counterexample(0.9, 1.0, 1.0, 2);
        assert!(r.rho21_monotonicity_violated);
        assert!(r.rho32_submodularity_violated);
        assert!(r.rho21_supermodularity_violated);
    }
}
