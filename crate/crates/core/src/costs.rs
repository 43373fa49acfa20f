//! Per-edge cost functions: convex, non-decreasing on `[0, 1)`, with exact
//! derivatives of every order and Taylor/power-series coefficient access.
//!
//! The catalog covers the standard queueing objectives (expected queue size,
//! expected per-edge delay, queuing probability / linear load, monotone
//! separable state costs) plus the multi-server and deterministic-service
//! extensions (M/M/k queuing probability and queue size, M/D/1 queue size),
//! and explicit polynomials for testing.

use crate::model::{CacheNetwork, Placement};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("unstable load {rho}")]
    UnstableLoad { rho: f64 },
    #[error("cost not monotone: increment {value} at step {index} is negative")]
    NonMonotoneIncrement { index: usize, value: f64 },
    #[error("server count must be at least 1")]
    BadServerCount,
}

/// Erlang C formula: probability that an arrival to an M/M/k queue with
/// per-server load `a` finds all servers busy.
pub fn erlang_c(k: usize, a: f64) -> Result<f64, CostError> {
    if k == 0 {
        return Err(CostError::BadServerCount);
    }
    if !(0.0..1.0).contains(&a) {
        return Err(CostError::UnstableLoad { rho: a });
    }
    let ka = k as f64 * a;
    // term_n = (ka)^n / n!, accumulated incrementally.
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..k {
        sum += term;
        term *= ka / (n + 1) as f64;
    }
    // After the loop, term = (ka)^k / k!.
    let tail = term / (1.0 - a);
    Ok(tail / (sum + tail))
}

/// Expected number of packets in an M/M/k queue with per-server load `a`:
/// `k a + a P_Q / (1 - a)` with `P_Q` from [`erlang_c`].
pub fn mmk_queue_size(k: usize, a: f64) -> Result<f64, CostError> {
    let pq = erlang_c(k, a)?;
    Ok(k as f64 * a + a * pq / (1.0 - a))
}

/// Power-series coefficients of `E[c(n)] - c(0)` for a monotone separable
/// state cost with the given increments `c(n+1) - c(n)`: the degree-`k`
/// coefficient is the `(k-1)`-th increment, truncated at `n_max`.
pub fn power_series_coeffs(increments: &[f64], n_max: usize) -> Result<Vec<f64>, CostError> {
    for (i, &inc) in increments.iter().enumerate() {
        if inc < 0.0 {
            return Err(CostError::NonMonotoneIncrement { index: i, value: inc });
        }
    }
    let mut coeffs = vec![0.0; n_max + 1];
    for k in 1..=n_max {
        coeffs[k] = increments.get(k - 1).copied().unwrap_or(0.0);
    }
    Ok(coeffs)
}

/// Cost function kinds. Each kind is a scalar function of the edge load,
/// finite, non-negative, non-decreasing and convex on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostKind {
    /// Expected M/M/1 queue size, `rho / (1 - rho)`.
    QueueSize,
    /// Expected per-edge delay `1 / (mu (1 - rho))`; an idle edge (load
    /// exactly 0) experiences no delay and contributes 0.
    DelayPerQueue { mu: f64 },
    /// Queuing probability / load, `C(rho) = rho`.
    LoadLinear,
    /// Truncated power series with explicit coefficients (degree k term is
    /// `coeffs[k] * rho^k`), as produced by [`power_series_coeffs`].
    SeparablePowerSeries { coeffs: Vec<f64> },
    /// M/M/k queuing probability; the edge service rate is per-server, so
    /// the per-server load is `rho / k`.
    MmkQueueProb { servers: usize },
    /// Expected M/M/k queue size, same load convention as `MmkQueueProb`.
    MmkQueueSize { servers: usize },
    /// Expected M/D/1 queue size, `rho + rho^2 / (2 (1 - rho))`.
    Md1QueueSize,
    /// Explicit polynomial cost (for testing), `sum coeffs[k] rho^k`.
    PolynomialCost { coeffs: Vec<f64> },
}

/// A cost function with exact derivative and Taylor-coefficient access.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    kind: CostKind,
}

/// Degree-`order` Taylor data of a cost function about `point`, re-expanded
/// in powers of the load: `C(rho) ~ sum_k alpha[k] rho^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoeffs {
    pub point: f64,
    pub order: usize,
    pub alpha: Vec<f64>,
}

impl TaylorCoeffs {
    /// Evaluate the expansion at a load value.
    pub fn eval(&self, rho: f64) -> f64 {
        self.alpha.iter().rev().fold(0.0, |acc, &a| acc * rho + a)
    }
}

impl CostModel {
    pub fn new(kind: CostKind) -> Self {
        Self { kind }
    }

    pub fn queue_size() -> Self {
        Self::new(CostKind::QueueSize)
    }

    pub fn delay_per_queue(mu: f64) -> Self {
        Self::new(CostKind::DelayPerQueue { mu })
    }

    pub fn load_linear() -> Self {
        Self::new(CostKind::LoadLinear)
    }

    pub fn md1_queue_size() -> Self {
        Self::new(CostKind::Md1QueueSize)
    }

    pub fn mmk_queue_prob(servers: usize) -> Self {
        Self::new(CostKind::MmkQueueProb { servers })
    }

    pub fn mmk_queue_size(servers: usize) -> Self {
        Self::new(CostKind::MmkQueueSize { servers })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::new(CostKind::PolynomialCost { coeffs })
    }

    pub fn power_series(coeffs: Vec<f64>) -> Self {
        Self::new(CostKind::SeparablePowerSeries { coeffs })
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    /// Cost at load `rho`. Errors on `rho >= 1`.
    pub fn value(&self, rho: f64) -> Result<f64, CostError> {
        if !(0.0..1.0).contains(&rho) {
            return Err(CostError::UnstableLoad { rho });
        }
        Ok(match &self.kind {
            CostKind::QueueSize => rho / (1.0 - rho),
            CostKind::DelayPerQueue { mu } => {
                if rho == 0.0 {
                    0.0
                } else {
                    1.0 / (mu * (1.0 - rho))
                }
            }
            CostKind::LoadLinear => rho,
            CostKind::SeparablePowerSeries { coeffs } | CostKind::PolynomialCost { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * rho + c)
            }
            CostKind::MmkQueueProb { servers } => erlang_c(*servers, rho / *servers as f64)?,
            CostKind::MmkQueueSize { servers } => {
                mmk_queue_size(*servers, rho / *servers as f64)?
            }
            CostKind::Md1QueueSize => rho + rho * rho / (2.0 * (1.0 - rho)),
        })
    }

    /// Exact `order`-th derivative at `rho` (order 0 is the smooth branch of
    /// the value, without the idle-edge special case).
    pub fn derivative(&self, order: usize, rho: f64) -> Result<f64, CostError> {
        if !(0.0..1.0).contains(&rho) {
            return Err(CostError::UnstableLoad { rho });
        }
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        Ok(match &self.kind {
            CostKind::QueueSize => {
                // rho/(1-rho) = 1/(1-rho) - 1
                if order == 0 {
                    rho / (1.0 - rho)
                } else {
                    fact(order) / (1.0 - rho).powi(order as i32 + 1)
                }
            }
            CostKind::DelayPerQueue { mu } => {
                fact(order) / (mu * (1.0 - rho).powi(order as i32 + 1))
            }
            CostKind::LoadLinear => match order {
                0 => rho,
                1 => 1.0,
                _ => 0.0,
            },
            CostKind::SeparablePowerSeries { coeffs } | CostKind::PolynomialCost { coeffs } => {
                poly_derivative(coeffs, order, rho)
            }
            CostKind::Md1QueueSize => {
                // rho + rho^2/(2(1-rho)) = rho/2 - 1/2 + (1/2)/(1-rho)
                match order {
                    0 => rho + rho * rho / (2.0 * (1.0 - rho)),
                    1 => 0.5 + 0.5 / ((1.0 - rho) * (1.0 - rho)),
                    _ => 0.5 * fact(order) / (1.0 - rho).powi(order as i32 + 1),
                }
            }
            CostKind::MmkQueueProb { .. } | CostKind::MmkQueueSize { .. } => {
                let (num, den) = self.rational_parts()?;
                rational_derivative(&num, &den, order, rho)
            }
        })
    }

    /// Taylor coefficients about `point`, re-expanded in powers of the load:
    /// `alpha[k] = sum_{i=k}^{L} (-1)^(i-k) C(i,k) / i! * C^(i)(point) * point^(i-k)`.
    pub fn taylor_coeffs(&self, point: f64, order: usize) -> Result<TaylorCoeffs, CostError> {
        let derivs: Vec<f64> = (0..=order)
            .map(|i| self.derivative(i, point))
            .collect::<Result<_, _>>()?;
        let mut alpha = vec![0.0; order + 1];
        for k in 0..=order {
            let mut acc = 0.0;
            for i in k..=order {
                let sign = if (i - k) % 2 == 0 { 1.0 } else { -1.0 };
                let coeff = binom(i, k) / factorial(i);
                acc += sign * coeff * derivs[i] * point.powi((i - k) as i32);
            }
            alpha[k] = acc;
        }
        Ok(TaylorCoeffs { point, order, alpha })
    }

    /// Expansion in powers of the load with no expansion point (Maclaurin
    /// series). For queue-size-style costs this reproduces the separable
    /// power series built from queue-size increments.
    pub fn maclaurin_coeffs(&self, order: usize) -> Result<TaylorCoeffs, CostError> {
        self.taylor_coeffs(0.0, order)
    }

    /// Numerator/denominator polynomials of the M/M/k kinds as rational
    /// functions of the edge load.
    fn rational_parts(&self) -> Result<(Vec<f64>, Vec<f64>), CostError> {
        match &self.kind {
            CostKind::MmkQueueProb { servers } => {
                let k = *servers;
                if k == 0 {
                    return Err(CostError::BadServerCount);
                }
                Ok((mmk_numerator(k), mmk_denominator(k)))
            }
            CostKind::MmkQueueSize { servers } => {
                let k = *servers;
                if k == 0 {
                    return Err(CostError::BadServerCount);
                }
                // E[n] = rho + (rho/k) P_Q / (1 - rho/k)
                //      = (rho * (1-rho/k) * D + (rho/k) * N) / ((1-rho/k) * D)
                let n = mmk_numerator(k);
                let d = mmk_denominator(k);
                let one_minus_a = vec![1.0, -1.0 / k as f64];
                let den = poly_mul(&one_minus_a, &d);
                let mut num = poly_mul(&[0.0, 1.0], &den); // rho * den
                let scaled_n = poly_mul(&[0.0, 1.0 / k as f64], &n); // (rho/k) * N
                num = poly_add(&num, &scaled_n);
                Ok((num, den))
            }
            _ => unreachable!("rational_parts is only used for M/M/k kinds"),
        }
    }
}

/// `E[n]` via queue size of every edge divided by the total arrival rate:
/// the expected system delay experienced by a packet (Little's theorem).
pub fn expected_system_delay(net: &CacheNetwork, x: &Placement) -> Result<f64, CostError> {
    let total = net.total_arrival_rate();
    if total == 0.0 {
        return Ok(0.0);
    }
    let qs = CostModel::queue_size();
    let mut packets = 0.0;
    for rho in net.load(x).iter() {
        packets += qs.value(rho)?;
    }
    Ok(packets / total)
}

/// Per-edge cost assignment, parallel with the network's edge list.
#[derive(Debug, Clone)]
pub struct EdgeCosts {
    models: Vec<CostModel>,
}

impl EdgeCosts {
    /// The same cost model on every edge.
    pub fn uniform(net: &CacheNetwork, model: CostModel) -> Self {
        Self { models: vec![model; net.num_edges()] }
    }

    /// Per-edge delay cost, each edge using its own service rate.
    pub fn delay(net: &CacheNetwork) -> Self {
        Self {
            models: (0..net.num_edges())
                .map(|e| CostModel::delay_per_queue(net.service_rate(e)))
                .collect(),
        }
    }

    pub fn from_models(models: Vec<CostModel>) -> Self {
        Self { models }
    }

    pub fn model(&self, edge: usize) -> &CostModel {
        &self.models[edge]
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn poly_derivative(coeffs: &[f64], order: usize, rho: f64) -> f64 {
    if order >= coeffs.len() {
        return 0.0;
    }
    // d^m/drho^m sum c_k rho^k = sum_{k>=m} c_k k!/(k-m)! rho^(k-m)
    let mut acc = 0.0;
    for k in (order..coeffs.len()).rev() {
        let mut fall = 1.0;
        for j in 0..order {
            fall *= (k - j) as f64;
        }
        acc = acc * rho + coeffs[k] * fall;
    }
    acc
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

/// Coefficients of `p(point + s)` in powers of `s` (Taylor shift).
fn poly_shift(coeffs: &[f64], point: f64) -> Vec<f64> {
    // Horner-style synthetic division by (x - point), repeated.
    let mut work = coeffs.to_vec();
    let n = work.len();
    let mut out = vec![0.0; n];
    for slot in out.iter_mut() {
        // Divide work by (x - point): remainder is the next shifted coeff.
        let mut rem = 0.0;
        for c in work.iter_mut().rev() {
            let next = *c + rem * point;
            rem = next;
            *c = next;
        }
        // After the pass, work[0] holds p(point) of the current quotient.
        *slot = work.remove(0);
        if work.is_empty() {
            break;
        }
    }
    out
}

/// Erlang C numerator `(k a)^k / k!` as a polynomial in the edge load
/// (using `a = rho / k`, so the numerator is `rho^k / k!`).
fn mmk_numerator(k: usize) -> Vec<f64> {
    let mut num = vec![0.0; k + 1];
    num[k] = 1.0 / factorial(k);
    num
}

/// Erlang C denominator `(1 - a) sum_{n<k} (k a)^n / n! + (k a)^k / k!` as a
/// polynomial in the edge load.
fn mmk_denominator(k: usize) -> Vec<f64> {
    let mut partial = vec![0.0; k];
    for (n, c) in partial.iter_mut().enumerate() {
        *c = 1.0 / factorial(n);
    }
    let one_minus_a = vec![1.0, -1.0 / k as f64];
    let mut den = poly_mul(&one_minus_a, &partial);
    den = poly_add(&den, &mmk_numerator(k));
    den
}

/// `order`-th derivative of `num/den` at `rho`, via Taylor-shifted power
/// series division: the local series of the quotient gives every derivative
/// up to the requested order in one pass.
fn rational_derivative(num: &[f64], den: &[f64], order: usize, rho: f64) -> f64 {
    let n = poly_shift(num, rho);
    let d = poly_shift(den, rho);
    let mut q = vec![0.0; order + 1];
    for m in 0..=order {
        let mut acc = n.get(m).copied().unwrap_or(0.0);
        for j in 1..=m {
            acc -= d.get(j).copied().unwrap_or(0.0) * q[m - j];
        }
        q[m] = acc / d[0];
    }
    q[order] * factorial(order)
}
