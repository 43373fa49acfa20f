//! Weighted disjunctive normal form polynomials: weighted sums of products
//! of negated binary literals, `sum_s beta_s * prod_{j in I(s)} (1 - x_j)`.
//!
//! Edge loads have this form with one term per traversing request class, and
//! because `(1 - x)^2 = (1 - x)` on binary inputs the family is closed under
//! multiplication, so every load power does too. Evaluating such a
//! polynomial at a fractional vector yields the exact expectation of the
//! polynomial under independent Bernoulli coordinates, which is what makes
//! the closed-form gradient estimator work.

use crate::model::CacheNetwork;
use std::collections::HashMap;
use thiserror::Error;

/// Default bound on stored terms; exceeding it aborts the operation instead
/// of exhausting memory.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum WdnfError {
    #[error("W-DNF term count {terms} exceeds cap {cap}; reduce L or network size")]
    TermCapExceeded { terms: usize, cap: usize },
}

/// One product term: a positive weight and a sorted, deduplicated set of
/// variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub beta: f64,
    pub vars: Vec<u32>,
}

/// A W-DNF polynomial. Terms are kept with canonical sorted index sets,
/// deduplicated (equal sets have their weights summed), and ordered by index
/// set for deterministic iteration. Exact-zero weights are dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WdnfPoly {
    constant: f64,
    terms: Vec<Term>,
}

impl WdnfPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A constant polynomial with no variables.
    pub fn constant(value: f64) -> Self {
        Self { constant: value, terms: Vec::new() }
    }

    /// Build from raw terms, canonicalizing sets and merging duplicates.
    pub fn from_terms(constant: f64, raw: impl IntoIterator<Item = (f64, Vec<u32>)>) -> Self {
        let mut merged: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut constant = constant;
        for (beta, mut vars) in raw {
            vars.sort_unstable();
            vars.dedup();
            if vars.is_empty() {
                constant += beta;
            } else {
                *merged.entry(vars).or_insert(0.0) += beta;
            }
        }
        let mut terms: Vec<Term> = merged
            .into_iter()
            .filter(|&(_, beta)| beta != 0.0)
            .map(|(vars, beta)| Term { beta, vars })
            .collect();
        terms.sort_unstable_by(|a, b| a.vars.cmp(&b.vars));
        Self { constant, terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.is_empty()
    }

    /// Drop terms with `|beta| <= tol` (the default behavior keeps
    /// everything except exact zeros).
    pub fn prune(&self, tol: f64) -> Self {
        Self {
            constant: self.constant,
            terms: self
                .terms
                .iter()
                .filter(|t| t.beta.abs() > tol)
                .cloned()
                .collect(),
        }
    }

    /// Evaluate at a fractional point: `constant + sum beta prod (1 - y)`.
    /// For binary input this is the polynomial's value; for fractional input
    /// it equals the expectation under independent Bernoulli coordinates.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        let mut acc = self.constant;
        for t in &self.terms {
            let mut prod = t.beta;
            for &v in &t.vars {
                prod *= 1.0 - y[v as usize];
                if prod == 0.0 {
                    break;
                }
            }
            acc += prod;
        }
        acc
    }

    /// Evaluate with one coordinate pinned to a value, without rebuilding
    /// the polynomial.
    pub fn evaluate_pinned(&self, y: &[f64], var: usize, pinned: f64) -> f64 {
        let var = var as u32;
        let mut acc = self.constant;
        for t in &self.terms {
            let mut prod = t.beta;
            for &v in &t.vars {
                let yv = if v == var { pinned } else { y[v as usize] };
                prod *= 1.0 - yv;
                if prod == 0.0 {
                    break;
                }
            }
            acc += prod;
        }
        acc
    }

    /// For every variable `v` appearing in the polynomial, add
    /// `scale * [f(y with v=0) - f(y with v=1)]` into `out[v]`. The
    /// difference equals the sum over terms containing `v` of the term's
    /// product excluding `v`, computed with prefix/suffix products so each
    /// term costs linear time.
    pub fn accumulate_pinned_differences(&self, y: &[f64], scale: f64, out: &mut [f64]) {
        let mut suffix: Vec<f64> = Vec::new();
        for t in &self.terms {
            let m = t.vars.len();
            suffix.resize(m + 1, 0.0);
            suffix[m] = 1.0;
            for j in (0..m).rev() {
                suffix[j] = suffix[j + 1] * (1.0 - y[t.vars[j] as usize]);
            }
            let mut prefix = 1.0;
            for j in 0..m {
                let excl = prefix * suffix[j + 1];
                if excl != 0.0 {
                    out[t.vars[j] as usize] += scale * t.beta * excl;
                }
                prefix *= 1.0 - y[t.vars[j] as usize];
                if prefix == 0.0 {
                    // Every later exclusive product carries this zero prefix.
                    break;
                }
            }
        }
    }

    /// Product of two W-DNF polynomials over binary inputs: weights multiply
    /// and index sets union (idempotence of the negated literals).
    pub fn multiply(&self, other: &WdnfPoly) -> Result<WdnfPoly, WdnfError> {
        self.multiply_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn multiply_capped(&self, other: &WdnfPoly, cap: usize) -> Result<WdnfPoly, WdnfError> {
        let mut merged: HashMap<Vec<u32>, f64> = HashMap::new();
        let constant = self.constant * other.constant;
        let mut union = Vec::new();
        for a in &self.terms {
            // Cross terms against the other's constant.
            if other.constant != 0.0 {
                *merged.entry(a.vars.clone()).or_insert(0.0) += a.beta * other.constant;
            }
            for b in &other.terms {
                union.clear();
                merge_sorted(&a.vars, &b.vars, &mut union);
                *merged.entry(union.clone()).or_insert(0.0) += a.beta * b.beta;
                if merged.len() > cap {
                    return Err(WdnfError::TermCapExceeded { terms: merged.len(), cap });
                }
            }
        }
        if self.constant != 0.0 {
            for b in &other.terms {
                *merged.entry(b.vars.clone()).or_insert(0.0) += self.constant * b.beta;
            }
        }
        let mut terms: Vec<Term> = merged
            .into_iter()
            .filter(|&(_, beta)| beta != 0.0)
            .map(|(vars, beta)| Term { beta, vars })
            .collect();
        terms.sort_unstable_by(|a, b| a.vars.cmp(&b.vars));
        Ok(WdnfPoly { constant, terms })
    }

    /// `k`-th power by repeated multiplication; `k = 0` yields the
    /// constant-1 polynomial by convention.
    pub fn power(&self, k: usize) -> Result<WdnfPoly, WdnfError> {
        self.power_capped(k, DEFAULT_TERM_CAP)
    }

    pub fn power_capped(&self, k: usize, cap: usize) -> Result<WdnfPoly, WdnfError> {
        if k == 0 {
            return Ok(WdnfPoly::constant(1.0));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.multiply_capped(self, cap)?;
        }
        Ok(acc)
    }
}

fn merge_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// The load on `edge` as a W-DNF polynomial over placement coordinates: one
/// term per request class whose responses can traverse the edge, with
/// weight `lambda^r / mu_e` and the index set of every path node up to and
/// including the edge's head.
pub fn load_poly(net: &CacheNetwork, edge: usize) -> WdnfPoly {
    let mu = net.service_rate(edge);
    let mut raw = Vec::new();
    for (r, req) in net.requests().iter().enumerate() {
        if req.rate == 0.0 {
            continue;
        }
        for &(eidx, prefix) in net.response_edges(r) {
            if eidx != edge {
                continue;
            }
            let vars: Vec<u32> = req.path[..prefix]
                .iter()
                .map(|&node| net.var(node, req.object) as u32)
                .collect();
            raw.push((req.rate / mu, vars));
        }
    }
    WdnfPoly::from_terms(0.0, raw)
}
