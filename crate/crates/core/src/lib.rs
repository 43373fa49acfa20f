//! Cache placement optimization for networks of queues.
//!
//! A cache network couples a symmetric directed graph of M/M/1-style queues
//! with per-node object caches: response traffic, and therefore every queue
//! load, depends on where objects are placed. This crate models such
//! networks, evaluates convex per-edge cost objectives, and computes
//! near-optimal placements by greedy and continuous-greedy (Frank-Wolfe
//! style) submodular maximization. The continuous-greedy gradient can be
//! estimated three ways: exact enumeration, Monte-Carlo sampling, or a
//! deterministic closed form built from weighted-DNF load polynomials and
//! Taylor/power-series cost coefficients.
//!
//! Module map:
//! - [`model`] — network, placements, per-edge loads, stability.
//! - [`costs`] — convex per-edge cost catalog with exact derivatives.
//! - [`wdnf`] — weighted-DNF polynomial algebra for loads and their powers.
//! - [`gradient`] — multilinear-extension value/gradient estimators.
//! - [`optimize`] — greedy and continuous-greedy placement algorithms.
//! - [`rounding`] — swap and pipage rounding of fractional placements.
//! - [`bench`] — topology/demand generators, oracles, experiment harness.

pub mod bench;
pub mod costs;
pub mod gradient;
pub mod model;
pub mod optimize;
pub mod rounding;
pub mod wdnf;
