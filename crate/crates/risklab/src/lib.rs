//! Numerical laboratory for monetary, convex, and star-shaped risk measures
//! on finite probability spaces.
//!
//! The crate evaluates a catalog of risk functionals, manipulates acceptance
//! sets, falsifies the defining axioms by deterministic sampling, and
//! numerically verifies minimum-of-convex-family representations together
//! with the translation bound `c* = sup ρ_λ(0)` that turns a monetary
//! functional into a star-shaped one.
//!
//! Modules, bottom up:
//!
//! * [`space`] — finite probability spaces, payoff positions, counter-based
//!   deterministic sampling.
//! * [`measures`] — the functional catalog and combinators.
//! * [`axioms`] — sampled property falsification with shrinking witnesses.
//! * [`acceptance`] — acceptance sets, induced measures, geometric checks.
//! * [`oracles`] — deliberately simple brute-force baselines for the tests.
//! * [`representation`] — orthant/hull family engines, translation bound,
//!   intersection probe.
//! * [`counterexamples`] — turnkey reproductions of the penalized family,
//!   the floor staircase, and the cone/staircase figure geometry.
//! * [`config`], [`report`], [`figure`], [`cli`] — the command-line surface.

// `!(x > 0.0)`-style guards intentionally reject NaN alongside the sign check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod axioms;
pub mod cli;
pub mod config;
pub mod counterexamples;
pub mod error;
pub mod figure;
pub mod measures;
pub mod oracles;
pub mod report;
pub mod representation;
pub mod rng;
pub mod space;

pub use error::{Error, Result};
