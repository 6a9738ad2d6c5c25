//! Compound coalition-attrition games.
//!
//! Coalitions compete for a prize through a ratio contest on their aggregate
//! power while their members compete for shares of the coalition's prize by
//! the same rule. This crate provides the static payoff formulas
//! ([`model`]), pure and mixed equilibrium solvers ([`equilibrium`]),
//! cooperative baselines and endurance indices ([`coopgame`]), a market case
//! study pipeline ([`casestudy`]) and the `ccag` command line ([`cli`]).

pub mod casestudy;
pub mod cli;
pub mod coopgame;
pub mod equilibrium;
pub mod error;
pub mod model;

pub use error::{Error, Result};
