//! Equilibrium computation for the intra-coalition contest and the coupled
//! two-layer game.
//!
//! * [`solve_pure_br`] and [`solve_two_layer`] run damped best-response
//!   iteration, each best response found by golden-section search.
//! * [`verify_pure_ne`] scans unilateral deviations on a grid.
//! * [`solve_mixed_fp`] runs fictitious play on a discretized effort grid;
//!   [`solve_woa_fp`] does the same for the classic two-player war of
//!   attrition, whose continuous equilibrium is exponential ([`woa_cdf`]).
//! * [`replicator_step`] advances replicator dynamics by one Euler step.

mod attrition;
mod mixed;
mod pure;
mod replicator;
pub mod search;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coalition, EffortProfile, PlayerId};

pub use attrition::{solve_woa_fp, woa_cdf, woa_payoff_vector, woa_quantile, woa_sample};
pub use mixed::{exploitability, solve_mixed_fp, MixedStrategy};
pub use pure::{best_response, foc_residuals, solve_pure_br, solve_two_layer, verify_pure_ne};
pub use replicator::{replicator_step, ReplicatorStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Best-response iterations or fictitious-play rounds.
    pub max_iter: usize,
    /// Step threshold for pure best-response convergence.
    pub tol: f64,
    /// Weight on the new best response in each damped update.
    pub damping: f64,
    /// Number of effort grid points for grid scans and mixed strategies.
    pub grid_size: usize,
    /// Upper end of the effort range; derived from the game when `None`.
    pub t_max: Option<f64>,
    pub seed: u64,
    /// Fictitious play stops once exploitability falls to this fraction of the prize.
    pub exploitability_target: f64,
    /// Opponent-profile draws per evaluation for mixed contests with more than three members.
    pub mc_draws: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-10,
            damping: 0.5,
            grid_size: 201,
            t_max: None,
            seed: 0,
            exploitability_target: 1e-3,
            mc_draws: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidConfig(format!("t_max must be positive, got {t}")));
            }
        }
        if !(self.exploitability_target.is_finite() && self.exploitability_target >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "exploitability target must be nonnegative, got {}",
                self.exploitability_target
            )));
        }
        if self.mc_draws == 0 {
            return Err(Error::InvalidConfig("mc_draws must be positive".into()));
        }
        Ok(())
    }

    fn check_grid(&self) -> Result<()> {
        if self.grid_size < 2 {
            Err(Error::GridTooCoarse(self.grid_size))
        } else {
            Ok(())
        }
    }

    /// Effort upper bound: the configured one, or twice the largest effort
    /// at which any player's cost alone exhausts its coalition prize
    /// (`2·√(R/c)` for quadratic costs).
    pub fn effort_bound<'a, I>(&self, coalitions: I) -> f64
    where
        I: IntoIterator<Item = &'a Coalition>,
    {
        if let Some(t) = self.t_max {
            return t;
        }
        let bound = coalitions
            .into_iter()
            .flat_map(|c| c.members().iter().map(move |m| m.break_even_effort(c.reward())))
            .fold(0.0, f64::max);
        if bound > 0.0 && bound.is_finite() {
            2.0 * bound
        } else {
            1.0
        }
    }

    /// Evenly spaced effort grid on `[0, t_max]`.
    pub fn effort_grid(&self, t_max: f64) -> Result<Vec<f64>> {
        self.check_grid()?;
        let last = (self.grid_size - 1) as f64;
        Ok((0..self.grid_size)
            .map(|k| if k + 1 == self.grid_size { t_max } else { t_max * k as f64 / last })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    PureConverged,
    PureCycleDetected,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: ReportKind,
    /// Whether the solver met its stopping criterion.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efforts: Option<EffortProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategies: Option<IndexMap<PlayerId, MixedStrategy>>,
    /// Largest per-player effort step of the last iteration (pure solvers),
    /// or the final exploitability (mixed solvers).
    pub residual: f64,
    /// Largest payoff gain from a unilateral best response.
    pub exploitability: f64,
    /// Largest first-order-condition residual, for quadratic costs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub foc_residual: Option<f64>,
    pub iterations: usize,
    /// Effort bound used by the solver.
    pub t_max: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlayerParams;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = |f: fn(&mut SolverConfig)| {
            let mut c = SolverConfig::default();
            f(&mut c);
            c.validate()
        };
        assert!(matches!(bad(|c| c.tol = 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(bad(|c| c.damping = 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(bad(|c| c.damping = 1.5), Err(Error::InvalidConfig(_))));
        assert!(matches!(bad(|c| c.t_max = Some(-1.0)), Err(Error::InvalidConfig(_))));
        assert!(matches!(bad(|c| c.max_iter = 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn default_bound_is_twice_break_even() {
        let c = Coalition::new(
            "S",
            vec![
                PlayerParams::quadratic("a", 1.0, 1.0).unwrap(),
                PlayerParams::quadratic("b", 1.0, 4.0).unwrap(),
            ],
            4.0,
        )
        .unwrap();
        assert_eq!(SolverConfig::default().effort_bound([&c]), 4.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = SolverConfig::default().effort_grid(5.0).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 5.0);
        assert!((g[1] - 0.025).abs() < 1e-15);
        let coarse = SolverConfig {
            grid_size: 1,
            ..Default::default()
        };
        assert!(matches!(coarse.effort_grid(1.0), Err(Error::GridTooCoarse(1))));
    }
}
