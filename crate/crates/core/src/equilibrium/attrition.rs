//! The classic two-player war of attrition.
//!
//! Both players pay one unit per unit of time while they stay; the one who
//! stays longer collects the prize `V` and both pay for the shorter of the
//! two durations. Ties split the prize. The symmetric equilibrium quits at an
//! exponentially distributed time with mean `V`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mixed::{fictitious_play, GridGame};
use super::{EquilibriumReport, SolverConfig};
use crate::error::{Error, Result};

fn check_prize(v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPrize(v))
    }
}

/// Equilibrium CDF of the quitting time, `1 − e^(−t/V)`.
pub fn woa_cdf(prize: f64, t: f64) -> Result<f64> {
    check_prize(prize)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeEffort(t));
    }
    Ok(-(-t / prize).exp_m1())
}

/// Inverse CDF: the quitting time at cumulative probability `u ∈ [0, 1)`.
pub fn woa_quantile(prize: f64, u: f64) -> Result<f64> {
    check_prize(prize)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("quantile level must lie in [0, 1), got {u}")));
    }
    Ok(-prize * (-u).ln_1p())
}

/// `count` equilibrium quitting times drawn by inverse-CDF sampling from a
/// ChaCha8 stream seeded with `seed`.
pub fn woa_sample(prize: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    check_prize(prize)?;
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| woa_quantile(prize, rng.random::<f64>()))
        .collect()
}

/// Expected payoff of each grid quitting time against an opponent who quits
/// according to `opponent` (probabilities over the same ascending `grid`).
pub fn woa_payoff_vector(prize: f64, grid: &[f64], opponent: &[f64]) -> Vec<f64> {
    // below: mass and first moment strictly below grid[k]
    let mut out = Vec::with_capacity(grid.len());
    let total_mass: f64 = opponent.iter().sum();
    let mut mass_below = 0.0;
    let mut moment_below = 0.0;
    for (k, &t) in grid.iter().enumerate() {
        let p_eq = opponent[k];
        let p_above = total_mass - mass_below - p_eq;
        let win = prize * mass_below + 0.5 * prize * p_eq;
        let paid = moment_below + t * (p_eq + p_above);
        out.push(win - paid);
        mass_below += p_eq;
        moment_below += p_eq * t;
    }
    out
}

struct AttritionGame {
    prize: f64,
    grid: Vec<f64>,
}

impl GridGame for AttritionGame {
    fn players(&self) -> usize {
        2
    }

    fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn payoff_vector(&mut self, player: usize, strategies: &[Vec<f64>]) -> Vec<f64> {
        woa_payoff_vector(self.prize, &self.grid, &strategies[1 - player])
    }
}

/// Fictitious play on the war of attrition discretized to `config.grid_size`
/// quitting times on `[0, t_max]` (default `t_max = 5V`).
pub fn solve_woa_fp(prize: f64, config: &SolverConfig) -> Result<EquilibriumReport> {
    check_prize(prize)?;
    config.validate()?;
    let t_max = config.t_max.unwrap_or(5.0 * prize);
    let mut game = AttritionGame {
        prize,
        grid: config.effort_grid(t_max)?,
    };
    fictitious_play(&mut game, &["p1".into(), "p2".into()], prize, config, t_max)
}
