use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EquilibriumReport, ReportKind, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{PlayerId, PlayerParams, Scenario};

/// Contests with at most this many members are evaluated exactly.
const EXACT_MEMBER_LIMIT: usize = 3;

/// A probability distribution over an ascending effort grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    grid: Vec<f64>,
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(grid: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if grid.len() != probs.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: probs.len(),
            });
        }
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "strategy grid must be nonempty and strictly ascending".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min >= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotOnSimplex { sum, min });
        }
        Ok(Self { grid, probs })
    }

    /// All mass on `grid[index]`.
    pub fn pure(grid: Vec<f64>, index: usize) -> Result<Self> {
        let mut probs = vec![0.0; grid.len()];
        *probs
            .get_mut(index)
            .ok_or_else(|| Error::InvalidParameter(format!("grid index {index} out of range")))? = 1.0;
        Self::new(grid, probs)
    }

    pub fn uniform(grid: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![1.0 / n as f64; n])
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Cumulative probabilities at each grid point.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.grid.iter().zip(&self.probs).map(|(t, p)| t * p).sum()
    }

    /// Grid point carrying the most mass (lowest on ties).
    pub fn mode(&self) -> f64 {
        self.grid[argmax(&self.probs)]
    }

    /// Total-variation distance to a strategy on the same grid.
    pub fn total_variation(&self, other: &MixedStrategy) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A finite game where every player picks a point of a shared grid.
pub(crate) trait GridGame {
    fn players(&self) -> usize;
    fn grid(&self) -> &[f64];
    /// Expected payoff of each grid action of `player` when every other
    /// player mixes according to `strategies`.
    fn payoff_vector(&mut self, player: usize, strategies: &[Vec<f64>]) -> Vec<f64>;
}

fn exploitability_of<G: GridGame>(game: &mut G, strategies: &[Vec<f64>]) -> f64 {
    (0..game.players())
        .map(|i| {
            let u = game.payoff_vector(i, strategies);
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (best - dot(&u, &strategies[i])).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Simultaneous fictitious play from uniform beliefs.
///
/// Each round every player best-responds (lowest grid index on ties) to the
/// others' empirical average strategies; the averages are returned. Stops
/// once exploitability is at most `config.exploitability_target · scale`.
pub(crate) fn fictitious_play<G: GridGame>(
    game: &mut G,
    ids: &[PlayerId],
    scale: f64,
    config: &SolverConfig,
    t_max: f64,
) -> Result<EquilibriumReport> {
    let n = game.players();
    let g = game.grid().len();
    let target = config.exploitability_target * scale;
    // counts start as one uniform observation
    let mut counts = vec![vec![1.0 / g as f64; g]; n];
    let mut weight = 1.0;
    let mut strategies = counts.clone();
    let mut rounds = 0;
    let mut converged = false;
    let mut expl;
    loop {
        let payoffs: Vec<Vec<f64>> = (0..n).map(|i| game.payoff_vector(i, &strategies)).collect();
        expl = payoffs
            .iter()
            .zip(&strategies)
            .map(|(u, s)| {
                let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (best - dot(u, s)).max(0.0)
            })
            .fold(0.0, f64::max);
        if expl <= target {
            converged = true;
            break;
        }
        if rounds == config.max_iter {
            break;
        }
        for (c, u) in counts.iter_mut().zip(&payoffs) {
            c[argmax(u)] += 1.0;
        }
        weight += 1.0;
        for (s, c) in strategies.iter_mut().zip(&counts) {
            for (p, k) in s.iter_mut().zip(c) {
                *p = k / weight;
            }
        }
        rounds += 1;
    }
    let grid = game.grid().to_vec();
    let mut out = IndexMap::with_capacity(n);
    for (id, s) in ids.iter().zip(strategies) {
        let sum: f64 = s.iter().sum();
        out.insert(id.clone(), MixedStrategy::new(grid.clone(), s.into_iter().map(|p| p / sum).collect())?);
    }
    Ok(EquilibriumReport {
        kind: ReportKind::Mixed,
        converged,
        efforts: None,
        strategies: Some(out),
        residual: expl,
        exploitability: expl,
        foc_residual: None,
        iterations: rounds,
        t_max,
    })
}

/// Ratio contest of one coalition on a discretized effort grid.
struct ContestGridGame<'a> {
    members: Vec<&'a PlayerParams>,
    prize: f64,
    grid: Vec<f64>,
    costs: Vec<Vec<f64>>,
    total_effectiveness: f64,
    rng: ChaCha8Rng,
    mc_draws: usize,
}

impl<'a> ContestGridGame<'a> {
    fn new(members: Vec<&'a PlayerParams>, prize: f64, grid: Vec<f64>, config: &SolverConfig) -> Self {
        let costs = members
            .iter()
            .map(|m| grid.iter().map(|&t| m.cost_unchecked(t)).collect())
            .collect();
        let total_effectiveness = members.iter().map(|m| m.effectiveness()).sum();
        Self {
            members,
            prize,
            grid,
            costs,
            total_effectiveness,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            mc_draws: config.mc_draws,
        }
    }

    /// Distribution of the opponents' aggregate effective effort, as sorted
    /// `(value, probability)` pairs with coinciding values merged.
    fn rival_distribution(&mut self, player: usize, strategies: &[Vec<f64>]) -> Vec<(f64, f64)> {
        let opponents: Vec<usize> = (0..self.members.len()).filter(|&j| j != player).collect();
        let mut points: Vec<(f64, f64)> = if self.members.len() <= EXACT_MEMBER_LIMIT {
            let mut acc = vec![(0.0, 1.0)];
            for &j in &opponents {
                let a = self.members[j].effectiveness();
                let mut next = Vec::with_capacity(acc.len() * self.grid.len());
                for &(s, p) in &acc {
                    for (&t, &q) in self.grid.iter().zip(&strategies[j]) {
                        if q > 0.0 {
                            next.push((s + a * t, p * q));
                        }
                    }
                }
                acc = merge_sorted(next);
            }
            acc
        } else {
            let cumulative: Vec<Vec<f64>> = opponents
                .iter()
                .map(|&j| {
                    strategies[j]
                        .iter()
                        .scan(0.0, |acc, p| {
                            *acc += p;
                            Some(*acc)
                        })
                        .collect()
                })
                .collect();
            let w = 1.0 / self.mc_draws as f64;
            (0..self.mc_draws)
                .map(|_| {
                    let s = opponents
                        .iter()
                        .zip(&cumulative)
                        .map(|(&j, cdf)| {
                            let u = self.rng.random::<f64>() * cdf[cdf.len() - 1];
                            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                            self.members[j].effectiveness() * self.grid[k]
                        })
                        .sum();
                    (s, w)
                })
                .collect()
        };
        if points.len() > 1 {
            points = merge_sorted(points);
        }
        points
    }
}

/// Sorts by value and merges entries whose values agree to relative 1e-12.
fn merge_sorted(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for (s, p) in points {
        match out.last_mut() {
            Some(last) if (s - last.0).abs() <= 1e-12 * s.abs().max(1.0) => last.1 += p,
            _ => out.push((s, p)),
        }
    }
    out
}

impl GridGame for ContestGridGame<'_> {
    fn players(&self) -> usize {
        self.members.len()
    }

    fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn payoff_vector(&mut self, player: usize, strategies: &[Vec<f64>]) -> Vec<f64> {
        let dist = self.rival_distribution(player, strategies);
        let a = self.members[player].effectiveness();
        // all-zero profile: the share a_i / Σ a_j of the equal-effort limit
        let tie_share = a / self.total_effectiveness;
        self.grid
            .iter()
            .zip(&self.costs[player])
            .map(|(&t, &cost)| {
                let own = a * t;
                let share: f64 = dist
                    .iter()
                    .map(|&(s, p)| {
                        let total = own + s;
                        p * if total > 0.0 { own / total } else { tie_share }
                    })
                    .sum();
                share * self.prize - cost
            })
            .collect()
    }
}

fn prize_scale(prize: f64) -> f64 {
    if prize > 0.0 {
        prize
    } else {
        1.0
    }
}

/// Mixed equilibrium of one coalition's internal contest by fictitious play
/// on `config.grid_size` effort levels in `[0, t_max]`.
///
/// Expected payoffs are exact for coalitions of up to three members and use
/// `config.mc_draws` seeded Monte Carlo draws of the opponents' profile
/// otherwise.
pub fn solve_mixed_fp(
    scenario: &Scenario,
    coalition: &str,
    config: &SolverConfig,
) -> Result<EquilibriumReport> {
    config.validate()?;
    let coalition = scenario.coalition(coalition)?;
    let t_max = config.effort_bound([coalition]);
    let grid = config.effort_grid(t_max)?;
    let members: Vec<&PlayerParams> = coalition.members().iter().collect();
    let ids: Vec<PlayerId> = members.iter().map(|m| m.id().clone()).collect();
    let mut game = ContestGridGame::new(members, coalition.reward(), grid, config);
    fictitious_play(&mut game, &ids, prize_scale(coalition.reward()), config, t_max)
}

/// Largest gain any coalition member obtains by switching to its best grid
/// response against the others' strategies.
///
/// Monte Carlo evaluation (coalitions above three members) uses seed 0 and
/// the default draw count.
pub fn exploitability(
    strategies: &IndexMap<PlayerId, MixedStrategy>,
    scenario: &Scenario,
    coalition: &str,
) -> Result<f64> {
    let coalition = scenario.coalition(coalition)?;
    let members: Vec<&PlayerParams> = coalition.members().iter().collect();
    let mut grid: Option<&[f64]> = None;
    let mut probs = Vec::with_capacity(members.len());
    for m in &members {
        let s = strategies
            .get(m.id().as_str())
            .ok_or_else(|| Error::MissingEffort(m.id().to_string()))?;
        match grid {
            Some(g) if g != s.grid() => return Err(Error::GridMismatch),
            _ => grid = Some(s.grid()),
        }
        probs.push(s.probs().to_vec());
    }
    let grid = grid.map(<[f64]>::to_vec).unwrap_or_default();
    let mut game = ContestGridGame::new(members, coalition.reward(), grid, &SolverConfig::default());
    Ok(exploitability_of(&mut game, &probs))
}
