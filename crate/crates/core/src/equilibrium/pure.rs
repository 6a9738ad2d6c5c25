use std::collections::VecDeque;

use indexmap::IndexMap;

use super::search::{bisect_decreasing, golden_section_max};
use super::{EquilibriumReport, ReportKind, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{
    Coalition, CoalitionId, CostKind, EffortProfile, PayoffMode, PlayerId, PlayerParams, Scenario,
};

/// Rounding quantum for cycle detection.
const CYCLE_QUANTUM: f64 = 1e-8;
/// Number of past iterates searched for a repeated profile.
const CYCLE_WINDOW: usize = 50;

/// `a·t·R / (a·t + rival) − C(t)`, taking the share as 1 when both efforts
/// vanish (the limit of a lone positive effort shrinking to zero).
pub(crate) fn contest_value(params: &PlayerParams, t: f64, rival: f64, prize: f64) -> f64 {
    let own = params.effectiveness() * t;
    let share = if own + rival > 0.0 { own / (own + rival) } else { 1.0 };
    share * prize - params.cost_unchecked(t)
}

/// Derivative of [`contest_value`] in `t`, `None` where the share is undefined.
fn marginal_value(params: &PlayerParams, t: f64, rival: f64, prize: f64) -> Option<f64> {
    let a = params.effectiveness();
    let total = a * t + rival;
    if total <= 0.0 {
        return None;
    }
    Some(a * prize * rival / (total * total) - params.marginal_cost(t))
}

/// Effort in `[0, t_max]` maximizing `a·t·R/(a·t + rival) − C(t)`.
///
/// A golden-section search brackets the maximizer; the bracket is then
/// narrowed by bisection on the sign of the derivative, which is strictly
/// decreasing for convex costs. Function values alone cannot resolve the
/// maximizer much below `√ε` relative precision.
pub fn best_response(params: &PlayerParams, rival: f64, prize: f64, t_max: f64, tol: f64) -> f64 {
    if rival <= 0.0 || prize <= 0.0 {
        return 0.0;
    }
    let value = |t: f64| contest_value(params, t, rival, prize);
    let xtol = (1e-6 * t_max).max(tol);
    let (x, _) = golden_section_max(value, 0.0, t_max, xtol, 200);
    let slope = |t: f64| marginal_value(params, t, rival, prize).unwrap_or(f64::INFINITY);
    let width = 2.0 * xtol;
    let mut lo = (x - width).max(0.0);
    let mut hi = (x + width).min(t_max);
    if slope(lo) <= 0.0 {
        lo = 0.0;
    }
    if slope(hi) >= 0.0 {
        hi = t_max;
    }
    bisect_decreasing(slope, lo, hi)
}

/// First-order conditions of the intra-coalition contest with quadratic
/// costs: `a_i R Σ_{j≠i} t_j a_j / (Σ_j t_j a_j)² − 2 c_i t_i`.
pub fn foc_residuals(
    profile: &EffortProfile,
    coalition: &Coalition,
) -> Result<IndexMap<PlayerId, f64>> {
    for m in coalition.members() {
        if m.cost_kind() != CostKind::Quadratic {
            return Err(Error::UnsupportedCost(m.id().to_string()));
        }
    }
    let weighted: Vec<f64> = coalition
        .members()
        .iter()
        .map(|m| Ok(profile.get(m.id().as_str())? * m.effectiveness()))
        .collect::<Result<_>>()?;
    let total: f64 = weighted.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    let reward = coalition.reward();
    Ok(coalition
        .members()
        .iter()
        .zip(&weighted)
        .map(|(m, &w)| {
            let t = w / m.effectiveness();
            let others = total - w;
            let r = m.effectiveness() * reward * others / (total * total)
                - 2.0 * m.cost_coeff() * t;
            (m.id().clone(), r)
        })
        .collect())
}

/// Players of one or more coalitions competing through ratio contests.
struct ContestSystem<'a> {
    players: Vec<&'a PlayerParams>,
    prize: Vec<f64>,
    group: Vec<usize>,
    mode: PayoffMode,
}

impl<'a> ContestSystem<'a> {
    fn new<I>(coalitions: I, mode: PayoffMode) -> Self
    where
        I: IntoIterator<Item = &'a Coalition>,
    {
        let mut sys = Self {
            players: Vec::new(),
            prize: Vec::new(),
            group: Vec::new(),
            mode,
        };
        for (g, c) in coalitions.into_iter().enumerate() {
            for m in c.members() {
                sys.players.push(m);
                sys.prize.push(c.reward());
                sys.group.push(g);
            }
        }
        sys
    }

    fn len(&self) -> usize {
        self.players.len()
    }

    /// Effective effort of everyone `i` competes against for its prize.
    fn rival(&self, i: usize, t: &[f64]) -> f64 {
        (0..self.len())
            .filter(|&j| j != i)
            .filter(|&j| self.mode == PayoffMode::Expected || self.group[j] == self.group[i])
            .map(|j| self.players[j].effectiveness() * t[j])
            .sum()
    }

    fn best_response(&self, i: usize, t: &[f64], t_max: f64, tol: f64) -> f64 {
        best_response(self.players[i], self.rival(i, t), self.prize[i], t_max, tol)
    }

    /// Largest gain any player in `members` gets from its exact best response.
    fn exploitability(&self, members: &[usize], t: &[f64], t_max: f64, tol: f64) -> f64 {
        members
            .iter()
            .map(|&i| {
                let rival = self.rival(i, t);
                let p = self.players[i];
                let br = best_response(p, rival, self.prize[i], t_max, tol);
                contest_value(p, br, rival, self.prize[i]) - contest_value(p, t[i], rival, self.prize[i])
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of the first-order (KKT) conditions among `members`.
    fn stationarity(&self, members: &[usize], t: &[f64]) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for &i in members {
            let g = marginal_value(self.players[i], t[i], self.rival(i, t), self.prize[i])?;
            let r = if t[i] > 0.0 { g.abs() } else { g.max(0.0) };
            worst = worst.max(r);
        }
        Some(worst)
    }
}

struct IterationOutcome {
    efforts: Vec<f64>,
    kind: ReportKind,
    step: f64,
    iterations: usize,
}

/// Flags a revisited profile (rounded to [`CYCLE_QUANTUM`]) within the last
/// [`CYCLE_WINDOW`] iterates while the iteration is still moving.
struct CycleDetector {
    window: VecDeque<Vec<i64>>,
}

impl CycleDetector {
    fn new() -> Self {
        Self {
            window: VecDeque::with_capacity(CYCLE_WINDOW + 1),
        }
    }

    fn observe(&mut self, t: &[f64], step: f64) -> bool {
        let key: Vec<i64> = t.iter().map(|x| (x / CYCLE_QUANTUM).round() as i64).collect();
        if step > CYCLE_QUANTUM && self.window.contains(&key) {
            return true;
        }
        self.window.push_back(key);
        if self.window.len() > CYCLE_WINDOW {
            self.window.pop_front();
        }
        false
    }
}

/// Damped simultaneous best-response iteration with cycle detection.
fn iterate(sys: &ContestSystem<'_>, init: Vec<f64>, config: &SolverConfig, t_max: f64) -> IterationOutcome {
    let mut t = init;
    let mut cycles = CycleDetector::new();
    let mut step = f64::INFINITY;
    for iter in 1..=config.max_iter {
        let next: Vec<f64> = (0..sys.len())
            .map(|i| {
                let br = sys.best_response(i, &t, t_max, config.tol);
                (1.0 - config.damping) * t[i] + config.damping * br
            })
            .collect();
        step = next
            .iter()
            .zip(&t)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t = next;
        let kind = if step < config.tol {
            ReportKind::PureConverged
        } else if cycles.observe(&t, step) {
            ReportKind::PureCycleDetected
        } else {
            continue;
        };
        return IterationOutcome {
            efforts: t,
            kind,
            step,
            iterations: iter,
        };
    }
    IterationOutcome {
        efforts: t,
        kind: ReportKind::PureCycleDetected,
        step,
        iterations: config.max_iter,
    }
}

fn report_for(
    sys: &ContestSystem<'_>,
    out: &IterationOutcome,
    members: &[usize],
    config: &SolverConfig,
    t_max: f64,
) -> Result<EquilibriumReport> {
    let efforts = EffortProfile::new(
        members
            .iter()
            .map(|&i| (sys.players[i].id().clone(), out.efforts[i])),
    )?;
    Ok(EquilibriumReport {
        kind: out.kind,
        converged: out.kind == ReportKind::PureConverged,
        efforts: Some(efforts),
        strategies: None,
        residual: out.step,
        exploitability: sys.exploitability(members, &out.efforts, t_max, config.tol),
        foc_residual: sys.stationarity(members, &out.efforts),
        iterations: out.iterations,
        t_max,
    })
}

/// Pure equilibrium of one coalition's internal contest (payoff conditional on
/// the coalition winning), by damped best-response iteration from `t_max/10`.
pub fn solve_pure_br(
    scenario: &Scenario,
    coalition: &str,
    config: &SolverConfig,
) -> Result<EquilibriumReport> {
    config.validate()?;
    let coalition = scenario.coalition(coalition)?;
    let t_max = config.effort_bound([coalition]);
    let sys = ContestSystem::new([coalition], PayoffMode::Conditional);
    let out = iterate(&sys, vec![t_max / 10.0; sys.len()], config, t_max);
    let members: Vec<usize> = (0..sys.len()).collect();
    report_for(&sys, &out, &members, config, t_max)
}

/// Joint fixed point of both layers: every player of every coalition
/// best-responds to its payoff under `mode` given all other efforts.
///
/// Under [`PayoffMode::Expected`] the player's own effect on its coalition's
/// win probability is included, since `P_k · share_i · R_k = a_i t_i R_k / Σ_all t_j a_j`.
pub fn solve_two_layer(
    scenario: &Scenario,
    config: &SolverConfig,
    mode: PayoffMode,
) -> Result<IndexMap<CoalitionId, EquilibriumReport>> {
    config.validate()?;
    let t_max = config.effort_bound(scenario.coalitions());
    let sys = ContestSystem::new(scenario.coalitions(), mode);
    let out = iterate(&sys, vec![t_max / 10.0; sys.len()], config, t_max);
    let mut reports = IndexMap::new();
    for (g, c) in scenario.coalitions().iter().enumerate() {
        let members: Vec<usize> = (0..sys.len()).filter(|&i| sys.group[i] == g).collect();
        reports.insert(c.id().clone(), report_for(&sys, &out, &members, config, t_max)?);
    }
    Ok(reports)
}

/// Largest payoff improvement any member of `coalition` can obtain by a
/// unilateral deviation, scanning the effort grid of `config` and refining the
/// best grid cell by golden-section search. Zero certifies an equilibrium up
/// to the scan resolution.
///
/// Deviations that make the contest degenerate (every effort zero) are
/// skipped; a profile whose own payoffs are undefined is an error.
pub fn verify_pure_ne(
    profile: &EffortProfile,
    scenario: &Scenario,
    coalition: &str,
    mode: PayoffMode,
    config: &SolverConfig,
) -> Result<f64> {
    let target = scenario.coalition(coalition)?;
    let t_max = match mode {
        PayoffMode::Conditional => config.effort_bound([target]),
        PayoffMode::Expected => config.effort_bound(scenario.coalitions()),
    };
    let grid = config.effort_grid(t_max)?;
    let sys = match mode {
        PayoffMode::Conditional => ContestSystem::new([target], mode),
        PayoffMode::Expected => ContestSystem::new(scenario.coalitions(), mode),
    };
    let t: Vec<f64> = sys
        .players
        .iter()
        .map(|p| profile.get(p.id().as_str()))
        .collect::<Result<_>>()?;
    let members: Vec<usize> = (0..sys.len())
        .filter(|&i| target.members().iter().any(|m| m.id() == sys.players[i].id()))
        .collect();

    let mut gain: f64 = 0.0;
    for &i in &members {
        let p = sys.players[i];
        let rival = sys.rival(i, &t);
        let prize = sys.prize[i];
        if p.effectiveness() * t[i] + rival <= 0.0 {
            return Err(Error::DegenerateProfile);
        }
        let current = contest_value(p, t[i], rival, prize);
        let mut best: Option<(usize, f64)> = None;
        for (k, &x) in grid.iter().enumerate() {
            if p.effectiveness() * x + rival <= 0.0 {
                continue;
            }
            let v = contest_value(p, x, rival, prize);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        let (k, mut value) = best.ok_or(Error::DegenerateProfile)?;
        if rival > 0.0 {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(grid.len() - 1)];
            let (_, refined) = golden_section_max(
                |x| contest_value(p, x, rival, prize),
                lo,
                hi,
                1e-12 * t_max,
                200,
            );
            value = value.max(refined);
        }
        gain = gain.max(value - current);
    }
    Ok(gain)
}
