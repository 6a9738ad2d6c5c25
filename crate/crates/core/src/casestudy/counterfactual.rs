use std::fmt;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use super::scenario::{two_stage_decision, EnduranceRule};
use crate::equilibrium::{solve_two_layer, EquilibriumReport, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{
    coalition_power, intra_shares, win_probabilities, CoalitionId, EffortProfile, PayoffMode,
    PlayerId, Scenario,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterfactualTarget {
    /// Coalition prize `R_k`.
    Reward,
    /// Cost coefficient `c_i`.
    CostCoeff,
    /// Attractiveness `a_i`.
    Effectiveness,
    /// Observed resilience `t_i`.
    Resilience,
}

impl FromStr for CounterfactualTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reward" => Ok(Self::Reward),
            "cost-coeff" | "cost" => Ok(Self::CostCoeff),
            "effectiveness" => Ok(Self::Effectiveness),
            "resilience" => Ok(Self::Resilience),
            other => Err(Error::InvalidParameter(format!(
                "unknown counterfactual target `{other}`"
            ))),
        }
    }
}

/// Which coalitions or players a counterfactual touches.
///
/// A coalition id selects all of its members for player-level targets; a
/// player id selects its coalition for [`CounterfactualTarget::Reward`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    All,
    Ids(Vec<String>),
}

impl FromStr for Selector {
    type Err = Error;

    /// `all`, or a comma-separated list of ids.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(Self::All);
        }
        let ids: Vec<String> = s
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        if ids.is_empty() {
            return Err(Error::UnknownSelector(s.to_owned()));
        }
        Ok(Self::Ids(ids))
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::All => f.write_str("all"),
            Selector::Ids(ids) => f.write_str(&ids.join(",")),
        }
    }
}

impl Selector {
    fn players(&self, scenario: &Scenario) -> Result<IndexSet<PlayerId>> {
        let all = || scenario.players().map(|p| p.id().clone());
        let Selector::Ids(ids) = self else {
            return Ok(all().collect());
        };
        let mut out = IndexSet::new();
        for id in ids {
            if let Ok(c) = scenario.coalition(id) {
                out.extend(c.members().iter().map(|m| m.id().clone()));
            } else if scenario.coalition_of(id).is_ok() {
                out.insert(PlayerId::new(id.as_str()));
            } else {
                return Err(Error::UnknownSelector(id.clone()));
            }
        }
        Ok(out)
    }

    fn coalitions(&self, scenario: &Scenario) -> Result<IndexSet<CoalitionId>> {
        let Selector::Ids(ids) = self else {
            return Ok(scenario.coalitions().iter().map(|c| c.id().clone()).collect());
        };
        let mut out = IndexSet::new();
        for id in ids {
            if let Ok(c) = scenario.coalition(id) {
                out.insert(c.id().clone());
            } else if let Ok(c) = scenario.coalition_of(id) {
                out.insert(c.id().clone());
            } else {
                return Err(Error::UnknownSelector(id.clone()));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterfactualSpec {
    pub target: CounterfactualTarget,
    pub selector: Selector,
    pub multiplier: f64,
}

impl CounterfactualSpec {
    pub fn new(target: CounterfactualTarget, selector: Selector, multiplier: f64) -> Result<Self> {
        if !(multiplier.is_finite() && multiplier > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "multiplier must be positive, got {multiplier}"
            )));
        }
        Ok(Self {
            target,
            selector,
            multiplier,
        })
    }

    /// Scenario and observed profile with the multiplier applied.
    pub fn apply(&self, scenario: &Scenario, profile: &EffortProfile) -> Result<(Scenario, EffortProfile)> {
        Self::new(self.target, self.selector.clone(), self.multiplier)?;
        let m = self.multiplier;
        match self.target {
            CounterfactualTarget::Reward => {
                let chosen = self.selector.coalitions(scenario)?;
                let coalitions = scenario
                    .coalitions()
                    .iter()
                    .map(|c| {
                        if chosen.contains(c.id()) {
                            c.with_reward(c.reward() * m)
                        } else {
                            Ok(c.clone())
                        }
                    })
                    .collect::<Result<_>>()?;
                Ok((scenario.with_coalitions(coalitions)?, profile.clone()))
            }
            CounterfactualTarget::CostCoeff | CounterfactualTarget::Effectiveness => {
                let chosen = self.selector.players(scenario)?;
                let coalitions = scenario
                    .coalitions()
                    .iter()
                    .map(|c| {
                        let members = c
                            .members()
                            .iter()
                            .map(|p| match (chosen.contains(p.id()), self.target) {
                                (false, _) => Ok(p.clone()),
                                (true, CounterfactualTarget::CostCoeff) => p.with_cost_coeff(p.cost_coeff() * m),
                                (true, _) => p.with_effectiveness(p.effectiveness() * m),
                            })
                            .collect::<Result<_>>()?;
                        c.with_members(members)
                    })
                    .collect::<Result<_>>()?;
                Ok((scenario.with_coalitions(coalitions)?, profile.clone()))
            }
            CounterfactualTarget::Resilience => {
                let chosen = self.selector.players(scenario)?;
                let mut out = profile.clone();
                for p in &chosen {
                    out.set(p.clone(), profile.get(p.as_str())? * m)?;
                }
                Ok((scenario.clone(), out))
            }
        }
    }
}

/// Outcome evaluated at the given (observed) resilience profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedOutcome {
    pub win_probabilities: IndexMap<CoalitionId, f64>,
    pub shares: IndexMap<CoalitionId, IndexMap<PlayerId, f64>>,
    pub endurance: IndexMap<CoalitionId, f64>,
    pub stage_one_winner: CoalitionId,
}

/// Outcome at the two-layer equilibrium of the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedOutcome {
    pub converged: bool,
    pub efforts: EffortProfile,
    pub power: IndexMap<CoalitionId, f64>,
    pub win_probabilities: IndexMap<CoalitionId, f64>,
    /// Coalitions whose solved power is zero have no shares.
    pub shares: IndexMap<CoalitionId, IndexMap<PlayerId, f64>>,
    pub reports: IndexMap<CoalitionId, EquilibriumReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub observed: ObservedOutcome,
    pub solved: SolvedOutcome,
}

/// Perturbed minus baseline, key by key.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Deltas {
    pub observed_win_probabilities: IndexMap<CoalitionId, f64>,
    pub observed_shares: IndexMap<PlayerId, f64>,
    pub endurance: IndexMap<CoalitionId, f64>,
    pub solved_efforts: IndexMap<PlayerId, f64>,
    pub solved_power: IndexMap<CoalitionId, f64>,
    pub solved_win_probabilities: IndexMap<CoalitionId, f64>,
    pub solved_shares: IndexMap<PlayerId, f64>,
}

impl Deltas {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        [
            self.observed_win_probabilities.values(),
            self.endurance.values(),
            self.solved_power.values(),
            self.solved_win_probabilities.values(),
        ]
        .into_iter()
        .flatten()
        .chain(self.observed_shares.values())
        .chain(self.solved_efforts.values())
        .chain(self.solved_shares.values())
        .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualReport {
    pub spec: CounterfactualSpec,
    pub baseline: Snapshot,
    pub perturbed: Snapshot,
    pub deltas: Deltas,
    pub winner_changed: bool,
}

fn observe(scenario: &Scenario, profile: &EffortProfile, rule: &EnduranceRule) -> Result<ObservedOutcome> {
    let decision = two_stage_decision(scenario, profile, rule)?;
    Ok(ObservedOutcome {
        win_probabilities: win_probabilities(profile, scenario)?,
        shares: all_shares(scenario, profile)?,
        endurance: decision.endurance,
        stage_one_winner: decision.chosen,
    })
}

fn all_shares(
    scenario: &Scenario,
    profile: &EffortProfile,
) -> Result<IndexMap<CoalitionId, IndexMap<PlayerId, f64>>> {
    let mut out = IndexMap::new();
    for c in scenario.coalitions() {
        match intra_shares(profile, c) {
            Ok(s) => {
                out.insert(c.id().clone(), s);
            }
            Err(Error::DegenerateProfile) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn solve(scenario: &Scenario, config: &SolverConfig, mode: PayoffMode) -> Result<SolvedOutcome> {
    let reports = solve_two_layer(scenario, config, mode)?;
    let mut efforts = EffortProfile::default();
    for r in reports.values() {
        for (p, t) in r.efforts.iter().flat_map(|e| e.iter()) {
            efforts.set(p.clone(), t)?;
        }
    }
    let power = scenario
        .coalitions()
        .iter()
        .map(|c| Ok((c.id().clone(), coalition_power(&efforts, c)?)))
        .collect::<Result<_>>()?;
    Ok(SolvedOutcome {
        converged: reports.values().all(|r| r.converged),
        win_probabilities: win_probabilities(&efforts, scenario)?,
        shares: all_shares(scenario, &efforts)?,
        power,
        efforts,
        reports,
    })
}

fn diff<K: Clone + std::hash::Hash + Eq>(a: &IndexMap<K, f64>, b: &IndexMap<K, f64>) -> IndexMap<K, f64> {
    b.iter()
        .map(|(k, v)| (k.clone(), v - a.get(k).copied().unwrap_or(0.0)))
        .collect()
}

fn flatten(shares: &IndexMap<CoalitionId, IndexMap<PlayerId, f64>>) -> IndexMap<PlayerId, f64> {
    shares
        .values()
        .flat_map(|m| m.iter().map(|(k, v)| (k.clone(), *v)))
        .collect()
}

/// Applies `spec`, then compares observed outcomes at `profile` and solved
/// two-layer equilibria before and after.
pub fn counterfactual_run(
    scenario: &Scenario,
    profile: &EffortProfile,
    spec: &CounterfactualSpec,
    rule: &EnduranceRule,
    config: &SolverConfig,
    mode: PayoffMode,
) -> Result<CounterfactualReport> {
    let (scenario2, profile2) = spec.apply(scenario, profile)?;
    let baseline = Snapshot {
        observed: observe(scenario, profile, rule)?,
        solved: solve(scenario, config, mode)?,
    };
    let perturbed = Snapshot {
        observed: observe(&scenario2, &profile2, rule)?,
        solved: solve(&scenario2, config, mode)?,
    };
    let (b, p) = (&baseline, &perturbed);
    let deltas = Deltas {
        observed_win_probabilities: diff(&b.observed.win_probabilities, &p.observed.win_probabilities),
        observed_shares: diff(&flatten(&b.observed.shares), &flatten(&p.observed.shares)),
        endurance: diff(&b.observed.endurance, &p.observed.endurance),
        solved_efforts: diff(b.solved.efforts.as_map(), p.solved.efforts.as_map()),
        solved_power: diff(&b.solved.power, &p.solved.power),
        solved_win_probabilities: diff(&b.solved.win_probabilities, &p.solved.win_probabilities),
        solved_shares: diff(&flatten(&b.solved.shares), &flatten(&p.solved.shares)),
    };
    let winner_changed = b.observed.stage_one_winner != p.observed.stage_one_winner;
    Ok(CounterfactualReport {
        spec: spec.clone(),
        baseline,
        perturbed,
        deltas,
        winner_changed,
    })
}
