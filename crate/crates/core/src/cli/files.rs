//! Scenario and characteristic-game input files.

use std::collections::HashSet;
use std::path::Path;

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::casestudy::EnduranceRule;
use crate::coopgame::CharacteristicGame;
use crate::equilibrium::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{
    Branch, BranchId, Coalition, CoalitionId, CostKind, EffortProfile, PayoffMode, PlayerId,
    PlayerParams, Scenario,
};

use super::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerEntry {
    id: PlayerId,
    #[serde(alias = "a")]
    effectiveness: f64,
    #[serde(alias = "c")]
    cost_coeff: f64,
    #[serde(default = "quadratic")]
    cost: CostKind,
}

fn quadratic() -> CostKind {
    CostKind::Quadratic
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchEntry {
    id: BranchId,
    members: Vec<PlayerId>,
    reward: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoalitionEntry {
    id: CoalitionId,
    members: Vec<PlayerId>,
    reward: f64,
    #[serde(default)]
    branches: Option<Vec<BranchEntry>>,
}

/// On-disk scenario document; see `docs/scenario-schema.md`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    players: Vec<PlayerEntry>,
    coalitions: Vec<CoalitionEntry>,
    #[serde(default)]
    endurance: EnduranceRule,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default)]
    payoff: Option<PayoffMode>,
    #[serde(default)]
    efforts: Option<IndexMap<PlayerId, f64>>,
}

/// A scenario file after validation.
#[derive(Debug, Clone)]
pub struct ParsedScenario {
    pub scenario: Scenario,
    pub solver: SolverConfig,
    pub endurance: EnduranceRule,
    pub payoff: Option<PayoffMode>,
    /// Observed efforts, when the file lists them.
    pub efforts: Option<EffortProfile>,
}

pub(crate) fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::schema(path, e))
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<ParsedScenario, CliError> {
    let file: ScenarioFile = read_toml(path)?;
    Ok(file.validate()?)
}

impl ScenarioFile {
    pub fn validate(self) -> Result<ParsedScenario> {
        let mut players: IndexMap<PlayerId, PlayerParams> = IndexMap::new();
        for p in self.players {
            let params = PlayerParams::new(p.id.clone(), p.effectiveness, p.cost_coeff, p.cost)?;
            if players.insert(p.id.clone(), params).is_some() {
                return Err(Error::InvariantViolation(format!("player `{}` is defined twice", p.id)));
            }
        }
        let mut assigned = HashSet::new();
        let mut coalitions = Vec::with_capacity(self.coalitions.len());
        for c in self.coalitions {
            let members = c
                .members
                .iter()
                .map(|id| {
                    assigned.insert(id.clone());
                    players
                        .get(id)
                        .cloned()
                        .ok_or_else(|| Error::UnknownPlayer(id.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let branches = c.branches.map(|bs| {
                bs.into_iter()
                    .map(|b| Branch {
                        id: b.id,
                        members: b.members,
                        reward: b.reward,
                    })
                    .collect()
            });
            coalitions.push(Coalition::with_branches(c.id, members, c.reward, branches)?);
        }
        if let Some(p) = players.keys().find(|p| !assigned.contains(*p)) {
            return Err(Error::InvariantViolation(format!(
                "player `{p}` belongs to no coalition"
            )));
        }
        let scenario = Scenario::new(coalitions)?;
        self.solver.validate()?;
        let efforts = self
            .efforts
            .map(|e| EffortProfile::for_scenario(&scenario, e))
            .transpose()?;
        Ok(ParsedScenario {
            scenario,
            solver: self.solver,
            endurance: self.endurance,
            payoff: self.payoff,
            efforts,
        })
    }
}

/// On-disk characteristic game: player names and `v(S)` keyed by the
/// comma-separated members of `S`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: Vec<String>,
    pub values: IndexMap<String, f64>,
}

impl GameFile {
    pub fn to_game(&self) -> Result<CharacteristicGame> {
        let n = self.players.len();
        if n > crate::coopgame::MAX_PLAYERS {
            return Err(Error::TooManyPlayers {
                found: n,
                max: crate::coopgame::MAX_PLAYERS,
            });
        }
        let index: IndexMap<&str, usize> = self
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        if index.len() != n {
            return Err(Error::InvalidConfig("player names must be unique".into()));
        }
        let mut values = vec![None; 1 << n];
        values[0] = Some(0.0);
        for (key, &v) in &self.values {
            let mut mask = 0u32;
            for name in key.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let i = index
                    .get(name)
                    .ok_or_else(|| Error::InvalidConfig(format!("value key `{key}` names unknown player `{name}`")))?;
                mask |= 1 << i;
            }
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("value of `{key}` must be finite")));
            }
            values[mask as usize] = Some(v);
        }
        CharacteristicGame::partial(n, values)
    }
}
