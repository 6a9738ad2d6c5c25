//! Domain types of the compound coalition game and its static payoff formulas.
//!
//! A [`Scenario`] partitions players into coalitions. Inside a coalition the
//! prize `R_k` is split by a ratio contest: player `i` receives
//! `t_i a_i / Σ_j t_j a_j` of it, where `t_i` is effort (resilience) and `a_i`
//! effectiveness. Between coalitions the same ratio rule applies to coalition
//! power `Σ_j t_j a_j`, which gives the inter-coalition win probability.

use std::borrow::Borrow;
use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Identifier of a player (an investor, an asset, a party...).
    PlayerId
);
string_id!(
    /// Identifier of a top-level coalition.
    CoalitionId
);
string_id!(
    /// Identifier of a sub-coalition branch inside a coalition.
    BranchId
);

/// Shape of the effort cost `C(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostKind {
    /// `c·t²`
    Quadratic,
    /// `c·t`
    Linear,
    /// `c·t^p` with `p ≥ 1`
    PowerLaw { exponent: f64 },
}

impl CostKind {
    /// Exponent `p` such that the cost is `c·t^p`.
    pub fn exponent(&self) -> f64 {
        match self {
            CostKind::Quadratic => 2.0,
            CostKind::Linear => 1.0,
            CostKind::PowerLaw { exponent } => *exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerParams {
    id: PlayerId,
    effectiveness: f64,
    cost_coeff: f64,
    cost_kind: CostKind,
}

impl PlayerParams {
    pub fn new(
        id: impl Into<PlayerId>,
        effectiveness: f64,
        cost_coeff: f64,
        cost_kind: CostKind,
    ) -> Result<Self> {
        let id = id.into();
        if !(effectiveness.is_finite() && effectiveness > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "player `{id}`: effectiveness must be positive, got {effectiveness}"
            )));
        }
        if !(cost_coeff.is_finite() && cost_coeff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "player `{id}`: cost coefficient must be positive, got {cost_coeff}"
            )));
        }
        if let CostKind::PowerLaw { exponent } = cost_kind {
            if !(exponent.is_finite() && exponent >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "player `{id}`: power-law exponent must be >= 1, got {exponent}"
                )));
            }
        }
        Ok(Self {
            id,
            effectiveness,
            cost_coeff,
            cost_kind,
        })
    }

    /// Shorthand for a quadratic-cost player.
    pub fn quadratic(id: impl Into<PlayerId>, effectiveness: f64, cost_coeff: f64) -> Result<Self> {
        Self::new(id, effectiveness, cost_coeff, CostKind::Quadratic)
    }

    pub fn id(&self) -> &PlayerId {
        &self.id
    }

    pub fn effectiveness(&self) -> f64 {
        self.effectiveness
    }

    pub fn cost_coeff(&self) -> f64 {
        self.cost_coeff
    }

    pub fn cost_kind(&self) -> CostKind {
        self.cost_kind
    }

    pub fn with_effectiveness(&self, effectiveness: f64) -> Result<Self> {
        Self::new(self.id.clone(), effectiveness, self.cost_coeff, self.cost_kind)
    }

    pub fn with_cost_coeff(&self, cost_coeff: f64) -> Result<Self> {
        Self::new(self.id.clone(), self.effectiveness, cost_coeff, self.cost_kind)
    }

    /// Cost of exerting effort `t`.
    pub fn cost(&self, t: f64) -> Result<f64> {
        check_effort(t)?;
        Ok(self.cost_unchecked(t))
    }

    pub(crate) fn cost_unchecked(&self, t: f64) -> f64 {
        let c = self.cost_coeff;
        match self.cost_kind {
            CostKind::Quadratic => c * t * t,
            CostKind::Linear => c * t,
            CostKind::PowerLaw { exponent } => c * t.powf(exponent),
        }
    }

    /// Derivative of the cost at `t ≥ 0`.
    pub(crate) fn marginal_cost(&self, t: f64) -> f64 {
        let c = self.cost_coeff;
        match self.cost_kind {
            CostKind::Quadratic => 2.0 * c * t,
            CostKind::Linear => c,
            CostKind::PowerLaw { exponent: 1.0 } => c,
            CostKind::PowerLaw { exponent } => c * exponent * t.powf(exponent - 1.0),
        }
    }

    /// Effort at which the cost alone reaches `prize`; no best response lies beyond it.
    pub(crate) fn break_even_effort(&self, prize: f64) -> f64 {
        (prize / self.cost_coeff).powf(1.0 / self.cost_kind.exponent())
    }
}

fn check_effort(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeEffort(t))
    }
}

/// A named partition block of a coalition's members with its own reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: BranchId,
    pub members: Vec<PlayerId>,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coalition {
    id: CoalitionId,
    members: Vec<PlayerParams>,
    reward: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    branches: Option<Vec<Branch>>,
}

impl Coalition {
    pub fn new(
        id: impl Into<CoalitionId>,
        members: Vec<PlayerParams>,
        reward: f64,
    ) -> Result<Self> {
        Self::with_branches(id, members, reward, None)
    }

    pub fn with_branches(
        id: impl Into<CoalitionId>,
        members: Vec<PlayerParams>,
        reward: f64,
        branches: Option<Vec<Branch>>,
    ) -> Result<Self> {
        let id = id.into();
        if members.is_empty() {
            return Err(Error::InvariantViolation(format!(
                "coalition `{id}` has no members"
            )));
        }
        if !(reward.is_finite() && reward >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coalition `{id}`: reward must be nonnegative, got {reward}"
            )));
        }
        let mut seen = HashSet::new();
        for m in &members {
            if !seen.insert(m.id.as_str()) {
                return Err(Error::InvariantViolation(format!(
                    "coalition `{id}` lists player `{}` twice",
                    m.id
                )));
            }
        }
        if let Some(branches) = &branches {
            let mut assigned = HashSet::new();
            let mut total = 0.0;
            for b in branches {
                if b.members.is_empty() {
                    return Err(Error::InvariantViolation(format!(
                        "sub-coalition `{}` of `{id}` has no members",
                        b.id
                    )));
                }
                if !(b.reward.is_finite() && b.reward >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sub-coalition `{}`: reward must be nonnegative, got {}",
                        b.id, b.reward
                    )));
                }
                for p in &b.members {
                    if !seen.contains(p.as_str()) {
                        return Err(Error::InvariantViolation(format!(
                            "sub-coalition `{}` member `{p}` does not belong to `{id}`",
                            b.id
                        )));
                    }
                    if !assigned.insert(p.as_str()) {
                        return Err(Error::InvariantViolation(format!(
                            "player `{p}` appears in more than one sub-coalition of `{id}`"
                        )));
                    }
                }
                total += b.reward;
            }
            if total > reward * (1.0 + 1e-12) {
                return Err(Error::InvariantViolation(format!(
                    "sub-coalition rewards of `{id}` sum to {total}, exceeding R = {reward}"
                )));
            }
        }
        Ok(Self {
            id,
            members,
            reward,
            branches,
        })
    }

    pub fn id(&self) -> &CoalitionId {
        &self.id
    }

    pub fn members(&self) -> &[PlayerParams] {
        &self.members
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    pub fn branches(&self) -> Option<&[Branch]> {
        self.branches.as_deref()
    }

    pub fn member(&self, player: &str) -> Result<&PlayerParams> {
        self.members
            .iter()
            .find(|m| m.id.as_str() == player)
            .ok_or_else(|| Error::NotAMember {
                player: player.to_owned(),
                group: self.id.to_string(),
            })
    }

    pub fn branch(&self, branch: &str) -> Result<&Branch> {
        self.branches
            .iter()
            .flatten()
            .find(|b| b.id.as_str() == branch)
            .ok_or_else(|| Error::UnknownBranch(branch.to_owned()))
    }

    pub fn with_reward(&self, reward: f64) -> Result<Self> {
        let branches = self.branches.as_ref().map(|bs| {
            let scale = if self.reward > 0.0 { reward / self.reward } else { 0.0 };
            bs.iter()
                .map(|b| Branch {
                    reward: b.reward * scale,
                    ..b.clone()
                })
                .collect()
        });
        Self::with_branches(self.id.clone(), self.members.clone(), reward, branches)
    }

    pub fn with_members(&self, members: Vec<PlayerParams>) -> Result<Self> {
        Self::with_branches(self.id.clone(), members, self.reward, self.branches.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    coalitions: Vec<Coalition>,
}

impl Scenario {
    pub fn new(coalitions: Vec<Coalition>) -> Result<Self> {
        if coalitions.is_empty() {
            return Err(Error::InvariantViolation(
                "scenario has no coalitions".into(),
            ));
        }
        let mut ids = HashSet::new();
        let mut players = HashSet::new();
        for c in &coalitions {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::InvariantViolation(format!(
                    "coalition id `{}` is used twice",
                    c.id
                )));
            }
            for m in &c.members {
                if !players.insert(m.id.as_str()) {
                    return Err(Error::InvariantViolation(format!(
                        "player `{}` belongs to more than one coalition (S_i ∩ S_j = ∅ required)",
                        m.id
                    )));
                }
            }
        }
        Ok(Self { coalitions })
    }

    /// One coalition containing every player.
    pub fn single(coalition: Coalition) -> Self {
        Self {
            coalitions: vec![coalition],
        }
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn coalition(&self, id: &str) -> Result<&Coalition> {
        self.coalitions
            .iter()
            .find(|c| c.id.as_str() == id)
            .ok_or_else(|| Error::UnknownCoalition(id.to_owned()))
    }

    pub fn coalition_index(&self, id: &str) -> Result<usize> {
        self.coalitions
            .iter()
            .position(|c| c.id.as_str() == id)
            .ok_or_else(|| Error::UnknownCoalition(id.to_owned()))
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerParams> {
        self.coalitions.iter().flat_map(|c| c.members.iter())
    }

    pub fn player_count(&self) -> usize {
        self.coalitions.iter().map(|c| c.members.len()).sum()
    }

    /// Coalition that `player` belongs to.
    pub fn coalition_of(&self, player: &str) -> Result<&Coalition> {
        self.coalitions
            .iter()
            .find(|c| c.members.iter().any(|m| m.id.as_str() == player))
            .ok_or_else(|| Error::UnknownPlayer(player.to_owned()))
    }

    pub fn with_coalitions(&self, coalitions: Vec<Coalition>) -> Result<Self> {
        Self::new(coalitions)
    }
}

/// Nonnegative effort per player.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffortProfile {
    efforts: IndexMap<PlayerId, f64>,
}

impl EffortProfile {
    pub fn new<I, K>(efforts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<PlayerId>,
    {
        let mut map = IndexMap::new();
        for (id, t) in efforts {
            check_effort(t)?;
            map.insert(id.into(), t);
        }
        Ok(Self { efforts: map })
    }

    /// Profile whose domain is checked against the scenario's player set.
    pub fn for_scenario<I, K>(scenario: &Scenario, efforts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<PlayerId>,
    {
        let profile = Self::new(efforts)?;
        for p in scenario.players() {
            if !profile.efforts.contains_key(p.id.as_str()) {
                return Err(Error::MissingEffort(p.id.to_string()));
            }
        }
        if profile.efforts.len() != scenario.player_count() {
            let extra = profile
                .efforts
                .keys()
                .find(|k| scenario.coalition_of(k.as_str()).is_err())
                .map(|k| k.to_string())
                .unwrap_or_default();
            return Err(Error::UnknownPlayer(extra));
        }
        Ok(profile)
    }

    /// Every player of the scenario at effort `t`.
    pub fn uniform(scenario: &Scenario, t: f64) -> Result<Self> {
        Self::new(scenario.players().map(|p| (p.id.clone(), t)))
    }

    pub fn get(&self, player: &str) -> Result<f64> {
        self.efforts
            .get(player)
            .copied()
            .ok_or_else(|| Error::MissingEffort(player.to_owned()))
    }

    pub fn set(&mut self, player: impl Into<PlayerId>, t: f64) -> Result<()> {
        check_effort(t)?;
        self.efforts.insert(player.into(), t);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlayerId, f64)> {
        self.efforts.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.efforts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.efforts.is_empty()
    }

    pub fn as_map(&self) -> &IndexMap<PlayerId, f64> {
        &self.efforts
    }

    /// Restriction to the members of one coalition, in member order.
    pub fn restrict(&self, coalition: &Coalition) -> Result<Self> {
        let mut map = IndexMap::with_capacity(coalition.members.len());
        for m in &coalition.members {
            map.insert(m.id.clone(), self.get(m.id.as_str())?);
        }
        Ok(Self { efforts: map })
    }
}

/// Which utility a player maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffMode {
    /// Share of the coalition prize discounted by the coalition's win probability.
    #[default]
    Expected,
    /// Share of the coalition prize assuming the coalition wins.
    Conditional,
}

/// Cost of exerting effort `t`.
pub fn cost(params: &PlayerParams, t: f64) -> Result<f64> {
    params.cost(t)
}

/// `Σ_{j∈S_k} t_j a_j`.
pub fn coalition_power(profile: &EffortProfile, coalition: &Coalition) -> Result<f64> {
    coalition
        .members
        .iter()
        .map(|m| Ok(profile.get(m.id.as_str())? * m.effectiveness))
        .sum()
}

/// Each member's fraction `t_i a_i / Σ_j t_j a_j` of the coalition prize.
pub fn intra_shares(
    profile: &EffortProfile,
    coalition: &Coalition,
) -> Result<IndexMap<PlayerId, f64>> {
    let weighted: Vec<f64> = coalition
        .members
        .iter()
        .map(|m| Ok(profile.get(m.id.as_str())? * m.effectiveness))
        .collect::<Result<_>>()?;
    let total: f64 = weighted.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    Ok(coalition
        .members
        .iter()
        .zip(weighted)
        .map(|(m, w)| (m.id.clone(), w / total))
        .collect())
}

/// Inter-coalition win probability `Power(S_k) / Σ_h Power(S_h)`.
pub fn win_probabilities(
    profile: &EffortProfile,
    scenario: &Scenario,
) -> Result<IndexMap<CoalitionId, f64>> {
    let powers: Vec<f64> = scenario
        .coalitions
        .iter()
        .map(|c| coalition_power(profile, c))
        .collect::<Result<_>>()?;
    let total: f64 = powers.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateScenario);
    }
    Ok(scenario
        .coalitions
        .iter()
        .zip(powers)
        .map(|(c, p)| (c.id.clone(), p / total))
        .collect())
}

/// Net payoff of `player` assuming its coalition wins: `share_i · R_k − C(t_i)`.
pub fn payoff(profile: &EffortProfile, coalition: &Coalition, player: &str) -> Result<f64> {
    let params = coalition.member(player)?;
    let t = profile.get(player)?;
    let power = coalition_power(profile, coalition)?;
    if power <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    Ok(t * params.effectiveness / power * coalition.reward - params.cost_unchecked(t))
}

/// Net payoff discounted by the coalition's win probability:
/// `P_k^win · share_i · R_k − C(t_i)`.
pub fn expected_payoff(
    profile: &EffortProfile,
    scenario: &Scenario,
    coalition: &Coalition,
    player: &str,
) -> Result<f64> {
    let params = coalition.member(player)?;
    let t = profile.get(player)?;
    let power = coalition_power(profile, coalition)?;
    if power <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    let probs = win_probabilities(profile, scenario)?;
    let p_win = *probs
        .get(coalition.id.as_str())
        .ok_or_else(|| Error::UnknownCoalition(coalition.id.to_string()))?;
    Ok(p_win * (t * params.effectiveness / power) * coalition.reward - params.cost_unchecked(t))
}

/// Payoff of `player` inside sub-coalition `branch`.
///
/// The branch wins the intra-coalition contest with probability equal to its
/// power over the total power of all branches of the coalition, and then
/// splits `R^(G_l)` among its members by the usual share rule.
pub fn subcoalition_payoff(
    profile: &EffortProfile,
    coalition: &Coalition,
    branch: &str,
    player: &str,
) -> Result<f64> {
    let target = coalition.branch(branch)?;
    if !target.members.iter().any(|p| p.as_str() == player) {
        return Err(Error::NotAMember {
            player: player.to_owned(),
            group: branch.to_owned(),
        });
    }
    let branch_power = |b: &Branch| -> Result<f64> {
        b.members
            .iter()
            .map(|p| Ok(profile.get(p.as_str())? * coalition.member(p.as_str())?.effectiveness))
            .sum()
    };
    let own = branch_power(target)?;
    if own <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    let mut all = 0.0;
    for b in coalition.branches.iter().flatten() {
        all += branch_power(b)?;
    }
    let params = coalition.member(player)?;
    let t = profile.get(player)?;
    let p_branch = own / all;
    Ok(p_branch * (t * params.effectiveness / own) * target.reward - params.cost_unchecked(t))
}

/// Coalition with the highest candidate payoff; ties go to the earliest entry.
///
/// Candidates are expected in scenario order.
pub fn select_coalition(candidates: &IndexMap<CoalitionId, f64>) -> Result<CoalitionId> {
    let mut best: Option<(&CoalitionId, f64)> = None;
    for (id, &v) in candidates {
        if v.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "candidate payoff for `{id}` is NaN"
            )));
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((id, v)),
        }
    }
    best.map(|(id, _)| id.clone()).ok_or(Error::EmptyCandidates)
}

/// Payoff `player` would obtain in each coalition of the scenario if it moved
/// there alone, keeping its own effort and everybody else's fixed.
pub fn membership_payoffs(
    profile: &EffortProfile,
    scenario: &Scenario,
    player: &str,
    mode: PayoffMode,
) -> Result<IndexMap<CoalitionId, f64>> {
    let home = scenario.coalition_of(player)?;
    let params = home.member(player)?;
    let t = profile.get(player)?;
    let own = t * params.effectiveness;
    let powers: Vec<f64> = scenario
        .coalitions
        .iter()
        .map(|c| {
            let p = coalition_power(profile, c)?;
            Ok(if c.id == home.id { p - own } else { p })
        })
        .collect::<Result<_>>()?;
    let others_total: f64 = powers.iter().sum();
    let mut out = IndexMap::with_capacity(powers.len());
    for (c, rivals) in scenario.coalitions.iter().zip(powers) {
        let power = rivals + own;
        if power <= 0.0 {
            return Err(Error::DegenerateProfile);
        }
        let share = own / power;
        let p_win = match mode {
            PayoffMode::Conditional => 1.0,
            PayoffMode::Expected => power / (others_total + own),
        };
        out.insert(
            c.id.clone(),
            p_win * share * c.reward - params.cost_unchecked(t),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(id: &str, a: f64, c: f64) -> PlayerParams {
        PlayerParams::quadratic(id, a, c).unwrap()
    }

    fn pair(a: (f64, f64), c: f64, reward: f64) -> Coalition {
        Coalition::new("S1", vec![quad("p1", a.0, c), quad("p2", a.1, c)], reward).unwrap()
    }

    fn profile(ts: &[(&str, f64)]) -> EffortProfile {
        EffortProfile::new(ts.iter().map(|&(k, v)| (k, v))).unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cost(&quad("x", 1.0, 1.0), 0.0).unwrap(), 0.0);
        assert_eq!(cost(&quad("x", 1.0, 2.0), 3.0).unwrap(), 18.0);
        let lin = PlayerParams::new("x", 1.0, 1.0, CostKind::Linear).unwrap();
        assert_eq!(cost(&lin, 0.5).unwrap(), 0.5);
        let pow = PlayerParams::new("x", 1.0, 1.0, CostKind::PowerLaw { exponent: 3.0 }).unwrap();
        assert_eq!(cost(&pow, 2.0).unwrap(), 8.0);
        assert!(matches!(cost(&lin, -1.0), Err(Error::NegativeEffort(_))));
    }

    #[test]
    fn player_params_reject_bad_values() {
        assert!(PlayerParams::quadratic("x", 0.0, 1.0).is_err());
        assert!(PlayerParams::quadratic("x", 1.0, -1.0).is_err());
        assert!(PlayerParams::new("x", 1.0, 1.0, CostKind::PowerLaw { exponent: 0.5 }).is_err());
    }

    #[test]
    fn shares() {
        let c = pair((1.0, 1.0), 1.0, 1.0);
        let s = intra_shares(&profile(&[("p1", 1.0), ("p2", 1.0)]), &c).unwrap();
        assert_eq!(s["p1"], 0.5);
        let s = intra_shares(&profile(&[("p1", 2.0), ("p2", 1.0)]), &c).unwrap();
        assert!((s["p1"] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s["p2"] - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            intra_shares(&profile(&[("p1", 0.0), ("p2", 0.0)]), &c),
            Err(Error::DegenerateProfile)
        ));
    }

    #[test]
    fn power() {
        let c = pair((2.0, 1.0), 1.0, 1.0);
        assert_eq!(coalition_power(&profile(&[("p1", 1.0), ("p2", 2.0)]), &c).unwrap(), 4.0);
        assert_eq!(coalition_power(&profile(&[("p1", 0.0), ("p2", 0.0)]), &c).unwrap(), 0.0);
        let solo = Coalition::new("S", vec![quad("p", 2.0, 1.0)], 1.0).unwrap();
        assert_eq!(coalition_power(&profile(&[("p", 0.5)]), &solo).unwrap(), 1.0);
    }

    #[test]
    fn win_probability_examples() {
        let s1 = Coalition::new("A", vec![quad("a", 3.0, 1.0)], 1.0).unwrap();
        let s2 = Coalition::new("B", vec![quad("b", 1.0, 1.0)], 1.0).unwrap();
        let sc = Scenario::new(vec![s1.clone(), s2]).unwrap();
        let p = win_probabilities(&profile(&[("a", 1.0), ("b", 1.0)]), &sc).unwrap();
        assert_eq!(p["A"], 0.75);
        assert_eq!(p["B"], 0.25);
        let p = win_probabilities(&profile(&[("a", 1.0)]), &Scenario::single(s1)).unwrap();
        assert_eq!(p["A"], 1.0);
        assert!(matches!(
            win_probabilities(&profile(&[("a", 0.0), ("b", 0.0)]), &sc),
            Err(Error::DegenerateScenario)
        ));
    }

    #[test]
    fn payoff_examples() {
        let c = pair((1.0, 1.0), 1.0, 1.0);
        let pr = profile(&[("p1", 1.0), ("p2", 1.0)]);
        assert_eq!(payoff(&pr, &c, "p1").unwrap(), -0.5);
        let c2 = pair((1.0, 1.0), 1.0, 2.0);
        let pr = profile(&[("p1", 0.5), ("p2", 0.5)]);
        assert_eq!(payoff(&pr, &c2, "p2").unwrap(), 0.75);
        let c0 = pair((1.0, 1.0), 1.0, 0.0);
        assert_eq!(payoff(&pr, &c0, "p1").unwrap(), -0.25);
        assert!(matches!(payoff(&pr, &c0, "zz"), Err(Error::NotAMember { .. })));
    }

    #[test]
    fn expected_payoff_examples() {
        let a = pair((1.0, 1.0), 1.0, 1.0);
        let b = Coalition::new("S2", vec![quad("q1", 1.0, 1.0), quad("q2", 1.0, 1.0)], 1.0).unwrap();
        let sc = Scenario::new(vec![a.clone(), b]).unwrap();
        let pr = EffortProfile::uniform(&sc, 0.25).unwrap();
        let v = expected_payoff(&pr, &sc, &a, "p1").unwrap();
        assert!((v - 0.1875).abs() < 1e-15);

        let single = Scenario::single(a.clone());
        let pr = profile(&[("p1", 0.3), ("p2", 0.7)]);
        assert_eq!(
            expected_payoff(&pr, &single, &a, "p1").unwrap(),
            payoff(&pr, &a, "p1").unwrap()
        );

        let pr = profile(&[("p1", 0.0), ("p2", 0.7)]);
        assert_eq!(expected_payoff(&pr, &single, &a, "p1").unwrap(), 0.0);
    }

    fn branched(members: Vec<PlayerParams>, branches: Vec<(&str, Vec<&str>, f64)>) -> Coalition {
        let branches = branches
            .into_iter()
            .map(|(id, m, r)| Branch {
                id: id.into(),
                members: m.into_iter().map(PlayerId::from).collect(),
                reward: r,
            })
            .collect();
        Coalition::with_branches("S", members, 2.0, Some(branches)).unwrap()
    }

    #[test]
    fn subcoalition_examples() {
        // single branch with everyone is the plain payoff at R^(G)
        let c = branched(
            vec![quad("p1", 1.0, 1.0), quad("p2", 2.0, 1.0)],
            vec![("G", vec!["p1", "p2"], 1.5)],
        );
        let pr = profile(&[("p1", 0.4), ("p2", 0.3)]);
        let plain = pair((1.0, 2.0), 1.0, 1.5);
        assert!(
            (subcoalition_payoff(&pr, &c, "G", "p1").unwrap() - payoff(&pr, &plain, "p1").unwrap())
                .abs()
                < 1e-15
        );

        // branch powers (2, 2), linear cost 0.1
        let lin = |id: &str| PlayerParams::new(id, 1.0, 0.1, CostKind::Linear).unwrap();
        let c = branched(
            vec![lin("p1"), lin("p2"), lin("p3"), lin("p4")],
            vec![("G1", vec!["p1", "p2"], 1.0), ("G2", vec!["p3", "p4"], 1.0)],
        );
        let pr = profile(&[("p1", 1.0), ("p2", 1.0), ("p3", 1.0), ("p4", 1.0)]);
        let v = subcoalition_payoff(&pr, &c, "G1", "p1").unwrap();
        assert!((v - 0.15).abs() < 1e-15);
        assert!(matches!(
            subcoalition_payoff(&pr, &c, "G2", "p1"),
            Err(Error::NotAMember { .. })
        ));
        let zero = profile(&[("p1", 0.0), ("p2", 0.0), ("p3", 1.0), ("p4", 1.0)]);
        assert!(matches!(
            subcoalition_payoff(&zero, &c, "G1", "p1"),
            Err(Error::DegenerateProfile)
        ));
    }

    #[test]
    fn branch_invariants() {
        let members = || vec![quad("p1", 1.0, 1.0), quad("p2", 1.0, 1.0)];
        let b = |id: &str, m: &[&str], r: f64| Branch {
            id: id.into(),
            members: m.iter().map(|s| PlayerId::from(*s)).collect(),
            reward: r,
        };
        // overlapping branches
        assert!(Coalition::with_branches(
            "S",
            members(),
            1.0,
            Some(vec![b("a", &["p1"], 0.5), b("b", &["p1", "p2"], 0.5)])
        )
        .is_err());
        // outsider
        assert!(Coalition::with_branches("S", members(), 1.0, Some(vec![b("a", &["x"], 0.5)])).is_err());
        // rewards exceed R
        assert!(Coalition::with_branches(
            "S",
            members(),
            1.0,
            Some(vec![b("a", &["p1"], 0.7), b("b", &["p2"], 0.7)])
        )
        .is_err());
    }

    #[test]
    fn scenario_rejects_overlap() {
        let a = Coalition::new("A", vec![quad("x", 1.0, 1.0)], 1.0).unwrap();
        let b = Coalition::new("B", vec![quad("x", 1.0, 1.0)], 1.0).unwrap();
        let err = Scenario::new(vec![a, b]).unwrap_err();
        assert!(err.to_string().contains("S_i ∩ S_j = ∅"));
    }

    #[test]
    fn selection() {
        let m = |v: &[(&str, f64)]| -> IndexMap<CoalitionId, f64> {
            v.iter().map(|&(k, x)| (CoalitionId::from(k), x)).collect()
        };
        assert_eq!(select_coalition(&m(&[("S1", 0.3), ("S2", 0.1)])).unwrap().as_str(), "S1");
        assert_eq!(select_coalition(&m(&[("S1", 0.2), ("S2", 0.2)])).unwrap().as_str(), "S1");
        assert_eq!(select_coalition(&m(&[("S2", -1.0)])).unwrap().as_str(), "S2");
        assert!(matches!(select_coalition(&m(&[])), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn membership_payoffs_match_current_coalition() {
        let a = pair((1.0, 1.0), 1.0, 1.0);
        let b = Coalition::new("S2", vec![quad("q1", 1.0, 1.0)], 3.0).unwrap();
        let sc = Scenario::new(vec![a.clone(), b]).unwrap();
        let pr = profile(&[("p1", 0.2), ("p2", 0.4), ("q1", 0.5)]);
        let m = membership_payoffs(&pr, &sc, "p1", PayoffMode::Expected).unwrap();
        assert!((m["S1"] - expected_payoff(&pr, &sc, &a, "p1").unwrap()).abs() < 1e-15);
        let m = membership_payoffs(&pr, &sc, "p1", PayoffMode::Conditional).unwrap();
        assert!((m["S1"] - payoff(&pr, &a, "p1").unwrap()).abs() < 1e-15);
        // joining S2 alongside q1: share 0.2/0.7 of 3.0
        assert!((m["S2"] - (0.2 / 0.7 * 3.0 - 0.04)).abs() < 1e-15);
    }
}
