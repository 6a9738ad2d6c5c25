use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{PriceSeries, ResilienceEstimate, ReturnOptions};
use crate::coopgame::{endurance_index, EnduranceKind, EnduranceSpec};
use crate::error::{Error, Result};
use crate::model::{
    intra_shares, select_coalition, Coalition, CoalitionId, CostKind, EffortProfile, PlayerId,
    PlayerParams, Scenario,
};

/// Smallest admissible resilience; nonpositive Sharpe ratios are raised to it.
pub const RESILIENCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttractivenessRule {
    /// Mean daily return, floored at the resilience floor, normalized within each coalition.
    #[default]
    MeanReturn,
    /// `1 / |S_k|` for every member.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildOptions {
    pub attractiveness: AttractivenessRule,
    /// Prize per coalition; coalitions not listed get 1.
    pub rewards: IndexMap<CoalitionId, f64>,
    pub cost_kind: CostKind,
    pub cost_coeff: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            attractiveness: AttractivenessRule::MeanReturn,
            rewards: IndexMap::new(),
            cost_kind: CostKind::Quadratic,
            cost_coeff: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltScenario {
    pub scenario: Scenario,
    pub profile: EffortProfile,
    /// Assets whose Sharpe ratio was raised to [`RESILIENCE_FLOOR`].
    pub clamped: Vec<PlayerId>,
    pub attractiveness_rule: AttractivenessRule,
}

/// Turns resilience estimates into a scenario with `t_i = max(sharpe, ε)`.
///
/// Coalitions and their members follow the order of `coalition_map`; assets
/// in the map without an estimate are left out, and so are coalitions left
/// empty.
pub fn build_scenario(
    estimates: &[ResilienceEstimate],
    coalition_map: &IndexMap<String, CoalitionId>,
    options: &BuildOptions,
) -> Result<BuiltScenario> {
    let mut by_asset: IndexMap<&str, &ResilienceEstimate> = IndexMap::new();
    for e in estimates {
        if !coalition_map.contains_key(&e.asset) {
            return Err(Error::UnassignedAsset(e.asset.clone()));
        }
        if by_asset.insert(e.asset.as_str(), e).is_some() {
            return Err(Error::DuplicateAsset(e.asset.clone()));
        }
    }
    let mut groups: IndexMap<&CoalitionId, Vec<&ResilienceEstimate>> = IndexMap::new();
    for (asset, coalition) in coalition_map {
        let slot = groups.entry(coalition).or_default();
        if let Some(e) = by_asset.get(asset.as_str()) {
            slot.push(e);
        }
    }

    let mut coalitions = Vec::new();
    let mut efforts = Vec::new();
    let mut clamped = Vec::new();
    for (id, members) in groups.into_iter().filter(|(_, m)| !m.is_empty()) {
        let raw: Vec<f64> = match options.attractiveness {
            AttractivenessRule::MeanReturn => members
                .iter()
                .map(|e| e.stats.mean.max(RESILIENCE_FLOOR))
                .collect(),
            AttractivenessRule::Uniform => vec![1.0; members.len()],
        };
        let total: f64 = raw.iter().sum();
        let mut params = Vec::with_capacity(members.len());
        for (e, a) in members.iter().zip(&raw) {
            params.push(PlayerParams::new(
                e.asset.as_str(),
                a / total,
                options.cost_coeff,
                options.cost_kind,
            )?);
            if !(e.sharpe >= RESILIENCE_FLOOR) {
                clamped.push(PlayerId::new(e.asset.as_str()));
            }
            efforts.push((e.asset.clone(), e.sharpe.max(RESILIENCE_FLOOR)));
        }
        let reward = options.rewards.get(id).copied().unwrap_or(1.0);
        coalitions.push(Coalition::new(id.clone(), params, reward)?);
    }
    let scenario = Scenario::new(coalitions)?;
    let profile = EffortProfile::for_scenario(&scenario, efforts)?;
    Ok(BuiltScenario {
        scenario,
        profile,
        clamped,
        attractiveness_rule: options.attractiveness,
    })
}

/// Endurance aggregation applied to every coalition of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnduranceRule {
    pub kind: EnduranceKind,
    pub gamma: f64,
    /// Weighted-sum weights by player; members not listed weigh 1. Empty means equal weights.
    pub weights: IndexMap<PlayerId, f64>,
}

impl Default for EnduranceRule {
    fn default() -> Self {
        Self {
            kind: EnduranceKind::WeightedSum,
            gamma: 0.0,
            weights: IndexMap::new(),
        }
    }
}

impl EnduranceRule {
    pub fn spec_for(&self, coalition: &Coalition) -> Result<EnduranceSpec> {
        match self.kind {
            EnduranceKind::WeightedSum => EnduranceSpec::weighted_sum(
                coalition
                    .members()
                    .iter()
                    .map(|m| self.weights.get(m.id()).copied().unwrap_or(1.0))
                    .collect(),
            ),
            EnduranceKind::VariancePenalized => EnduranceSpec::variance_penalized(self.gamma),
            EnduranceKind::WeakestLink => Ok(EnduranceSpec::weakest_link()),
        }
    }

    pub fn evaluate(&self, profile: &EffortProfile, coalition: &Coalition) -> Result<f64> {
        let spec = self.spec_for(coalition)?;
        let efforts: Vec<f64> = coalition
            .members()
            .iter()
            .map(|m| profile.get(m.id().as_str()))
            .collect::<Result<_>>()?;
        let a: Vec<f64> = coalition.members().iter().map(|m| m.effectiveness()).collect();
        endurance_index(&spec, &efforts, Some(&a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStageDecision {
    pub chosen: CoalitionId,
    pub endurance: IndexMap<CoalitionId, f64>,
    /// Intra-coalition shares of the chosen coalition.
    pub shares: IndexMap<PlayerId, f64>,
}

/// Stage one picks the coalition of highest endurance (first in scenario
/// order on ties); stage two splits it by `t_i a_i / Σ t_j a_j`.
pub fn two_stage_decision(
    scenario: &Scenario,
    profile: &EffortProfile,
    rule: &EnduranceRule,
) -> Result<TwoStageDecision> {
    let endurance: IndexMap<CoalitionId, f64> = scenario
        .coalitions()
        .iter()
        .map(|c| Ok((c.id().clone(), rule.evaluate(profile, c)?)))
        .collect::<Result<_>>()?;
    let chosen = select_coalition(&endurance)?;
    let shares = intra_shares(profile, scenario.coalition(chosen.as_str())?)?;
    Ok(TwoStageDecision {
        chosen,
        endurance,
        shares,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearShares {
    pub year: i32,
    /// Shares per coalition over the assets with data that year.
    pub shares: IndexMap<CoalitionId, IndexMap<PlayerId, f64>>,
    pub excluded: Vec<String>,
    pub clamped: Vec<PlayerId>,
}

/// Recomputes resilience and attractiveness on each calendar year and
/// returns the intra-coalition shares. An asset without enough data in a
/// year to estimate volatility is left out of that year.
pub fn yearly_share_series(
    series: &[PriceSeries],
    years: &[i32],
    coalition_map: &IndexMap<String, CoalitionId>,
    returns: ReturnOptions,
    options: &BuildOptions,
) -> Result<Vec<YearShares>> {
    let mut out = Vec::with_capacity(years.len());
    for &year in years {
        let mut estimates = Vec::new();
        let mut excluded = Vec::new();
        for s in series {
            let window = s.year(year);
            match ResilienceEstimate::from_series(&window, returns) {
                Ok(e) => estimates.push(e),
                Err(Error::InsufficientData(_) | Error::ZeroVolatility) => {
                    excluded.push(s.asset().to_owned())
                }
                Err(e) => return Err(e),
            }
        }
        if estimates.is_empty() {
            return Err(Error::EmptyYear(year));
        }
        let built = build_scenario(&estimates, coalition_map, options)?;
        let shares = built
            .scenario
            .coalitions()
            .iter()
            .map(|c| Ok((c.id().clone(), intra_shares(&built.profile, c)?)))
            .collect::<Result<_>>()?;
        out.push(YearShares {
            year,
            shares,
            excluded,
            clamped: built.clamped,
        });
    }
    Ok(out)
}

pub(crate) fn year_bounds(start: i32, end: i32) -> Result<(NaiveDate, NaiveDate)> {
    let bad = || Error::InvalidParameter(format!("bad year range {start}..={end}"));
    let from = NaiveDate::from_ymd_opt(start, 1, 1).ok_or_else(bad)?;
    let to = NaiveDate::from_ymd_opt(end, 12, 31).ok_or_else(bad)?;
    if from > to {
        return Err(bad());
    }
    Ok((from, to))
}
