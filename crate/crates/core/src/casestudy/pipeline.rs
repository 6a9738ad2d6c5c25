use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::scenario::{
    build_scenario, two_stage_decision, year_bounds, yearly_share_series, AttractivenessRule,
    BuildOptions, BuiltScenario, EnduranceRule, TwoStageDecision, YearShares, RESILIENCE_FLOOR,
};
use super::{PriceSeries, ResilienceEstimate, ReturnKind, ReturnOptions, StdKind};
use crate::error::{Error, Result};
use crate::model::CoalitionId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetEntry {
    pub id: String,
    pub coalition: CoalitionId,
    /// Price CSV, relative to the manifest's directory.
    pub file: PathBuf,
}

/// TOML description of a case-study run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseStudyManifest {
    pub start_year: i32,
    pub end_year: i32,
    pub assets: Vec<AssetEntry>,
    #[serde(default)]
    pub returns: ReturnOptions,
    #[serde(default)]
    pub build: BuildOptions,
    #[serde(default)]
    pub endurance: EnduranceRule,
}

impl CaseStudyManifest {
    pub fn coalition_map(&self) -> Result<IndexMap<String, CoalitionId>> {
        let mut map = IndexMap::new();
        for a in &self.assets {
            if map.insert(a.id.clone(), a.coalition.clone()).is_some() {
                return Err(Error::DuplicateAsset(a.id.clone()));
            }
        }
        Ok(map)
    }

    pub fn years(&self) -> Vec<i32> {
        (self.start_year..=self.end_year).collect()
    }

    pub fn load_prices(&self, base_dir: &Path) -> Result<Vec<PriceSeries>> {
        self.assets
            .iter()
            .map(|a| PriceSeries::from_csv(a.id.as_str(), &base_dir.join(&a.file)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudyMetadata {
    pub returns: ReturnKind,
    pub std: StdKind,
    pub risk_free_rate: f64,
    pub attractiveness: AttractivenessRule,
    pub resilience_floor: f64,
    pub endurance: EnduranceRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudyResult {
    pub window: (NaiveDate, NaiveDate),
    pub metadata: CaseStudyMetadata,
    /// Full-window estimates, in manifest order.
    pub estimates: Vec<ResilienceEstimate>,
    /// Asset ids by descending Sharpe ratio.
    pub ranking: Vec<String>,
    pub built: BuiltScenario,
    pub decision: TwoStageDecision,
    pub yearly: Vec<YearShares>,
}

/// Full-window estimates, two-stage decision and yearly shares for already
/// loaded price series.
pub fn run_case_study(manifest: &CaseStudyManifest, prices: &[PriceSeries]) -> Result<CaseStudyResult> {
    let map = manifest.coalition_map()?;
    let window = year_bounds(manifest.start_year, manifest.end_year)?;
    let estimates: Vec<ResilienceEstimate> = prices
        .iter()
        .map(|s| ResilienceEstimate::from_series(&s.window(window.0, window.1), manifest.returns))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..estimates.len()).collect();
    order.sort_by(|&i, &j| estimates[j].sharpe.total_cmp(&estimates[i].sharpe));
    let ranking = order.into_iter().map(|i| estimates[i].asset.clone()).collect();
    let built = build_scenario(&estimates, &map, &manifest.build)?;
    let decision = two_stage_decision(&built.scenario, &built.profile, &manifest.endurance)?;
    let yearly = yearly_share_series(prices, &manifest.years(), &map, manifest.returns, &manifest.build)?;
    Ok(CaseStudyResult {
        window,
        metadata: CaseStudyMetadata {
            returns: manifest.returns.returns,
            std: manifest.returns.std,
            risk_free_rate: 0.0,
            attractiveness: manifest.build.attractiveness,
            resilience_floor: RESILIENCE_FLOOR,
            endurance: manifest.endurance.clone(),
        },
        estimates,
        ranking,
        built,
        decision,
        yearly,
    })
}

fn to_csv<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    fill(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is UTF-8")
}

/// Sharpe bar data, sorted by descending ratio.
pub fn figure1_csv(result: &CaseStudyResult) -> String {
    let coalition_of = |asset: &str| {
        result
            .built
            .scenario
            .coalition_of(asset)
            .map(|c| c.id().to_string())
            .unwrap_or_default()
    };
    to_csv(&["asset", "coalition", "mean_daily_return", "volatility", "sharpe"], |w| {
        for asset in &result.ranking {
            let e = result.estimates.iter().find(|e| &e.asset == asset).expect("ranked asset");
            w.write_record([
                asset.clone(),
                coalition_of(asset),
                e.stats.mean.to_string(),
                e.stats.std.to_string(),
                e.sharpe.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Endurance of each coalition and the stage-one choice.
pub fn figure2_csv(result: &CaseStudyResult) -> String {
    to_csv(&["coalition", "endurance", "chosen"], |w| {
        for (id, v) in &result.decision.endurance {
            w.write_record([id.to_string(), v.to_string(), (id == &result.decision.chosen).to_string()])?;
        }
        Ok(())
    })
}

/// Per-year intra-coalition shares of every asset with data that year.
pub fn figure3_csv(result: &CaseStudyResult) -> String {
    to_csv(&["year", "coalition", "asset", "share"], |w| {
        for y in &result.yearly {
            for (c, shares) in &y.shares {
                for (asset, s) in shares {
                    w.write_record([y.year.to_string(), c.to_string(), asset.to_string(), s.to_string()])?;
                }
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_with_defaults() {
        let text = r#"
            start_year = 2018
            end_year = 2019
            [[assets]]
            id = "Gold"
            coalition = "traditional"
            file = "gold.csv"
        "#;
        let m: CaseStudyManifest = toml::from_str(text).unwrap();
        assert_eq!(m.years(), vec![2018, 2019]);
        assert_eq!(m.build.attractiveness, AttractivenessRule::MeanReturn);
        assert_eq!(m.returns, ReturnOptions::default());
        assert!(toml::from_str::<CaseStudyManifest>(&format!("{text}\nbogus = 1")).is_err());
    }

    #[test]
    fn duplicate_manifest_assets() {
        let a = AssetEntry {
            id: "Gold".into(),
            coalition: "t".into(),
            file: "g.csv".into(),
        };
        let m = CaseStudyManifest {
            start_year: 2018,
            end_year: 2018,
            assets: vec![a.clone(), a],
            returns: Default::default(),
            build: Default::default(),
            endurance: Default::default(),
        };
        assert!(matches!(m.coalition_map(), Err(Error::DuplicateAsset(_))));
    }
}
