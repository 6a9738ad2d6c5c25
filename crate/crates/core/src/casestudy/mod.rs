//! Market case study: assets grouped into market coalitions, resilience
//! estimated from daily closing prices by the volatility-adjusted Sharpe
//! ratio, a two-stage market/asset decision and counterfactual re-solves.

mod counterfactual;
mod pipeline;
mod scenario;

use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counterfactual::{
    counterfactual_run, CounterfactualReport, CounterfactualSpec, CounterfactualTarget, Deltas,
    ObservedOutcome, Selector, Snapshot, SolvedOutcome,
};
pub use pipeline::{
    figure1_csv, figure2_csv, figure3_csv, run_case_study, AssetEntry, CaseStudyManifest,
    CaseStudyResult,
};
pub use scenario::{
    build_scenario, two_stage_decision, yearly_share_series, AttractivenessRule, BuildOptions,
    BuiltScenario, EnduranceRule, TwoStageDecision, YearShares, RESILIENCE_FLOOR,
};

/// Dated closing prices of one asset, ascending by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    asset: String,
    observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    /// Sorts by date; rejects duplicate dates and nonpositive prices.
    pub fn new(asset: impl Into<String>, mut observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let asset = asset.into();
        if let Some((d, p)) = observations.iter().find(|(_, p)| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "asset `{asset}`: price on {d} must be positive, got {p}"
            )));
        }
        observations.sort_by_key(|(d, _)| *d);
        if let Some(w) = observations.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter(format!(
                "asset `{asset}`: duplicate date {}",
                w[0].0
            )));
        }
        Ok(Self { asset, observations })
    }

    /// Reads a `date,close` CSV with ISO-8601 dates. Rows may come in any order.
    pub fn from_csv(asset: impl Into<String>, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_reader(asset, file, path)
    }

    pub fn from_reader<R: Read>(asset: impl Into<String>, reader: R, origin: &Path) -> Result<Self> {
        let bad = |message: String| Error::PriceData {
            path: origin.to_owned(),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["date", "close"] {
            return Err(bad(format!(
                "expected header `date,close`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut observations = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let row = line + 2;
            let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
                .map_err(|e| bad(format!("line {row}: bad date `{}`: {e}", &record[0])))?;
            let close: f64 = record[1]
                .parse()
                .map_err(|e| bad(format!("line {row}: bad price `{}`: {e}", &record[1])))?;
            observations.push((date, close));
        }
        Self::new(asset, observations).map_err(|e| bad(e.to_string()))
    }

    pub fn asset(&self) -> &str {
        &self.asset
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.observations.first().map(|(d, _)| *d)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.observations.last().map(|(d, _)| *d)
    }

    /// Observations with `start ≤ date ≤ end`.
    pub fn window(&self, start: NaiveDate, end: NaiveDate) -> PriceSeries {
        PriceSeries {
            asset: self.asset.clone(),
            observations: self
                .observations
                .iter()
                .copied()
                .filter(|(d, _)| *d >= start && *d <= end)
                .collect(),
        }
    }

    pub fn year(&self, year: i32) -> PriceSeries {
        PriceSeries {
            asset: self.asset.clone(),
            observations: self
                .observations
                .iter()
                .copied()
                .filter(|(d, _)| d.year() == year)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnKind {
    /// `p_t / p_{t−1} − 1`
    #[default]
    Simple,
    /// `ln(p_t / p_{t−1})`
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StdKind {
    /// `n − 1` denominator
    #[default]
    Sample,
    /// `n` denominator
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReturnOptions {
    pub returns: ReturnKind,
    pub std: StdKind,
}

/// Simple daily returns `p_t / p_{t−1} − 1`.
pub fn compute_returns(series: &PriceSeries) -> Result<Vec<f64>> {
    compute_returns_with(series, ReturnKind::Simple)
}

pub fn compute_returns_with(series: &PriceSeries, kind: ReturnKind) -> Result<Vec<f64>> {
    if series.observations.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "asset `{}` needs at least 2 prices for returns, has {}",
            series.asset,
            series.observations.len()
        )));
    }
    Ok(series
        .observations
        .windows(2)
        .map(|w| match kind {
            ReturnKind::Simple => w[1].1 / w[0].1 - 1.0,
            ReturnKind::Log => (w[1].1 / w[0].1).ln(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnStats {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Arithmetic mean and sample standard deviation of daily returns.
pub fn return_stats(returns: &[f64]) -> Result<ReturnStats> {
    return_stats_with(returns, StdKind::Sample)
}

pub fn return_stats_with(returns: &[f64], kind: StdKind) -> Result<ReturnStats> {
    let needed = match kind {
        StdKind::Sample => 2,
        StdKind::Population => 1,
    };
    if returns.len() < needed {
        return Err(Error::InsufficientData(format!(
            "standard deviation needs at least {needed} returns, got {}",
            returns.len()
        )));
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let ss: f64 = returns.iter().map(|r| (r - mean) * (r - mean)).sum();
    let denom = match kind {
        StdKind::Sample => n - 1.0,
        StdKind::Population => n,
    };
    Ok(ReturnStats {
        mean,
        std: (ss / denom).sqrt(),
        count: returns.len(),
    })
}

/// Volatility-adjusted Sharpe ratio `mean / std` with a zero risk-free rate.
pub fn sharpe_resilience(stats: &ReturnStats) -> Result<f64> {
    if !(stats.std > 0.0) {
        return Err(Error::ZeroVolatility);
    }
    Ok(stats.mean / stats.std)
}

/// Resilience of one asset over a dated window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceEstimate {
    pub asset: String,
    pub sharpe: f64,
    pub stats: ReturnStats,
    pub window: (NaiveDate, NaiveDate),
}

impl ResilienceEstimate {
    pub fn from_stats(asset: impl Into<String>, stats: ReturnStats, window: (NaiveDate, NaiveDate)) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::InvalidParameter(format!(
                "window start {} is after its end {}",
                window.0, window.1
            )));
        }
        Ok(Self {
            asset: asset.into(),
            sharpe: sharpe_resilience(&stats)?,
            stats,
            window,
        })
    }

    /// Estimate from every observation of `series`.
    pub fn from_series(series: &PriceSeries, options: ReturnOptions) -> Result<Self> {
        let returns = compute_returns_with(series, options.returns)?;
        let stats = return_stats_with(&returns, options.std)?;
        let window = (
            series.first_date().expect("returns imply observations"),
            series.last_date().expect("returns imply observations"),
        );
        Self::from_stats(series.asset.clone(), stats, window)
    }
}
