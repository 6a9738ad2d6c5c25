//! Transferable-utility cooperative games and coalition endurance aggregators.
//!
//! Subsets of players are bitmasks: bit `i` set means player `i` belongs to
//! the subset. Exact methods enumerate all `2ⁿ` subsets and are capped at
//! [`MAX_PLAYERS`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PLAYERS: usize = 20;

const CORE_TOL: f64 = 1e-9;

/// Characteristic function `v: 2^N → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicGame {
    n: usize,
    values: Vec<Option<f64>>,
}

impl CharacteristicGame {
    /// Game with every subset value given, indexed by bitmask.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_size(n)?;
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                found: values.len(),
            });
        }
        Self::partial(n, values.into_iter().map(Some).collect())
    }

    /// Game where some subset values may be missing; methods that need them fail.
    pub fn partial(n: usize, mut values: Vec<Option<f64>>) -> Result<Self> {
        check_size(n)?;
        values.resize(1 << n, None);
        match values[0] {
            Some(v) if v != 0.0 => {
                return Err(Error::InvariantViolation(format!(
                    "value of the empty coalition must be 0, got {v}"
                )))
            }
            _ => values[0] = Some(0.0),
        }
        if let Some(v) = values.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("subset value {v} is not finite")));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn<F: Fn(u32) -> f64>(n: usize, v: F) -> Result<Self> {
        check_size(n)?;
        Self::new(n, (0..1u32 << n).map(|s| if s == 0 { 0.0 } else { v(s) }).collect())
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn value(&self, subset: u32) -> Result<f64> {
        self.values
            .get(subset as usize)
            .copied()
            .flatten()
            .ok_or(Error::MissingSubsetValue(subset))
    }

    fn grand(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_PLAYERS {
        Err(Error::TooManyPlayers {
            found: n,
            max: MAX_PLAYERS,
        })
    } else {
        Ok(())
    }
}

/// Indices of the players in `subset`.
pub fn members(subset: u32) -> Vec<usize> {
    (0..32).filter(|i| subset >> i & 1 == 1).collect()
}

/// Exact Shapley value by enumeration of all subsets:
/// `φ_i = Σ_{S ⊆ N∖{i}} |S|!(n−|S|−1)!/n! · [v(S∪{i}) − v(S)]`.
pub fn shapley_value(game: &CharacteristicGame) -> Result<Vec<f64>> {
    let n = game.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    // weight[s] = s!(n−s−1)!/n!
    let mut weight = vec![0.0; n];
    weight[0] = 1.0 / n as f64;
    for s in 1..n {
        weight[s] = weight[s - 1] * s as f64 / (n - s) as f64;
    }
    let mut phi = vec![0.0; n];
    for subset in 0..=game.grand() {
        let v = game.value(subset)?;
        let size = subset.count_ones() as usize;
        for (i, phi_i) in phi.iter_mut().enumerate() {
            let bit = 1u32 << i;
            if subset & bit == 0 {
                *phi_i += weight[size] * (game.value(subset | bit)? - v);
            }
        }
    }
    Ok(phi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreCheck {
    pub in_core: bool,
    /// `Σ x_i = v(N)` within 1e-9.
    pub efficient: bool,
    pub efficiency_gap: f64,
    /// Subset with the largest shortfall `v(S) − Σ_{i∈S} x_i`, if any is positive.
    pub worst_violating_subset: Option<Vec<usize>>,
    pub worst_violation: f64,
}

/// Checks efficiency and every coalitional rationality constraint
/// `Σ_{i∈S} x_i ≥ v(S)`.
pub fn core_check(game: &CharacteristicGame, allocation: &[f64]) -> Result<CoreCheck> {
    if allocation.len() != game.n {
        return Err(Error::LengthMismatch {
            expected: game.n,
            found: allocation.len(),
        });
    }
    let total: f64 = allocation.iter().sum();
    let efficiency_gap = total - game.value(game.grand())?;
    let efficient = efficiency_gap.abs() <= CORE_TOL;
    let mut worst: Option<(u32, f64)> = None;
    for subset in 1..=game.grand() {
        let paid: f64 = members(subset).iter().map(|&i| allocation[i]).sum();
        let shortfall = game.value(subset)? - paid;
        if shortfall > CORE_TOL && worst.is_none_or(|(_, w)| shortfall > w) {
            worst = Some((subset, shortfall));
        }
    }
    Ok(CoreCheck {
        in_core: efficient && worst.is_none(),
        efficient,
        efficiency_gap,
        worst_violating_subset: worst.map(|(s, _)| members(s)),
        worst_violation: worst.map_or(0.0, |(_, w)| w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnduranceKind {
    /// `Σ w_j t_j` with weights normalized to 1.
    WeightedSum,
    /// `(Σ a_i t_i) · exp(−γ · Var(t))`, population variance.
    VariancePenalized,
    /// `min_i t_i`
    WeakestLink,
}

/// How a coalition's member efforts aggregate into one endurance value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnduranceSpec {
    kind: EnduranceKind,
    weights: Vec<f64>,
    gamma: f64,
}

impl EnduranceSpec {
    /// Weighted sum; weights are rescaled to sum to one.
    pub fn weighted_sum(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("endurance weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("endurance weights must not all be zero".into()));
        }
        Ok(Self {
            kind: EnduranceKind::WeightedSum,
            weights: weights.into_iter().map(|w| w / total).collect(),
            gamma: 0.0,
        })
    }

    pub fn equal_weights(n: usize) -> Result<Self> {
        Self::weighted_sum(vec![1.0; n])
    }

    pub fn variance_penalized(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {gamma}")));
        }
        Ok(Self {
            kind: EnduranceKind::VariancePenalized,
            weights: Vec::new(),
            gamma,
        })
    }

    pub fn weakest_link() -> Self {
        Self {
            kind: EnduranceKind::WeakestLink,
            weights: Vec::new(),
            gamma: 0.0,
        }
    }

    pub fn kind(&self) -> EnduranceKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

fn population_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Aggregate endurance of one coalition from its members' efforts.
pub fn endurance_index(
    spec: &EnduranceSpec,
    efforts: &[f64],
    effectiveness: Option<&[f64]>,
) -> Result<f64> {
    if efforts.is_empty() {
        return Err(Error::InvalidParameter("endurance needs at least one effort".into()));
    }
    match spec.kind {
        EnduranceKind::WeightedSum => {
            if spec.weights.len() != efforts.len() {
                return Err(Error::LengthMismatch {
                    expected: spec.weights.len(),
                    found: efforts.len(),
                });
            }
            Ok(spec.weights.iter().zip(efforts).map(|(w, t)| w * t).sum())
        }
        EnduranceKind::VariancePenalized => {
            let a = effectiveness.ok_or(Error::MissingEffectiveness)?;
            if a.len() != efforts.len() {
                return Err(Error::LengthMismatch {
                    expected: efforts.len(),
                    found: a.len(),
                });
            }
            let power: f64 = a.iter().zip(efforts).map(|(a, t)| a * t).sum();
            if spec.gamma == 0.0 {
                return Ok(power);
            }
            Ok(power * (-spec.gamma * population_variance(efforts)).exp())
        }
        EnduranceKind::WeakestLink => Ok(efforts.iter().copied().fold(f64::INFINITY, f64::min)),
    }
}
