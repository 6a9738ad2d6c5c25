use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicatorStep {
    pub state: Vec<f64>,
    /// Set when the Euler step overshot below zero and mass was clamped.
    pub clamped: bool,
}

/// One Euler step of the replicator equation
/// `x_i ← x_i + dt·x_i·(f_i − f̄)`, `f̄ = Σ x_j f_j`, renormalized onto the simplex.
pub fn replicator_step(state: &[f64], fitness: &[f64], dt: f64) -> Result<ReplicatorStep> {
    if state.len() != fitness.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            found: fitness.len(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {dt}")));
    }
    let sum: f64 = state.iter().sum();
    let min = state.iter().copied().fold(f64::INFINITY, f64::min);
    if state.is_empty() || !(min >= -1e-9) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSimplex { sum, min });
    }
    let mean: f64 = state.iter().zip(fitness).map(|(x, f)| x * f).sum();
    let mut clamped = false;
    let mut next: Vec<f64> = state
        .iter()
        .zip(fitness)
        .map(|(&x, &f)| {
            let y = x + dt * x * (f - mean);
            if y < 0.0 {
                clamped = true;
                0.0
            } else {
                y
            }
        })
        .collect();
    let total: f64 = next.iter().sum();
    if total <= 0.0 {
        return Err(Error::NotOnSimplex { sum: total, min: 0.0 });
    }
    next.iter_mut().for_each(|x| *x /= total);
    Ok(ReplicatorStep { state: next, clamped })
}
