//! Mixed strategies for an intra-coalition contest by fictitious play, then
//! replicator dynamics on the same effort grid.
//!
//! ```text
//! cargo run --release --example mixed_contest
//! ```

use ccag::equilibrium::{exploitability, replicator_step, solve_mixed_fp, SolverConfig};
use ccag::model::{Coalition, PlayerParams, Scenario};

fn main() -> ccag::Result<()> {
    let members = vec![
        PlayerParams::quadratic("p1", 1.0, 1.0)?,
        PlayerParams::quadratic("p2", 1.0, 1.0)?,
    ];
    let scenario = Scenario::single(Coalition::new("k", members, 1.0)?);
    let config = SolverConfig {
        grid_size: 41,
        t_max: Some(1.0),
        ..SolverConfig::default()
    };
    let report = solve_mixed_fp(&scenario, "k", &config)?;
    let strategies = report.strategies.as_ref().unwrap();
    println!(
        "fictitious play: {} rounds, exploitability {:.2e} (recomputed {:.2e})",
        report.iterations,
        report.exploitability,
        exploitability(strategies, &scenario, "k")?
    );
    for (id, s) in strategies {
        println!("{id}: mode {:.3}, mean {:.4} (pure equilibrium {:.4})", s.mode(), s.mean(), 0.125f64.sqrt());
    }

    // replicator dynamics of a single population playing against itself
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let share = |t: f64, u: f64| if t + u > 0.0 { t / (t + u) } else { 0.5 };
    let mut x = vec![1.0 / grid.len() as f64; grid.len()];
    for step in 0..=2000 {
        let fitness: Vec<f64> = grid
            .iter()
            .map(|&t| grid.iter().zip(&x).map(|(&u, p)| p * share(t, u)).sum::<f64>() - t * t)
            .collect();
        if step % 500 == 0 {
            let mean: f64 = grid.iter().zip(&x).map(|(t, p)| t * p).sum();
            println!("replicator step {step:>4}: mean effort {mean:.4}");
        }
        x = replicator_step(&x, &fitness, 0.5)?.state;
    }
    Ok(())
}
