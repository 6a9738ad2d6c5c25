//! Fictitious play on the discretized two-player war of attrition against the
//! exponential equilibrium `F(t) = 1 − exp(−t/V)`, plus seeded sampling.
//!
//! ```text
//! cargo run --release --example war_of_attrition
//! ```

use ccag::equilibrium::{solve_woa_fp, woa_cdf, woa_quantile, woa_sample, SolverConfig};

fn main() -> ccag::Result<()> {
    let prize = 1.0;
    let config = SolverConfig {
        grid_size: 201,
        t_max: Some(5.0 * prize),
        ..SolverConfig::default()
    };
    let report = solve_woa_fp(prize, &config)?;
    println!(
        "converged {} after {} rounds, exploitability {:.2e}",
        report.converged, report.iterations, report.exploitability
    );

    let strategy = &report.strategies.as_ref().unwrap()["p1"];
    let cdf = strategy.cdf();
    println!("\n{:>5} {:>9} {:>9}", "t", "F_grid", "F_exact");
    for k in (0..strategy.grid().len()).step_by(20) {
        let t = strategy.grid()[k];
        println!("{t:>5.2} {:>9.4} {:>9.4}", cdf[k], woa_cdf(prize, t)?);
    }
    println!("mean quitting time {:.4} (continuous: {prize})", strategy.mean());

    let draws = woa_sample(prize, 10_000, 7)?;
    let median = {
        let mut d = draws.clone();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    };
    println!("\n10000 seeded draws: median {median:.4}, exact {:.4}", woa_quantile(prize, 0.5)?);
    Ok(())
}
