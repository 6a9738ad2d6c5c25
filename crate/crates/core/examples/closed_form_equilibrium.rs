//! Symmetric intra-coalition contests against the closed form
//! `t* = √(R(n−1) / (2cn²))`.
//!
//! ```text
//! cargo run --example closed_form_equilibrium
//! ```

use ccag::equilibrium::{foc_residuals, solve_pure_br, SolverConfig};
use ccag::model::{intra_shares, Coalition, PlayerParams, Scenario};

fn main() -> ccag::Result<()> {
    let config = SolverConfig::default();
    println!("{:>2} {:>5} {:>4}  {:>12} {:>12} {:>9} {:>6}", "n", "R", "c", "solved", "closed form", "|FOC|", "iters");
    for n in [2, 3, 5, 10] {
        for (reward, c) in [(1.0, 1.0), (10.0, 0.5), (1.0, 2.0)] {
            let members = (0..n)
                .map(|i| PlayerParams::quadratic(format!("p{i}"), 1.0, c))
                .collect::<ccag::Result<Vec<_>>>()?;
            let scenario = Scenario::single(Coalition::new("k", members, reward)?);
            let report = solve_pure_br(&scenario, "k", &config)?;
            let efforts = report.efforts.expect("pure report carries efforts");
            let exact = (reward * (n as f64 - 1.0) / (2.0 * c * (n * n) as f64)).sqrt();
            let foc = foc_residuals(&efforts, &scenario.coalitions()[0])?
                .values()
                .fold(0.0f64, |m, r| m.max(r.abs()));
            println!(
                "{n:>2} {reward:>5} {c:>4}  {:>12.9} {exact:>12.9} {foc:>9.1e} {:>6}",
                efforts.get("p0")?,
                report.iterations
            );
        }
    }

    // with two players the efforts match whatever the effectiveness; only the shares differ
    let members = vec![
        PlayerParams::quadratic("strong", 2.0, 1.0)?,
        PlayerParams::quadratic("weak", 1.0, 1.0)?,
    ];
    let scenario = Scenario::single(Coalition::new("k", members, 1.0)?);
    let efforts = solve_pure_br(&scenario, "k", &config)?.efforts.unwrap();
    let shares = intra_shares(&efforts, &scenario.coalitions()[0])?;
    println!();
    for id in ["strong", "weak"] {
        println!("{id}: effort {:.6}, share {:.4}", efforts.get(id)?, shares[id]);
    }
    Ok(())
}
