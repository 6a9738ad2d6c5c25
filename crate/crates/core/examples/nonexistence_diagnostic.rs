//! Share-minus-linear-cost contest: the symmetric profile (0.5, 0.5) is not an
//! equilibrium because either player gains by cutting effort to √0.5 − 0.5.
//!
//! ```text
//! cargo run --example nonexistence_diagnostic
//! ```

use ccag::equilibrium::{best_response, verify_pure_ne, SolverConfig};
use ccag::model::{payoff, Coalition, CostKind, EffortProfile, PayoffMode, PlayerParams, Scenario};

fn main() -> ccag::Result<()> {
    let p = |id| PlayerParams::new(id, 1.0, 1.0, CostKind::Linear);
    let scenario = Scenario::single(Coalition::new("k", vec![p("p1")?, p("p2")?], 1.0)?);
    let coalition = &scenario.coalitions()[0];
    let config = SolverConfig::default();

    for t in [0.1, 0.25, 0.5, 0.75] {
        let profile = EffortProfile::for_scenario(&scenario, [("p1", t), ("p2", t)])?;
        let gain = verify_pure_ne(&profile, &scenario, "k", PayoffMode::Conditional, &config)?;
        let reply = best_response(coalition.member("p1")?, t, 1.0, 2.0, 1e-12);
        println!(
            "symmetric t = {t:<5} payoff {:+.6}  best reply {reply:.6}  deviation gain {gain:.6}",
            payoff(&profile, coalition, "p1")?
        );
    }
    println!("closed-form gain at 0.5: {:.6}", 1.5 - 2f64.sqrt());

    // every effort at zero leaves the shares undefined
    let zero = EffortProfile::uniform(&scenario, 0.0)?;
    match payoff(&zero, coalition, "p1") {
        Err(e) => println!("all-zero profile: {e}"),
        Ok(v) => println!("all-zero profile: payoff {v}"),
    }
    Ok(())
}
