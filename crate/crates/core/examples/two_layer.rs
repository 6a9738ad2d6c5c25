//! The coupled inter- and intra-coalition contest loaded from a scenario
//! file, solved under both payoff readings.
//!
//! ```text
//! cargo run --example two_layer
//! ```

use std::path::Path;

use ccag::casestudy::two_stage_decision;
use ccag::equilibrium::solve_two_layer;
use ccag::model::{intra_shares, membership_payoffs, win_probabilities, EffortProfile, PayoffMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios/two_markets.toml");
    let parsed = ccag::cli::parse_scenario(&path).map_err(|e| e.message)?;
    let scenario = &parsed.scenario;

    for mode in [PayoffMode::Expected, PayoffMode::Conditional] {
        let reports = solve_two_layer(scenario, &parsed.solver, mode)?;
        let mut efforts = EffortProfile::default();
        for r in reports.values() {
            for (p, t) in r.efforts.iter().flat_map(|e| e.iter()) {
                efforts.set(p.clone(), t)?;
            }
        }
        println!("{mode:?} payoff");
        for (id, p) in win_probabilities(&efforts, scenario)? {
            let c = scenario.coalition(id.as_str())?;
            let shares = intra_shares(&efforts, c)?;
            let parts: Vec<String> = shares
                .iter()
                .map(|(p, s)| format!("{p} t={:.4} share={s:.3}", efforts.get(p.as_str()).unwrap()))
                .collect();
            println!("  {id}: P(win) = {p:.4}; {}", parts.join(", "));
        }
        let decision = two_stage_decision(scenario, &efforts, &parsed.endurance)?;
        println!("  highest endurance: {}", decision.chosen);
    }

    // where would btc rather be, holding everyone's observed effort fixed?
    let observed = parsed.efforts.as_ref().expect("fixture lists efforts");
    for (id, v) in membership_payoffs(observed, scenario, "btc", PayoffMode::Expected)? {
        println!("btc in {id}: expected payoff {v:+.5}");
    }
    Ok(())
}
