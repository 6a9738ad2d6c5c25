//! Counterfactual re-solves of the case-study market game.
//!
//! ```text
//! cargo run --release --example counterfactual
//! ```

use std::path::PathBuf;

use ccag::casestudy::{counterfactual_run, run_case_study, CaseStudyManifest, CounterfactualSpec, CounterfactualTarget};
use ccag::equilibrium::SolverConfig;
use ccag::model::PayoffMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/casestudy.toml");
    let manifest: CaseStudyManifest = toml::from_str(&std::fs::read_to_string(&path)?)?;
    let result = run_case_study(&manifest, &manifest.load_prices(path.parent().unwrap())?)?;
    let (scenario, profile) = (&result.built.scenario, &result.built.profile);

    let runs = [
        (CounterfactualTarget::Reward, "traditional", 10.0),
        (CounterfactualTarget::CostCoeff, "Bitcoin", 4.0),
        (CounterfactualTarget::Effectiveness, "all", 2.0),
        (CounterfactualTarget::Resilience, "traditional", 1.5),
    ];
    for (target, select, m) in runs {
        let spec = CounterfactualSpec::new(target, select.parse()?, m)?;
        let r = counterfactual_run(scenario, profile, &spec, &manifest.endurance, &SolverConfig::default(), PayoffMode::Expected)?;
        println!("{target:?} of {select} x{m}: winner changed {}", r.winner_changed);
        for (id, d) in &r.deltas.solved_power {
            println!("  solved power {id:<12} {:+.5}", d);
        }
        let biggest = r
            .deltas
            .solved_efforts
            .iter()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        println!("  largest effort shift: {} {:+.5}", biggest.0, biggest.1);
    }
    Ok(())
}
