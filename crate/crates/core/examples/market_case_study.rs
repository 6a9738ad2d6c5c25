//! The bundled six-asset market case study: Sharpe resilience, the two-stage
//! market/asset decision and yearly intra-coalition shares.
//!
//! ```text
//! cargo run --example market_case_study [path/to/casestudy.toml]
//! ```

use std::path::PathBuf;

use ccag::casestudy::{run_case_study, CaseStudyManifest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/casestudy.toml"));
    let manifest: CaseStudyManifest = toml::from_str(&std::fs::read_to_string(&path)?)?;
    let prices = manifest.load_prices(path.parent().unwrap())?;
    let result = run_case_study(&manifest, &prices)?;

    println!("{:<10} {:>12} {:>10} {:>8}", "asset", "mean return", "volatility", "Sharpe");
    for asset in &result.ranking {
        let e = result.estimates.iter().find(|e| &e.asset == asset).unwrap();
        println!("{asset:<10} {:>12.4} {:>10.4} {:>8.4}", e.stats.mean, e.stats.std, e.sharpe);
    }

    println!();
    for (id, v) in &result.decision.endurance {
        println!("endurance {id:<12} {v:.6}");
    }
    println!("chosen market: {}", result.decision.chosen);
    for (asset, s) in &result.decision.shares {
        println!("  {asset:<10} share {s:.4}");
    }

    println!("\nyearly shares inside {}:", result.decision.chosen);
    for y in &result.yearly {
        let row: Vec<String> = y.shares[&result.decision.chosen]
            .iter()
            .map(|(a, s)| format!("{a} {s:.3}"))
            .collect();
        println!("  {}: {}", y.year, row.join(", "));
    }
    Ok(())
}
