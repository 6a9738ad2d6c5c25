//! Shapley value, core membership and the three coalition endurance indices.
//!
//! ```text
//! cargo run --example cooperative_baselines
//! ```

use ccag::coopgame::{core_check, endurance_index, shapley_value, CharacteristicGame, EnduranceSpec};

fn main() -> ccag::Result<()> {
    let worked = CharacteristicGame::new(2, vec![0.0, 1.0, 2.0, 4.0])?;
    let phi = shapley_value(&worked)?;
    println!("v(1)=1, v(2)=2, v(12)=4: Shapley {phi:?}, in core {}", core_check(&worked, &phi)?.in_core);

    // glove game: player 0 holds a left glove, players 1 and 2 right gloves
    let glove = CharacteristicGame::from_fn(3, |s| if s & 1 == 1 && s & 6 != 0 { 1.0 } else { 0.0 })?;
    let phi = shapley_value(&glove)?;
    println!("glove game Shapley {:?}", phi.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    let check = core_check(&glove, &phi)?;
    println!(
        "  Shapley in core: {}, worst blocking subset {:?} by {:.4}",
        check.in_core, check.worst_violating_subset, check.worst_violation
    );
    println!("  (1, 0, 0) in core: {}", core_check(&glove, &[1.0, 0.0, 0.0])?.in_core);

    let crypto = [0.0685, 0.0494, 0.0803];
    let traditional = [0.1007, 0.0435, 0.0234];
    let a = [1.0, 1.0, 1.0];
    let specs = [
        ("weighted sum", EnduranceSpec::equal_weights(3)?),
        ("variance, γ = 0", EnduranceSpec::variance_penalized(0.0)?),
        ("variance, γ = 500", EnduranceSpec::variance_penalized(500.0)?),
        ("weakest link", EnduranceSpec::weakest_link()),
    ];
    println!("\n{:<18} {:>9} {:>12}", "index", "crypto", "traditional");
    for (name, spec) in &specs {
        println!(
            "{name:<18} {:>9.6} {:>12.6}",
            endurance_index(spec, &crypto, Some(&a))?,
            endurance_index(spec, &traditional, Some(&a))?
        );
    }
    Ok(())
}
