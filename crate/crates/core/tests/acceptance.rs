//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ccag::casestudy::{
    build_scenario, sharpe_resilience, two_stage_decision, yearly_share_series, BuildOptions,
    CaseStudyManifest, EnduranceRule, ResilienceEstimate, ReturnStats,
};
use ccag::coopgame::{shapley_value, CharacteristicGame};
use ccag::equilibrium::{solve_woa_fp, verify_pure_ne, woa_cdf, MixedStrategy, SolverConfig};
use ccag::model::{Coalition, CostKind, EffortProfile, PayoffMode, PlayerParams, Scenario};
use chrono::{Datelike, NaiveDate};
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

/// Table 2 rows: asset, market, mean daily return, volatility, printed ratio.
const TABLE2: [(&str, &str, f64, f64, f64); 6] = [
    ("Brent", "traditional", 0.0093, 0.0919, 0.1007),
    ("Solana", "crypto", 0.0043, 0.0535, 0.0803),
    ("Bitcoin", "crypto", 0.0027, 0.0401, 0.0685),
    ("Ethereum", "crypto", 0.0013, 0.0264, 0.0494),
    ("Copper", "traditional", 0.0007, 0.0153, 0.0435),
    ("Gold", "traditional", 0.0002, 0.0096, 0.0234),
];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn closed_form_equilibria() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut worst_err = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut cases = 0;
    for n in [2usize, 3, 5] {
        for r in [1.0, 10.0] {
            for c in [0.5, 1.0, 2.0] {
                let mut text = String::new();
                for i in 0..n {
                    text += &format!("[[players]]\nid = \"p{i}\"\neffectiveness = 1.0\ncost_coeff = {c:?}\n\n");
                }
                let ids: Vec<String> = (0..n).map(|i| format!("\"p{i}\"")).collect();
                text += &format!("[[coalitions]]\nid = \"k\"\nmembers = [{}]\nreward = {r:?}\n", ids.join(", "));
                let path = dir.path().join(format!("sym_{n}_{r}_{c}.toml"));
                std::fs::write(&path, text).map_err(|e| e.to_string())?;

                let start = Instant::now();
                let mut out = Vec::new();
                let code = ccag::cli::run(["ccag", "solve", path.to_str().unwrap()], &mut out, &mut std::io::sink());
                let elapsed = start.elapsed();
                ensure(code == 0, format!("n={n} R={r} c={c}: exit {code}"))?;
                let report: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
                let oracle = (r * (n as f64 - 1.0) / (2.0 * c * (n * n) as f64)).sqrt();
                for i in 0..n {
                    let t = report["results"]["coalitions"]["k"]["efforts"][format!("p{i}")]
                        .as_f64()
                        .ok_or("effort missing from report")?;
                    worst_err = worst_err.max((t - oracle).abs());
                }
                slowest = slowest.max(elapsed);
                cases += 1;
            }
        }
    }
    ensure(worst_err <= 1e-6, format!("max |t - t*| = {worst_err:.3e}"))?;
    ensure(slowest < Duration::from_secs(1), format!("slowest case {slowest:?}"))?;
    Ok(format!("{cases} cases, max |t - t*| = {worst_err:.2e}, slowest {slowest:.2?}"))
}

/// Discretized war of attrition payoff to quitting at `grid[s]` against `grid[j]`.
fn woa_payoff(prize: f64, grid: &[f64], s: usize, j: usize) -> f64 {
    match s.cmp(&j) {
        std::cmp::Ordering::Greater => prize - grid[j],
        std::cmp::Ordering::Less => -grid[s],
        std::cmp::Ordering::Equal => prize / 2.0 - grid[s],
    }
}

fn direct_exploitability(prize: f64, me: &MixedStrategy, other: &MixedStrategy) -> f64 {
    let g = me.grid();
    let value = |s: usize| (0..g.len()).map(|j| other.probs()[j] * woa_payoff(prize, g, s, j)).sum::<f64>();
    let pure: Vec<f64> = (0..g.len()).map(value).collect();
    let best = pure.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let current: f64 = pure.iter().zip(me.probs()).map(|(u, p)| u * p).sum();
    best - current
}

fn war_of_attrition() -> Check {
    let config = SolverConfig {
        grid_size: 201,
        t_max: Some(5.0),
        ..SolverConfig::default()
    };
    let start = Instant::now();
    let report = solve_woa_fp(1.0, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let strategies: Vec<&MixedStrategy> = report.strategies.as_ref().ok_or("no strategies")?.values().collect();
    let mut sup = 0.0f64;
    for s in &strategies {
        for (t, f) in s.grid().iter().zip(s.cdf()) {
            let exact = 1.0 - (-t).exp();
            assert!((woa_cdf(1.0, *t).unwrap() - exact).abs() < 1e-12);
            sup = sup.max((f - exact).abs());
        }
    }
    let expl = direct_exploitability(1.0, strategies[0], strategies[1])
        .max(direct_exploitability(1.0, strategies[1], strategies[0]));
    ensure(sup <= 0.05, format!("CDF sup distance {sup:.4}"))?;
    ensure(expl <= 1e-3, format!("exploitability {expl:.3e}"))?;
    ensure(elapsed < Duration::from_secs(30), format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "sup |F - F*| = {sup:.4}, exploitability = {expl:.2e}, {} rounds, {elapsed:.2?}",
        report.iterations
    ))
}

fn table2_consistency() -> Check {
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for (asset, _, mean, std, printed) in TABLE2 {
        let ratio = sharpe_resilience(&ReturnStats { mean, std, count: 1 }).map_err(|e| e.to_string())?;
        worst = worst.max((ratio - printed).abs());
        ensure((ratio - printed).abs() <= 0.003, format!("{asset}: {ratio:.6} vs printed {printed}"))?;
        ratios.push((asset, ratio));
    }
    ratios.sort_by(|a, b| b.1.total_cmp(&a.1));
    let ranking: Vec<&str> = ratios.iter().map(|r| r.0).collect();
    let expected = ["Brent", "Solana", "Bitcoin", "Ethereum", "Copper", "Gold"];
    ensure(ranking == expected, format!("ranking {ranking:?}"))?;
    Ok(format!("max |mean/std - printed| = {worst:.6}, ranking {}", ranking.join(" > ")))
}

fn market_map() -> IndexMap<String, ccag::model::CoalitionId> {
    TABLE2.iter().map(|r| (r.0.to_string(), r.1.into())).collect()
}

fn stage_one_decision() -> Check {
    let window = (NaiveDate::from_ymd_opt(2018, 1, 1).unwrap(), NaiveDate::from_ymd_opt(2023, 12, 31).unwrap());
    let estimates: Vec<ResilienceEstimate> = TABLE2
        .iter()
        .map(|&(asset, _, mean, std, printed)| ResilienceEstimate {
            asset: asset.into(),
            sharpe: printed,
            stats: ReturnStats { mean, std, count: 1 },
            window,
        })
        .collect();
    let built = build_scenario(&estimates, &market_map(), &BuildOptions::default()).map_err(|e| e.to_string())?;
    let d = two_stage_decision(&built.scenario, &built.profile, &EnduranceRule::default()).map_err(|e| e.to_string())?;
    let mean = |market: &str| {
        let v: Vec<f64> = TABLE2.iter().filter(|r| r.1 == market).map(|r| r.4).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (crypto, trad) = (d.endurance["crypto"], d.endurance["traditional"]);
    ensure((crypto - mean("crypto")).abs() < 1e-12 && (crypto - 0.066067).abs() < 1e-6, format!("crypto {crypto}"))?;
    ensure((trad - mean("traditional")).abs() < 1e-12 && (trad - 0.055867).abs() < 1e-6, format!("traditional {trad}"))?;
    ensure(d.chosen.as_str() == "crypto", format!("chose {}", d.chosen))?;
    Ok(format!("crypto {crypto:.6} > traditional {trad:.6}, chose {}", d.chosen))
}

fn nonexistence_diagnostic() -> Check {
    let p = |id| PlayerParams::new(id, 1.0, 1.0, CostKind::Linear).unwrap();
    let s = Scenario::single(Coalition::new("k", vec![p("p1"), p("p2")], 1.0).unwrap());
    let e = EffortProfile::for_scenario(&s, [("p1", 0.5), ("p2", 0.5)]).unwrap();
    let gain = verify_pure_ne(&e, &s, "k", PayoffMode::Conditional, &SolverConfig::default()).map_err(|e| e.to_string())?;
    // best reply to 0.5 maximizes t/(t + 0.5) − t at t = √0.5 − 0.5; the baseline payoff is 0
    let t = 0.5f64.sqrt() - 0.5;
    let oracle = t / (t + 0.5) - t;
    ensure((gain - oracle).abs() <= 1e-4 && (gain - 0.085786).abs() <= 1e-4, format!("gain {gain:.7}"))?;
    Ok(format!("deviation gain {gain:.6} (oracle {oracle:.6})"))
}

/// Average marginal contribution over all orderings.
fn permutation_shapley(game: &CharacteristicGame) -> Vec<f64> {
    let n = game.players();
    let mut phi = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut count = 0.0;
    fn permute(k: usize, order: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == order.len() {
            visit(order);
            return;
        }
        for i in k..order.len() {
            order.swap(k, i);
            permute(k + 1, order, visit);
            order.swap(k, i);
        }
    }
    permute(0, &mut order, &mut |ord| {
        let mut mask = 0u32;
        for &i in ord {
            let before = game.value(mask).unwrap();
            mask |= 1 << i;
            phi[i] += game.value(mask).unwrap() - before;
        }
        count += 1.0;
    });
    phi.iter().map(|v| v / count).collect()
}

fn cooperative_baselines() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=8usize);
        let raw: Vec<f64> = (0..1u32 << n).map(|_| rng.random_range(-5.0..10.0)).collect();
        let game = CharacteristicGame::from_fn(n, |s| raw[s as usize]).unwrap();
        let phi = shapley_value(&game).map_err(|e| e.to_string())?;
        let grand = game.value((1 << n) - 1).unwrap();
        worst = worst.max((phi.iter().sum::<f64>() - grand).abs());
        for (a, b) in phi.iter().zip(permutation_shapley(&game)) {
            worst = worst.max((a - b).abs());
        }
        // players 0 and 1 made interchangeable
        let swap = |s: u32| (s & !3) | ((s & 1) << 1) | ((s >> 1) & 1);
        let sym = CharacteristicGame::from_fn(n, |s| (raw[s as usize] + raw[swap(s) as usize]) / 2.0).unwrap();
        let phi = shapley_value(&sym).map_err(|e| e.to_string())?;
        worst = worst.max((phi[0] - phi[1]).abs());
        // last player contributes nothing
        let last = 1u32 << (n - 1);
        let dummy = CharacteristicGame::from_fn(n, |s| {
            let t = s & !last;
            if t == 0 { 0.0 } else { raw[t as usize] }
        })
        .unwrap();
        worst = worst.max(shapley_value(&dummy).map_err(|e| e.to_string())?[n - 1].abs());
    }
    ensure(worst <= 1e-9, format!("axiom violation {worst:.3e}"))?;
    let worked = CharacteristicGame::new(2, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
    let phi = shapley_value(&worked).map_err(|e| e.to_string())?;
    ensure(phi == vec![1.5, 2.5], format!("worked example {phi:?}"))?;
    Ok(format!("100 games, max axiom error {worst:.1e}, worked example {phi:?}"))
}

fn property_suite() -> Check {
    const CASES: u32 = 200;
    let start = Instant::now();
    let checks = [
        common::share_normalization,
        common::win_probability_normalization,
        common::homogeneity,
        common::replicator_simplex,
        common::cost_monotonicity,
        common::seed_determinism,
    ];
    for check in checks {
        check(CASES)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), format!("runtime {elapsed:?}"))?;
    Ok(format!("{} properties x {CASES} trials = {} trials, {elapsed:.2?}", checks.len(), checks.len() as u32 * CASES))
}

fn figure3_shape() -> Check {
    let path = fixtures().join("casestudy.toml");
    let manifest: CaseStudyManifest =
        toml::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let prices = manifest.load_prices(&fixtures()).map_err(|e| e.to_string())?;
    let solana = prices.iter().find(|s| s.asset() == "Solana").ok_or("no Solana series")?;
    let entry = solana.first_date().ok_or("empty Solana series")?.year();
    ensure(entry > manifest.start_year, format!("Solana enters in {entry}, the first year"))?;
    let map = manifest.coalition_map().map_err(|e| e.to_string())?;
    let yearly = yearly_share_series(&prices, &manifest.years(), &map, manifest.returns, &manifest.build)
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for y in &yearly {
        let crypto = &y.shares["crypto"];
        let present = crypto.contains_key("Solana");
        ensure(present == (y.year >= entry), format!("{}: Solana present = {present}", y.year))?;
        for shares in y.shares.values() {
            worst = worst.max((shares.values().sum::<f64>() - 1.0).abs());
        }
    }
    ensure(worst <= 1e-12, format!("share sum off by {worst:.3e}"))?;
    Ok(format!(
        "{} years, Solana from {entry}, max |sum - 1| = {worst:.1e}",
        yearly.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("closed-form pure equilibrium", closed_form_equilibria),
        ("war-of-attrition fictitious play", war_of_attrition),
        ("Table 2 Sharpe ratios and ranking", table2_consistency),
        ("stage-one market choice", stage_one_decision),
        ("nonexistence deviation gain", nonexistence_diagnostic),
        ("Shapley axioms and worked example", cooperative_baselines),
        ("randomized property suite", property_suite),
        ("yearly share entry property", figure3_shape),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
