//! Randomized invariants shared by the property tests and the acceptance run.
#![allow(dead_code)]

use ccag::equilibrium::{replicator_step, solve_mixed_fp, solve_pure_br, woa_sample, SolverConfig};
use ccag::model::{intra_shares, win_probabilities, Coalition, EffortProfile, PlayerParams, Scenario};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Outcome = Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), TestCaseError> {
    prop_assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    Ok(())
}

/// Members as `(a, t)` pairs.
fn members(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.05f64..5.0, 0.001f64..10.0), 1..=max)
}

fn coalition(id: &str, m: &[(f64, f64)], reward: f64) -> Coalition {
    let players = m
        .iter()
        .enumerate()
        .map(|(i, &(a, _))| PlayerParams::quadratic(format!("{id}{i}"), a, 1.0).unwrap())
        .collect();
    Coalition::new(id, players, reward).unwrap()
}

fn scenario(groups: &[Vec<(f64, f64)>]) -> (Scenario, EffortProfile) {
    let coalitions: Vec<_> = groups
        .iter()
        .enumerate()
        .map(|(k, m)| coalition(&format!("c{k}_"), m, 1.0 + k as f64))
        .collect();
    let efforts = groups
        .iter()
        .enumerate()
        .flat_map(|(k, m)| m.iter().enumerate().map(move |(i, &(_, t))| (format!("c{k}_{i}"), t)));
    let s = Scenario::new(coalitions).unwrap();
    let e = EffortProfile::for_scenario(&s, efforts).unwrap();
    (s, e)
}

fn finish(name: &str, r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Outcome {
    r.map_err(|e| format!("{name}: {e}"))
}

pub fn share_normalization(cases: u32) -> Outcome {
    let r = runner(cases).run(&members(8), |m| {
        let (s, e) = scenario(&[m]);
        let shares = intra_shares(&e, &s.coalitions()[0]).unwrap();
        prop_assert!(shares.values().all(|v| (0.0..=1.0).contains(v)));
        close(shares.values().sum(), 1.0, 1e-12, "share sum")
    });
    finish("share normalization", r)
}

pub fn win_probability_normalization(cases: u32) -> Outcome {
    let r = runner(cases).run(&prop::collection::vec(members(4), 1..=5), |groups| {
        let (s, e) = scenario(&groups);
        let p = win_probabilities(&e, &s).unwrap();
        prop_assert!(p.values().all(|v| (0.0..=1.0).contains(v)));
        close(p.values().sum(), 1.0, 1e-12, "probability sum")
    });
    finish("win-probability normalization", r)
}

pub fn homogeneity(cases: u32) -> Outcome {
    let strat = (prop::collection::vec(members(4), 1..=4), 0.01f64..100.0, 0.01f64..100.0);
    let r = runner(cases).run(&strat, |(groups, kt, ka)| {
        let (s, e) = scenario(&groups);
        let scaled_t: Vec<Vec<(f64, f64)>> = groups.iter().map(|m| m.iter().map(|&(a, t)| (a, t * kt)).collect()).collect();
        let scaled_a: Vec<Vec<(f64, f64)>> = groups.iter().map(|m| m.iter().map(|&(a, t)| (a * ka, t)).collect()).collect();
        let p = win_probabilities(&e, &s).unwrap();
        for variant in [scaled_t, scaled_a] {
            let (s2, e2) = scenario(&variant);
            let p2 = win_probabilities(&e2, &s2).unwrap();
            for (x, y) in p.values().zip(p2.values()) {
                close(*x, *y, 1e-12, "win probability")?;
            }
            for (c, c2) in s.coalitions().iter().zip(s2.coalitions()) {
                let a = intra_shares(&e, c).unwrap();
                let b = intra_shares(&e2, c2).unwrap();
                for (x, y) in a.values().zip(b.values()) {
                    close(*x, *y, 1e-12, "share")?;
                }
            }
        }
        Ok(())
    });
    finish("homogeneity of degree zero", r)
}

pub fn replicator_simplex(cases: u32) -> Outcome {
    let strat = prop::collection::vec((0.0f64..1.0, -10.0f64..10.0), 1..=12)
        .prop_filter("some mass", |v| v.iter().map(|p| p.0).sum::<f64>() > 1e-3);
    let r = runner(cases).run(&(strat, 0.001f64..2.0), |(pairs, dt)| {
        let total: f64 = pairs.iter().map(|p| p.0).sum();
        let x: Vec<f64> = pairs.iter().map(|p| p.0 / total).collect();
        let f: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let out = replicator_step(&x, &f, dt).unwrap();
        prop_assert!(out.state.iter().all(|v| *v >= 0.0));
        close(out.state.iter().sum(), 1.0, 1e-12, "simplex sum")
    });
    finish("replicator simplex preservation", r)
}

pub fn cost_monotonicity(cases: u32) -> Outcome {
    let strat = (
        prop::collection::vec((0.2f64..3.0, 0.2f64..3.0), 2..=4),
        0.5f64..5.0,
        any::<prop::sample::Index>(),
        1.05f64..8.0,
    );
    let r = runner(cases).run(&strat, |(params, reward, who, m)| {
        let build = |bump: Option<usize>| {
            let players = params
                .iter()
                .enumerate()
                .map(|(i, &(a, c))| {
                    let c = if bump == Some(i) { c * m } else { c };
                    PlayerParams::quadratic(format!("p{i}"), a, c).unwrap()
                })
                .collect();
            Scenario::single(Coalition::new("k", players, reward).unwrap())
        };
        let i = who.index(params.len());
        let config = SolverConfig::default();
        let base = solve_pure_br(&build(None), "k", &config).unwrap();
        let bumped = solve_pure_br(&build(Some(i)), "k", &config).unwrap();
        prop_assert!(base.converged && bumped.converged);
        let id = format!("p{i}");
        let t0 = base.efforts.unwrap().get(&id).unwrap();
        let t1 = bumped.efforts.unwrap().get(&id).unwrap();
        prop_assert!(t1 <= t0 + 1e-8, "effort rose from {t0} to {t1} when cost rose by {m}");
        Ok(())
    });
    finish("cost monotonicity of solved efforts", r)
}

pub fn seed_determinism(cases: u32) -> Outcome {
    let strat = (any::<u64>(), 0.1f64..10.0, 1usize..200, prop::collection::vec(0.2f64..2.0, 4));
    let r = runner(cases).run(&strat, |(seed, prize, count, a)| {
        prop_assert_eq!(woa_sample(prize, count, seed).unwrap(), woa_sample(prize, count, seed).unwrap());
        let players = a
            .iter()
            .enumerate()
            .map(|(i, &a)| PlayerParams::quadratic(format!("p{i}"), a, 1.0).unwrap())
            .collect();
        let s = Scenario::single(Coalition::new("k", players, prize).unwrap());
        let config = SolverConfig {
            seed,
            grid_size: 6,
            max_iter: 4,
            mc_draws: 64,
            ..SolverConfig::default()
        };
        prop_assert_eq!(solve_mixed_fp(&s, "k", &config).unwrap(), solve_mixed_fp(&s, "k", &config).unwrap());
        Ok(())
    });
    finish("seed determinism", r)
}
