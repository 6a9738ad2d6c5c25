//! The `ccag` command line: argument parsing, subcommand dispatch, JSON
//! reports and exit codes.
//!
//! | code | meaning |
//! |-----:|---------|
//! | 0 | success |
//! | 1 | a solver did not converge; the report is still printed |
//! | 2 | input file missing or unreadable |
//! | 3 | input file malformed (schema error, with line and field) |
//! | 4 | input violates a model invariant |
//! | 64 | unknown subcommand, bad or conflicting flags, unknown selector |

mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use crate::casestudy::{
    counterfactual_run, figure1_csv, figure2_csv, figure3_csv, run_case_study, two_stage_decision,
    CaseStudyManifest, CounterfactualSpec, CounterfactualTarget, EnduranceRule, Selector,
};
use crate::coopgame::{core_check, shapley_value, EnduranceKind};
use crate::equilibrium::{
    solve_mixed_fp, solve_pure_br, solve_two_layer, solve_woa_fp, woa_cdf, woa_sample,
    EquilibriumReport, ReportKind, SolverConfig,
};
use crate::error::Error;
use crate::model::{intra_shares, win_probabilities, EffortProfile, PayoffMode, Scenario};

pub use files::{parse_scenario, GameFile, ParsedScenario, ScenarioFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_FILE_NOT_FOUND: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn schema(path: &Path, err: toml::de::Error) -> Self {
        Self {
            code: EXIT_SCHEMA,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Io { .. } => EXIT_FILE_NOT_FOUND,
            Error::InvalidConfig(_) | Error::PriceData { .. } => EXIT_SCHEMA,
            Error::UnknownSelector(_) => EXIT_USAGE,
            _ => EXIT_INVARIANT,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ccag", version, about = "Compound coalition-attrition game solver")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffArg {
    Expected,
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnduranceArg {
    WeightedSum,
    Variance,
    WeakestLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Contest,
    WarOfAttrition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Reward,
    CostCoeff,
    Effectiveness,
    Resilience,
}

/// Flags accepted by every subcommand; they override values from input files.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Effort grid points.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub payoff: Option<PayoffArg>,
    #[arg(long, global = true, value_enum)]
    pub endurance: Option<EnduranceArg>,
    /// Variance penalty of the `variance` endurance index.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Directory for CSV series files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pure equilibrium of each coalition's internal contest.
    Solve {
        scenario: PathBuf,
        /// Solve only this coalition.
        #[arg(long)]
        coalition: Option<String>,
    },
    /// Mixed equilibrium by fictitious play on an effort grid.
    Mixed {
        scenario: Option<PathBuf>,
        #[arg(long)]
        coalition: Option<String>,
        #[arg(long, value_enum, default_value = "contest")]
        game: GameArg,
        /// Prize of the war of attrition.
        #[arg(long, conflicts_with = "scenario")]
        prize: Option<f64>,
    },
    /// Draws from the exponential war-of-attrition equilibrium.
    Woa {
        #[arg(long)]
        prize: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Joint equilibrium of the inter- and intra-coalition contests.
    TwoLayer { scenario: PathBuf },
    /// Exact Shapley value of a characteristic game file.
    Shapley { game: PathBuf },
    /// Checks whether an allocation lies in the core.
    Core {
        game: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        allocation: Vec<f64>,
    },
    /// Market case study from a manifest of price files.
    Casestudy { manifest: PathBuf },
    /// Re-solves after scaling a reward, cost, effectiveness or resilience.
    Counterfactual {
        /// Scenario file, or a case-study manifest with `--case-study`.
        input: PathBuf,
        #[arg(long)]
        case_study: bool,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// `all` or comma-separated coalition/player ids.
        #[arg(long, default_value = "all")]
        select: String,
        #[arg(long)]
        multiplier: f64,
    },
}

/// Echo of the effective run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub payoff: PayoffMode,
    pub endurance: EnduranceRule,
}

/// Everything a subcommand prints to stdout.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub config: RunConfig,
    /// Deterministic for fixed inputs and seed.
    pub results: Value,
    pub warnings: Vec<String>,
    /// Seconds.
    pub wall_time: f64,
}

struct Outcome {
    config: RunConfig,
    results: Value,
    warnings: Vec<String>,
    converged: bool,
}

/// Parses `args` (program name first), runs the subcommand, writes the
/// JSON report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let started = Instant::now();
    match dispatch(&cli) {
        Ok(outcome) => {
            let report = RunReport {
                command: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
                config: outcome.config,
                results: outcome.results,
                warnings: outcome.warnings,
                wall_time: started.elapsed().as_secs_f64(),
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if writeln!(out, "{text}").is_err() {
                return EXIT_FILE_NOT_FOUND;
            }
            if outcome.converged {
                EXIT_OK
            } else {
                let _ = writeln!(err, "warning: solver did not converge");
                EXIT_NOT_CONVERGED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn solver_config(base: SolverConfig, g: &GlobalArgs) -> Result<SolverConfig, CliError> {
    let mut c = base;
    if let Some(v) = g.seed {
        c.seed = v;
    }
    if let Some(v) = g.tol {
        c.tol = v;
    }
    if let Some(v) = g.max_iter {
        c.max_iter = v;
    }
    if let Some(v) = g.grid {
        c.grid_size = v;
    }
    if let Some(v) = g.t_max {
        c.t_max = Some(v);
    }
    c.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(c)
}

fn payoff_mode(file: Option<PayoffMode>, g: &GlobalArgs) -> PayoffMode {
    match g.payoff {
        Some(PayoffArg::Expected) => PayoffMode::Expected,
        Some(PayoffArg::Conditional) => PayoffMode::Conditional,
        None => file.unwrap_or_default(),
    }
}

fn endurance_rule(base: EnduranceRule, g: &GlobalArgs, warnings: &mut Vec<String>) -> Result<EnduranceRule, CliError> {
    let mut rule = base;
    if let Some(kind) = g.endurance {
        if g.gamma.is_some() && kind != EnduranceArg::Variance {
            return Err(CliError::usage("--gamma only applies to --endurance variance"));
        }
        rule.kind = match kind {
            EnduranceArg::WeightedSum => EnduranceKind::WeightedSum,
            EnduranceArg::Variance => EnduranceKind::VariancePenalized,
            EnduranceArg::WeakestLink => EnduranceKind::WeakestLink,
        };
    }
    if let Some(gamma) = g.gamma {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(CliError::usage(format!("--gamma must be nonnegative, got {gamma}")));
        }
        if rule.kind != EnduranceKind::VariancePenalized {
            warnings.push("--gamma has no effect on the selected endurance index".into());
        }
        rule.gamma = gamma;
    }
    Ok(rule)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), contents))
        .map_err(|source| {
            Error::Io {
                path: dir.join(name),
                source,
            }
            .into()
        })
}

fn cycle_warnings<'a>(reports: impl IntoIterator<Item = (&'a str, &'a EquilibriumReport)>) -> Vec<String> {
    reports
        .into_iter()
        .filter(|(_, r)| r.kind == ReportKind::PureCycleDetected)
        .map(|(id, r)| format!("coalition `{id}`: best-response cycle detected after {} iterations", r.iterations))
        .collect()
}

/// Scenario file plus global overrides.
struct Loaded {
    parsed: ParsedScenario,
    config: RunConfig,
    warnings: Vec<String>,
}

fn load(path: &Path, g: &GlobalArgs) -> Result<Loaded, CliError> {
    let parsed = parse_scenario(path)?;
    let mut warnings = Vec::new();
    let config = RunConfig {
        solver: solver_config(parsed.solver.clone(), g)?,
        payoff: payoff_mode(parsed.payoff, g),
        endurance: endurance_rule(parsed.endurance.clone(), g, &mut warnings)?,
    };
    Ok(Loaded {
        parsed,
        config,
        warnings,
    })
}

fn selected<'a>(scenario: &'a Scenario, only: &Option<String>) -> Result<Vec<&'a str>, CliError> {
    match only {
        Some(id) => Ok(vec![scenario.coalition(id)?.id().as_str()]),
        None => Ok(scenario.coalitions().iter().map(|c| c.id().as_str()).collect()),
    }
}

fn no_input_config(g: &GlobalArgs) -> Result<(RunConfig, Vec<String>), CliError> {
    let mut warnings = Vec::new();
    let config = RunConfig {
        solver: solver_config(SolverConfig::default(), g)?,
        payoff: payoff_mode(None, g),
        endurance: endurance_rule(EnduranceRule::default(), g, &mut warnings)?,
    };
    Ok((config, warnings))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { scenario, coalition } => {
            let Loaded { parsed, config, mut warnings } = load(scenario, g)?;
            let mut reports = IndexMap::new();
            for id in selected(&parsed.scenario, coalition)? {
                reports.insert(id.to_owned(), solve_pure_br(&parsed.scenario, id, &config.solver)?);
            }
            warnings.extend(cycle_warnings(reports.iter().map(|(k, v)| (k.as_str(), v))));
            Ok(Outcome {
                converged: reports.values().all(|r| r.converged),
                results: json!({ "coalitions": reports }),
                config,
                warnings,
            })
        }
        Command::Mixed {
            scenario,
            coalition,
            game,
            prize,
        } => match (game, scenario) {
            (GameArg::WarOfAttrition, None) => {
                let (config, warnings) = no_input_config(g)?;
                if coalition.is_some() {
                    return Err(CliError::usage("--coalition does not apply to the war of attrition"));
                }
                let prize = prize.ok_or_else(|| CliError::usage("--game war-of-attrition needs --prize"))?;
                let report = solve_woa_fp(prize, &config.solver)?;
                let strategies = report.strategies.as_ref().expect("mixed report has strategies");
                let mut sup = 0.0f64;
                for s in strategies.values() {
                    for (t, f) in s.grid().iter().zip(s.cdf()) {
                        sup = sup.max((f - woa_cdf(prize, *t)?).abs());
                    }
                }
                Ok(Outcome {
                    converged: report.converged,
                    results: json!({ "game": "war-of-attrition", "prize": prize, "cdf_sup_distance": sup, "report": report }),
                    config,
                    warnings,
                })
            }
            (GameArg::WarOfAttrition, Some(_)) => Err(CliError::usage(
                "--game war-of-attrition takes --prize, not a scenario file",
            )),
            (GameArg::Contest, path) => {
                if prize.is_some() {
                    return Err(CliError::usage("--prize only applies to --game war-of-attrition"));
                }
                let path = path.as_ref().ok_or_else(|| CliError::usage("mixed contest needs a scenario file"))?;
                let Loaded { parsed, config, warnings } = load(path, g)?;
                let mut reports = IndexMap::new();
                for id in selected(&parsed.scenario, coalition)? {
                    reports.insert(id.to_owned(), solve_mixed_fp(&parsed.scenario, id, &config.solver)?);
                }
                Ok(Outcome {
                    converged: reports.values().all(|r| r.converged),
                    results: json!({ "game": "contest", "coalitions": reports }),
                    config,
                    warnings,
                })
            }
        },
        Command::Woa { prize, samples } => {
            let (config, warnings) = no_input_config(g)?;
            let draws = woa_sample(*prize, *samples, config.solver.seed)?;
            if let Some(dir) = &g.out_dir {
                let mut text = String::from("t\n");
                for t in &draws {
                    text.push_str(&format!("{t}\n"));
                }
                write_file(dir, "woa_samples.csv", &text)?;
            }
            let mean = if draws.is_empty() { 0.0 } else { draws.iter().sum::<f64>() / draws.len() as f64 };
            Ok(Outcome {
                converged: true,
                results: json!({ "prize": prize, "seed": config.solver.seed, "count": draws.len(), "mean": mean, "samples": draws }),
                config,
                warnings,
            })
        }
        Command::TwoLayer { scenario } => {
            let Loaded { parsed, config, mut warnings } = load(scenario, g)?;
            let reports = solve_two_layer(&parsed.scenario, &config.solver, config.payoff)?;
            warnings.extend(cycle_warnings(reports.iter().map(|(k, v)| (k.as_str(), v))));
            let mut efforts = EffortProfile::default();
            for r in reports.values() {
                for (p, t) in r.efforts.iter().flat_map(|e| e.iter()) {
                    efforts.set(p.clone(), t)?;
                }
            }
            let mut results = json!({ "payoff": config.payoff, "coalitions": reports, "efforts": efforts });
            match win_probabilities(&efforts, &parsed.scenario) {
                Ok(p) => {
                    results["win_probabilities"] = to_value(&p);
                    let shares: IndexMap<_, _> = parsed
                        .scenario
                        .coalitions()
                        .iter()
                        .filter_map(|c| intra_shares(&efforts, c).ok().map(|s| (c.id().clone(), s)))
                        .collect();
                    results["shares"] = to_value(&shares);
                    let decision = two_stage_decision(&parsed.scenario, &efforts, &config.endurance)?;
                    results["endurance"] = to_value(&decision.endurance);
                    results["stage_one_choice"] = to_value(&decision.chosen);
                }
                Err(Error::DegenerateScenario) => {
                    warnings.push("every solved effort is zero; win probabilities are undefined".into())
                }
                Err(e) => return Err(e.into()),
            }
            Ok(Outcome {
                converged: reports.values().all(|r| r.converged),
                results,
                config,
                warnings,
            })
        }
        Command::Shapley { game } => {
            let (config, warnings) = no_input_config(g)?;
            let file: GameFile = files::read_toml(game)?;
            let phi = shapley_value(&file.to_game()?)?;
            let named: IndexMap<&str, f64> = file.players.iter().map(String::as_str).zip(phi.iter().copied()).collect();
            Ok(Outcome {
                converged: true,
                results: json!({ "players": file.players, "shapley": named }),
                config,
                warnings,
            })
        }
        Command::Core { game, allocation } => {
            let (config, warnings) = no_input_config(g)?;
            let file: GameFile = files::read_toml(game)?;
            let check = core_check(&file.to_game()?, allocation)?;
            let violator: Option<Vec<&str>> = check
                .worst_violating_subset
                .as_ref()
                .map(|s| s.iter().map(|&i| file.players[i].as_str()).collect());
            Ok(Outcome {
                converged: true,
                results: json!({
                    "players": file.players,
                    "allocation": allocation,
                    "in_core": check.in_core,
                    "efficient": check.efficient,
                    "efficiency_gap": check.efficiency_gap,
                    "worst_violating_subset": violator,
                    "worst_violation": check.worst_violation,
                }),
                config,
                warnings,
            })
        }
        Command::Casestudy { manifest } => {
            let (mut m, base) = load_manifest(manifest)?;
            let mut warnings = Vec::new();
            let config = RunConfig {
                solver: solver_config(SolverConfig::default(), g)?,
                payoff: payoff_mode(None, g),
                endurance: endurance_rule(m.endurance.clone(), g, &mut warnings)?,
            };
            m.endurance = config.endurance.clone();
            let prices = m.load_prices(&base)?;
            let result = run_case_study(&m, &prices)?;
            for p in &result.built.clamped {
                warnings.push(format!("full window: resilience of `{p}` clamped to the floor"));
            }
            for y in &result.yearly {
                for p in &y.clamped {
                    warnings.push(format!("{}: resilience of `{p}` clamped to the floor", y.year));
                }
            }
            if let Some(dir) = &g.out_dir {
                write_file(dir, "figure1_sharpe.csv", &figure1_csv(&result))?;
                write_file(dir, "figure2_endurance.csv", &figure2_csv(&result))?;
                write_file(dir, "figure3_shares.csv", &figure3_csv(&result))?;
            }
            Ok(Outcome {
                converged: true,
                results: to_value(&result),
                config,
                warnings,
            })
        }
        Command::Counterfactual {
            input,
            case_study,
            target,
            select,
            multiplier,
        } => {
            let target = match target {
                TargetArg::Reward => CounterfactualTarget::Reward,
                TargetArg::CostCoeff => CounterfactualTarget::CostCoeff,
                TargetArg::Effectiveness => CounterfactualTarget::Effectiveness,
                TargetArg::Resilience => CounterfactualTarget::Resilience,
            };
            let selector: Selector = select.parse()?;
            let spec = CounterfactualSpec::new(target, selector, *multiplier)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let mut warnings = Vec::new();
            let (scenario, profile, config) = if *case_study {
                let (m, base) = load_manifest(input)?;
                let config = RunConfig {
                    solver: solver_config(SolverConfig::default(), g)?,
                    payoff: payoff_mode(None, g),
                    endurance: endurance_rule(m.endurance.clone(), g, &mut warnings)?,
                };
                let result = run_case_study(&m, &m.load_prices(&base)?)?;
                (result.built.scenario, result.built.profile, config)
            } else {
                let loaded = load(input, g)?;
                warnings.extend(loaded.warnings);
                let profile = match loaded.parsed.efforts {
                    Some(p) => p,
                    None => {
                        warnings.push("no observed efforts in the scenario; using the baseline equilibrium".into());
                        let reports = solve_two_layer(&loaded.parsed.scenario, &loaded.config.solver, loaded.config.payoff)?;
                        let mut e = EffortProfile::default();
                        for r in reports.values() {
                            for (p, t) in r.efforts.iter().flat_map(|e| e.iter()) {
                                e.set(p.clone(), t)?;
                            }
                        }
                        e
                    }
                };
                (loaded.parsed.scenario, profile, loaded.config)
            };
            let report = counterfactual_run(&scenario, &profile, &spec, &config.endurance, &config.solver, config.payoff)?;
            Ok(Outcome {
                converged: report.baseline.solved.converged && report.perturbed.solved.converged,
                results: to_value(&report),
                config,
                warnings,
            })
        }
    }
}

fn load_manifest(path: &Path) -> Result<(CaseStudyManifest, PathBuf), CliError> {
    let m: CaseStudyManifest = files::read_toml(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((m, base))
}
