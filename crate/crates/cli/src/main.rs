//! `samplus`: learn, sample, validate and evaluate stochastic action models.
//!
//! Exit codes: 0 ok, 2 usage or input error, 3 empty trajectory set,
//! 4 script failure while sampling, 5 validation failure.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use samplus_core::learner::{learn, render_learned, LearnError, LearnerConfig, Mode};
use samplus_core::model::Vocabulary;
use samplus_core::syntax::{parse_domain, parse_problem, SyntaxError};
use samplus_core::trajectory::{
    emit_trajectories, infer_vocabulary, parse_trajectories, sample, validate, Policy, SampleConfig, SampleError,
    TrajectorySet,
};
use samplus_core::{evaluate, Domain};

use manifest::{digest, InputDigest, RunManifest};

const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY: u8 = 3;
const EXIT_SCRIPT: u8 = 4;
const EXIT_INVALID: u8 = 5;

#[derive(Parser)]
#[command(name = "samplus", version, about = "Learn stochastic planning action models from trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a PPDDL model from trajectory files.
    Learn(LearnArgs),
    /// Generate trajectories by executing a ground-truth domain.
    Sample(SampleArgs),
    /// Check trajectories against a domain.
    Validate(ValidateArgs),
    /// Compare a learned domain with a ground-truth domain.
    Eval(EvalArgs),
}

#[derive(Args)]
struct LearnArgs {
    /// One or more `.traj` files, merged into one multiset.
    #[arg(long, num_args = 1.., required = true)]
    trajectories: Vec<PathBuf>,
    /// Confidence parameter, strictly between 0 and 1.
    #[arg(long)]
    delta: f64,
    /// `interval` (PPDDL-IP) or `point` (plain PPDDL).
    #[arg(long)]
    mode: Mode,
    /// Domain supplying the fluent order, action list and |F|, |A|.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Decimal places for emitted probabilities.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=30))]
    precision: u32,
    /// Override |F| in the never-observed point estimate.
    #[arg(long)]
    fluent_count: Option<usize>,
    /// Override |A| in the never-observed point estimate.
    #[arg(long)]
    action_count: Option<usize>,
    /// Output domain; the run manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    episodes: u64,
    #[arg(long)]
    seed: u64,
    /// `random` or `script:<a1,a2,...>`.
    #[arg(long, value_parser = parse_policy)]
    policy: Policy,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    /// End an episode as soon as the problem goal holds.
    #[arg(long)]
    stop_on_goal: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    trajectories: Vec<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    learned: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Do not fail when the learned model has actions the truth lacks.
    #[arg(long)]
    allow_extra: bool,
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(Policy::Random);
    }
    match s.split_once(':') {
        Some((kind, list)) if kind.eq_ignore_ascii_case("script") => {
            let names: Vec<String> =
                list.split(',').map(str::trim).filter(|a| !a.is_empty()).map(String::from).collect();
            if names.is_empty() {
                return Err("script policy needs at least one action".into());
            }
            Ok(Policy::Script(names))
        }
        _ => Err(format!("unknown policy `{s}` (expected `random` or `script:<a1,a2,...>`)")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SAMPLUS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Eval(a) => cmd_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("samplus: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    inputs.push(digest(path, &bytes));
    String::from_utf8(bytes).map_err(|_| Failure::usage(format!("{}: not valid UTF-8", path.display())))
}

fn located(path: &Path, e: SyntaxError) -> Failure {
    Failure::usage(format!("{}:{}", path.display(), e))
}

fn load_domain(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<Domain, Failure> {
    let text = read(path, inputs)?;
    parse_domain(&text).map_err(|e| located(path, e))
}

fn load_trajectories(
    paths: &[PathBuf],
    vocab: Option<&Arc<Vocabulary>>,
    inputs: &mut Vec<InputDigest>,
) -> Result<TrajectorySet, Failure> {
    let texts = paths.iter().map(|p| read(p, inputs)).collect::<Result<Vec<_>, _>>()?;
    let vocab = match vocab {
        Some(v) => v.clone(),
        None => {
            for (path, text) in paths.iter().zip(&texts) {
                infer_vocabulary(&[text]).map_err(|e| located(path, e))?;
            }
            let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
            Arc::new(infer_vocabulary(&refs).map_err(|e| Failure::usage(format!("trajectories: {e}")))?)
        }
    };
    let mut set = TrajectorySet::new();
    for (path, text) in paths.iter().zip(&texts) {
        let part = parse_trajectories(text, Some(&vocab)).map_err(|e| located(path, e))?;
        set.extend(part).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(set)
}

fn write_output(out: &Path, text: &str, manifest: &RunManifest) -> Outcome {
    std::fs::write(out, text).map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
    manifest.write(out).map_err(|e| Failure::usage(format!("{}: {e}", RunManifest::path_for(out).display())))
}

fn cmd_learn(args: LearnArgs) -> Outcome {
    let mut inputs = Vec::new();
    let cfg = LearnerConfig::new(args.delta, args.mode)
        .map_err(|e| Failure::usage(e.to_string()))?
        .with_counts(args.fluent_count, args.action_count);
    let domain = args.domain.as_deref().map(|p| load_domain(p, &mut inputs)).transpose()?;
    let set = load_trajectories(&args.trajectories, domain.as_ref().map(|d| &d.vocabulary), &mut inputs)?;
    if set.is_empty() {
        return Err(Failure::new(EXIT_EMPTY, "the trajectory set is empty"));
    }
    let model = learn(&set, &cfg, domain.as_ref()).map_err(|e| match e {
        LearnError::Empty => Failure::new(EXIT_EMPTY, e.to_string()),
        other => Failure::usage(other.to_string()),
    })?;
    if !model.unobserved_actions.is_empty() {
        eprintln!("samplus: never observed: {}", model.unobserved_actions.join(" "));
    }
    let mut manifest = RunManifest::new(inputs);
    manifest.delta = Some(args.delta);
    manifest.mode = Some(args.mode.to_string());
    write_output(&args.out, &render_learned(&model, args.precision), &manifest)
}

fn cmd_sample(args: SampleArgs) -> Outcome {
    let mut inputs = Vec::new();
    let domain = load_domain(&args.domain, &mut inputs)?;
    let problem_text = read(&args.problem, &mut inputs)?;
    let problem = parse_problem(&problem_text, &domain).map_err(|e| located(&args.problem, e))?;
    let cfg = SampleConfig::new(args.seed, args.episodes as usize, args.max_steps as usize, args.policy)
        .map_err(|e| Failure::usage(e.to_string()))?
        .stop_on_goal(args.stop_on_goal);
    let set = sample(&domain, &problem, &cfg).map_err(|e| match e {
        SampleError::ScriptPrecondition { .. } => Failure::new(EXIT_SCRIPT, e.to_string()),
        other => Failure::usage(other.to_string()),
    })?;
    let mut manifest = RunManifest::new(inputs);
    manifest.seed = Some(args.seed);
    write_output(&args.out, &emit_trajectories(&set), &manifest)
}

fn cmd_validate(args: ValidateArgs) -> Outcome {
    let mut inputs = Vec::new();
    let domain = load_domain(&args.domain, &mut inputs)?;
    let set = load_trajectories(&args.trajectories, Some(&domain.vocabulary), &mut inputs)?;
    let report = validate(&set, &domain).map_err(|e| Failure::usage(e.to_string()))?;
    for v in &report.violations {
        println!("{v}");
    }
    println!(
        "{} trajectories, {} triplets, {} violations",
        report.trajectories,
        report.triplets,
        report.violations.len()
    );
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_INVALID, ""))
    }
}

fn cmd_eval(args: EvalArgs) -> Outcome {
    let mut inputs = Vec::new();
    let learned = load_domain(&args.learned, &mut inputs)?;
    let truth = load_domain(&args.truth, &mut inputs)?;
    let report = evaluate(&learned, &truth).map_err(|e| Failure::usage(e.to_string()))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{report}");
    }
    if !report.extra_actions.is_empty() && !args.allow_extra {
        return Err(Failure::new(
            EXIT_INVALID,
            format!(
                "learned actions missing from the truth: {} (pass --allow-extra to accept)",
                report.extra_actions.join(" ")
            ),
        ));
    }
    Ok(())
}
