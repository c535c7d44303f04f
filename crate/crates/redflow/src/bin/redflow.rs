//! Command-line entry point: run one actor against a scenario or benchmark
//! several, with seeded, byte-reproducible artifacts.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use redflow::agents::brute::brute_force_default;
use redflow::agents::expert::{expert_flow, ExpertPlaybook};
use redflow::agents::{train_and_evaluate, ActorRun, TrainingConfig};
use redflow::graph::{AttackGraph, BenchReport, ReportRow};
use redflow::{Environment, Scenario};

#[derive(Parser)]
#[command(
    name = "redflow",
    version,
    about = "Exploit-flow experiments over a simulated network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single actor and write report.json, graph.dot and (for the
    /// agent) qtable.json.
    Run(RunArgs),
    /// Run several actors on one scenario and emit the comparison report.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Bundled scenario name (ur3_ctf, toy2) or path to a scenario file.
    #[arg(long, default_value = "ur3_ctf")]
    scenario: String,

    /// RNG seed for training.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Total training steps.
    #[arg(long, default_value_t = 1000)]
    rollouts: u32,

    /// Steps per episode.
    #[arg(long, default_value_t = 10)]
    episode: u32,

    /// Learning rate.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Discount factor.
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,

    /// Exploration factor.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Output directory; defaults to runs/run-<timestamp>-seed<seed>.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Which actor to run.
    #[arg(long, value_enum)]
    actor: Actor,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Actors to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Actor::Expert, Actor::Agent, Actor::Brute])]
    actors: Vec<Actor>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Actor {
    Expert,
    Agent,
    Brute,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Box<dyn std::error::Error>> {
    let env = load_env(&args.common)?;
    let out_dir = prepare_out_dir(&args.common)?;

    let (run, qtable_json) = execute_actor(&env, args.actor, &args.common)?;

    let graph = AttackGraph::from_history(&run.history, &env.encoding_params())?;
    fs::write(out_dir.join("graph.dot"), graph.export_dot())?;
    if let Some(json) = qtable_json {
        fs::write(out_dir.join("qtable.json"), json)?;
    }
    let report = BenchReport::new(vec![row(&run)]);
    fs::write(out_dir.join("report.json"), report.to_json()?)?;

    println!("{} cumulative reward: {}", run.actor, run.cumulative_reward);
    println!("artifacts written to {}", out_dir.display());
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Box<dyn std::error::Error>> {
    if args.actors.is_empty() {
        return Err("bench needs at least one actor".into());
    }
    let env = load_env(&args.common)?;
    let out_dir = prepare_out_dir(&args.common)?;

    let mut rows = Vec::new();
    for &actor in &args.actors {
        let (run, qtable_json) = execute_actor(&env, actor, &args.common)?;
        let graph = AttackGraph::from_history(&run.history, &env.encoding_params())?;
        fs::write(
            out_dir.join(format!("{}.dot", run.actor)),
            graph.export_dot(),
        )?;
        if let Some(json) = qtable_json {
            fs::write(out_dir.join("qtable.json"), json)?;
        }
        println!("{} cumulative reward: {}", run.actor, run.cumulative_reward);
        rows.push(row(&run));
    }

    let report = BenchReport::new(rows);
    fs::write(out_dir.join("report.json"), report.to_json()?)?;
    print!("{}", report.to_table());
    println!("artifacts written to {}", out_dir.display());
    Ok(())
}

fn row(run: &ActorRun) -> ReportRow {
    ReportRow {
        actor: run.actor.clone(),
        cumulative_reward: run.cumulative_reward,
        steps: run.history.len(),
    }
}

fn execute_actor(
    env: &Environment,
    actor: Actor,
    common: &CommonArgs,
) -> Result<(ActorRun, Option<String>), Box<dyn std::error::Error>> {
    match actor {
        Actor::Expert => Ok((expert_flow(env, &ExpertPlaybook::default())?, None)),
        Actor::Brute => Ok((brute_force_default(env)?, None)),
        Actor::Agent => {
            let config = TrainingConfig {
                rollouts: common.rollouts,
                episode: common.episode,
                eval: false,
            };
            let (run, model) = train_and_evaluate(
                env,
                common.seed,
                common.alpha,
                common.gamma,
                common.epsilon,
                &config,
            )?;
            Ok((run, Some(model.to_json()?)))
        }
    }
}

fn load_env(common: &CommonArgs) -> Result<Environment, Box<dyn std::error::Error>> {
    Ok(Environment::new(Scenario::resolve(&common.scenario)?))
}

fn prepare_out_dir(common: &CommonArgs) -> Result<PathBuf, Box<dyn std::error::Error>> {
    let dir = match &common.out {
        Some(dir) => dir.clone(),
        None => {
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs();
            PathBuf::from("runs").join(format!("run-{stamp}-seed{}", common.seed))
        }
    };
    fs::create_dir_all(&dir)?;
    Ok(dir)
}
