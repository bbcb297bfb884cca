//! Command-line front end. Exit codes: 0 success, 1 usage or domain error,
//! 2 step cap exhausted before an equilibrium.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coalitions::{check_supported, run_coalitional, CoalitionPriority};
use crate::dynamics::{run_to_ne, write_trace_csv, PriorityAlgorithm, TraceEvent, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::experiments::{
    build_instance, run_experiment_with_jobs, write_series_csv, write_summary, ExperimentConfig, MachineCount,
    PriorityRule, WeightDistribution,
};
use crate::io::{read_state, write_assignment};
use crate::model::{makespan, CostPolicy, Instance, MachineModel, State};
use crate::nashification::nashify;
use crate::oracle::{self, DEFAULT_BUDGET};
use crate::rng::SplitMix64;

pub const SEED_ENV: &str = "SSLAB_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CAPPED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sslab",
    version,
    about = "Selfish load balancing: best-response dynamics to pure Nash equilibria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one best-response (or coalitional) simulation.
    Simulate(SimulateArgs),
    /// Sweep n for one configuration and classify growth.
    Experiment(ExperimentArgs),
    /// Steer an assignment to an equilibrium without raising the makespan.
    Nashify(NashifyArgs),
    /// Exhaustively check a small instance.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    AllOnFirst,
    Random,
}

/// Where the game comes from: an instance file, or generated from a distribution.
#[derive(Debug, Args)]
pub struct GameArgs {
    #[arg(long, value_parser = clap::value_parser!(MachineModel), default_value = "identical", conflicts_with = "instance")]
    pub model: MachineModel,
    #[arg(long, default_value_t = 10, conflicts_with = "instance")]
    pub n: usize,
    /// Machine count: an integer or `n/K`.
    #[arg(long, default_value = "n/2", conflicts_with = "instance")]
    pub m: MachineCount,
    #[arg(long, default_value = "d", conflicts_with = "instance")]
    pub dist: WeightDistribution,
    /// Falls back to $SSLAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Instance JSON file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "makespan")]
    pub policy: CostPolicy,
    #[arg(long, default_value = "maw")]
    pub priority: PriorityRule,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
    /// Allow 2-flips between pairs (identical machines, makespan only).
    #[arg(long)]
    pub coalitions: bool,
    #[arg(long, default_value = "mip")]
    pub coalition_priority: CoalitionPriority,
    #[arg(long, value_enum, default_value_t = Init::AllOnFirst)]
    pub init: Init,
    /// Write the move trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct NashifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub assignment: PathBuf,
    /// Final assignment CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "makespan")]
    pub policy: CostPolicy,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

fn resolve_seed(seed: Option<u64>) -> Result<u64> {
    if let Some(seed) = seed {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}=`{text}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// The game plus a stream for any further randomness.
fn load_game(game: &GameArgs) -> Result<(Instance, SplitMix64)> {
    let mut rng = SplitMix64::new(resolve_seed(game.seed)?);
    let inst = match &game.instance {
        Some(path) => Instance::from_json(&fs::read_to_string(path)?)?,
        None => build_instance(game.model, game.dist, game.n, game.m, &mut rng)?,
    };
    Ok((inst, rng))
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let (inst, mut rng) = load_game(&args.game)?;
    if args.coalitions {
        check_supported(&inst, args.policy)?;
    }
    let placement_seed = rng.fork();
    let priority_seed = rng.fork();
    let initial = match args.init {
        Init::AllOnFirst => State::all_on(&inst, 0)?,
        Init::Random => State::random(&inst, placement_seed)?,
    };
    let algo: PriorityAlgorithm = args.priority.with_seed(priority_seed);
    let (steps, flips, reached_ne, state, trace): (u64, u64, bool, State, Vec<TraceEvent>) = if args.coalitions {
        let r = run_coalitional(&inst, initial, algo, args.coalition_priority, args.max_steps)?;
        (r.single_moves, r.flips, r.reached_ne, r.final_state, r.trace)
    } else {
        let r = run_to_ne(&inst, initial, args.policy, algo, args.max_steps)?;
        (r.steps, 0, r.reached_ne, r.final_state, r.trace)
    };
    if let Some(path) = &args.trace {
        let mut file = BufWriter::new(File::create(path)?);
        write_trace_csv(&mut file, &trace)?;
        file.flush()?;
    }
    writeln!(
        out,
        "steps={steps} flips={flips} ne={reached_ne} makespan={}",
        makespan(&inst, &state)
    )?;
    Ok(if reached_ne { EXIT_OK } else { EXIT_CAPPED })
}

fn experiment(args: &ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    let config = ExperimentConfig::from_json(&fs::read_to_string(&args.config)?)?;
    let rows = run_experiment_with_jobs(&config, args.jobs)?;
    fs::create_dir_all(&args.out)?;
    let mut csv = BufWriter::new(File::create(args.out.join("results.csv"))?);
    write_series_csv(&mut csv, &config, &rows)?;
    csv.flush()?;
    let mut summary = Vec::new();
    write_summary(&mut summary, &config, &rows)?;
    fs::write(args.out.join("summary.txt"), &summary)?;
    out.write_all(&summary)?;
    Ok(EXIT_OK)
}

fn nashify_cmd(args: &NashifyArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = Instance::from_json(&fs::read_to_string(&args.instance)?)?;
    let initial = read_state(File::open(&args.assignment)?, &inst)?;
    let result = nashify(&inst, initial)?;
    let mut file = BufWriter::new(File::create(&args.out)?);
    write_assignment(&mut file, result.final_state.assignment())?;
    file.flush()?;
    writeln!(
        out,
        "moves={} makespan {}->{}",
        result.moves, result.initial_makespan, result.final_makespan
    )?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (inst, _) = load_game(&args.game)?;
    let report = oracle::verify(&inst, args.policy, args.budget)?;
    let longest = report
        .longest_path
        .map_or_else(|| "none".to_string(), |l| l.to_string());
    writeln!(
        out,
        "states={} ne_states={} longest_path={longest} cyclic={}",
        report.states, report.ne_states, report.cyclic
    )?;
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Simulate(args) => simulate(args, out),
        Command::Experiment(args) => experiment(args, out),
        Command::Nashify(args) => nashify_cmd(args, out),
        Command::Verify(args) => verify(args, out),
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
