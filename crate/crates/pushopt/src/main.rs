//! Command-line front end: evolve, evaluate, trace, inspect, benchmark.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error
//! (unreadable or unparseable files).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use pushopt::cli::{self, CliError, RunProfile};

#[derive(Parser)]
#[command(
    name = "pushopt",
    version,
    about = "Evolve and run stack-program optimisers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ProfileArgs {
    /// JSON run profile; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Landscape name (f1, f9, f12, f13, f14).
    #[arg(long)]
    landscape: Option<String>,
    /// Problem dimension.
    #[arg(long)]
    dimension: Option<usize>,
    /// Evaluation budget per repeat; must equal the split product.
    #[arg(long)]
    budget: Option<usize>,
    /// Budget split POPSIZExMOVES, e.g. 50x20.
    #[arg(long)]
    split: Option<String>,
    /// Optimisation runs per fitness measurement.
    #[arg(long)]
    repeats: Option<usize>,
    /// Apply random landscape transforms (true for training).
    #[arg(long)]
    transforms: Option<bool>,
    /// Master seed; all randomness derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the f12 instance coefficients.
    #[arg(long)]
    f12_seed: Option<u64>,
    /// Output directory (default $PUSHOPT_OUT/<command> or runs/<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; changes wall-clock time, never results.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct GpArgs {
    /// Evolving population size.
    #[arg(long)]
    gp_popsize: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    tournament_size: Option<usize>,
    /// Genome size limit in atoms.
    #[arg(long)]
    max_program_size: Option<usize>,
    /// Instruction executions allowed per move.
    #[arg(long)]
    exec_limit: Option<usize>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    reproduction_rate: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an optimiser for a landscape.
    Evolve {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        gp: GpArgs,
    },
    /// Evaluate a program file as an optimiser (25 untransformed runs by default).
    Eval {
        /// Program file to evaluate.
        #[arg(long)]
        program: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Run a program and export its trajectory as CSV.
    Trace {
        /// Program file to trace.
        #[arg(long)]
        program: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Pretty-print a program file with static statistics.
    Show {
        /// Program file to inspect.
        program: PathBuf,
    },
    /// Measure single-threaded interpreter throughput.
    Bench {
        /// Measurement duration in seconds.
        #[arg(long, default_value_t = 2.0)]
        seconds: f64,
    },
}

fn build_profile(args: &ProfileArgs, eval_like: bool) -> Result<RunProfile, CliError> {
    let mut profile = match &args.config {
        Some(path) => RunProfile::from_file(path)?,
        None if eval_like => RunProfile {
            repeats: 25,
            transforms: false,
            ..RunProfile::default()
        },
        None => RunProfile::default(),
    };
    if let Some(v) = &args.landscape {
        profile.landscape = v.clone();
    }
    if let Some(v) = args.dimension {
        profile.dimension = v;
    }
    if let Some(v) = args.budget {
        profile.budget = Some(v);
    }
    if let Some(v) = &args.split {
        profile.split = v.clone();
    }
    if let Some(v) = args.repeats {
        profile.repeats = v;
    }
    if let Some(v) = args.transforms {
        profile.transforms = v;
    }
    if let Some(v) = args.seed {
        profile.seed = v;
    }
    if let Some(v) = args.f12_seed {
        profile.f12_seed = v;
    }
    if let Some(v) = &args.out {
        profile.output_dir = Some(v.clone());
    }
    if let Some(v) = args.jobs {
        profile.jobs = Some(v);
    }
    Ok(profile)
}

fn apply_gp(profile: &mut RunProfile, gp: &GpArgs) {
    if let Some(v) = gp.gp_popsize {
        profile.gp_popsize = v;
    }
    if let Some(v) = gp.generations {
        profile.generations = v;
    }
    if let Some(v) = gp.tournament_size {
        profile.tournament_size = v;
    }
    if let Some(v) = gp.max_program_size {
        profile.max_program_size = v;
    }
    if let Some(v) = gp.exec_limit {
        profile.exec_limit = v;
    }
    if let Some(v) = gp.crossover_rate {
        profile.crossover_rate = v;
    }
    if let Some(v) = gp.mutation_rate {
        profile.mutation_rate = v;
    }
    if let Some(v) = gp.reproduction_rate {
        profile.reproduction_rate = v;
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evolve { profile, gp } => {
            let mut profile = build_profile(&profile, false)?;
            apply_gp(&mut profile, &gp);
            let report = cli::cmd_evolve(&profile)?;
            let dir = profile.resolve_output_dir("evolve");
            println!("landscape {} dim {}", profile.landscape, profile.dimension);
            for record in &report.history {
                println!(
                    "gen {:>3}  best {:.6e}  mean {:.6e}  best-so-far {:.6e}",
                    record.generation, record.best_fitness, record.mean_fitness, record.best_so_far
                );
            }
            println!("best program: {}", report.best_program);
            println!("training fitness: {:.6e}", report.best_fitness);
            println!(
                "reevaluated mean error ({} runs): {:.6e}",
                report.reevaluation.repeats, report.reevaluation.mean_best
            );
            println!("artifacts in {}", dir.display());
        }
        Command::Eval { program, profile } => {
            let mut profile = build_profile(&profile, true)?;
            profile.program_path = Some(program);
            let report = cli::cmd_eval(&profile)?;
            println!(
                "{} on {} dim {} ({}x{}, transforms {})",
                report.program,
                report.landscape,
                report.dimension,
                report.popsize,
                report.moves,
                if report.transforms { "on" } else { "off" }
            );
            for (i, best) in report.per_repeat_best.iter().enumerate() {
                println!("repeat {i:>2}: {best:.6e}");
            }
            println!(
                "mean error over {} runs: {:.6e}",
                report.repeats, report.mean_best
            );
        }
        Command::Trace { program, profile } => {
            let mut profile = build_profile(&profile, true)?;
            profile.program_path = Some(program);
            let summary = cli::cmd_trace(&profile)?;
            let dir = profile.resolve_output_dir("trace");
            println!(
                "{} trace records -> {}",
                summary.records,
                dir.join("trace.csv").display()
            );
            println!(
                "best value {:.6e} at {:?}",
                summary.best_value, summary.best_point
            );
            println!(
                "mean best over {} repeats: {:.6e}",
                summary.per_repeat_best.len(),
                summary.mean_best
            );
        }
        Command::Show { program } => {
            let report = cli::cmd_show(&program)?;
            println!("{}", report.text);
            println!("atoms: {}", report.atom_count);
            let mut entries: Vec<_> = report.histogram.iter().collect();
            entries.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
            for (token, count) in entries {
                println!("{count:>4}  {token}");
            }
        }
        Command::Bench { seconds } => {
            let report = cli::interpreter_throughput(Duration::from_secs_f64(seconds.max(0.01)));
            println!(
                "{} steps in {:.2}s: {:.3e} steps/sec",
                report.steps, report.seconds, report.steps_per_second
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(msg) = &e {
                if msg.contains("unknown landscape") {
                    eprintln!("valid landscapes: {}", cli::landscape_names().join(", "));
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
