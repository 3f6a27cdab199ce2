//! Run profiles, workflow commands, and on-disk artifacts.
//!
//! Each command reads a [`RunProfile`] (from flags, a JSON config file, or
//! both) and writes its artifacts into an output directory: the effective
//! profile, generation logs (JSON lines), genomes (program text), fitness
//! reports (JSON), and traces (CSV). Every file written here can be read
//! back by the loaders in this module.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::{evolve, EvolutionConfig, EvolveReport, GenerationRecord};
use crate::harness::{
    evaluate_optimiser, trace_run, trace_to_csv, FitnessReport, RunConfig, TraceRecord,
};
use crate::interp::{run_move, ExecutionLimits, InterpreterState};
use crate::landscape::{Landscape, LANDSCAPE_NAMES};
use crate::program::{parse_program, print_program, Instruction, Program};
use crate::rng::derive_stream;
use crate::swarm::SoloView;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "PUSHOPT_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid invocation or configuration; exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unparseable data; exit code 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

/// A complete description of one run, loadable from and saved as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunProfile {
    /// The command this profile was written by (informational).
    pub command: Option<String>,
    pub landscape: String,
    pub dimension: usize,
    /// Evaluation budget per repeat; must equal popsize x moves.
    pub budget: Option<usize>,
    /// Budget split "POPSIZExMOVES", e.g. "50x20".
    pub split: String,
    pub repeats: usize,
    pub transforms: bool,
    pub seed: u64,
    pub f12_seed: u64,
    pub program_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Worker threads for parallel sections; affects wall-clock only.
    pub jobs: Option<usize>,
    pub gp_popsize: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub max_program_size: usize,
    pub exec_limit: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub reproduction_rate: f64,
}

impl Default for RunProfile {
    fn default() -> Self {
        RunProfile {
            command: None,
            landscape: "f1".to_string(),
            dimension: 10,
            budget: None,
            split: "50x20".to_string(),
            repeats: 10,
            transforms: true,
            seed: 0,
            f12_seed: 2005,
            program_path: None,
            output_dir: None,
            jobs: None,
            gp_popsize: 200,
            generations: 50,
            tournament_size: 5,
            max_program_size: 100,
            exec_limit: 100,
            crossover_rate: 0.5,
            mutation_rate: 0.4,
            reproduction_rate: 0.1,
        }
    }
}

impl RunProfile {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| data(format!("cannot read profile {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| data(format!("invalid profile {}: {e}", path.display())))
    }

    /// Parses and validates the budget split. With an explicit budget the
    /// product must match.
    pub fn split_parts(&self) -> Result<(usize, usize), CliError> {
        let (pop, moves) = self.split.split_once(['x', 'X']).ok_or_else(|| {
            usage(format!(
                "split `{}` is not of the form POPSIZExMOVES",
                self.split
            ))
        })?;
        let popsize: usize = pop
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad popsize in split `{}`", self.split)))?;
        let moves: usize = moves
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad moves in split `{}`", self.split)))?;
        if popsize == 0 || moves == 0 {
            return Err(usage("split parts must be positive".to_string()));
        }
        if let Some(budget) = self.budget {
            if popsize * moves != budget {
                return Err(usage(format!(
                    "split {popsize}x{moves} = {} does not match budget {budget}",
                    popsize * moves
                )));
            }
        }
        Ok((popsize, moves))
    }

    pub fn landscape(&self) -> Result<Landscape, CliError> {
        Landscape::by_name(&self.landscape, self.dimension, self.f12_seed)
            .map_err(|e| usage(e.to_string()))
    }

    pub fn limits(&self) -> ExecutionLimits {
        ExecutionLimits {
            max_executions_per_move: self.exec_limit,
            max_program_size: self.max_program_size,
        }
    }

    fn run_config(&self) -> Result<RunConfig, CliError> {
        let (popsize, moves) = self.split_parts()?;
        Ok(RunConfig {
            popsize,
            moves,
            repeats: self.repeats,
            seed: self.seed,
        })
    }

    fn load_program(&self) -> Result<Program, CliError> {
        let path = self
            .program_path
            .as_ref()
            .ok_or_else(|| usage("no program file given".to_string()))?;
        load_program(path)
    }

    /// The directory artifacts are written to: the profile's own, else
    /// `$PUSHOPT_OUT/<command>`, else `runs/<command>`.
    pub fn resolve_output_dir(&self, command: &str) -> PathBuf {
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        let base =
            std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
        base.join(command)
    }
}

/// Reads and parses a program file.
pub fn load_program(path: &Path) -> Result<Program, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(format!("cannot read program {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(data(format!("program file {} is empty", path.display())));
    }
    parse_program(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| data(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_file(dir, name, &text)
}

pub fn load_fitness_report(path: &Path) -> Result<FitnessReport, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn load_generation_log(path: &Path) -> Result<Vec<GenerationRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(|line| {
            serde_json::from_str(line).map_err(|e| data(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Reads a trace CSV produced by [`trace_to_csv`].
pub fn load_trace_csv(path: &Path) -> Result<Vec<TraceRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| data("empty trace file".to_string()))?;
    if !header.starts_with("repeat,move,member,value,improved,in_bounds") {
        return Err(data(format!("unexpected trace header `{header}`")));
    }
    let mut records = Vec::new();
    for (index, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 7 {
            return Err(data(format!("trace line {} is short", index + 2)));
        }
        let parse_err = |e| data(format!("trace line {}: {e}", index + 2));
        records.push(TraceRecord {
            repeat: fields[0].parse().map_err(|e| parse_err(format!("{e}")))?,
            move_num: fields[1].parse().map_err(|e| parse_err(format!("{e}")))?,
            member: fields[2].parse().map_err(|e| parse_err(format!("{e}")))?,
            value: fields[3].parse().map_err(|e| parse_err(format!("{e}")))?,
            improved: fields[4].parse().map_err(|e| parse_err(format!("{e}")))?,
            in_bounds: fields[5].parse().map_err(|e| parse_err(format!("{e}")))?,
            point: fields[6..]
                .iter()
                .map(|f| f.parse().map_err(|e| parse_err(format!("{e}"))))
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(records)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| usage(format!("cannot build a {n}-thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn profile_echo(profile: &RunProfile, command: &str) -> RunProfile {
    RunProfile {
        command: Some(command.to_string()),
        ..profile.clone()
    }
}

/// Runs an evolution and writes `profile.json`, `generations.jsonl`,
/// `best.push`, and `reevaluation.json` into the output directory.
pub fn cmd_evolve(profile: &RunProfile) -> Result<EvolveReport, CliError> {
    let (popsize, moves) = profile.split_parts()?;
    profile.landscape()?;
    let config = EvolutionConfig {
        gp_popsize: profile.gp_popsize,
        generations: profile.generations,
        tournament_size: profile.tournament_size,
        max_program_size: profile.max_program_size,
        exec_limit: profile.exec_limit,
        crossover_rate: profile.crossover_rate,
        mutation_rate: profile.mutation_rate,
        reproduction_rate: profile.reproduction_rate,
        landscape: profile.landscape.clone(),
        dimension: profile.dimension,
        popsize,
        moves,
        fitness_repeats: profile.repeats,
        transforms: profile.transforms,
        reeval_repeats: 25,
        f12_seed: profile.f12_seed,
        master_seed: profile.seed,
    };
    config.validate().map_err(usage)?;

    let report = with_jobs(profile.jobs, || evolve(&config))?.map_err(usage)?;

    let dir = profile.resolve_output_dir("evolve");
    write_json(&dir, "profile.json", &profile_echo(profile, "evolve"))?;
    let log: String = report
        .history
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
        .collect();
    write_file(&dir, "generations.jsonl", &log)?;
    write_file(&dir, "best.push", &(report.best_program.clone() + "\n"))?;
    write_json(&dir, "reevaluation.json", &report.reevaluation)?;
    Ok(report)
}

/// Evaluates a program file as an optimiser and writes `eval.json`.
pub fn cmd_eval(profile: &RunProfile) -> Result<FitnessReport, CliError> {
    let program = profile.load_program()?;
    let landscape = profile.landscape()?;
    let run = profile.run_config()?;
    let limits = profile.limits();
    let transforms = profile.transforms;
    let report = with_jobs(profile.jobs, || {
        evaluate_optimiser(&program, &landscape, &run, transforms, limits)
    })?;

    let dir = profile.resolve_output_dir("eval");
    write_json(&dir, "profile.json", &profile_echo(profile, "eval"))?;
    write_json(&dir, "eval.json", &report)?;
    Ok(report)
}

/// Summary statistics of a trace, written alongside the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub best_value: f64,
    pub best_point: Vec<f64>,
    pub per_repeat_best: Vec<f64>,
    pub mean_best: f64,
    pub records: usize,
}

/// Traces a program run and writes `trace.csv` plus `summary.json`.
pub fn cmd_trace(profile: &RunProfile) -> Result<TraceSummary, CliError> {
    let program = profile.load_program()?;
    let landscape = profile.landscape()?;
    let run = profile.run_config()?;
    let (report, records) = trace_run(
        &program,
        &landscape,
        &run,
        profile.transforms,
        profile.limits(),
    );

    let best = records
        .iter()
        .filter(|r| r.in_bounds)
        .min_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values"));
    let summary = TraceSummary {
        best_value: best.map_or(f64::INFINITY, |r| r.value),
        best_point: best.map_or_else(Vec::new, |r| r.point.clone()),
        per_repeat_best: report.per_repeat_best.clone(),
        mean_best: report.mean_best,
        records: records.len(),
    };

    let dir = profile.resolve_output_dir("trace");
    write_json(&dir, "profile.json", &profile_echo(profile, "trace"))?;
    write_file(&dir, "trace.csv", &trace_to_csv(&records, landscape.dim()))?;
    write_json(&dir, "summary.json", &summary)?;
    Ok(summary)
}

/// Canonical text and static statistics of a program file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShowReport {
    pub text: String,
    pub atom_count: usize,
    /// Token -> occurrence count; sums to `atom_count`.
    pub histogram: BTreeMap<String, usize>,
}

fn count_atoms(items: &[Instruction], histogram: &mut BTreeMap<String, usize>) {
    for item in items {
        match item {
            Instruction::Block(inner) => {
                *histogram.entry("(block)".to_string()).or_default() += 1;
                count_atoms(inner, histogram);
            }
            Instruction::Bool(b) => *histogram.entry(b.to_string()).or_default() += 1,
            Instruction::Int(i) => *histogram.entry(i.to_string()).or_default() += 1,
            Instruction::Float(f) => {
                *histogram
                    .entry(crate::program::format_float(*f))
                    .or_default() += 1;
            }
            Instruction::Op(op) => {
                *histogram
                    .entry(crate::op::registry().name(*op).to_string())
                    .or_default() += 1;
            }
        }
    }
}

/// Parses a program file and reports its canonical text, atom count, and
/// instruction histogram.
pub fn cmd_show(path: &Path) -> Result<ShowReport, CliError> {
    let program = load_program(path)?;
    let mut histogram = BTreeMap::new();
    count_atoms(&program.items, &mut histogram);
    Ok(ShowReport {
        text: print_program(&program),
        atom_count: program.atom_count(),
        histogram,
    })
}

/// Interpreter micro-benchmark results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub steps: u64,
    pub seconds: f64,
    pub steps_per_second: f64,
}

/// Measures single-threaded interpreter throughput by running a
/// stack-neutral arithmetic program repeatedly for at least `duration`.
pub fn interpreter_throughput(duration: Duration) -> BenchReport {
    let program = parse_program(
        "(1.5 2.5 float.+ float.dup float.* 3 4 integer.+ integer.dup integer.< exec.noop \
         boolean.pop float.pop 0.5 vector.wrand vector.mag float.pop)",
    )
    .expect("benchmark program parses");
    let limits = ExecutionLimits::default();
    let view = SoloView::new(vec![0.0; 10]);
    let mut state = InterpreterState::new(10);
    let mut rng = derive_stream(0xbe9c, &[]);
    let mut steps = 0u64;
    let start = Instant::now();
    loop {
        for _ in 0..256 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
            steps += state.exec_count() as u64;
        }
        if start.elapsed() >= duration {
            break;
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    BenchReport {
        steps,
        seconds,
        steps_per_second: steps as f64 / seconds,
    }
}

/// Lists the valid landscape names, for diagnostics.
pub fn landscape_names() -> &'static [&'static str] {
    &LANDSCAPE_NAMES
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn split_validation() {
        let mut profile = RunProfile {
            split: "50x20".into(),
            budget: Some(1000),
            ..Default::default()
        };
        assert_eq!(profile.split_parts().unwrap(), (50, 20));
        for split in ["25x40", "5x200", "1x1000"] {
            profile.split = split.into();
            assert!(profile.split_parts().is_ok(), "{split}");
        }
        profile.split = "7x13".into();
        let err = profile.split_parts().unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("91"));
        profile.split = "nonsense".into();
        assert!(profile.split_parts().is_err());
        profile.split = "0x5".into();
        assert!(profile.split_parts().is_err());
    }

    #[test]
    fn unknown_landscape_lists_valid_names() {
        let profile = RunProfile {
            landscape: "f7".into(),
            ..Default::default()
        };
        let err = profile.landscape().unwrap_err();
        let msg = err.to_string();
        for name in LANDSCAPE_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn profile_round_trips_through_json() {
        let dir = tempdir().unwrap();
        let profile = RunProfile {
            landscape: "f9".into(),
            dimension: 2,
            split: "5x20".into(),
            budget: Some(100),
            seed: 42,
            ..Default::default()
        };
        let path = write_json(dir.path(), "profile.json", &profile).unwrap();
        let loaded = RunProfile::from_file(&path).unwrap();
        assert_eq!(loaded, profile);
    }

    #[test]
    fn profile_json_accepts_partial_documents() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.json");
        fs::write(&path, r#"{"landscape": "f13", "split": "1x100"}"#).unwrap();
        let profile = RunProfile::from_file(&path).unwrap();
        assert_eq!(profile.landscape, "f13");
        assert_eq!(profile.split_parts().unwrap(), (1, 100));
        assert_eq!(profile.gp_popsize, 200);
    }

    #[test]
    fn eval_writes_rereadable_artifacts() {
        let dir = tempdir().unwrap();
        let program_path = dir.path().join("p.push");
        fs::write(&program_path, "(vector.best 0.5 vector.scale)\n").unwrap();
        let out = dir.path().join("out");
        let profile = RunProfile {
            landscape: "f1".into(),
            dimension: 2,
            split: "2x5".into(),
            repeats: 3,
            transforms: false,
            program_path: Some(program_path),
            output_dir: Some(out.clone()),
            ..Default::default()
        };
        let report = cmd_eval(&profile).unwrap();
        assert_eq!(report.repeats, 3);
        let loaded = load_fitness_report(&out.join("eval.json")).unwrap();
        assert_eq!(loaded, report);
        let echoed = RunProfile::from_file(&out.join("profile.json")).unwrap();
        assert_eq!(echoed.command.as_deref(), Some("eval"));
        // Evaluating again with the same profile reproduces the report.
        let again = cmd_eval(&profile).unwrap();
        assert_eq!(again, report);
    }

    #[test]
    fn trace_writes_csv_and_summary() {
        let dir = tempdir().unwrap();
        let program_path = dir.path().join("p.push");
        fs::write(&program_path, "(0.5 vector.wrand vector.best vector.+)\n").unwrap();
        let out = dir.path().join("out");
        let profile = RunProfile {
            landscape: "f9".into(),
            dimension: 2,
            split: "3x10".into(),
            repeats: 2,
            transforms: false,
            program_path: Some(program_path),
            output_dir: Some(out.clone()),
            seed: 3,
            ..Default::default()
        };
        let summary = cmd_trace(&profile).unwrap();
        assert_eq!(summary.records, 2 * 3 * 11);
        let records = load_trace_csv(&out.join("trace.csv")).unwrap();
        assert_eq!(records.len(), summary.records);
        let min = records
            .iter()
            .filter(|r| r.in_bounds)
            .map(|r| r.value)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, summary.best_value);
        let loaded: TraceSummary =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(loaded, summary);
    }

    #[test]
    fn show_reports_histogram_summing_to_atoms() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.push");
        fs::write(&path, "(float.sin float.sin (1 2.5) true)\n").unwrap();
        let report = cmd_show(&path).unwrap();
        assert_eq!(report.atom_count, 6);
        assert_eq!(report.histogram.values().sum::<usize>(), 6);
        assert_eq!(report.histogram["float.sin"], 2);
        assert_eq!(report.histogram["(block)"], 1);
        assert_eq!(report.text, "(float.sin float.sin (1 2.5) true)");
    }

    #[test]
    fn show_rejects_empty_and_missing_files() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.push");
        fs::write(&path, "  \n").unwrap();
        assert_eq!(cmd_show(&path).unwrap_err().exit_code(), 2);
        assert_eq!(
            cmd_show(&dir.path().join("nope.push"))
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn bench_counts_steps() {
        let report = interpreter_throughput(Duration::from_millis(50));
        assert!(report.steps > 0);
        assert!(report.steps_per_second > 0.0);
    }
}
