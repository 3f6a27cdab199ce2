//! Genetic programming over linear program genomes.
//!
//! Programs are flat instruction arrays manipulated with one-point
//! crossover, point mutation (replace/insert/delete), and tournament
//! selection. Fitness is [`crate::harness::evaluate_optimiser`] on a
//! transformed training landscape; lower is better. Every generation is
//! evaluated afresh (fitness is stochastic), individuals draw their
//! fitness streams from `(master seed, individual id)` so results do not
//! depend on evaluation order or thread count, and one elite is copied
//! into the next generation unchanged.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harness::{evaluate_optimiser, FitnessReport, RunConfig};
use crate::interp::ExecutionLimits;
use crate::landscape::Landscape;
use crate::op::{registry, FloatOp, IntOp, Op};
use crate::program::{print_program, Instruction, Program};
use crate::rng::{derive_stream, STREAM_EVOLVE, STREAM_FITNESS, STREAM_REEVAL};

/// Range of float constants produced for `float.erc`.
pub const FLOAT_ERC_RANGE: (f64, f64) = (-1.0, 1.0);
/// Range of integer constants produced for `integer.erc`.
pub const INT_ERC_RANGE: (i64, i64) = (-10, 10);

/// One entry of the genome sampling universe: an opcode or a boolean
/// literal. ERC opcodes are expanded into fresh literal constants at
/// sampling time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleAtom {
    Op(Op),
    True,
    False,
}

/// The default sampling universe: every registered instruction plus the
/// boolean literals.
pub fn default_instruction_set() -> Vec<SampleAtom> {
    let mut set: Vec<SampleAtom> = registry()
        .ops()
        .iter()
        .copied()
        .map(SampleAtom::Op)
        .collect();
    set.push(SampleAtom::True);
    set.push(SampleAtom::False);
    set
}

fn sample_atom(set: &[SampleAtom], rng: &mut ChaCha8Rng) -> Instruction {
    match set[rng.gen_range(0..set.len())] {
        SampleAtom::True => Instruction::Bool(true),
        SampleAtom::False => Instruction::Bool(false),
        SampleAtom::Op(Op::Float(FloatOp::Erc)) => {
            Instruction::Float(rng.gen_range(FLOAT_ERC_RANGE.0..=FLOAT_ERC_RANGE.1))
        }
        SampleAtom::Op(Op::Int(IntOp::Erc)) => {
            Instruction::Int(rng.gen_range(INT_ERC_RANGE.0..=INT_ERC_RANGE.1))
        }
        SampleAtom::Op(op) => Instruction::Op(op),
    }
}

/// Generates a flat random program: length uniform in `1..=size_budget`,
/// atoms sampled uniformly from the instruction set (ERCs become fresh
/// literal constants).
pub fn random_program(rng: &mut ChaCha8Rng, size_budget: usize, set: &[SampleAtom]) -> Program {
    assert!(size_budget >= 1);
    let len = rng.gen_range(1..=size_budget);
    Program::new((0..len).map(|_| sample_atom(set, rng)).collect())
}

/// A genome with its most recent fitness estimate.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genome: Program,
    pub fitness: f64,
}

/// Tournament selection: `k` uniform samples with replacement, minimum
/// fitness wins, ties go to the earliest sampled.
pub fn tournament_select<'a>(
    population: &'a [Individual],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> &'a Individual {
    assert!(!population.is_empty() && k >= 1);
    let mut winner = &population[rng.gen_range(0..population.len())];
    for _ in 1..k {
        let candidate = &population[rng.gen_range(0..population.len())];
        if candidate.fitness < winner.fitness {
            winner = candidate;
        }
    }
    winner
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MutationKind {
    Replace,
    Insert,
    Delete,
}

pub(crate) fn apply_mutation(
    genome: &Program,
    kind: MutationKind,
    max_size: usize,
    set: &[SampleAtom],
    rng: &mut ChaCha8Rng,
) -> Program {
    let mut items = genome.items.clone();
    match kind {
        MutationKind::Replace if !items.is_empty() => {
            let pos = rng.gen_range(0..items.len());
            items[pos] = match &items[pos] {
                // A literal constant may drift instead of being replaced.
                Instruction::Float(f) if rng.gen::<bool>() => {
                    let sigma = 0.1 * (FLOAT_ERC_RANGE.1 - FLOAT_ERC_RANGE.0);
                    let perturbed = f + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                    Instruction::Float(if perturbed.is_finite() { perturbed } else { *f })
                }
                Instruction::Int(i) if rng.gen::<bool>() => {
                    let sigma = 0.1 * (INT_ERC_RANGE.1 - INT_ERC_RANGE.0) as f64;
                    let noise: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal);
                    Instruction::Int(i.saturating_add((sigma * noise).round() as i64))
                }
                _ => sample_atom(set, rng),
            };
        }
        MutationKind::Replace => {}
        MutationKind::Insert => {
            if genome.atom_count() < max_size {
                let pos = rng.gen_range(0..=items.len());
                items.insert(pos, sample_atom(set, rng));
            }
        }
        MutationKind::Delete => {
            if items.len() > 1 {
                let pos = rng.gen_range(0..items.len());
                items.remove(pos);
            }
        }
    }
    Program::new(items)
}

/// Mutates a genome with one of replace / insert / delete, chosen
/// uniformly. Inserts respect the size limit; deletes keep at least one
/// atom.
pub fn mutate(
    genome: &Program,
    max_size: usize,
    set: &[SampleAtom],
    rng: &mut ChaCha8Rng,
) -> Program {
    if genome.items.is_empty() {
        return apply_mutation(genome, MutationKind::Insert, max_size, set, rng);
    }
    let kind = match rng.gen_range(0..3) {
        0 => MutationKind::Replace,
        1 => MutationKind::Insert,
        _ => MutationKind::Delete,
    };
    apply_mutation(genome, kind, max_size, set, rng)
}

pub(crate) fn crossover_at(
    a: &Program,
    b: &Program,
    cut_a: usize,
    cut_b: usize,
    max_size: usize,
) -> Program {
    let mut items: Vec<Instruction> = a.items[..cut_a]
        .iter()
        .chain(b.items[cut_b..].iter())
        .cloned()
        .collect();
    while items.iter().map(Instruction::atom_count).sum::<usize>() > max_size {
        items.pop();
    }
    Program::new(items)
}

/// One-point crossover on the linear atom arrays, truncated to the size
/// limit: a prefix of `a` followed by a suffix of `b`.
pub fn crossover(a: &Program, b: &Program, max_size: usize, rng: &mut ChaCha8Rng) -> Program {
    let cut_a = rng.gen_range(0..=a.items.len());
    let cut_b = rng.gen_range(0..=b.items.len());
    crossover_at(a, b, cut_a, cut_b, max_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Operator {
    Crossover,
    Mutation,
    Reproduction,
}

pub(crate) fn choose_operator(rates: (f64, f64, f64), rng: &mut ChaCha8Rng) -> Operator {
    let x: f64 = rng.gen_range(0.0..1.0);
    if x < rates.0 {
        Operator::Crossover
    } else if x < rates.0 + rates.1 {
        Operator::Mutation
    } else {
        Operator::Reproduction
    }
}

/// Parameters of one evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub gp_popsize: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub max_program_size: usize,
    pub exec_limit: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub reproduction_rate: f64,
    /// Training landscape name.
    pub landscape: String,
    pub dimension: usize,
    /// Optimiser population size during fitness evaluation.
    pub popsize: usize,
    /// Moves per optimisation run.
    pub moves: usize,
    /// Optimisation runs averaged per fitness evaluation.
    pub fitness_repeats: usize,
    /// Random transforms during training.
    pub transforms: bool,
    /// Repeats for the final untransformed reevaluation.
    pub reeval_repeats: usize,
    pub f12_seed: u64,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            gp_popsize: 200,
            generations: 50,
            tournament_size: 5,
            max_program_size: 100,
            exec_limit: 100,
            crossover_rate: 0.5,
            mutation_rate: 0.4,
            reproduction_rate: 0.1,
            landscape: "f1".to_string(),
            dimension: 10,
            popsize: 50,
            moves: 20,
            fitness_repeats: 10,
            transforms: true,
            reeval_repeats: 25,
            f12_seed: 2005,
            master_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn limits(&self) -> ExecutionLimits {
        ExecutionLimits {
            max_executions_per_move: self.exec_limit,
            max_program_size: self.max_program_size,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.gp_popsize == 0 || self.generations == 0 || self.tournament_size == 0 {
            return Err("population, generations and tournament size must be positive".to_string());
        }
        let rates = [
            self.crossover_rate,
            self.mutation_rate,
            self.reproduction_rate,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err("variation rates must lie in [0, 1]".to_string());
        }
        let sum: f64 = rates.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("variation rates must sum to 1 (got {sum})"));
        }
        Ok(())
    }
}

/// Per-generation statistics written to the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Running minimum over all individuals evaluated so far.
    pub best_so_far: f64,
    pub best_program: String,
}

/// Result of one evolution run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveReport {
    pub config: EvolutionConfig,
    pub history: Vec<GenerationRecord>,
    pub best_program: String,
    pub best_fitness: f64,
    /// Total optimiser evaluations (gp_popsize x generations).
    pub optimiser_evaluations: u64,
    /// The best-of-run program reevaluated without transforms.
    pub reevaluation: FitnessReport,
}

/// Runs the generational loop and reevaluates the best-of-run program on
/// the untransformed landscape.
pub fn evolve(config: &EvolutionConfig) -> Result<EvolveReport, String> {
    config.validate()?;
    let landscape = Landscape::by_name(&config.landscape, config.dimension, config.f12_seed)
        .map_err(|e| e.to_string())?;
    let limits = config.limits();
    let set = default_instruction_set();
    let mut rng = derive_stream(config.master_seed, &[STREAM_EVOLVE]);

    let mut genomes: Vec<Program> = (0..config.gp_popsize)
        .map(|_| random_program(&mut rng, config.max_program_size, &set))
        .collect();

    let mut history = Vec::with_capacity(config.generations);
    let mut best_so_far = f64::INFINITY;
    let mut best_genome = genomes[0].clone();
    let mut evaluations = 0u64;

    for generation in 0..config.generations {
        let population: Vec<Individual> = genomes
            .par_iter()
            .enumerate()
            .map(|(index, genome)| {
                let id = (generation * config.gp_popsize + index) as u64;
                let run = RunConfig {
                    popsize: config.popsize,
                    moves: config.moves,
                    repeats: config.fitness_repeats,
                    seed: fitness_seed(config.master_seed, id),
                };
                let report =
                    evaluate_optimiser(genome, &landscape, &run, config.transforms, limits);
                Individual {
                    genome: genome.clone(),
                    fitness: report.mean_best,
                }
            })
            .collect();
        evaluations += config.gp_popsize as u64;

        let gen_best = population
            .iter()
            .min_by(|a, b| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"))
            .expect("non-empty population");
        if gen_best.fitness < best_so_far {
            best_so_far = gen_best.fitness;
            best_genome = gen_best.genome.clone();
        }
        let mean_fitness =
            population.iter().map(|i| i.fitness).sum::<f64>() / population.len() as f64;
        history.push(GenerationRecord {
            generation,
            best_fitness: gen_best.fitness,
            mean_fitness,
            best_so_far,
            best_program: print_program(&gen_best.genome),
        });

        if generation + 1 < config.generations {
            let elite = gen_best.genome.clone();
            let rates = (
                config.crossover_rate,
                config.mutation_rate,
                config.reproduction_rate,
            );
            let mut next = Vec::with_capacity(config.gp_popsize);
            next.push(elite);
            while next.len() < config.gp_popsize {
                let child = match choose_operator(rates, &mut rng) {
                    Operator::Crossover => {
                        let a = tournament_select(&population, config.tournament_size, &mut rng);
                        let b = tournament_select(&population, config.tournament_size, &mut rng);
                        crossover(&a.genome, &b.genome, config.max_program_size, &mut rng)
                    }
                    Operator::Mutation => {
                        let a = tournament_select(&population, config.tournament_size, &mut rng);
                        mutate(&a.genome, config.max_program_size, &set, &mut rng)
                    }
                    Operator::Reproduction => {
                        tournament_select(&population, config.tournament_size, &mut rng)
                            .genome
                            .clone()
                    }
                };
                next.push(child);
            }
            genomes = next;
        }
    }

    let reeval_run = RunConfig {
        popsize: config.popsize,
        moves: config.moves,
        repeats: config.reeval_repeats,
        seed: fitness_seed(config.master_seed, u64::MAX) ^ STREAM_REEVAL,
    };
    let reevaluation = evaluate_optimiser(&best_genome, &landscape, &reeval_run, false, limits);

    Ok(EvolveReport {
        config: config.clone(),
        history,
        best_program: print_program(&best_genome),
        best_fitness: best_so_far,
        optimiser_evaluations: evaluations,
        reevaluation,
    })
}

fn fitness_seed(master: u64, id: u64) -> u64 {
    // Collapse the stream into a u64 seed for RunConfig.
    use rand::RngCore;
    derive_stream(master, &[STREAM_FITNESS, id]).next_u64()
}
