//! Runs an evolved program as a (population-based) optimiser.
//!
//! A run holds `popsize` persistent copies of the program, each with its
//! own stacks. Every move, each member in index order receives the move
//! number, its own index, and the population-best index on its integer
//! stack, executes one move, and proposes the point on top of its vector
//! stack. The proposal is popped; in-bounds proposals are evaluated and
//! the member learns whether it improved, while out-of-bounds proposals
//! cost no evaluation and are signalled with `false` plus a largest-finite
//! sentinel value. After every move the member's best point is pushed back
//! onto its vector stack: an improving proposal therefore stays (it is the
//! new best, exactly as if it had only been peeked), while a rejected or
//! out-of-bounds proposal is replaced by the best point it failed to beat.
//! Fitness is the mean, over repeats, of the best value found in each
//! repeat.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interp::{run_move, ExecutionLimits, InputValue, InterpreterState};
use crate::landscape::{Landscape, TransformSpec, TransformedLandscape};
use crate::program::Program;
use crate::rng::{derive_stream, STREAM_REPEAT};
use crate::swarm::SwarmView;

/// Sentinel pushed to a program's float stack for an out-of-bounds move:
/// the largest finite value, so stacks never hold infinities.
pub const OUT_OF_BOUNDS_SENTINEL: f64 = f64::MAX;

/// Budget shape of one optimisation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Optimiser population size.
    pub popsize: usize,
    /// Moves (calls of the program per member) per repeat.
    pub moves: usize,
    /// Independent optimisation runs averaged into fitness.
    pub repeats: usize,
    /// Seed for all randomness in this evaluation.
    pub seed: u64,
}

impl RunConfig {
    /// The per-repeat evaluation budget excluding initialisation.
    pub fn budget(&self) -> usize {
        self.popsize * self.moves
    }
}

/// One persistent population member.
#[derive(Debug, Clone)]
pub struct MemberState {
    pub interp: InterpreterState,
    pub point: Vec<f64>,
    pub value: f64,
    pub best: Vec<f64>,
    pub bestval: f64,
}

/// State of one optimisation run (one repeat).
#[derive(Debug)]
pub struct SwarmRun<'a> {
    problem: TransformedLandscape<'a>,
    limits: ExecutionLimits,
    members: Vec<MemberState>,
    pbest: f64,
    pbest_index: usize,
    move_count: usize,
    evaluations: u64,
}

struct MembersView<'a> {
    members: &'a [MemberState],
    self_index: usize,
}

impl SwarmView for MembersView<'_> {
    fn popsize(&self) -> usize {
        self.members.len()
    }

    fn self_index(&self) -> usize {
        self.self_index
    }

    fn current_point(&self, member: usize) -> &[f64] {
        &self.members[member].point
    }

    fn best_point(&self, member: usize) -> &[f64] {
        &self.members[member].best
    }
}

/// One row of a run trace: a member's state after initialisation
/// (`move = 0`) or after one move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub repeat: usize,
    pub move_num: usize,
    pub member: usize,
    pub value: f64,
    pub improved: bool,
    pub in_bounds: bool,
    pub point: Vec<f64>,
}

/// Initialises one member: fresh stacks, a random in-bounds point
/// (evaluated, costing one evaluation), the point/value/`true` seeded onto
/// the stacks, and the search bounds plus dimension on the input stack.
pub fn init_member(problem: &TransformedLandscape<'_>, rng: &mut ChaCha8Rng) -> MemberState {
    let base = problem.base();
    let dim = base.dim();
    let point: Vec<f64> = (0..dim)
        .map(|_| rng.gen_range(base.lower()..=base.upper()))
        .collect();
    let value = problem.evaluate(&point);
    let mut interp = InterpreterState::new(dim);
    interp.vectors.push(point.clone());
    interp.floats.push(value);
    interp.bools.push(true);
    interp.set_inputs(vec![
        InputValue::Float(base.lower()),
        InputValue::Float(base.upper()),
        InputValue::Int(dim as i64),
    ]);
    MemberState {
        interp,
        best: point.clone(),
        bestval: value,
        point,
        value,
    }
}

impl<'a> SwarmRun<'a> {
    /// Initialises all members (consuming one evaluation each) and the
    /// population best.
    pub fn new(
        problem: TransformedLandscape<'a>,
        popsize: usize,
        limits: ExecutionLimits,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        assert!(popsize >= 1);
        let mut members = Vec::with_capacity(popsize);
        let mut pbest = f64::INFINITY;
        let mut pbest_index = 0;
        for p in 0..popsize {
            let member = init_member(&problem, rng);
            if member.bestval < pbest {
                pbest = member.bestval;
                pbest_index = p;
            }
            members.push(member);
        }
        let evaluations = popsize as u64;
        SwarmRun {
            problem,
            limits,
            members,
            pbest,
            pbest_index,
            move_count: 0,
            evaluations,
        }
    }

    pub fn pbest(&self) -> f64 {
        self.pbest
    }

    pub fn pbest_index(&self) -> usize {
        self.pbest_index
    }

    pub fn pbest_point(&self) -> &[f64] {
        &self.members[self.pbest_index].best
    }

    pub fn members(&self) -> &[MemberState] {
        &self.members
    }

    pub fn move_count(&self) -> usize {
        self.move_count
    }

    /// Objective evaluations consumed so far, initialisation included.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Runs one move for every member in index order. Returns one trace
    /// record per member when `trace` is set.
    pub fn step_move(
        &mut self,
        program: &Program,
        rng: &mut ChaCha8Rng,
        mut trace: Option<&mut Vec<TraceRecord>>,
        repeat: usize,
    ) {
        self.move_count += 1;
        let m = self.move_count;
        for p in 0..self.members.len() {
            {
                let ints = &mut self.members[p].interp.ints;
                ints.push(m as i64);
                ints.push(p as i64);
                ints.push(self.pbest_index as i64);
            }
            let previous = self.members[p].value;

            // The interpreter state is lifted out so the member can read
            // the rest of the population while it runs.
            let mut interp = std::mem::take(&mut self.members[p].interp);
            {
                let view = MembersView {
                    members: &self.members,
                    self_index: p,
                };
                run_move(&mut interp, program, &self.limits, &view, rng);
            }
            let proposal = interp.vectors.pop();
            self.members[p].interp = interp;

            let base = self.problem.base();
            let (value, improved, in_bounds, point) = match proposal {
                Some(point) if base.contains(&point) => {
                    self.members[p].point = point.clone();
                    let value = self.problem.evaluate(&point);
                    self.evaluations += 1;
                    self.members[p].value = value;
                    if value < self.members[p].bestval {
                        self.members[p].bestval = value;
                        self.members[p].best = point.clone();
                    }
                    let improved = value < previous;
                    let member = &mut self.members[p];
                    member.interp.bools.push(improved);
                    let best = member.best.clone();
                    member.interp.vectors.push(best);
                    member.interp.floats.push(value);
                    (value, improved, true, point)
                }
                proposal => {
                    // Out of bounds, or the program left no point at all:
                    // no evaluation, and the member sees the largest-finite
                    // sentinel as the value.
                    let point = match proposal {
                        Some(point) => {
                            self.members[p].point = point.clone();
                            point
                        }
                        None => self.members[p].point.clone(),
                    };
                    let member = &mut self.members[p];
                    member.interp.bools.push(false);
                    let best = member.best.clone();
                    member.interp.vectors.push(best);
                    member.interp.floats.push(OUT_OF_BOUNDS_SENTINEL);
                    (OUT_OF_BOUNDS_SENTINEL, false, false, point)
                }
            };

            if self.members[p].bestval < self.pbest {
                self.pbest = self.members[p].bestval;
                self.pbest_index = p;
            }

            if let Some(records) = trace.as_deref_mut() {
                records.push(TraceRecord {
                    repeat,
                    move_num: m,
                    member: p,
                    value,
                    improved,
                    in_bounds,
                    point,
                });
            }
        }
    }
}

/// Result of evaluating one program as an optimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub program: String,
    pub landscape: String,
    pub dimension: usize,
    pub popsize: usize,
    pub moves: usize,
    pub repeats: usize,
    pub transforms: bool,
    pub seed: u64,
    /// Best value found in each repeat.
    pub per_repeat_best: Vec<f64>,
    /// Mean of the per-repeat bests: the fitness.
    pub mean_best: f64,
    /// Total objective evaluations consumed, initialisation included.
    pub evaluations: u64,
}

fn run_repeats(
    program: &Program,
    landscape: &Landscape,
    config: &RunConfig,
    transforms: bool,
    limits: ExecutionLimits,
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> FitnessReport {
    assert!(config.repeats >= 1);
    let mut per_repeat_best = Vec::with_capacity(config.repeats);
    let mut evaluations = 0;
    for repeat in 0..config.repeats {
        let mut rng = derive_stream(config.seed, &[STREAM_REPEAT, repeat as u64]);
        let spec = if transforms {
            TransformSpec::sample(&mut rng, landscape)
        } else {
            TransformSpec::identity(landscape.dim())
        };
        let problem = TransformedLandscape::new(landscape, spec);
        let mut run = SwarmRun::new(problem, config.popsize, limits, &mut rng);
        if let Some(records) = trace.as_deref_mut() {
            for (p, member) in run.members().iter().enumerate() {
                records.push(TraceRecord {
                    repeat,
                    move_num: 0,
                    member: p,
                    value: member.value,
                    improved: true,
                    in_bounds: true,
                    point: member.point.clone(),
                });
            }
        }
        for _ in 0..config.moves {
            run.step_move(program, &mut rng, trace.as_deref_mut(), repeat);
        }
        per_repeat_best.push(run.pbest());
        evaluations += run.evaluations();
    }
    let mean_best = per_repeat_best.iter().sum::<f64>() / per_repeat_best.len() as f64;
    FitnessReport {
        program: crate::program::print_program(program),
        landscape: landscape.name().to_string(),
        dimension: landscape.dim(),
        popsize: config.popsize,
        moves: config.moves,
        repeats: config.repeats,
        transforms,
        seed: config.seed,
        per_repeat_best,
        mean_best,
        evaluations,
    }
}

/// Evaluates a program as an optimiser: `repeats` independent runs, each
/// with fresh random initial points (and a fresh random transform when
/// `transforms` is set); fitness is the mean best value.
pub fn evaluate_optimiser(
    program: &Program,
    landscape: &Landscape,
    config: &RunConfig,
    transforms: bool,
    limits: ExecutionLimits,
) -> FitnessReport {
    run_repeats(program, landscape, config, transforms, limits, None)
}

/// Like [`evaluate_optimiser`], additionally recording one trace record per
/// member per move (plus initialisation records).
pub fn trace_run(
    program: &Program,
    landscape: &Landscape,
    config: &RunConfig,
    transforms: bool,
    limits: ExecutionLimits,
) -> (FitnessReport, Vec<TraceRecord>) {
    let mut records = Vec::new();
    let report = run_repeats(
        program,
        landscape,
        config,
        transforms,
        limits,
        Some(&mut records),
    );
    (report, records)
}

/// Writes trace records as CSV with header
/// `repeat,move,member,value,improved,in_bounds,x0,x1,...`.
pub fn trace_to_csv(records: &[TraceRecord], dim: usize) -> String {
    let mut out = String::from("repeat,move,member,value,improved,in_bounds");
    for i in 0..dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            r.repeat, r.move_num, r.member, r.value, r.improved, r.in_bounds
        ));
        for c in &r.point {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out
}
