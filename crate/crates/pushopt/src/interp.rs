//! The stack-based virtual machine.
//!
//! One `InterpreterState` holds the typed stacks of a single population
//! member and persists across moves; each move re-seeds the exec stack with
//! the program and runs it under an execution budget. Instructions never
//! fail: an instruction whose operand stacks are insufficient, or whose
//! result would be non-finite, leaves the data stacks unchanged. The input
//! stack is read-only for programs and carries run constants (here the
//! search-space bounds and dimension).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::op::{BoolOp, ExecOp, FloatOp, InputOp, IntOp, Op, StackId, StackOp};
use crate::program::{Instruction, Program};
use crate::swarm::{execute_vector_op, SwarmView};

/// A value on the immutable input stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputValue {
    Bool(bool),
    Int(i64),
    Float(f64),
}

/// Budget limits for program execution and genome size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionLimits {
    /// Maximum instruction executions per move.
    pub max_executions_per_move: usize,
    /// Maximum atoms in an evolved program.
    pub max_program_size: usize,
}

impl Default for ExecutionLimits {
    fn default() -> Self {
        ExecutionLimits {
            max_executions_per_move: 100,
            max_program_size: 100,
        }
    }
}

/// The typed stacks owned by one population member.
#[derive(Debug, Clone, Default)]
pub struct InterpreterState {
    pub bools: Vec<bool>,
    pub floats: Vec<f64>,
    pub ints: Vec<i64>,
    pub vectors: Vec<Vec<f64>>,
    pub exec: Vec<Instruction>,
    inputs: Vec<InputValue>,
    dim: usize,
    exec_count: usize,
}

impl InterpreterState {
    /// Fresh state for search points of the given dimension.
    pub fn new(dim: usize) -> Self {
        InterpreterState {
            dim,
            ..Default::default()
        }
    }

    /// Sets the run constants readable through the `input.*` instructions.
    pub fn set_inputs(&mut self, inputs: Vec<InputValue>) {
        self.inputs = inputs;
    }

    pub fn inputs(&self) -> &[InputValue] {
        &self.inputs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Executions consumed by the current move.
    pub fn exec_count(&self) -> usize {
        self.exec_count
    }

    /// Search bounds as published on the input stack: the first two float
    /// inputs, falling back to [-1, 1] when absent.
    fn input_bounds(&self) -> (f64, f64) {
        let mut floats = self.inputs.iter().filter_map(|v| match v {
            InputValue::Float(f) => Some(*f),
            _ => None,
        });
        match (floats.next(), floats.next()) {
            // The width cap leaves sampling headroom for extreme bounds.
            (Some(lo), Some(hi)) if lo <= hi && hi - lo <= 1.0e300 => (lo, hi),
            _ => (-1.0, 1.0),
        }
    }
}

/// Result of a single interpreter step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// One item was popped and executed.
    Stepped,
    /// The exec stack is empty or the budget is spent.
    Done,
}

/// Executes one item from the exec stack, charging one execution.
pub fn step(
    state: &mut InterpreterState,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) -> StepOutcome {
    if state.exec_count >= limits.max_executions_per_move {
        return StepOutcome::Done;
    }
    let Some(item) = state.exec.pop() else {
        return StepOutcome::Done;
    };
    state.exec_count += 1;
    match item {
        Instruction::Bool(b) => state.bools.push(b),
        Instruction::Int(i) => state.ints.push(i),
        Instruction::Float(f) => state.floats.push(f),
        Instruction::Block(items) => {
            // Unpack so the first atom executes next; the atoms cost when
            // they are themselves popped.
            state.exec.extend(items.iter().rev().cloned());
        }
        Instruction::Op(op) => execute_op(op, state, limits, view, rng),
    }
    StepOutcome::Stepped
}

pub(crate) fn run_loop(
    state: &mut InterpreterState,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    while step(state, limits, view, rng) == StepOutcome::Stepped {}
}

/// Runs one move: clears the exec stack, seeds it with the program, resets
/// the execution counter, and steps until the program finishes or the
/// budget is spent. All data stacks persist from the previous move.
pub fn run_move(
    state: &mut InterpreterState,
    program: &Program,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    state.exec.clear();
    state.exec.extend(program.items.iter().rev().cloned());
    state.exec_count = 0;
    run_loop(state, limits, view, rng);
}

/// Runs a single exec item in isolation: the outer exec stack is set aside
/// so the body cannot consume pending code, while data stacks and the move
/// budget are shared. Used by `vector.apply` and `vector.zip`.
pub(crate) fn run_sandboxed(
    state: &mut InterpreterState,
    body: Instruction,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    let saved = std::mem::take(&mut state.exec);
    state.exec.push(body);
    run_loop(state, limits, view, rng);
    state.exec = saved;
}

fn execute_op(
    op: Op,
    state: &mut InterpreterState,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    match op {
        Op::Stack(stack, sop) => generic_stack_op(state, stack, sop, rng),
        Op::Bool(b) => bool_op(state, b),
        Op::Float(f) => float_op(state, f, rng),
        Op::Int(i) => int_op(state, i, rng),
        Op::Vector(v) => execute_vector_op(v, state, limits, view, rng),
        Op::Exec(e) => exec_op(state, e),
        Op::Input(i) => input_op(state, i),
    }
}

// ---------------------------------------------------------------------------
// Generic stack manipulation
// ---------------------------------------------------------------------------

/// Clamps a stack index to `0..=max`, taking the absolute value first.
fn clamp_index(index: i64, max: usize) -> usize {
    usize::try_from(index.unsigned_abs())
        .unwrap_or(usize::MAX)
        .min(max)
}

fn dup<T: Clone>(s: &mut Vec<T>) {
    if let Some(top) = s.last() {
        s.push(top.clone());
    }
}

fn swap<T>(s: &mut [T]) {
    let n = s.len();
    if n >= 2 {
        s.swap(n - 1, n - 2);
    }
}

fn rot<T>(s: &mut Vec<T>) {
    let n = s.len();
    if n >= 3 {
        let third = s.remove(n - 3);
        s.push(third);
    }
}

fn shove<T>(s: &mut Vec<T>, index: i64) {
    let Some(top) = s.pop() else { return };
    let depth = clamp_index(index, s.len());
    let pos = s.len() - depth;
    s.insert(pos, top);
}

fn yank<T>(s: &mut Vec<T>, index: i64) {
    if s.is_empty() {
        return;
    }
    let depth = clamp_index(index, s.len() - 1);
    let item = s.remove(s.len() - 1 - depth);
    s.push(item);
}

fn yank_dup<T: Clone>(s: &mut Vec<T>, index: i64) {
    if s.is_empty() {
        return;
    }
    let depth = clamp_index(index, s.len() - 1);
    let item = s[s.len() - 1 - depth].clone();
    s.push(item);
}

macro_rules! with_stack {
    ($state:expr, $kind:expr, |$s:ident| $body:expr) => {
        match $kind {
            StackId::Bool => {
                let $s = &mut $state.bools;
                $body
            }
            StackId::Float => {
                let $s = &mut $state.floats;
                $body
            }
            StackId::Int => {
                let $s = &mut $state.ints;
                $body
            }
            StackId::Vector => {
                let $s = &mut $state.vectors;
                $body
            }
            StackId::Exec => {
                let $s = &mut $state.exec;
                $body
            }
            StackId::Input => unreachable!("input stack has no mutable generic ops"),
        }
    };
}

fn generic_stack_op(
    state: &mut InterpreterState,
    kind: StackId,
    op: StackOp,
    rng: &mut ChaCha8Rng,
) {
    // The input stack is immutable; only its depth is observable.
    if kind == StackId::Input {
        debug_assert_eq!(op, StackOp::StackDepth);
        if op == StackOp::StackDepth {
            state.ints.push(state.inputs.len() as i64);
        }
        return;
    }
    match op {
        StackOp::Dup => with_stack!(state, kind, |s| dup(s)),
        StackOp::Flush => with_stack!(state, kind, |s| s.clear()),
        StackOp::Pop => with_stack!(state, kind, |s| {
            s.pop();
        }),
        StackOp::Swap => with_stack!(state, kind, |s| swap(s)),
        StackOp::Rot => with_stack!(state, kind, |s| rot(s)),
        StackOp::StackDepth => {
            let depth = with_stack!(state, kind, |s| s.len());
            state.ints.push(depth as i64);
        }
        StackOp::Shove | StackOp::Yank | StackOp::YankDup => {
            if kind == StackId::Int {
                // The index comes off the same stack the op works on.
                if state.ints.len() < 2 {
                    return;
                }
                let index = state.ints.pop().expect("len checked");
                match op {
                    StackOp::Shove => shove(&mut state.ints, index),
                    StackOp::Yank => yank(&mut state.ints, index),
                    StackOp::YankDup => yank_dup(&mut state.ints, index),
                    _ => unreachable!(),
                }
            } else {
                if state.ints.is_empty() || with_stack!(state, kind, |s| s.is_empty()) {
                    return;
                }
                let index = state.ints.pop().expect("len checked");
                match op {
                    StackOp::Shove => with_stack!(state, kind, |s| shove(s, index)),
                    StackOp::Yank => with_stack!(state, kind, |s| yank(s, index)),
                    StackOp::YankDup => with_stack!(state, kind, |s| yank_dup(s, index)),
                    _ => unreachable!(),
                }
            }
        }
        StackOp::Rand => match kind {
            StackId::Bool => state.bools.push(rng.gen()),
            StackId::Float => state.floats.push(rng.gen_range(-1.0..=1.0)),
            StackId::Int => state.ints.push(rng.gen_range(-10..=10)),
            StackId::Vector => {
                if state.dim == 0 {
                    return;
                }
                let (lo, hi) = state.input_bounds();
                let v: Vec<f64> = (0..state.dim).map(|_| rng.gen_range(lo..=hi)).collect();
                state.vectors.push(v);
            }
            StackId::Exec | StackId::Input => unreachable!("not registered"),
        },
    }
}

// ---------------------------------------------------------------------------
// Boolean instructions
// ---------------------------------------------------------------------------

fn bool_op(state: &mut InterpreterState, op: BoolOp) {
    let s = &mut state.bools;
    match op {
        BoolOp::Not => {
            if let Some(top) = s.last_mut() {
                *top = !*top;
            }
        }
        BoolOp::Eq | BoolOp::And | BoolOp::Or | BoolOp::Xor => {
            let n = s.len();
            if n < 2 {
                return;
            }
            let (a, b) = (s[n - 2], s[n - 1]);
            let r = match op {
                BoolOp::Eq => a == b,
                BoolOp::And => a && b,
                BoolOp::Or => a || b,
                BoolOp::Xor => a ^ b,
                _ => unreachable!(),
            };
            s.truncate(n - 2);
            s.push(r);
        }
        BoolOp::FromFloat => {
            if let Some(f) = state.floats.pop() {
                state.bools.push(f != 0.0);
            }
        }
        BoolOp::FromInteger => {
            if let Some(i) = state.ints.pop() {
                state.bools.push(i != 0);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Float instructions
// ---------------------------------------------------------------------------

/// Binary float op, top of stack as second argument. A non-finite result
/// leaves the operands in place.
fn float_bin(state: &mut InterpreterState, f: impl Fn(f64, f64) -> f64) {
    let n = state.floats.len();
    if n < 2 {
        return;
    }
    let r = f(state.floats[n - 2], state.floats[n - 1]);
    if !r.is_finite() {
        return;
    }
    state.floats.truncate(n - 1);
    state.floats[n - 2] = r;
}

fn float_unary(state: &mut InterpreterState, f: impl Fn(f64) -> f64) {
    let Some(top) = state.floats.last_mut() else {
        return;
    };
    let r = f(*top);
    if r.is_finite() {
        *top = r;
    }
}

fn float_cmp(state: &mut InterpreterState, f: impl Fn(f64, f64) -> bool) {
    let n = state.floats.len();
    if n < 2 {
        return;
    }
    let r = f(state.floats[n - 2], state.floats[n - 1]);
    state.floats.truncate(n - 2);
    state.bools.push(r);
}

fn float_op(state: &mut InterpreterState, op: FloatOp, rng: &mut ChaCha8Rng) {
    match op {
        FloatOp::Add => float_bin(state, |a, b| a + b),
        FloatOp::Sub => float_bin(state, |a, b| a - b),
        FloatOp::Mul => float_bin(state, |a, b| a * b),
        FloatOp::Div => float_bin(state, |a, b| a / b),
        FloatOp::Mod => float_bin(state, |a, b| a % b),
        FloatOp::Pow => float_bin(state, f64::powf),
        FloatOp::Max => float_bin(state, f64::max),
        FloatOp::Min => float_bin(state, f64::min),
        FloatOp::Lt => float_cmp(state, |a, b| a < b),
        FloatOp::Eq => float_cmp(state, |a, b| a == b),
        FloatOp::Gt => float_cmp(state, |a, b| a > b),
        FloatOp::Abs => float_unary(state, f64::abs),
        FloatOp::Neg => float_unary(state, |a| -a),
        FloatOp::Cos => float_unary(state, f64::cos),
        FloatOp::Sin => float_unary(state, f64::sin),
        FloatOp::Tan => float_unary(state, f64::tan),
        FloatOp::Exp => float_unary(state, f64::exp),
        FloatOp::Ln => float_unary(state, f64::ln),
        FloatOp::Log => float_unary(state, f64::log10),
        FloatOp::FromBoolean => {
            if let Some(b) = state.bools.pop() {
                state.floats.push(if b { 1.0 } else { 0.0 });
            }
        }
        FloatOp::FromInteger => {
            if let Some(i) = state.ints.pop() {
                state.floats.push(i as f64);
            }
        }
        // ERCs are expanded to literals when genomes are created; as a
        // runtime instruction this is inert.
        FloatOp::Erc => {
            let _ = rng;
        }
    }
}

// ---------------------------------------------------------------------------
// Integer instructions
// ---------------------------------------------------------------------------

fn int_bin(state: &mut InterpreterState, f: impl Fn(i64, i64) -> Option<i64>) {
    let n = state.ints.len();
    if n < 2 {
        return;
    }
    let Some(r) = f(state.ints[n - 2], state.ints[n - 1]) else {
        return;
    };
    state.ints.truncate(n - 1);
    state.ints[n - 2] = r;
}

fn int_unary(state: &mut InterpreterState, f: impl Fn(i64) -> Option<i64>) {
    let Some(top) = state.ints.last_mut() else {
        return;
    };
    if let Some(r) = f(*top) {
        *top = r;
    }
}

fn int_cmp(state: &mut InterpreterState, f: impl Fn(i64, i64) -> bool) {
    let n = state.ints.len();
    if n < 2 {
        return;
    }
    let r = f(state.ints[n - 2], state.ints[n - 1]);
    state.ints.truncate(n - 2);
    state.bools.push(r);
}

/// Largest magnitude a float-routed integer result may take and still cast
/// losslessly back into `i64`.
const INT_CAST_LIMIT: f64 = 9.0e18;

fn int_op(state: &mut InterpreterState, op: IntOp, rng: &mut ChaCha8Rng) {
    match op {
        IntOp::Add => int_bin(state, |a, b| a.checked_add(b)),
        IntOp::Sub => int_bin(state, |a, b| a.checked_sub(b)),
        IntOp::Mul => int_bin(state, |a, b| a.checked_mul(b)),
        IntOp::Div => int_bin(state, |a, b| if b == 0 { None } else { a.checked_div(b) }),
        IntOp::Mod => int_bin(state, |a, b| if b == 0 { None } else { a.checked_rem(b) }),
        IntOp::Pow => int_bin(state, |a, b| {
            let r = (a as f64).powf(b as f64);
            (r.is_finite() && r.abs() < INT_CAST_LIMIT).then_some(r.trunc() as i64)
        }),
        IntOp::Max => int_bin(state, |a, b| Some(a.max(b))),
        IntOp::Min => int_bin(state, |a, b| Some(a.min(b))),
        IntOp::Lt => int_cmp(state, |a, b| a < b),
        IntOp::Eq => int_cmp(state, |a, b| a == b),
        IntOp::Gt => int_cmp(state, |a, b| a > b),
        IntOp::Abs => int_unary(state, i64::checked_abs),
        IntOp::Neg => int_unary(state, i64::checked_neg),
        IntOp::Ln => int_unary(state, |a| (a > 0).then(|| (a as f64).ln().trunc() as i64)),
        IntOp::Log => int_unary(state, |a| {
            (a > 0).then(|| (a as f64).log10().trunc() as i64)
        }),
        IntOp::FromBoolean => {
            if let Some(b) = state.bools.pop() {
                state.ints.push(i64::from(b));
            }
        }
        IntOp::FromFloat => {
            if let Some(f) = state.floats.pop() {
                state.ints.push(f as i64);
            }
        }
        IntOp::Erc => {
            let _ = rng;
        }
    }
}

// ---------------------------------------------------------------------------
// Exec control flow
// ---------------------------------------------------------------------------

fn exec_op(state: &mut InterpreterState, op: ExecOp) {
    match op {
        ExecOp::Noop => {}
        ExecOp::Eq => {
            let n = state.exec.len();
            if n < 2 {
                return;
            }
            let b = state.exec.pop().expect("len checked");
            let a = state.exec.pop().expect("len checked");
            state.bools.push(a == b);
        }
        ExecOp::If => {
            if state.bools.is_empty() || state.exec.len() < 2 {
                return;
            }
            let cond = state.bools.pop().expect("len checked");
            let n = state.exec.len();
            if cond {
                state.exec.remove(n - 2);
            } else {
                state.exec.pop();
            }
        }
        ExecOp::IfLt => {
            if state.floats.len() < 2 || state.exec.len() < 2 {
                return;
            }
            let nf = state.floats.len();
            let lower = state.floats[nf - 2] < state.floats[nf - 1];
            state.floats.truncate(nf - 2);
            let n = state.exec.len();
            if lower {
                state.exec.remove(n - 2);
            } else {
                state.exec.pop();
            }
        }
        ExecOp::DoCount => {
            if state.ints.is_empty() || state.exec.is_empty() {
                return;
            }
            let body = state.exec.pop().expect("len checked");
            let n = state.ints.pop().expect("len checked");
            if n <= 0 {
                return;
            }
            push_range_loop(state, 0, n - 1, body);
        }
        ExecOp::DoTimes => {
            if state.ints.is_empty() || state.exec.is_empty() {
                return;
            }
            let body = state.exec.pop().expect("len checked");
            let n = state.ints.pop().expect("len checked");
            if n <= 0 {
                return;
            }
            // Same loop as do*count, but the body never sees the index.
            let wrapped = Instruction::Block(Arc::from(vec![
                Instruction::Op(Op::Stack(StackId::Int, StackOp::Pop)),
                body,
            ]));
            push_range_loop(state, 0, n - 1, wrapped);
        }
        ExecOp::DoRange => {
            if state.ints.len() < 2 || state.exec.is_empty() {
                return;
            }
            let body = state.exec.pop().expect("len checked");
            let dest = state.ints.pop().expect("len checked");
            let current = state.ints.pop().expect("len checked");
            state.ints.push(current);
            if current == dest {
                state.exec.push(body);
            } else {
                let next = if current < dest {
                    current + 1
                } else {
                    current - 1
                };
                let continuation = Instruction::Block(Arc::from(vec![
                    Instruction::Int(next),
                    Instruction::Int(dest),
                    Instruction::Op(Op::Exec(ExecOp::DoRange)),
                    body.clone(),
                ]));
                state.exec.push(continuation);
                state.exec.push(body);
            }
        }
    }
}

/// Arranges the exec stack so `do*range` runs `body` once per index from
/// `from` to `dest`.
fn push_range_loop(state: &mut InterpreterState, from: i64, dest: i64, body: Instruction) {
    state.exec.push(body);
    state.exec.push(Instruction::Op(Op::Exec(ExecOp::DoRange)));
    state.exec.push(Instruction::Int(dest));
    state.exec.push(Instruction::Int(from));
}

// ---------------------------------------------------------------------------
// Input instructions
// ---------------------------------------------------------------------------

fn push_input_value(state: &mut InterpreterState, value: InputValue) {
    match value {
        InputValue::Bool(b) => state.bools.push(b),
        InputValue::Int(i) => state.ints.push(i),
        InputValue::Float(f) => state.floats.push(f),
    }
}

fn input_op(state: &mut InterpreterState, op: InputOp) {
    if state.inputs.is_empty() {
        return;
    }
    match op {
        InputOp::InAll => {
            for i in 0..state.inputs.len() {
                push_input_value(state, state.inputs[i]);
            }
        }
        InputOp::InAllRev => {
            for i in (0..state.inputs.len()).rev() {
                push_input_value(state, state.inputs[i]);
            }
        }
        InputOp::Index => {
            let Some(i) = state.ints.pop() else { return };
            let idx = (i.unsigned_abs() % state.inputs.len() as u64) as usize;
            push_input_value(state, state.inputs[idx]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;
    use crate::rng::derive_stream;
    use crate::swarm::SoloView;

    fn run(text: &str, state: &mut InterpreterState) {
        let program = parse_program(text).unwrap();
        let limits = ExecutionLimits::default();
        let view = SoloView::new(vec![0.0; state.dim().max(1)]);
        let mut rng = derive_stream(0, &[]);
        run_move(state, &program, &limits, &view, &mut rng);
    }

    fn run_fresh(text: &str) -> InterpreterState {
        let mut state = InterpreterState::new(2);
        run(text, &mut state);
        state
    }

    #[test]
    fn integer_addition() {
        let state = run_fresh("(3 4 integer.+)");
        assert_eq!(state.ints, vec![7]);
        assert_eq!(state.exec_count(), 3);
    }

    #[test]
    fn insufficient_operands_are_a_noop() {
        let mut state = InterpreterState::new(2);
        state.ints.push(5);
        run("(integer.+)", &mut state);
        assert_eq!(state.ints, vec![5]);
    }

    #[test]
    fn blocks_unpack_and_cost_one_execution() {
        let state = run_fresh("((2 3) integer.*)");
        assert_eq!(state.ints, vec![6]);
        // block + two literals + multiply
        assert_eq!(state.exec_count(), 4);
    }

    #[test]
    fn stacks_persist_between_moves() {
        let mut state = InterpreterState::new(2);
        run("(1.0)", &mut state);
        run("(1.0)", &mut state);
        assert_eq!(state.floats, vec![1.0, 1.0]);
    }

    #[test]
    fn execution_limit_halts_runaway_loops() {
        let state = run_fresh("(1000000 exec.do*count (exec.noop))");
        assert_eq!(state.exec_count(), 100);
    }

    #[test]
    fn empty_program_changes_nothing() {
        let mut state = InterpreterState::new(2);
        state.floats.push(2.5);
        state.ints.push(3);
        run("()", &mut state);
        assert_eq!(state.floats, vec![2.5]);
        assert_eq!(state.ints, vec![3]);
        assert_eq!(state.exec_count(), 0);
    }

    #[test]
    fn protected_division() {
        let state = run_fresh("(6.0 3.0 float./)");
        assert_eq!(state.floats, vec![2.0]);
        let state = run_fresh("(6.0 0.0 float./)");
        assert_eq!(state.floats, vec![6.0, 0.0]);
    }

    #[test]
    fn protected_logs_and_pow() {
        let state = run_fresh("(-1.0 float.ln)");
        assert_eq!(state.floats, vec![-1.0]);
        let state = run_fresh("(0.0 float.log)");
        assert_eq!(state.floats, vec![0.0]);
        let state = run_fresh("(-4.0 0.5 float.pow)");
        assert_eq!(state.floats, vec![-4.0, 0.5]);
        let state = run_fresh("(1000.0 float.exp)");
        assert_eq!(state.floats, vec![1000.0]);
    }

    #[test]
    fn comparison_takes_top_as_second_argument() {
        // Stack [2, 10], 10 on top: tests 2 < 10.
        let state = run_fresh("(2 10 integer.<)");
        assert_eq!(state.bools, vec![true]);
        assert!(state.ints.is_empty());
        let state = run_fresh("(2 10 integer.>)");
        assert_eq!(state.bools, vec![false]);
        let state = run_fresh("(6.0 3.0 float.-)");
        assert_eq!(state.floats, vec![3.0]);
        let state = run_fresh("(2 3 integer.-)");
        assert_eq!(state.ints, vec![-1]);
    }

    #[test]
    fn integer_overflow_is_protected() {
        let state = run_fresh("(9223372036854775807 1 integer.+)");
        assert_eq!(state.ints, vec![i64::MAX, 1]);
        let state = run_fresh("(10 100 integer.pow)");
        assert_eq!(state.ints, vec![10, 100]);
        let state = run_fresh("(-9223372036854775808 integer.abs)");
        assert_eq!(state.ints, vec![i64::MIN]);
    }

    #[test]
    fn integer_division_truncates() {
        let state = run_fresh("(7 2 integer./)");
        assert_eq!(state.ints, vec![3]);
        let state = run_fresh("(-7 2 integer./)");
        assert_eq!(state.ints, vec![-3]);
        let state = run_fresh("(7 0 integer.%)");
        assert_eq!(state.ints, vec![7, 0]);
    }

    #[test]
    fn do_times_repeats_body() {
        let state = run_fresh("(3 exec.do*times (1.0))");
        assert_eq!(state.floats, vec![1.0, 1.0, 1.0]);
        assert!(state.ints.is_empty());
    }

    #[test]
    fn do_range_pushes_indices() {
        let state = run_fresh("(0 2 exec.do*range (integer.dup))");
        assert_eq!(state.ints, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn do_range_counts_down() {
        let state = run_fresh("(2 0 exec.do*range exec.noop)");
        assert_eq!(state.ints, vec![2, 1, 0]);
    }

    #[test]
    fn do_count_with_nonpositive_count_skips_body() {
        let state = run_fresh("(0 exec.do*count (1.0) -3 exec.do*times (2.0))");
        assert!(state.floats.is_empty());
        assert!(state.ints.is_empty());
    }

    #[test]
    fn exec_if_branches() {
        let state = run_fresh("(true exec.if (1.0) (2.0))");
        assert_eq!(state.floats, vec![1.0]);
        let state = run_fresh("(false exec.if (1.0) (2.0))");
        assert_eq!(state.floats, vec![2.0]);
    }

    #[test]
    fn exec_iflt_compares_second_to_top() {
        // 1.0 < 2.0 holds, so the first branch runs.
        let state = run_fresh("(1.0 2.0 exec.iflt (10.0) (20.0))");
        assert_eq!(state.floats, vec![10.0]);
        let state = run_fresh("(2.0 1.0 exec.iflt (10.0) (20.0))");
        assert_eq!(state.floats, vec![20.0]);
    }

    #[test]
    fn exec_eq_compares_structurally() {
        let state = run_fresh("(exec.= (1.0 2.0) (1.0 2.0) boolean.not)");
        // exec.= popped both blocks and pushed true; boolean.not flipped it.
        assert_eq!(state.bools, vec![false]);
    }

    #[test]
    fn exec_dup_duplicates_next_item() {
        let state = run_fresh("(exec.dup 2 exec.dup integer.+)");
        // 2 duplicated -> [2, 2]; integer.+ duplicated -> one sums, the
        // duplicate has one operand left and no-ops.
        assert_eq!(state.ints, vec![4]);
    }

    #[test]
    fn generic_swap_rot_depth() {
        let state = run_fresh("(1.0 2.0 float.swap)");
        assert_eq!(state.floats, vec![2.0, 1.0]);
        let state = run_fresh("(9 8 7 integer.rot)");
        assert_eq!(state.ints, vec![8, 7, 9]);
        let state = run_fresh("(boolean.stackdepth)");
        assert_eq!(state.ints, vec![0]);
        let state = run_fresh("(1.0 2.0 3.0 float.stackdepth)");
        assert_eq!(state.ints, vec![3]);
    }

    #[test]
    fn yank_and_shove_clamp_indices() {
        // yank depth 2 pulls the third-from-top to the top
        let state = run_fresh("(1.0 2.0 3.0 4.0 2 float.yank)");
        assert_eq!(state.floats, vec![1.0, 3.0, 4.0, 2.0]);
        // negative index: absolute value
        let state = run_fresh("(1.0 2.0 3.0 4.0 -2 float.yank)");
        assert_eq!(state.floats, vec![1.0, 3.0, 4.0, 2.0]);
        // out-of-range index clamps to the deepest element
        let state = run_fresh("(1.0 2.0 3.0 99 float.yankdup)");
        assert_eq!(state.floats, vec![1.0, 2.0, 3.0, 1.0]);
        // shove inserts the top at the clamped depth
        let state = run_fresh("(1.0 2.0 3.0 4.0 2 float.shove)");
        assert_eq!(state.floats, vec![1.0, 4.0, 2.0, 3.0]);
        let state = run_fresh("(1.0 2.0 3.0 4.0 99 float.shove)");
        assert_eq!(state.floats, vec![4.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn integer_yank_needs_two_entries() {
        let state = run_fresh("(5 integer.yank)");
        assert_eq!(state.ints, vec![5]);
        let state = run_fresh("(9 8 7 1 integer.yank)");
        assert_eq!(state.ints, vec![9, 7, 8]);
    }

    #[test]
    fn input_instructions() {
        let mut state = InterpreterState::new(2);
        state.set_inputs(vec![
            InputValue::Float(-5.0),
            InputValue::Float(5.0),
            InputValue::Int(2),
        ]);

        run("(input.inall)", &mut state);
        assert_eq!(state.floats, vec![-5.0, 5.0]);
        assert_eq!(state.ints, vec![2]);
        assert_eq!(state.inputs().len(), 3);

        let mut state2 = InterpreterState::new(2);
        state2.set_inputs(vec![
            InputValue::Float(-5.0),
            InputValue::Float(5.0),
            InputValue::Int(2),
        ]);
        run("(input.inallrev)", &mut state2);
        assert_eq!(state2.floats, vec![5.0, -5.0]);
        assert_eq!(state2.ints, vec![2]);

        let mut state3 = InterpreterState::new(2);
        state3.set_inputs(vec![
            InputValue::Float(-5.0),
            InputValue::Float(5.0),
            InputValue::Int(2),
        ]);
        run("(0 input.index)", &mut state3);
        assert_eq!(state3.floats, vec![-5.0]);
        run("(5 input.index)", &mut state3);
        assert_eq!(state3.ints, vec![2]);

        let mut state4 = InterpreterState::new(2);
        state4.set_inputs(vec![InputValue::Int(9)]);
        run("(input.stackdepth)", &mut state4);
        assert_eq!(state4.ints, vec![1]);
    }

    #[test]
    fn input_ops_noop_without_inputs() {
        let state = run_fresh("(input.inall input.inallrev 0 input.index)");
        assert!(state.floats.is_empty());
        assert_eq!(state.ints, vec![0]);
    }

    #[test]
    fn conversions() {
        let state = run_fresh("(true float.fromboolean 3 float.frominteger)");
        assert_eq!(state.floats, vec![1.0, 3.0]);
        let state = run_fresh("(2.7 integer.fromfloat -2.7 integer.fromfloat)");
        assert_eq!(state.ints, vec![2, -2]);
        let state = run_fresh("(0.0 boolean.fromfloat 3 boolean.frominteger)");
        assert_eq!(state.bools, vec![false, true]);
    }

    #[test]
    fn erc_is_inert_at_runtime() {
        let state = run_fresh("(float.erc integer.erc)");
        assert!(state.floats.is_empty());
        assert!(state.ints.is_empty());
    }

    #[test]
    fn run_move_is_deterministic_for_a_seed() {
        let text = "(float.rand integer.rand vector.rand boolean.rand float.rand float.+)";
        let program = parse_program(text).unwrap();
        let limits = ExecutionLimits::default();
        let view = SoloView::new(vec![0.0, 0.0]);

        let mut a = InterpreterState::new(2);
        let mut rng_a = derive_stream(42, &[7]);
        run_move(&mut a, &program, &limits, &view, &mut rng_a);

        let mut b = InterpreterState::new(2);
        let mut rng_b = derive_stream(42, &[7]);
        run_move(&mut b, &program, &limits, &view, &mut rng_b);

        assert_eq!(a.floats, b.floats);
        assert_eq!(a.ints, b.ints);
        assert_eq!(a.vectors, b.vectors);
        assert_eq!(a.bools, b.bools);
    }

    #[test]
    fn states_and_programs_move_between_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<InterpreterState>();
        assert_send_sync::<Program>();
    }

    #[test]
    fn rand_ranges() {
        let program = parse_program("(float.rand integer.rand)").unwrap();
        let limits = ExecutionLimits::default();
        let view = SoloView::new(vec![0.0, 0.0]);
        let mut rng = derive_stream(1, &[]);
        let mut state = InterpreterState::new(2);
        for _ in 0..2000 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
        }
        assert!(state.floats.iter().all(|f| (-1.0..=1.0).contains(f)));
        assert!(state.ints.iter().all(|i| (-10..=10).contains(i)));
        assert!(state.ints.contains(&-10));
        assert!(state.ints.contains(&10));
    }

    #[test]
    fn vector_rand_respects_input_bounds() {
        let program = parse_program("(vector.rand)").unwrap();
        let limits = ExecutionLimits::default();
        let view = SoloView::new(vec![0.0, 0.0]);
        let mut rng = derive_stream(2, &[]);
        let mut state = InterpreterState::new(2);
        state.set_inputs(vec![
            InputValue::Float(-5.0),
            InputValue::Float(5.0),
            InputValue::Int(2),
        ]);
        for _ in 0..200 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
        }
        assert!(state
            .vectors
            .iter()
            .all(|v| v.len() == 2 && v.iter().all(|c| (-5.0..=5.0).contains(c))));
        assert!(state
            .vectors
            .iter()
            .any(|v| v.iter().any(|c| c.abs() > 1.0)));
    }
}
