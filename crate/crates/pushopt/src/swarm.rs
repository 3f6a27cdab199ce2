//! Search-point vectors and the shared population view.
//!
//! Search points are fixed-length `Vec<f64>`s on the interpreter's vector
//! stack. The `vector.current` / `vector.best` instructions let a program
//! inspect other population members through a read-only [`SwarmView`];
//! member indices are taken modulo the population size, and an empty or
//! negative index selects the executing member itself.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::interp::{run_sandboxed, ExecutionLimits, InterpreterState};
use crate::op::VectorOp;

/// Read-only snapshot of the population's search state, visible to a single
/// member while it executes one move.
pub trait SwarmView {
    fn popsize(&self) -> usize;
    /// Index of the member currently executing.
    fn self_index(&self) -> usize;
    fn current_point(&self, member: usize) -> &[f64];
    fn best_point(&self, member: usize) -> &[f64];
}

/// View for a member running outside a population (tests, benchmarks,
/// single-program tooling).
#[derive(Debug, Clone)]
pub struct SoloView {
    current: Vec<f64>,
    best: Vec<f64>,
}

impl SoloView {
    pub fn new(point: Vec<f64>) -> Self {
        SoloView {
            best: point.clone(),
            current: point,
        }
    }

    pub fn with_best(point: Vec<f64>, best: Vec<f64>) -> Self {
        SoloView {
            current: point,
            best,
        }
    }
}

impl SwarmView for SoloView {
    fn popsize(&self) -> usize {
        1
    }

    fn self_index(&self) -> usize {
        0
    }

    fn current_point(&self, _member: usize) -> &[f64] {
        &self.current
    }

    fn best_point(&self, _member: usize) -> &[f64] {
        &self.best
    }
}

/// Which side of a member's search state to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Current,
    Best,
}

/// Normalizes a popped member index: modulo popsize, with an absent or
/// negative index selecting the executing member.
pub fn resolve_member(view: &dyn SwarmView, index: Option<i64>) -> usize {
    match index {
        Some(i) if i >= 0 => (i as u64 % view.popsize() as u64) as usize,
        _ => view.self_index(),
    }
}

/// Looks up a copy of a member's current or best point.
pub fn swarm_view_lookup(view: &dyn SwarmView, kind: PointKind, index: Option<i64>) -> Vec<f64> {
    let member = resolve_member(view, index);
    match kind {
        PointKind::Current => view.current_point(member).to_vec(),
        PointKind::Best => view.best_point(member).to_vec(),
    }
}

// ---------------------------------------------------------------------------
// Vector instruction semantics
// ---------------------------------------------------------------------------

fn vec_bin(state: &mut InterpreterState, f: impl Fn(f64, f64) -> f64, guard_divisor: bool) {
    let n = state.vectors.len();
    if n < 2 {
        return;
    }
    let (a, b) = (&state.vectors[n - 2], &state.vectors[n - 1]);
    if a.len() != b.len() {
        return;
    }
    if guard_divisor && b.contains(&0.0) {
        return;
    }
    let r: Vec<f64> = a.iter().zip(b.iter()).map(|(&x, &y)| f(x, y)).collect();
    if r.iter().any(|x| !x.is_finite()) {
        return;
    }
    state.vectors.truncate(n - 1);
    state.vectors[n - 2] = r;
}

fn vec_scale(state: &mut InterpreterState) {
    if state.vectors.is_empty() || state.floats.is_empty() {
        return;
    }
    let k = *state.floats.last().expect("checked");
    let v = state.vectors.last().expect("checked");
    if v.iter().any(|&x| !(x * k).is_finite()) {
        return;
    }
    state.floats.pop();
    for x in state.vectors.last_mut().expect("checked") {
        *x *= k;
    }
}

fn vec_dim(state: &mut InterpreterState, mul: bool) {
    if state.vectors.is_empty() || state.floats.is_empty() || state.ints.is_empty() {
        return;
    }
    let v = state.vectors.last().expect("checked");
    if v.is_empty() {
        return;
    }
    let i = *state.ints.last().expect("checked");
    let f = *state.floats.last().expect("checked");
    let k = (i.unsigned_abs() % v.len() as u64) as usize;
    let updated = if mul { v[k] * f } else { v[k] + f };
    if !updated.is_finite() {
        return;
    }
    state.ints.pop();
    state.floats.pop();
    state.vectors.last_mut().expect("checked")[k] = updated;
}

fn vec_between(state: &mut InterpreterState) {
    let n = state.vectors.len();
    if n < 2 || state.floats.is_empty() {
        return;
    }
    let (a, b) = (&state.vectors[n - 2], &state.vectors[n - 1]);
    if a.len() != b.len() {
        return;
    }
    let t = state.floats.last().expect("checked").clamp(0.0, 1.0);
    let r: Vec<f64> = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| x + t * (y - x))
        .collect();
    if r.iter().any(|x| !x.is_finite()) {
        return;
    }
    state.floats.pop();
    state.vectors.truncate(n - 1);
    state.vectors[n - 2] = r;
}

fn vec_urand(state: &mut InterpreterState, rng: &mut ChaCha8Rng) {
    if state.dim() == 0 {
        return;
    }
    for _ in 0..8 {
        let v: Vec<f64> = (0..state.dim())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            state
                .vectors
                .push(v.into_iter().map(|x| x / norm).collect());
            return;
        }
    }
}

/// `vector.wrand`: pops a width w and pushes a random vector bounded by
/// `[-|w|, |w|]`. The randomness lands on one uniformly chosen component;
/// the rest are zero. Programs combine such vectors with their current or
/// best points to take single-axis steps, which is what gives several of
/// the bundled optimisers their axis-aligned move patterns.
fn vec_wrand(state: &mut InterpreterState, rng: &mut ChaCha8Rng) {
    if state.dim() == 0 {
        return;
    }
    let Some(w) = state.floats.pop() else { return };
    // The sampled range needs headroom above its width even for extreme w
    // (the out-of-bounds sentinel is the largest finite float).
    let w = w.abs().min(1.0e300);
    let mut v = vec![0.0; state.dim()];
    let axis = rng.gen_range(0..state.dim());
    v[axis] = rng.gen_range(-w..=w);
    state.vectors.push(v);
}

/// Runs `body` once per component (or pair of components), replacing the
/// component with the float-stack top whenever the body left the float
/// stack taller than before the component was pushed.
fn vec_apply(
    state: &mut InterpreterState,
    zip: bool,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    let needed = if zip { 2 } else { 1 };
    if state.exec.is_empty() || state.vectors.len() < needed {
        return;
    }
    if zip {
        let n = state.vectors.len();
        if state.vectors[n - 1].len() != state.vectors[n - 2].len() {
            return;
        }
    }
    let body = state.exec.pop().expect("checked");
    let second = if zip { state.vectors.pop() } else { None };
    let mut target = state.vectors.pop().expect("checked");
    for i in 0..target.len() {
        if state.exec_count() >= limits.max_executions_per_move {
            break;
        }
        let floor = state.floats.len();
        if let Some(other) = &second {
            state.floats.push(other[i]);
        }
        state.floats.push(target[i]);
        run_sandboxed(state, body.clone(), limits, view, rng);
        if state.floats.len() > floor {
            let result = *state.floats.last().expect("non-empty");
            if result.is_finite() {
                target[i] = result;
            }
        }
        state.floats.truncate(floor);
    }
    state.vectors.push(target);
}

fn vec_lookup(state: &mut InterpreterState, kind: PointKind, view: &dyn SwarmView) {
    let index = state.ints.pop();
    let point = swarm_view_lookup(view, kind, index);
    state.vectors.push(point);
}

pub(crate) fn execute_vector_op(
    op: VectorOp,
    state: &mut InterpreterState,
    limits: &ExecutionLimits,
    view: &dyn SwarmView,
    rng: &mut ChaCha8Rng,
) {
    match op {
        VectorOp::Add => vec_bin(state, |a, b| a + b, false),
        VectorOp::Sub => vec_bin(state, |a, b| a - b, false),
        VectorOp::Mul => vec_bin(state, |a, b| a * b, false),
        VectorOp::Div => vec_bin(state, |a, b| a / b, true),
        VectorOp::Scale => vec_scale(state),
        VectorOp::Dprod => {
            let n = state.vectors.len();
            if n < 2 || state.vectors[n - 1].len() != state.vectors[n - 2].len() {
                return;
            }
            let r: f64 = state.vectors[n - 2]
                .iter()
                .zip(state.vectors[n - 1].iter())
                .map(|(&x, &y)| x * y)
                .sum();
            if !r.is_finite() {
                return;
            }
            state.vectors.truncate(n - 2);
            state.floats.push(r);
        }
        VectorOp::Mag => {
            let Some(v) = state.vectors.last() else {
                return;
            };
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !r.is_finite() {
                return;
            }
            state.vectors.pop();
            state.floats.push(r);
        }
        VectorOp::DimAdd => vec_dim(state, false),
        VectorOp::DimMul => vec_dim(state, true),
        VectorOp::Between => vec_between(state),
        VectorOp::Urand => vec_urand(state, rng),
        VectorOp::Wrand => vec_wrand(state, rng),
        VectorOp::Apply => vec_apply(state, false, limits, view, rng),
        VectorOp::Zip => vec_apply(state, true, limits, view, rng),
        VectorOp::Current => vec_lookup(state, PointKind::Current, view),
        VectorOp::Best => vec_lookup(state, PointKind::Best, view),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run_move, InputValue};
    use crate::program::parse_program;
    use crate::rng::derive_stream;

    fn run_with(state: &mut InterpreterState, text: &str, view: &dyn SwarmView) {
        let program = parse_program(text).unwrap();
        let limits = ExecutionLimits::default();
        let mut rng = derive_stream(11, &[]);
        run_move(state, &program, &limits, view, &mut rng);
    }

    fn run2(text: &str, vectors: Vec<Vec<f64>>) -> InterpreterState {
        let mut state = InterpreterState::new(2);
        state.vectors = vectors;
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, text, &view);
        state
    }

    #[test]
    fn componentwise_arithmetic() {
        let state = run2("(vector.+)", vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(state.vectors, vec![vec![4.0, 6.0]]);
        let state = run2("(vector.-)", vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(state.vectors, vec![vec![-2.0, -2.0]]);
        let state = run2("(vector.*)", vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(state.vectors, vec![vec![3.0, 8.0]]);
        let state = run2("(vector./)", vec![vec![6.0, 8.0], vec![3.0, 4.0]]);
        assert_eq!(state.vectors, vec![vec![2.0, 2.0]]);
    }

    #[test]
    fn division_by_zero_component_is_a_noop() {
        let state = run2("(vector./)", vec![vec![6.0, 8.0], vec![3.0, 0.0]]);
        assert_eq!(state.vectors, vec![vec![6.0, 8.0], vec![3.0, 0.0]]);
    }

    #[test]
    fn magnitude() {
        let state = run2("(vector.mag)", vec![vec![3.0, 4.0]]);
        assert!(state.vectors.is_empty());
        assert_eq!(state.floats, vec![5.0]);
    }

    #[test]
    fn scale_magnitude_identity() {
        let mut state = InterpreterState::new(3);
        state.vectors = vec![vec![1.5, -2.0, 0.25]];
        state.floats = vec![-3.0];
        let view = SoloView::new(vec![0.0; 3]);
        run_with(&mut state, "(vector.scale vector.mag)", &view);
        let base = (1.5f64 * 1.5 + 4.0 + 0.0625).sqrt();
        let got = state.floats[0];
        assert!((got - 3.0 * base).abs() <= 1e-12 * got.abs());
    }

    #[test]
    fn dprod_commutes() {
        let a = vec![1.25, -2.5, 3.0];
        let b = vec![0.5, 4.0, -1.5];
        let mut s1 = InterpreterState::new(3);
        s1.vectors = vec![a.clone(), b.clone()];
        let view = SoloView::new(vec![0.0; 3]);
        run_with(&mut s1, "(vector.dprod)", &view);
        let mut s2 = InterpreterState::new(3);
        s2.vectors = vec![b, a];
        run_with(&mut s2, "(vector.dprod)", &view);
        assert_eq!(s1.floats, s2.floats);
    }

    #[test]
    fn between_interpolates_and_clamps() {
        let mut state = InterpreterState::new(2);
        state.vectors = vec![vec![0.0, 10.0], vec![4.0, 2.0]];
        state.floats = vec![0.25];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.between)", &view);
        assert_eq!(state.vectors, vec![vec![1.0, 8.0]]);

        // t = 0 returns the deeper vector, t = 1 the top vector, and values
        // outside [0, 1] clamp.
        for (t, expected) in [
            (0.0, vec![0.0, 10.0]),
            (1.0, vec![4.0, 2.0]),
            (7.0, vec![4.0, 2.0]),
        ] {
            let mut state = InterpreterState::new(2);
            state.vectors = vec![vec![0.0, 10.0], vec![4.0, 2.0]];
            state.floats = vec![t];
            run_with(&mut state, "(vector.between)", &view);
            assert_eq!(state.vectors, vec![expected], "t={t}");
        }
    }

    #[test]
    fn between_identity_on_equal_endpoints() {
        let a = vec![0.3, -0.7];
        let mut state = InterpreterState::new(2);
        state.vectors = vec![a.clone(), a.clone()];
        state.floats = vec![0.7];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.between)", &view);
        assert_eq!(state.vectors, vec![a]);
    }

    #[test]
    fn dim_add_uses_index_modulo_dimension() {
        let mut state = InterpreterState::new(3);
        state.vectors = vec![vec![0.0, 0.0, 0.0]];
        state.floats = vec![2.5];
        state.ints = vec![4];
        let view = SoloView::new(vec![0.0; 3]);
        run_with(&mut state, "(vector.dim+)", &view);
        assert_eq!(state.vectors, vec![vec![0.0, 2.5, 0.0]]);
        assert!(state.ints.is_empty());
        assert!(state.floats.is_empty());
    }

    #[test]
    fn dim_mul_scales_one_component() {
        let mut state = InterpreterState::new(2);
        state.vectors = vec![vec![3.0, 5.0]];
        state.floats = vec![10.0];
        state.ints = vec![-3];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.dim*)", &view);
        assert_eq!(state.vectors, vec![vec![3.0, 50.0]]);
    }

    #[test]
    fn urand_is_unit_length() {
        let mut state = InterpreterState::new(5);
        let view = SoloView::new(vec![0.0; 5]);
        let program = parse_program("(vector.urand)").unwrap();
        let limits = ExecutionLimits::default();
        let mut rng = derive_stream(3, &[]);
        for _ in 0..500 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
        }
        for v in &state.vectors {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "norm {norm}");
        }
    }

    #[test]
    fn wrand_is_a_bounded_single_axis_step() {
        let mut state = InterpreterState::new(4);
        let view = SoloView::new(vec![0.0; 4]);
        let program = parse_program("(-0.25 vector.wrand)").unwrap();
        let limits = ExecutionLimits::default();
        let mut rng = derive_stream(4, &[]);
        for _ in 0..500 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
        }
        assert_eq!(state.vectors.len(), 500);
        let mut axis_hits = [0usize; 4];
        for v in &state.vectors {
            assert_eq!(v.len(), 4);
            assert!(v.iter().all(|c| c.abs() <= 0.25));
            let nonzero: Vec<usize> = (0..4).filter(|&i| v[i] != 0.0).collect();
            assert!(nonzero.len() <= 1, "{v:?}");
            if let Some(&axis) = nonzero.first() {
                axis_hits[axis] += 1;
            }
        }
        assert!(axis_hits.iter().all(|&n| n > 50), "{axis_hits:?}");
    }

    #[test]
    fn apply_transforms_each_component() {
        let mut state = InterpreterState::new(3);
        state.vectors = vec![vec![1.0, 2.0, 3.0]];
        let view = SoloView::new(vec![0.0; 3]);
        run_with(&mut state, "(vector.apply (10.0 float.*))", &view);
        assert_eq!(state.vectors, vec![vec![10.0, 20.0, 30.0]]);
        assert!(state.floats.is_empty());
    }

    #[test]
    fn apply_with_consuming_body_leaves_components() {
        let mut state = InterpreterState::new(2);
        state.vectors = vec![vec![1.0, 2.0]];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.apply float.pop)", &view);
        assert_eq!(state.vectors, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn zip_with_noop_body_keeps_first_vector() {
        let mut state = InterpreterState::new(2);
        state.vectors = vec![vec![1.0, 2.0], vec![30.0, 40.0]];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.zip exec.noop)", &view);
        assert_eq!(state.vectors, vec![vec![1.0, 2.0]]);
        assert!(state.floats.is_empty());
    }

    #[test]
    fn zip_combines_pairs() {
        let mut state = InterpreterState::new(2);
        state.vectors = vec![vec![1.0, 2.0], vec![30.0, 40.0]];
        let view = SoloView::new(vec![0.0, 0.0]);
        run_with(&mut state, "(vector.zip float.+)", &view);
        assert_eq!(state.vectors, vec![vec![31.0, 42.0]]);
    }

    #[test]
    fn apply_respects_move_budget() {
        let mut state = InterpreterState::new(50);
        state.vectors = vec![vec![1.0; 50]];
        let view = SoloView::new(vec![0.0; 50]);
        // Each component costs three executions; the budget runs out after
        // roughly a third of the components.
        run_with(&mut state, "(vector.apply (10.0 float.*))", &view);
        let v = &state.vectors[0];
        assert!(v.contains(&10.0));
        assert!(v.contains(&1.0));
        assert!(state.exec_count() <= 100);
    }

    struct FakeSwarm {
        currents: Vec<Vec<f64>>,
        bests: Vec<Vec<f64>>,
        me: usize,
    }

    impl SwarmView for FakeSwarm {
        fn popsize(&self) -> usize {
            self.currents.len()
        }
        fn self_index(&self) -> usize {
            self.me
        }
        fn current_point(&self, member: usize) -> &[f64] {
            &self.currents[member]
        }
        fn best_point(&self, member: usize) -> &[f64] {
            &self.bests[member]
        }
    }

    fn fake_swarm() -> FakeSwarm {
        FakeSwarm {
            currents: (0..5).map(|i| vec![i as f64, 0.0]).collect(),
            bests: (0..5).map(|i| vec![0.0, i as f64]).collect(),
            me: 3,
        }
    }

    #[test]
    fn member_resolution() {
        let view = fake_swarm();
        assert_eq!(resolve_member(&view, Some(7)), 2);
        assert_eq!(resolve_member(&view, Some(-1)), 3);
        assert_eq!(resolve_member(&view, None), 3);
        assert_eq!(resolve_member(&view, Some(0)), 0);
        let solo = SoloView::new(vec![1.0]);
        assert_eq!(resolve_member(&solo, Some(41)), 0);
    }

    #[test]
    fn current_and_best_lookups() {
        let view = fake_swarm();
        let mut state = InterpreterState::new(2);
        run_with(&mut state, "(7 vector.current)", &view);
        assert_eq!(state.vectors, vec![vec![2.0, 0.0]]);
        assert!(state.ints.is_empty());

        let mut state = InterpreterState::new(2);
        run_with(&mut state, "(vector.best)", &view);
        assert_eq!(state.vectors, vec![vec![0.0, 3.0]]);

        let mut state = InterpreterState::new(2);
        run_with(&mut state, "(-5 vector.best)", &view);
        assert_eq!(state.vectors, vec![vec![0.0, 3.0]]);
        assert!(state.ints.is_empty(), "negative index is still consumed");
    }

    #[test]
    fn lookup_returns_copies() {
        let view = fake_swarm();
        let a = swarm_view_lookup(&view, PointKind::Current, Some(1));
        assert_eq!(a, vec![1.0, 0.0]);
        let b = swarm_view_lookup(&view, PointKind::Best, None);
        assert_eq!(b, vec![0.0, 3.0]);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn rand_instructions_never_leak_nonfinite() {
        let mut state = InterpreterState::new(3);
        state.set_inputs(vec![
            InputValue::Float(-100.0),
            InputValue::Float(100.0),
            InputValue::Int(3),
        ]);
        let view = SoloView::new(vec![0.0; 3]);
        let program = parse_program("(vector.rand vector.urand 1.0e300 vector.wrand)").unwrap();
        let limits = ExecutionLimits::default();
        let mut rng = derive_stream(9, &[]);
        for _ in 0..100 {
            run_move(&mut state, &program, &limits, &view, &mut rng);
        }
        assert!(state.vectors.iter().flatten().all(|c| c.is_finite()));
    }
}
