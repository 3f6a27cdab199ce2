//! Evaluate one of the bundled evolved optimisers on the 2-D version of
//! the landscape it was trained for: 25 independent runs, no transforms.
//!
//! ```bash
//! cargo run --example run_bundled_optimiser
//! ```

use std::path::Path;

use pushopt::harness::{evaluate_optimiser, RunConfig};
use pushopt::landscape::Landscape;
use pushopt::program::parse_program;
use pushopt::ExecutionLimits;

fn main() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/f13_best.push");
    let text = std::fs::read_to_string(fixture).expect("fixture exists");
    let program = parse_program(&text).expect("fixture parses");

    let landscape = Landscape::griewank_rosenbrock(2);
    let config = RunConfig {
        popsize: 1,
        moves: 1000,
        repeats: 25,
        seed: 7,
    };
    let report = evaluate_optimiser(
        &program,
        &landscape,
        &config,
        false,
        ExecutionLimits::default(),
    );

    println!("program: {}", report.program);
    println!(
        "landscape {} dim {} budget {}x{} over {} repeats",
        report.landscape, report.dimension, report.popsize, report.moves, report.repeats
    );
    for (i, best) in report.per_repeat_best.iter().enumerate() {
        println!("repeat {i:>2}: {best:.6e}");
    }
    println!("mean error: {:.6e}", report.mean_best);
    println!("objective evaluations: {}", report.evaluations);
}
