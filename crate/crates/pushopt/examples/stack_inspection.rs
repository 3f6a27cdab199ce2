//! Watch the interpreter's stacks evolve while a bundled optimiser runs.
//!
//! Useful for understanding how an evolved program works: the program is
//! stepped move by move through the swarm harness and the member's typed
//! stacks are dumped after each move.
//!
//! ```bash
//! cargo run --example stack_inspection
//! ```

use std::path::Path;

use pushopt::harness::SwarmRun;
use pushopt::landscape::{Landscape, TransformedLandscape};
use pushopt::program::parse_program;
use pushopt::rng::{derive_stream, STREAM_REPEAT};
use pushopt::ExecutionLimits;

fn main() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/f13_best.push");
    let text = std::fs::read_to_string(fixture).expect("fixture exists");
    let program = parse_program(&text).expect("fixture parses");
    println!("program: {program}\n");

    let landscape = Landscape::griewank_rosenbrock(2);
    let problem = TransformedLandscape::untransformed(&landscape);
    let mut rng = derive_stream(1, &[STREAM_REPEAT, 0]);
    let mut run = SwarmRun::new(problem, 1, ExecutionLimits::default(), &mut rng);

    let member = &run.members()[0];
    println!(
        "init: point = {:?}  value = {:.4}  inputs = {:?}",
        member.point,
        member.value,
        member.interp.inputs()
    );

    for m in 1..=8 {
        run.step_move(&program, &mut rng, None, 0);
        let member = &run.members()[0];
        println!(
            "\nafter move {m} ({} executions):",
            member.interp.exec_count()
        );
        println!(
            "  point    {:?}  value {:.4}  best {:?}",
            member.point, member.value, member.best
        );
        println!("  bools    {:?}", member.interp.bools);
        println!("  ints     {:?}", member.interp.ints);
        let floats: Vec<String> = member
            .interp
            .floats
            .iter()
            .map(|f| format!("{f:.3}"))
            .collect();
        println!("  floats   [{}]", floats.join(", "));
        let vectors: Vec<String> = member
            .interp
            .vectors
            .iter()
            .map(|v| format!("[{:.3}, {:.3}]", v[0], v[1]))
            .collect();
        println!("  vectors  [{}]", vectors.join(", "));
    }
    println!(
        "\npopulation best: {:.6e} at {:?}",
        run.pbest(),
        run.pbest_point()
    );
}
