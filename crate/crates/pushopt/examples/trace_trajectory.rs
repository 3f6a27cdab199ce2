//! Export the search trajectory of an optimiser as CSV for plotting.
//!
//! The f13 optimiser traced here moves along one axis at a time, so a
//! scatter plot of the x0/x1 columns draws a cross through the optimum.
//!
//! ```bash
//! cargo run --example trace_trajectory
//! ```

use std::path::Path;

use pushopt::harness::{trace_run, trace_to_csv, RunConfig};
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
        repeats: 1,
        seed: 1,
    };
    let (report, records) = trace_run(
        &program,
        &landscape,
        &config,
        false,
        ExecutionLimits::default(),
    );

    let csv = trace_to_csv(&records, landscape.dim());
    let out = Path::new("f13_trace.csv");
    std::fs::write(out, &csv).expect("writable working directory");

    let best = records
        .iter()
        .filter(|r| r.in_bounds)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least the initial record");
    println!("{} records -> {}", records.len(), out.display());
    println!("best value {:.6e} at {:?}", best.value, best.point);
    println!("per-repeat best: {:?}", report.per_repeat_best);

    // Quick look at the move structure without plotting: how many
    // coordinates change per move relative to the best point so far.
    let (mut bestval, mut incumbent) = (records[0].value, records[0].point.clone());
    let mut single = 0;
    let mut moving = 0;
    for r in records.iter().filter(|r| r.move_num > 0) {
        let changed = (0..2).filter(|&i| r.point[i] != incumbent[i]).count();
        if changed > 0 {
            moving += 1;
            if changed == 1 {
                single += 1;
            }
        }
        if r.in_bounds && r.value < bestval {
            bestval = r.value;
            incumbent = r.point.clone();
        }
    }
    println!("{single} of {moving} moving proposals changed exactly one coordinate");
}
