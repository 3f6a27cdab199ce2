//! Evolve an optimiser at desk scale: a small population of programs is
//! trained on the 2-D sphere with random landscape transforms, then the
//! best-of-run program is reevaluated without transforms.
//!
//! ```bash
//! cargo run --release --example evolve_optimiser
//! ```

use pushopt::evolve::{evolve, EvolutionConfig};

fn main() {
    let config = EvolutionConfig {
        gp_popsize: 50,
        generations: 15,
        landscape: "f1".to_string(),
        dimension: 2,
        popsize: 5,
        moves: 20,
        fitness_repeats: 10,
        transforms: true,
        reeval_repeats: 25,
        master_seed: 42,
        ..Default::default()
    };
    let report = evolve(&config).expect("valid configuration");

    for record in &report.history {
        println!(
            "gen {:>2}  best {:.4e}  mean {:.4e}  best-so-far {:.4e}",
            record.generation, record.best_fitness, record.mean_fitness, record.best_so_far
        );
    }
    println!("\nbest program: {}", report.best_program);
    println!(
        "training fitness (10 transformed runs): {:.4e}",
        report.best_fitness
    );
    println!(
        "reevaluated error ({} untransformed runs): {:.4e}",
        report.reevaluation.repeats, report.reevaluation.mean_best
    );
}
