//! Walk through the five benchmark landscapes and show what the random
//! training transform does to one of them.
//!
//! ```bash
//! cargo run --example landscape_tour
//! ```

use pushopt::landscape::{Landscape, TransformSpec, TransformedLandscape, LANDSCAPE_NAMES};
use pushopt::rng::derive_stream;
use rand::Rng;

fn main() {
    let dim = 2;
    let mut rng = derive_stream(6, &[]);
    for name in LANDSCAPE_NAMES {
        let l = Landscape::by_name(name, dim, 2005).unwrap();
        let random: Vec<f64> = (0..dim)
            .map(|_| rng.gen_range(l.lower()..=l.upper()))
            .collect();
        println!(
            "{:>4}  bounds [{:>6.2}, {:>6.2}]  f(optimum) = {:.1e}  f({:>6.2}, {:>6.2}) = {:.4e}",
            name,
            l.lower(),
            l.upper(),
            l.evaluate(l.optimum()),
            random[0],
            random[1],
            l.evaluate(&random),
        );
    }

    println!("\nrandom transform on f9 (translate, scale, flip per axis):");
    let l = Landscape::rastrigin(dim);
    for _ in 0..3 {
        let spec = TransformSpec::sample(&mut rng, &l);
        let tl = TransformedLandscape::new(&l, spec.clone());
        let optimum = tl.optimum();
        println!(
            "  t = [{:+.2}, {:+.2}]  s = [{:.2}, {:.2}]  flip = [{:+.0}, {:+.0}]  optimum moved to [{:+.3}, {:+.3}], f = {:.1e}",
            spec.translation[0],
            spec.translation[1],
            spec.scale[0],
            spec.scale[1],
            spec.flip[0],
            spec.flip[1],
            optimum[0],
            optimum[1],
            tl.evaluate(&optimum),
        );
    }
}
