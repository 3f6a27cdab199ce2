//! Parse a program, print its canonical form, and summarise its atoms.
//!
//! ```bash
//! cargo run --example parse_and_inspect
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use pushopt::op::registry;
use pushopt::program::{format_float, parse_program, print_program, Instruction};

fn main() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/f12_best.push");
    let text = std::fs::read_to_string(fixture).expect("fixture exists");
    let program = parse_program(&text).expect("fixture parses");

    println!("canonical: {}", print_program(&program));
    println!("atoms: {}", program.atom_count());

    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for item in &program.items {
        let key = match item {
            Instruction::Op(op) => registry().name(*op).to_string(),
            Instruction::Bool(b) => b.to_string(),
            Instruction::Int(i) => i.to_string(),
            Instruction::Float(f) => format_float(*f),
            Instruction::Block(_) => "(block)".to_string(),
        };
        *histogram.entry(key).or_default() += 1;
    }
    let mut entries: Vec<_> = histogram.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for (token, count) in entries {
        println!("{count:>3}  {token}");
    }

    // Unknown instructions are rejected with their position.
    let err = parse_program("(float.sin float.foo)").unwrap_err();
    println!("\nrejected example: {err}");
}
