//! Evolving continuous optimisers as programs in a stack-based language.
//!
//! This crate provides:
//!
//! - a typed-stack virtual machine with a vector type for search points
//!   ([`interp`], [`swarm`], [`program`], [`op`]);
//! - transformable benchmark landscapes ([`landscape`]);
//! - a harness that runs a population of persistent programs as an
//!   optimiser under a fitness-evaluation budget ([`harness`]);
//! - a genetic-programming loop that evolves such optimisers ([`evolve`]);
//! - a command-line front end ([`cli`], `pushopt` binary).
//!
//! Start with the crate examples (`cargo run --example ...`), one per major
//! capability.

pub mod cli;
pub mod evolve;
pub mod harness;
pub mod interp;
pub mod landscape;
pub mod op;
pub mod program;
pub mod rng;
pub mod swarm;

pub use interp::{ExecutionLimits, InputValue, InterpreterState};
pub use landscape::{Landscape, TransformSpec, TransformedLandscape};
pub use program::{parse_program, print_program, Program};
pub use swarm::{SoloView, SwarmView};
