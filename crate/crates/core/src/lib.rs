//! Buildings as outputs of programs run by a construction machine.
//!
//! [`vm`] parses and runs the construction language, [`world`] holds the
//! voxel structures and their physical checks, and the analysis modules
//! measure program-length complexity ([`synthesis`]), pattern-based
//! beauty ([`aesthetics`]), regularity and fractal dimension
//! ([`naturalness`]), search for designs ([`designer`]) and probe fleets of
//! identical buildings with one attack ([`fleet`]).

pub mod vm;
pub mod aesthetics;
pub mod cli;
pub mod designer;
pub mod fleet;
pub mod naturalness;
pub mod synthesis;
pub mod world;
