//! Polynomial-to-QUBO compiler toolkit.

pub mod approx;
pub mod cli;
pub mod compiler;
pub mod poly;
pub mod problem;
pub mod showcase;
pub mod solvers;
