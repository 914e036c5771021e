//! End-to-end problems built on the compiler: ratio-cut graph partitioning
//! and logistic regression.

mod logreg;
mod ratio_cut;

use thiserror::Error;

use crate::approx::ApproxError;
use crate::compiler::CompileError;
use crate::solvers::SolveError;

pub use logreg::{
    generate_logreg_dataset, logreg_objective, predict, run_logreg_experiment, sigmoid, write_dataset, Dataset,
    EvalReport, LogRegConfig, LogRegModel,
};
pub use ratio_cut::{
    rcut_value, ratio_cut_objective, solve_ratio_cut, Graph, RatioCutConfig, RatioCutModel, RatioCutResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShowcaseError {
    #[error("line {line}: {message}")]
    GraphSyntax { line: usize, message: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("partition has {got} entries for {expected} vertices")]
    PartitionLength { expected: usize, got: usize },
    #[error("one side of the partition is empty")]
    EmptySide,
    #[error("graph needs at least two vertices")]
    TooFewVertices,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
