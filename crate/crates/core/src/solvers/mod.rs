//! Classical QUBO solvers and the minimum-preservation check.

mod anneal;
mod brute;
mod theorem;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::compiler::{CompileError, DecodeRegistry, Decoded, QuboMatrix};
use crate::poly::{PolyError, Var};

pub use anneal::{simulated_anneal, AnnealParams, AnnealSchedule};
pub use brute::{brute_force, brute_force_with_limit, BRUTE_FORCE_LIMIT};
pub use theorem::{verify_theorem1, verify_theorem1_with_limits, EquivalenceReport, CANDIDATE_LIMIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{n} bits exceed the brute-force limit of {limit}")]
    TooManyBits { n: usize, limit: usize },
    #[error("candidate set of {count} points exceeds the limit of {limit}")]
    TooManyCandidates { count: u128, limit: u128 },
    #[error("invalid annealing parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A bitstring with its energy and, once decoded, the original variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub decoded: BTreeMap<Var, f64>,
    /// True until a registry reports a violated constraint.
    pub consistent: bool,
}

impl Solution {
    fn new(q: &QuboMatrix, bits: Vec<bool>) -> Self {
        Self {
            energy: q.energy(&bits),
            bits,
            decoded: BTreeMap::new(),
            consistent: true,
        }
    }

    /// Fills `decoded` and `consistent` from `registry`.
    pub fn decode_with(mut self, registry: &DecodeRegistry) -> Result<Self, CompileError> {
        let Decoded { values, consistent } = registry.decode(&self.bits)?;
        self.decoded = values;
        self.consistent = consistent;
        Ok(self)
    }

    /// The bits as a `0`/`1` string, bit 0 first.
    pub fn bitstring(&self) -> String {
        bits_to_string(&self.bits)
    }
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Reads the bits back into original variables.
pub fn decode(bits: &[bool], registry: &DecodeRegistry) -> Result<Decoded, CompileError> {
    registry.decode(bits)
}

/// Dense view of a matrix for incremental energy updates: flipping bit `k`
/// changes the energy by `±field[k]`.
pub(crate) struct Couplings {
    n: usize,
    diag: Vec<f64>,
    // row-major, symmetric, zero diagonal
    off: Vec<f64>,
}

impl Couplings {
    pub(crate) fn new(q: &QuboMatrix) -> Self {
        let n = q.n();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n * n];
        for ((i, j), c) in q.entries() {
            if i == j {
                diag[i] = c;
            } else {
                off[i * n + j] = c;
                off[j * n + i] = c;
            }
        }
        Self { n, diag, off }
    }

    pub(crate) fn fields(&self, z: &[bool]) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let row = &self.off[k * self.n..(k + 1) * self.n];
                self.diag[k] + row.iter().zip(z).filter(|(_, &b)| b).map(|(c, _)| c).sum::<f64>()
            })
            .collect()
    }

    /// Energy change of flipping bit `k`.
    #[inline]
    pub(crate) fn delta(&self, z: &[bool], field: &[f64], k: usize) -> f64 {
        if z[k] {
            -field[k]
        } else {
            field[k]
        }
    }

    /// Flips bit `k` and updates the fields.
    #[inline]
    pub(crate) fn flip(&self, z: &mut [bool], field: &mut [f64], k: usize) {
        z[k] = !z[k];
        let sign = if z[k] { 1.0 } else { -1.0 };
        let row = &self.off[k * self.n..(k + 1) * self.n];
        for (f, c) in field.iter_mut().zip(row) {
            *f += sign * c;
        }
    }
}

/// Key ordering bitstrings lexicographically with bit 0 most significant.
#[inline]
pub(crate) fn lex_key(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

pub(crate) fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}
