use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::compiler::{compile, DomainSpec};
use crate::poly::{Polynomial, Var};

use super::brute::{scan, tie_tolerance};
use super::{brute_force_with_limit, mask_to_bits, SolveError, BRUTE_FORCE_LIMIT};

/// Default cap on the size of the enumerated candidate set.
pub const CANDIDATE_LIMIT: u128 = 1_000_000;

/// Outcome of comparing the original problem with its compiled QUBO.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Minimum of `p` over the candidate set.
    pub min_p: f64,
    /// Minimum energy of the compiled QUBO.
    pub min_qubo: f64,
    /// `|min_p − min_qubo|` within tolerance.
    pub equal: bool,
    /// Every QUBO minimizer decodes to a consistent minimizer of `p`.
    pub argmin_decodes: bool,
    pub candidate_count: u128,
    pub bitstring_count: u128,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.equal && self.argmin_decodes
    }
}

pub fn verify_theorem1(p: &Polynomial, domains: &BTreeMap<Var, DomainSpec>) -> Result<EquivalenceReport, SolveError> {
    verify_theorem1_with_limits(p, domains, CANDIDATE_LIMIT, BRUTE_FORCE_LIMIT)
}

/// Enumerates the candidate set directly, compiles and brute-forces the
/// QUBO, then compares minima and decodes every QUBO minimizer.
pub fn verify_theorem1_with_limits(
    p: &Polynomial,
    domains: &BTreeMap<Var, DomainSpec>,
    candidate_limit: u128,
    bit_limit: usize,
) -> Result<EquivalenceReport, SolveError> {
    let art = compile(p, domains)?;
    let registry = &art.registry;
    let n = registry.bit_count();
    if n > bit_limit.min(63) {
        return Err(SolveError::TooManyBits { n, limit: bit_limit });
    }
    let candidate_count = registry.candidate_count()?;
    if candidate_count > candidate_limit {
        return Err(SolveError::TooManyCandidates {
            count: candidate_count,
            limit: candidate_limit,
        });
    }

    let domains = registry.candidate_domains()?;
    let mut min_p = f64::INFINITY;
    let mut idx = vec![0usize; domains.len()];
    let mut assignment: BTreeMap<Var, f64> = domains.iter().map(|(v, vals)| (v.clone(), vals[0])).collect();
    'odometer: loop {
        min_p = min_p.min(p.evaluate(&assignment)?);
        for (k, (var, vals)) in domains.iter().enumerate() {
            idx[k] += 1;
            if idx[k] < vals.len() {
                assignment.insert(var.clone(), vals[idx[k]]);
                continue 'odometer;
            }
            idx[k] = 0;
            assignment.insert(var.clone(), vals[0]);
        }
        break;
    }

    let q = art.assemble();
    let min_qubo = brute_force_with_limit(&q, bit_limit)?.energy;
    let tol = tie_tolerance(min_qubo);
    let argmin_decodes = AtomicBool::new(true);
    scan(
        &q,
        || (),
        |_, mask, e| {
            if e > min_qubo + tol || !argmin_decodes.load(Ordering::Relaxed) {
                return;
            }
            let bits = mask_to_bits(mask, n);
            let ok = match registry.decode(&bits) {
                Ok(d) => d.consistent && p.evaluate(&d.values).is_ok_and(|v| (v - min_p).abs() <= tie_tolerance(min_p)),
                Err(_) => false,
            };
            if !ok {
                argmin_decodes.store(false, Ordering::Relaxed);
            }
        },
        |_, _| (),
    );

    Ok(EquivalenceReport {
        min_p,
        min_qubo,
        equal: (min_p - min_qubo).abs() <= tie_tolerance(min_p),
        argmin_decodes: argmin_decodes.into_inner(),
        candidate_count,
        bitstring_count: 1u128 << n,
    })
}
