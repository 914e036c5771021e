//! Polynomial to QUBO compilation.
//!
//! Compilation runs in three steps:
//!
//! 1. [`binarize`] replaces every finite-domain variable by a weighted sum of
//!    bits and collects the exactly-one penalties of one-hot groups.
//! 2. [`penalty_weight`] fixes the constraint weight `A` from the binarized
//!    objective, and every term with more than two variables is rewritten
//!    over cached auxiliary bits, each tied to its factors by an `A`-weighted
//!    [`gadget`].
//! 3. [`CompileArtifacts::assemble`] lays the quadratic result out as a
//!    [`QuboMatrix`] whose bit order is given by the [`DecodeRegistry`].

mod encoding;
pub mod format;
mod matrix;
mod quadratize;
mod registry;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::{Polynomial, Var};

pub use encoding::{
    encode_custom, encode_domain, encode_fixed_point, encode_onehot, DomainSpec, Encoding, Scheme,
};
pub use matrix::{assemble_polynomial, QuboMatrix};
pub use quadratize::{aux_upper_bound, gadget, penalty_weight};
pub use registry::{AuxDef, DecodeRegistry, Decoded};

use quadratize::Reducer;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("variable `{0}` has no domain")]
    MissingDomain(String),
    #[error("domain of `{0}` is empty")]
    EmptyDomain(String),
    #[error("invalid domain for `{var}`: {reason}")]
    InvalidDomain { var: String, reason: String },
    #[error("domain of `{0}` is too large to enumerate")]
    DomainTooLarge(String),
    #[error("variable `{0}` is not binary")]
    NonBinaryVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("bit `{0}` is defined twice")]
    DuplicateBit(String),
    #[error("term multiplies {0} variables; at most two are allowed")]
    NotQuadratic(usize),
    #[error("bitstring has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// A binarized objective together with its encodings.
#[derive(Debug, Clone)]
pub struct Binarized {
    /// The objective over encoding bits, without constraint penalties.
    pub objective: Polynomial,
    pub registry: DecodeRegistry,
}

impl Binarized {
    /// Sum of the unweighted exactly-one penalties of all one-hot groups.
    pub fn penalties(&self) -> Polynomial {
        self.registry.encodings().filter_map(Encoding::penalty).sum()
    }

    /// `objective + weight · penalties`.
    pub fn with_penalties(&self, weight: f64) -> Polynomial {
        &self.objective + &self.penalties().scale(weight)
    }
}

/// Substitutes each variable's encoding into `p`.
///
/// Every continuous variable of `p` needs a domain. Binary variables without
/// a domain encode as themselves. Domains of variables absent from `p` are
/// still encoded, so they remain part of the candidate set.
pub fn binarize(p: &Polynomial, domains: &BTreeMap<Var, DomainSpec>) -> Result<Binarized, CompileError> {
    let mut encodings = BTreeMap::new();
    for (var, domain) in domains {
        encodings.insert(var.clone(), encode_domain(var, domain)?);
    }
    for var in p.variables() {
        if encodings.contains_key(&var) {
            continue;
        }
        if !var.is_binary() {
            return Err(CompileError::MissingDomain(var.name().into()));
        }
        encodings.insert(var.clone(), Encoding::identity(&var));
    }
    let mut objective = p.clone();
    for (var, enc) in &encodings {
        if enc.scheme() != Scheme::Identity {
            objective = objective.substitute(var, &enc.polynomial());
        }
    }
    let registry = DecodeRegistry::new(encodings, Vec::new())?;
    Ok(Binarized { objective, registry })
}

/// Shape of the source polynomial, as used by [`aux_upper_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceShape {
    /// Degree.
    pub p: u64,
    /// Number of variables.
    pub n: u64,
    /// Largest number of distinct variables in one term.
    pub q: u64,
    /// Widest search range over the variables' encodings.
    pub r: u64,
}

impl SourceShape {
    pub fn aux_bound(&self) -> u128 {
        aux_upper_bound(self.p, self.n, self.q, self.r)
    }
}

/// Everything produced by one compilation.
#[derive(Debug, Clone)]
pub struct CompileArtifacts {
    /// The binarized objective (no penalties); `A` is computed from it.
    pub p_prime: Polynomial,
    /// The quadratic result including all weighted penalties.
    pub p_triple_prime: Polynomial,
    /// The constraint weight `A`.
    pub penalty_weight: f64,
    pub registry: DecodeRegistry,
    pub shape: SourceShape,
}

impl CompileArtifacts {
    pub fn aux_defs(&self) -> &[AuxDef] {
        self.registry.aux_defs()
    }

    pub fn aux_count(&self) -> usize {
        self.registry.aux_defs().len()
    }

    pub fn assemble(&self) -> QuboMatrix {
        assemble_polynomial(&self.p_triple_prime, self.registry.labels())
            .expect("compiled polynomial is quadratic over registry bits")
    }
}

/// Same as [`CompileArtifacts::assemble`].
pub fn assemble(artifacts: &CompileArtifacts) -> QuboMatrix {
    artifacts.assemble()
}

fn finish(binarized: Binarized, shape: SourceShape) -> Result<CompileArtifacts, CompileError> {
    let weight = penalty_weight(&binarized.objective);
    let mut reducer = Reducer::new(weight);
    let reduced = reducer.reduce(&binarized.objective);
    let (gadgets, aux) = reducer.finish();
    let penalties = binarized.penalties();
    let p_triple_prime = reduced + gadgets + penalties.scale(weight);
    let encodings = binarized
        .registry
        .encodings()
        .map(|e| (e.source().clone(), e.clone()))
        .collect();
    let registry = DecodeRegistry::new(encodings, aux)?;
    Ok(CompileArtifacts {
        p_prime: binarized.objective,
        p_triple_prime,
        penalty_weight: weight,
        registry,
        shape,
    })
}

/// Full pipeline from a polynomial over finite-domain variables.
pub fn compile(p: &Polynomial, domains: &BTreeMap<Var, DomainSpec>) -> Result<CompileArtifacts, CompileError> {
    let binarized = binarize(p, domains)?;
    let vars = p.variables();
    let r = vars
        .iter()
        .filter_map(|v| binarized.registry.encoding(v))
        .map(Encoding::search_range)
        .max()
        .unwrap_or(0);
    let shape = SourceShape {
        p: u64::from(p.degree()),
        n: vars.len() as u64,
        q: p.max_product_arity() as u64,
        r,
    };
    finish(binarized, shape)
}

/// Quadratizes a polynomial that is already over binary variables.
pub fn quadratize(p_prime: &Polynomial) -> Result<CompileArtifacts, CompileError> {
    if let Some(v) = p_prime.variables().into_iter().find(|v| !v.is_binary()) {
        return Err(CompileError::NonBinaryVariable(v.name().into()));
    }
    compile(p_prime, &BTreeMap::new())
}
