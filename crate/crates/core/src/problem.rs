//! JSON problem descriptions.
//!
//! ```json
//! {
//!   "variables": [
//!     {"name": "x", "domain": {"kind": "set", "values": [-1, 0, 2]}},
//!     {"name": "y", "domain": {"kind": "fixed_point", "r_min": 0, "r_max": 2, "signed": true}},
//!     {"name": "w", "domain": {"kind": "custom", "weights": [1, 3]}}
//!   ],
//!   "objective": [
//!     {"coeff": 2.5, "powers": {"x": 2, "y": 1}},
//!     {"coeff": -1}
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::DomainSpec;
use crate::poly::{Polynomial, Powers, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("cannot parse problem: {0}")]
    Parse(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescription {
    pub variables: Vec<VariableDecl>,
    pub objective: Vec<TermDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub domain: DomainDecl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDecl {
    Set {
        values: Vec<f64>,
    },
    FixedPoint {
        r_min: u32,
        r_max: u32,
        #[serde(default)]
        signed: bool,
    },
    Custom {
        weights: Vec<f64>,
    },
}

impl From<&DomainDecl> for DomainSpec {
    fn from(d: &DomainDecl) -> Self {
        match d {
            DomainDecl::Set { values } => DomainSpec::ExplicitSet(values.clone()),
            DomainDecl::FixedPoint { r_min, r_max, signed } => DomainSpec::FixedPoint {
                r_min: *r_min,
                r_max: *r_max,
                signed: *signed,
            },
            DomainDecl::Custom { weights } => DomainSpec::CustomBase(weights.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    pub coeff: f64,
    #[serde(default)]
    pub powers: BTreeMap<String, u32>,
}

impl ProblemDescription {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    /// The objective polynomial and the domain of every declared variable.
    pub fn to_model(&self) -> Result<(Polynomial, BTreeMap<Var, DomainSpec>), ProblemError> {
        let mut names = BTreeSet::new();
        let mut domains = BTreeMap::new();
        for decl in &self.variables {
            if decl.name.is_empty() || decl.name.chars().any(char::is_whitespace) {
                return Err(ProblemError::Invalid(format!("bad variable name `{}`", decl.name)));
            }
            if !names.insert(decl.name.as_str()) {
                return Err(ProblemError::Invalid(format!("variable `{}` declared twice", decl.name)));
            }
            domains.insert(Var::continuous(decl.name.as_str()), DomainSpec::from(&decl.domain));
        }
        let mut terms = Vec::with_capacity(self.objective.len());
        for term in &self.objective {
            if !term.coeff.is_finite() {
                return Err(ProblemError::Invalid("coefficient is not finite".into()));
            }
            let mut pairs = Vec::with_capacity(term.powers.len());
            for (name, &e) in &term.powers {
                if !names.contains(name.as_str()) {
                    return Err(ProblemError::Invalid(format!("undeclared variable `{name}`")));
                }
                pairs.push((Var::continuous(name.as_str()), e));
            }
            terms.push((term.coeff, Powers::from_pairs(pairs)));
        }
        Ok((Polynomial::from_terms(terms), domains))
    }
}
