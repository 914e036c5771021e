use std::collections::{BTreeMap, HashMap};

use crate::poly::Var;

use super::encoding::Encoding;
use super::CompileError;

/// An auxiliary variable standing for the product `left · right`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxDef {
    pub var: Var,
    pub left: Var,
    pub right: Var,
    /// The original bits whose product the auxiliary represents, sorted.
    pub factors: Vec<Var>,
}

/// Maps QUBO bit positions back to the original variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecodeRegistry {
    encodings: BTreeMap<Var, Encoding>,
    aux: Vec<AuxDef>,
    labels: Vec<Var>,
    index: HashMap<Var, usize>,
}

/// Result of reading a bitstring back into original variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub values: BTreeMap<Var, f64>,
    /// Every auxiliary equals the product of its factors and every one-hot
    /// group has exactly one bit set.
    pub consistent: bool,
}

impl DecodeRegistry {
    /// Bits are numbered encoding by encoding (in variable order), then the
    /// auxiliaries in creation order.
    pub fn new(encodings: BTreeMap<Var, Encoding>, aux: Vec<AuxDef>) -> Result<Self, CompileError> {
        let mut labels = Vec::new();
        for enc in encodings.values() {
            labels.extend(enc.bits().iter().map(|(v, _)| v.clone()));
        }
        labels.extend(aux.iter().map(|a| a.var.clone()));
        let mut index = HashMap::with_capacity(labels.len());
        for (i, v) in labels.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(CompileError::DuplicateBit(v.name().into()));
            }
        }
        for a in &aux {
            for f in [&a.left, &a.right] {
                if !index.contains_key(f) {
                    return Err(CompileError::UnknownVariable(f.name().into()));
                }
            }
        }
        Ok(Self {
            encodings,
            aux,
            labels,
            index,
        })
    }

    pub fn encodings(&self) -> impl Iterator<Item = &Encoding> {
        self.encodings.values()
    }

    pub fn encoding(&self, var: &Var) -> Option<&Encoding> {
        self.encodings.get(var)
    }

    pub fn aux_defs(&self) -> &[AuxDef] {
        &self.aux
    }

    /// Bit labels in QUBO index order.
    pub fn labels(&self) -> &[Var] {
        &self.labels
    }

    pub fn bit_count(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, var: &Var) -> Option<usize> {
        self.index.get(var).copied()
    }

    /// The original variables, in order.
    pub fn variables(&self) -> impl Iterator<Item = &Var> {
        self.encodings.keys()
    }

    /// `(variable, admissible values)` for every original variable; the
    /// product of these sets is the candidate set of the original problem.
    pub fn candidate_domains(&self) -> Result<Vec<(Var, Vec<f64>)>, CompileError> {
        self.encodings
            .iter()
            .map(|(v, e)| Ok((v.clone(), e.representable()?)))
            .collect()
    }

    pub fn candidate_count(&self) -> Result<u128, CompileError> {
        self.candidate_domains()?
            .iter()
            .try_fold(1u128, |acc, (_, vals)| acc.checked_mul(vals.len() as u128))
            .ok_or(CompileError::DomainTooLarge("candidate set".into()))
    }

    pub fn decode(&self, bits: &[bool]) -> Result<Decoded, CompileError> {
        if bits.len() != self.labels.len() {
            return Err(CompileError::LengthMismatch {
                expected: self.labels.len(),
                got: bits.len(),
            });
        }
        let bit = |v: &Var| bits[self.index[v]];
        let mut consistent = true;
        let mut values = BTreeMap::new();
        for (var, enc) in &self.encodings {
            let mask: Vec<bool> = enc.bits().iter().map(|(b, _)| bit(b)).collect();
            if enc.is_one_hot() && mask.iter().filter(|&&b| b).count() != 1 {
                consistent = false;
            }
            values.insert(var.clone(), enc.decode_mask(&mask));
        }
        for a in &self.aux {
            if bit(&a.var) != (bit(&a.left) && bit(&a.right)) {
                consistent = false;
            }
        }
        Ok(Decoded { values, consistent })
    }

    /// Extends an assignment of the encoding bits with consistent auxiliary
    /// bits. `bits` must have full length; auxiliary positions are overwritten.
    pub fn complete_aux(&self, bits: &mut [bool]) {
        for a in &self.aux {
            let v = bits[self.index[&a.left]] && bits[self.index[&a.right]];
            bits[self.index[&a.var]] = v;
        }
    }
}
