use std::collections::BTreeMap;

use crate::poly::{Polynomial, Var};

use super::CompileError;

/// Upper-triangular QUBO coefficients with a constant offset:
/// `energy(z) = offset + Σ_{i≤j} c_ij z_i z_j`.
///
/// The symmetric matrix of `zᵀQz` is recovered by `Q_ij = c_ij / 2` for
/// `i < j` and `Q_ii = c_ii`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    entries: BTreeMap<(usize, usize), f64>,
    offset: f64,
    labels: Vec<Var>,
}

impl QuboMatrix {
    /// An empty matrix over `n` bits labelled `z0, z1, …`.
    pub fn new(n: usize) -> Self {
        let labels = (0..n).map(|i| Var::binary(format!("z{i}"))).collect();
        Self::with_labels(labels)
    }

    pub fn with_labels(labels: Vec<Var>) -> Self {
        Self {
            n: labels.len(),
            entries: BTreeMap::new(),
            offset: 0.0,
            labels,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn labels(&self) -> &[Var] {
        &self.labels
    }

    /// Nonzero entries in ascending `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Adds `value` to the coefficient of `z_i z_j`; indices are reordered
    /// so that `i ≤ j`. Entries that reach zero are removed.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for {} bits", self.n);
        let key = if i <= j { (i, j) } else { (j, i) };
        let slot = self.entries.entry(key).or_insert(0.0);
        *slot += value;
        if *slot == 0.0 {
            self.entries.remove(&key);
        }
    }

    pub fn energy(&self, z: &[bool]) -> f64 {
        assert_eq!(z.len(), self.n);
        self.offset
            + self
                .entries
                .iter()
                .filter(|((i, j), _)| z[*i] && z[*j])
                .map(|(_, c)| c)
                .sum::<f64>()
    }

    /// Dense symmetric matrix `Q` with `zᵀQz + offset = energy(z)`.
    pub fn symmetric(&self) -> Vec<Vec<f64>> {
        let mut q = vec![vec![0.0; self.n]; self.n];
        for (&(i, j), &c) in &self.entries {
            if i == j {
                q[i][i] = c;
            } else {
                q[i][j] = c / 2.0;
                q[j][i] = c / 2.0;
            }
        }
        q
    }

    /// Largest coefficient magnitude, or 0 for an empty matrix.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// The energy as a polynomial over the labels.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut out = Polynomial::constant(self.offset);
        for (&(i, j), &c) in &self.entries {
            let term = &Polynomial::var(&self.labels[i]) * &Polynomial::var(&self.labels[j]);
            out = out + term.scale(c);
        }
        out
    }
}

/// Lays a quadratic binary polynomial out over `labels`.
pub fn assemble_polynomial(p: &Polynomial, labels: &[Var]) -> Result<QuboMatrix, CompileError> {
    let index: std::collections::HashMap<&Var, usize> =
        labels.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut q = QuboMatrix::with_labels(labels.to_vec());
    for (powers, c) in p.terms() {
        let mut idx = Vec::with_capacity(2);
        for v in powers.vars() {
            if !v.is_binary() {
                return Err(CompileError::NonBinaryVariable(v.name().into()));
            }
            idx.push(*index.get(v).ok_or_else(|| CompileError::UnknownVariable(v.name().into()))?);
        }
        match idx[..] {
            [] => q.offset += c,
            [i] => q.add(i, i, c),
            [i, j] => q.add(i, j, c),
            _ => return Err(CompileError::NotQuadratic(powers.arity())),
        }
    }
    Ok(q)
}
