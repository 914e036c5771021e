//! Degree reduction of binary polynomials with product-constraint gadgets.

use std::collections::HashMap;

use crate::poly::{Polynomial, Powers, Var};

use super::registry::AuxDef;

/// `A = 1 + Σ 2|a|` over every coefficient of `p`, constant term included.
pub fn penalty_weight(p: &Polynomial) -> f64 {
    1.0 + p.terms().map(|(_, c)| 2.0 * c.abs()).sum::<f64>()
}

/// `4q − 3q·x1 − 3q·x2 + 2·x1·x2`: zero iff `q = x1·x2`, at least one
/// otherwise. All three variables must be binary.
pub fn gadget(q: &Var, x1: &Var, x2: &Var) -> Polynomial {
    debug_assert!(q.is_binary() && x1.is_binary() && x2.is_binary());
    let pair = |a: &Var, b: &Var| Powers::product_of([a.clone(), b.clone()]);
    Polynomial::from_terms([
        (4.0, Powers::single(q.clone(), 1)),
        (-3.0, pair(q, x1)),
        (-3.0, pair(q, x2)),
        (2.0, pair(x1, x2)),
    ])
}

/// `(n·2r)^⌈pq/2⌉`, saturating at `u128::MAX`.
pub fn aux_upper_bound(p: u64, n: u64, q: u64, r: u64) -> u128 {
    let base = u128::from(n) * 2 * u128::from(r);
    let m = (p * q).div_ceil(2);
    match u32::try_from(m) {
        Ok(m) => base.checked_pow(m).unwrap_or(u128::MAX),
        Err(_) if base <= 1 => base,
        Err(_) => u128::MAX,
    }
}

/// Shared state of one reduction: auxiliaries are cached by the sorted set
/// of original bits they stand for.
pub(crate) struct Reducer {
    weight: f64,
    cache: HashMap<Vec<Var>, Var>,
    defs: Vec<AuxDef>,
    gadgets: Vec<(f64, Powers)>,
}

impl Reducer {
    pub(crate) fn new(weight: f64) -> Self {
        Self {
            weight,
            cache: HashMap::new(),
            defs: Vec::new(),
            gadgets: Vec::new(),
        }
    }

    /// A variable equal to the product of `vars` (sorted, distinct).
    fn product_var(&mut self, vars: &[Var]) -> Var {
        if vars.len() == 1 {
            return vars[0].clone();
        }
        if let Some(v) = self.cache.get(vars) {
            return v.clone();
        }
        let split = vars.len().div_ceil(2);
        let left = self.product_var(&vars[..split]);
        let right = self.product_var(&vars[split..]);
        let aux = Var::auxiliary(format!("_q{}", self.defs.len()));
        for (p, c) in gadget(&aux, &left, &right).terms() {
            self.gadgets.push((self.weight * c, p.clone()));
        }
        self.cache.insert(vars.to_vec(), aux.clone());
        self.defs.push(AuxDef {
            var: aux.clone(),
            left,
            right,
            factors: vars.to_vec(),
        });
        aux
    }

    /// Rewrites every term with more than two variables as a product of the
    /// auxiliaries for its two halves. Terms must be multilinear.
    pub(crate) fn reduce(&mut self, p: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(p.len());
        for (powers, c) in p.terms() {
            if powers.arity() <= 2 {
                terms.push((c, powers.clone()));
                continue;
            }
            let vars: Vec<Var> = powers.vars().cloned().collect();
            let split = vars.len().div_ceil(2);
            let left = self.product_var(&vars[..split]);
            let right = self.product_var(&vars[split..]);
            terms.push((c, Powers::product_of([left, right])));
        }
        Polynomial::from_terms(terms)
    }

    pub(crate) fn finish(self) -> (Polynomial, Vec<AuxDef>) {
        (Polynomial::from_terms(self.gadgets), self.defs)
    }
}
