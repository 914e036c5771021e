//! Canonical multivariate polynomials over named variables.
//!
//! A [`Polynomial`] is a sparse map from [`Powers`] (a sorted list of
//! variable/exponent pairs) to a real coefficient. Every constructor and
//! operation returns a canonical value: like terms are merged, terms whose
//! coefficient magnitude falls below [`ZERO_TOLERANCE`] are dropped, and
//! binary variables never carry an exponent above one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

/// Coefficients with a smaller magnitude are removed during canonicalization.
pub const ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(String),
}

/// The domain a variable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
    /// A binary variable introduced by quadratization to stand for a product.
    Auxiliary,
}

/// A named variable. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Arc<str>,
    kind: VarKind,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>, kind: VarKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn continuous(name: impl Into<Arc<str>>) -> Self {
        Self::new(name, VarKind::Continuous)
    }

    pub fn binary(name: impl Into<Arc<str>>) -> Self {
        Self::new(name, VarKind::Binary)
    }

    pub fn auxiliary(name: impl Into<Arc<str>>) -> Self {
        Self::new(name, VarKind::Auxiliary)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    /// Binary and auxiliary variables only take the values 0 and 1.
    pub fn is_binary(&self) -> bool {
        matches!(self.kind, VarKind::Binary | VarKind::Auxiliary)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The variable part of a monomial: variables in ascending order, each with a
/// positive exponent. The empty list is the constant monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Powers(Vec<(Var, u32)>);

impl Powers {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn single(var: Var, exponent: u32) -> Self {
        Self::from_pairs([(var, exponent)])
    }

    /// Builds a canonical powers list. Repeated variables have their exponents
    /// summed, zero exponents vanish and binary exponents collapse to one.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (var, exp) in pairs {
            if exp == 0 {
                continue;
            }
            *acc.entry(var).or_insert(0) += exp;
        }
        Self(
            acc.into_iter()
                .map(|(v, e)| {
                    let e = if v.is_binary() { 1 } else { e };
                    (v, e)
                })
                .collect(),
        )
    }

    /// Product of a set of distinct binary variables.
    pub fn product_of(vars: impl IntoIterator<Item = Var>) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, u32)> {
        self.0.iter().map(|(v, e)| (v, *e))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn exponent_of(&self, var: &Var) -> u32 {
        self.0
            .binary_search_by(|(v, _)| v.cmp(var))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Number of distinct variables in the monomial.
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Powers) -> Powers {
        // merge of two sorted lists
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = if a.is_binary() { 1 } else { ea + eb };
                    out.push((a.clone(), e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Powers(out)
    }

    /// Removes `var`, returning the remaining powers and its exponent.
    fn split_off(&self, var: &Var) -> (Powers, u32) {
        let mut exp = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, e)| {
                if v == var {
                    exp = *e;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Powers(rest), exp)
    }

    fn eval_with<F>(&self, lookup: &mut F) -> Result<f64, PolyError>
    where
        F: FnMut(&Var) -> Option<f64>,
    {
        let mut acc = 1.0;
        for (var, exp) in &self.0 {
            let value = lookup(var).ok_or_else(|| PolyError::MissingVariable(var.name().into()))?;
            acc *= value.powi(*exp as i32);
        }
        Ok(acc)
    }

    /// Graded lexicographic key: total degree first, then variable names.
    fn graded_key(&self) -> (u32, Vec<(&str, u32)>) {
        (
            self.total_degree(),
            self.0.iter().map(|(v, e)| (v.name(), *e)).collect(),
        )
    }
}

impl fmt::Display for Powers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A single term `coefficient * powers`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub powers: Powers,
}

/// Canonical sparse polynomial.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Powers, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([(c, Powers::one())])
    }

    pub fn var(var: &Var) -> Self {
        Self::from_terms([(1.0, Powers::single(var.clone(), 1))])
    }

    pub fn monomial(coefficient: f64, powers: Powers) -> Self {
        Self::from_terms([(coefficient, powers)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (f64, Powers)>) -> Self {
        let mut out = Self::zero();
        for (c, p) in terms {
            out.add_term(p, c);
        }
        out.canonicalize();
        out
    }

    fn add_term(&mut self, powers: Powers, coefficient: f64) {
        *self.terms.entry(powers).or_insert(0.0) += coefficient;
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.abs() >= ZERO_TOLERANCE);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in storage order (ascending [`Powers`]).
    pub fn terms(&self) -> impl Iterator<Item = (&Powers, f64)> {
        self.terms.iter().map(|(p, c)| (p, *c))
    }

    /// Terms in graded lexicographic order, used for deterministic output.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = self
            .terms
            .iter()
            .map(|(p, c)| Monomial {
                coefficient: *c,
                powers: p.clone(),
            })
            .collect();
        out.sort_by(|a, b| a.powers.graded_key().cmp(&b.powers.graded_key()));
        out
    }

    pub fn coefficient(&self, powers: &Powers) -> f64 {
        self.terms.get(powers).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Powers::one())
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|p| p.vars().cloned())
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Powers::total_degree).max().unwrap_or(0)
    }

    /// Largest number of distinct variables multiplied together in one term.
    pub fn max_product_arity(&self) -> usize {
        self.terms.keys().map(Powers::arity).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(p, c)| (c * factor, p.clone())))
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut result = Self::constant(1.0);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Replaces every occurrence of `var` by `replacement`.
    pub fn substitute(&self, var: &Var, replacement: &Polynomial) -> Self {
        let mut cache: Vec<Polynomial> = vec![Self::constant(1.0)];
        let mut out = Self::zero();
        for (powers, coeff) in &self.terms {
            let (rest, exp) = powers.split_off(var);
            if exp == 0 {
                out.add_term(rest, *coeff);
                continue;
            }
            while cache.len() <= exp as usize {
                let next = cache.last().unwrap() * replacement;
                cache.push(next);
            }
            for (rp, rc) in &cache[exp as usize].terms {
                out.add_term(rest.mul(rp), coeff * rc);
            }
        }
        out.canonicalize();
        out
    }

    /// Evaluates with values supplied by `lookup`.
    pub fn eval_with<F>(&self, mut lookup: F) -> Result<f64, PolyError>
    where
        F: FnMut(&Var) -> Option<f64>,
    {
        let mut total = 0.0;
        for (powers, coeff) in &self.terms {
            total += coeff * powers.eval_with(&mut lookup)?;
        }
        Ok(total)
    }

    pub fn evaluate(&self, assignment: &BTreeMap<Var, f64>) -> Result<f64, PolyError> {
        self.eval_with(|v| assignment.get(v).copied())
    }
}

fn merge(a: &Polynomial, b: &Polynomial, sign: f64) -> Polynomial {
    let mut out = a.clone();
    for (p, c) in &b.terms {
        out.add_term(p.clone(), sign * c);
    }
    out.canonicalize();
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, -1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                out.add_term(pa.mul(pb), ca * cb);
            }
        }
        out.canonicalize();
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { (&self).$m(&rhs) }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial { (&self).$m(rhs) }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(rhs)
    }
}

impl Mul<f64> for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(rhs)
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        let mut out = Polynomial::zero();
        for p in iter {
            for (pw, c) in p.terms {
                out.add_term(pw, c);
            }
        }
        out.canonicalize();
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let monomials = self.monomials();
        if monomials.is_empty() {
            return f.write_str("0");
        }
        for (k, m) in monomials.iter().enumerate() {
            let c = m.coefficient;
            if k == 0 {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            }
            let mag = c.abs();
            if m.powers.is_constant() {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{}", m.powers)?;
            } else {
                write!(f, "{mag}*{}", m.powers)?;
            }
        }
        Ok(())
    }
}
