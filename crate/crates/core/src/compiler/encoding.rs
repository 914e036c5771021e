//! Binary encodings of finite-domain variables.

use crate::approx::penalty_exactly_one;
use crate::poly::{Polynomial, Var};

use super::CompileError;

/// Largest base for which the reachable value set is enumerated.
const MAX_ENUMERATED_BITS: usize = 24;

/// The finite value set a continuous variable is restricted to.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// One bit per value plus an exactly-one penalty.
    ExplicitSet(Vec<f64>),
    /// Powers of two from `2^-r_min` to `2^r_max`, mirrored when signed.
    FixedPoint { r_min: u32, r_max: u32, signed: bool },
    /// An arbitrary base; every mask is a valid value.
    CustomBase(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    OneHot,
    FixedPoint { r_min: u32, r_max: u32, signed: bool },
    Custom,
    /// An already-binary variable that is its own single bit.
    Identity,
}

/// `source = Σ weight·bit` over an ordered base.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    source: Var,
    bits: Vec<(Var, f64)>,
    scheme: Scheme,
}

fn bit_var(source: &Var, k: usize) -> Var {
    Var::binary(format!("{}[{}]", source.name(), k))
}

/// One bit per admissible value; duplicates are dropped, order is kept.
pub fn encode_onehot(var: &Var, values: &[f64]) -> Result<Encoding, CompileError> {
    let mut distinct: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if !v.is_finite() {
            return Err(CompileError::InvalidDomain {
                var: var.name().into(),
                reason: format!("value {v} is not finite"),
            });
        }
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    if distinct.is_empty() {
        return Err(CompileError::EmptyDomain(var.name().into()));
    }
    Ok(Encoding {
        source: var.clone(),
        bits: distinct
            .into_iter()
            .enumerate()
            .map(|(k, v)| (bit_var(var, k), v))
            .collect(),
        scheme: Scheme::OneHot,
    })
}

/// Weights `2^-r_min, …, 2^r_max`, followed by their negations when signed.
pub fn encode_fixed_point(var: &Var, r_min: u32, r_max: u32, signed: bool) -> Encoding {
    let mut weights: Vec<f64> = (0..=(r_min + r_max))
        .map(|k| 2f64.powi(k as i32 - r_min as i32))
        .collect();
    if signed {
        let negated: Vec<f64> = weights.iter().map(|w| -w).collect();
        weights.extend(negated);
    }
    Encoding {
        source: var.clone(),
        bits: weights
            .into_iter()
            .enumerate()
            .map(|(k, w)| (bit_var(var, k), w))
            .collect(),
        scheme: Scheme::FixedPoint { r_min, r_max, signed },
    }
}

pub fn encode_custom(var: &Var, weights: &[f64]) -> Result<Encoding, CompileError> {
    if weights.is_empty() {
        return Err(CompileError::EmptyDomain(var.name().into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(CompileError::InvalidDomain {
            var: var.name().into(),
            reason: format!("weight {w} is not finite"),
        });
    }
    Ok(Encoding {
        source: var.clone(),
        bits: weights
            .iter()
            .enumerate()
            .map(|(k, &w)| (bit_var(var, k), w))
            .collect(),
        scheme: Scheme::Custom,
    })
}

pub fn encode_domain(var: &Var, domain: &DomainSpec) -> Result<Encoding, CompileError> {
    match domain {
        DomainSpec::ExplicitSet(values) => encode_onehot(var, values),
        DomainSpec::FixedPoint { r_min, r_max, signed } => {
            Ok(encode_fixed_point(var, *r_min, *r_max, *signed))
        }
        DomainSpec::CustomBase(weights) => encode_custom(var, weights),
    }
}

impl Encoding {
    pub fn identity(var: &Var) -> Self {
        Self {
            source: var.clone(),
            bits: vec![(var.clone(), 1.0)],
            scheme: Scheme::Identity,
        }
    }

    /// Rebuilds an encoding from its parts, as read back from a decode map.
    pub fn from_parts(source: Var, bits: Vec<(Var, f64)>, scheme: Scheme) -> Self {
        Self { source, bits, scheme }
    }

    pub fn source(&self) -> &Var {
        &self.source
    }

    pub fn bits(&self) -> &[(Var, f64)] {
        &self.bits
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn is_one_hot(&self) -> bool {
        self.scheme == Scheme::OneHot
    }

    /// `Σ weight·bit`.
    pub fn polynomial(&self) -> Polynomial {
        self.bits
            .iter()
            .map(|(v, w)| Polynomial::var(v).scale(*w))
            .sum()
    }

    /// The exactly-one term of a one-hot group.
    pub fn penalty(&self) -> Option<Polynomial> {
        if !self.is_one_hot() {
            return None;
        }
        let vars: Vec<Var> = self.bits.iter().map(|(v, _)| v.clone()).collect();
        penalty_exactly_one(&vars).ok()
    }

    /// Decodes a mask given in base order.
    pub fn decode_mask(&self, mask: &[bool]) -> f64 {
        self.bits
            .iter()
            .zip(mask)
            .filter(|(_, &b)| b)
            .fold(0.0, |acc, ((_, w), _)| acc + w)
    }

    /// Sorted, distinct values reachable by valid masks (one bit for
    /// one-hot groups, any mask otherwise).
    pub fn representable(&self) -> Result<Vec<f64>, CompileError> {
        let mut values: Vec<f64> = match self.scheme {
            Scheme::OneHot => self.bits.iter().map(|(_, w)| *w).collect(),
            Scheme::Identity => vec![0.0, 1.0],
            _ => {
                let n = self.bits.len();
                if n > MAX_ENUMERATED_BITS {
                    return Err(CompileError::DomainTooLarge(self.source.name().into()));
                }
                let mut sums = vec![0.0f64; 1 << n];
                for mask in 1usize..(1 << n) {
                    let low = mask.trailing_zeros() as usize;
                    sums[mask] = sums[mask & (mask - 1)] + self.bits[low].1;
                }
                sums
            }
        };
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(values)
    }

    /// Search range used by the auxiliary-count estimate: `r_min + r_max`
    /// for fixed-point encodings (at least 1), the base size otherwise.
    pub fn search_range(&self) -> u64 {
        match self.scheme {
            Scheme::FixedPoint { r_min, r_max, .. } => u64::from(r_min + r_max).max(1),
            _ => self.bits.len() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var::continuous("x")
    }

    #[test]
    fn onehot_decoding() {
        let enc = encode_onehot(&x(), &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(enc.decode_mask(&[false, false, true]), 6.0);
        assert_eq!(enc.decode_mask(&[false, false, false]), 0.0);
        // 2 + 4 aliases 6; only the penalty tells them apart
        assert_eq!(enc.decode_mask(&[true, true, false]), 6.0);

        let pen = enc.penalty().unwrap();
        let eval = |mask: [f64; 3]| {
            pen.eval_with(|v| enc.bits().iter().position(|(b, _)| b == v).map(|i| mask[i]))
                .unwrap()
        };
        assert_eq!(eval([0.0, 0.0, 1.0]), 0.0);
        assert_eq!(eval([0.0, 0.0, 0.0]), 1.0);
        assert_eq!(eval([1.0, 1.0, 0.0]), 1.0);
    }

    #[test]
    fn onehot_rejects_empty_and_dedups() {
        assert_eq!(encode_onehot(&x(), &[]), Err(CompileError::EmptyDomain("x".into())));
        let enc = encode_onehot(&x(), &[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(enc.bits().len(), 2);
    }

    #[test]
    fn fixed_point_examples() {
        let enc = encode_fixed_point(&x(), 0, 2, false);
        let w: Vec<f64> = enc.bits().iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![1.0, 2.0, 4.0]);
        assert_eq!(enc.decode_mask(&[false, true, true]), 6.0);
        assert!(enc.penalty().is_none());

        let enc = encode_fixed_point(&x(), 1, 2, false);
        assert!(enc.representable().unwrap().contains(&6.5));
        assert_eq!(enc.decode_mask(&[true, false, true, true]), 6.5);
    }

    #[test]
    fn signed_fixed_point_has_aliases() {
        let enc = encode_fixed_point(&x(), 0, 1, true);
        let w: Vec<f64> = enc.bits().iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![1.0, 2.0, -1.0, -2.0]);
        assert_eq!(enc.decode_mask(&[true, false, false, false]), 1.0);
        assert_eq!(enc.decode_mask(&[true, true, false, true]), 1.0);
        assert_eq!(enc.representable().unwrap(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn search_ranges() {
        assert_eq!(encode_fixed_point(&x(), 2, 2, false).search_range(), 4);
        assert_eq!(encode_fixed_point(&x(), 0, 0, true).search_range(), 1);
        assert_eq!(encode_onehot(&x(), &[1.0, 2.0, 3.0]).unwrap().search_range(), 3);
    }
}
