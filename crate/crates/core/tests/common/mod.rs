#![allow(dead_code)]

use std::collections::BTreeMap;

use polyqubo::compiler::{compile, DomainSpec, QuboMatrix};
use polyqubo::poly::{Polynomial, Powers, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Energies of all `2^n` bitstrings straight from the entry list, bit `i`
/// of the index being position `i`.
pub fn naive_energies(q: &QuboMatrix) -> Vec<f64> {
    let n = q.n();
    let entries: Vec<((usize, usize), f64)> = q.entries().collect();
    (0..1usize << n)
        .map(|m| {
            let mut e = q.offset();
            for &((i, j), c) in &entries {
                if (m >> i) & 1 == 1 && (m >> j) & 1 == 1 {
                    e += c;
                }
            }
            e
        })
        .collect()
}

pub fn bits(mask: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Random upper-triangular matrix with small integer or half-integer entries.
pub fn random_qubo(rng: &mut ChaCha8Rng, n: usize, density: f64) -> QuboMatrix {
    let mut q = QuboMatrix::new(n);
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(density) {
                q.add(i, j, f64::from(rng.gen_range(-16..=16)) / 2.0);
            }
        }
    }
    q.set_offset(f64::from(rng.gen_range(-4..=4)));
    q
}

const DYADIC: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

fn random_domain(rng: &mut ChaCha8Rng) -> DomainSpec {
    match rng.gen_range(0..4) {
        0 | 1 => {
            let k = rng.gen_range(1..=4);
            DomainSpec::ExplicitSet(DYADIC.choose_multiple(rng, k).copied().collect())
        }
        2 => {
            // at most 8 representable values
            if rng.gen_bool(0.5) {
                let r = rng.gen_range(0..=2u32);
                let r_min = rng.gen_range(0..=r);
                DomainSpec::FixedPoint { r_min, r_max: r - r_min, signed: false }
            } else {
                let r_min = rng.gen_range(0..=1u32);
                DomainSpec::FixedPoint { r_min, r_max: 1 - r_min, signed: true }
            }
        }
        _ => {
            let weights = [0.5, 1.0, 1.5, 2.0, -1.0, -0.5];
            DomainSpec::CustomBase(weights.choose_multiple(rng, 2).copied().collect())
        }
    }
}

/// One instance: up to 3 variables with dyadic domains of at most 8 values,
/// up to 4 terms of degree at most 4 with integer coefficients in [-5, 5].
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Polynomial, BTreeMap<Var, DomainSpec>) {
    let n = rng.gen_range(1..=3);
    let vars: Vec<Var> = (0..n).map(|i| Var::continuous(format!("v{i}"))).collect();
    let domains = vars.iter().map(|v| (v.clone(), random_domain(rng))).collect();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let coeff = f64::from(rng.gen_range(-5..=5));
        let degree = rng.gen_range(0..=4);
        let mut exps = vec![0u32; n];
        for _ in 0..degree {
            exps[rng.gen_range(0..n)] += 1;
        }
        terms.push((coeff, Powers::from_pairs(vars.iter().cloned().zip(exps))));
    }
    (Polynomial::from_terms(terms), domains)
}

/// Deterministic suite of `count` instances whose compiled QUBO has at
/// most `max_bits` bits.
pub fn theorem_suite(count: usize, seed: u64, max_bits: usize) -> Vec<(Polynomial, BTreeMap<Var, DomainSpec>)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (p, d) = random_instance(&mut rng);
        if compile(&p, &d).is_ok_and(|a| a.registry.bit_count() <= max_bits) {
            out.push((p, d));
        }
    }
    out
}

/// Random binary polynomial over `n` variables with terms of arity up to
/// `max_arity` and small dyadic coefficients.
pub fn random_binary_poly(rng: &mut ChaCha8Rng, n: usize, max_arity: usize, terms: usize) -> (Polynomial, Vec<Var>) {
    let vars: Vec<Var> = (0..n).map(|i| Var::binary(format!("b{i}"))).collect();
    let mut p = Polynomial::constant(f64::from(rng.gen_range(-3..=3)));
    for _ in 0..terms {
        let k = rng.gen_range(1..=max_arity.min(n));
        let chosen: Vec<Var> = vars.choose_multiple(rng, k).cloned().collect();
        let c = f64::from(rng.gen_range(-12..=12)) / 4.0;
        p = p + Polynomial::monomial(c, Powers::product_of(chosen));
    }
    (p, vars)
}
