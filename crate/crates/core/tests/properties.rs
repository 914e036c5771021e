//! Property tests for the invariants of each module.

mod common;

use std::collections::BTreeMap;

use polyqubo::compiler::format::{read_decode_map, read_qubo, write_decode_map, write_qubo};
use polyqubo::compiler::{assemble_polynomial, compile, quadratize, QuboMatrix};
use polyqubo::poly::{Polynomial, Powers, Var};
use polyqubo::showcase::{predict, rcut_value, sigmoid, Graph};
use polyqubo::solvers::{brute_force, simulated_anneal, AnnealParams};
use proptest::prelude::*;

fn cont_vars() -> Vec<Var> {
    ["x", "y", "z"].iter().map(|n| Var::continuous(*n)).collect()
}

fn bin_vars() -> Vec<Var> {
    ["a", "b", "c", "d"].iter().map(|n| Var::binary(*n)).collect()
}

/// Terms as raw `(coefficient, exponents)` over `k` variables; coefficients
/// are multiples of 1/4.
fn raw_terms(k: usize) -> impl Strategy<Value = Vec<(f64, Vec<u32>)>> {
    prop::collection::vec(((-20i32..=20).prop_map(|c| f64::from(c) / 4.0), prop::collection::vec(0u32..=3, k)), 0..6)
}

fn build(vars: &[Var], raw: &[(f64, Vec<u32>)]) -> Polynomial {
    Polynomial::from_terms(
        raw.iter()
            .map(|(c, e)| (*c, Powers::from_pairs(vars.iter().cloned().zip(e.iter().copied())))),
    )
}

/// Direct evaluation of the raw term list, with no canonicalization.
fn eval_raw(raw: &[(f64, Vec<u32>)], point: &[f64]) -> f64 {
    raw.iter()
        .map(|(c, e)| c * e.iter().zip(point).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
        .sum()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-8i32..=8).prop_map(|v| f64::from(v) / 4.0), 3)
}

fn assign(vars: &[Var], pt: &[f64]) -> BTreeMap<Var, f64> {
    vars.iter().cloned().zip(pt.iter().copied()).collect()
}

proptest! {
    #[test]
    fn canonical_arithmetic_is_sound(a in raw_terms(3), b in raw_terms(3), pts in prop::collection::vec(point(), 10)) {
        let vars = cont_vars();
        let (pa, pb) = (build(&vars, &a), build(&vars, &b));
        let sum = &pa + &pb;
        let prod = &pa * &pb;
        let sub = pa.substitute(&vars[0], &(&Polynomial::var(&vars[1]) + &Polynomial::constant(0.5)));
        for pt in &pts {
            let env = assign(&vars, pt);
            let (va, vb) = (eval_raw(&a, pt), eval_raw(&b, pt));
            prop_assert_eq!(sum.evaluate(&env).unwrap(), va + vb);
            prop_assert!((prod.evaluate(&env).unwrap() - va * vb).abs() <= 1e-9 * (1.0 + (va * vb).abs()));
            let shifted = [pt[1] + 0.5, pt[1], pt[2]];
            prop_assert!((sub.evaluate(&env).unwrap() - eval_raw(&a, &shifted)).abs() <= 1e-9 * (1.0 + va.abs()));
        }
    }

    #[test]
    fn binary_reduction_keeps_values(raw in raw_terms(4)) {
        let vars = bin_vars();
        let p = build(&vars, &raw);
        for m in 0..16usize {
            let pt: Vec<f64> = (0..4).map(|i| ((m >> i) & 1) as f64).collect();
            prop_assert_eq!(p.evaluate(&assign(&vars, &pt)).unwrap(), eval_raw(&raw, &pt));
        }
        prop_assert!(p.terms().all(|(pw, _)| pw.iter().all(|(_, e)| e == 1)));
    }

    #[test]
    fn substitute_identity(raw in raw_terms(3)) {
        let vars = cont_vars();
        let p = build(&vars, &raw);
        for v in &vars {
            prop_assert_eq!(p.substitute(v, &Polynomial::var(v)), p.clone());
        }
    }

    #[test]
    fn quadratization_is_consistent(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (p, _) = common::random_binary_poly(&mut rng, 6, 5, 5);
        let vars: Vec<Var> = p.variables().into_iter().collect();
        let art = quadratize(&p).unwrap();
        prop_assert!(art.p_triple_prime.max_product_arity() <= 2);
        let q = art.assemble();
        let reg = &art.registry;
        let env_of = |z: &[bool]| -> BTreeMap<Var, f64> {
            vars.iter().map(|v| (v.clone(), f64::from(u8::from(z[reg.index_of(v).unwrap()])))).collect()
        };
        let energies = common::naive_energies(&q);
        let mut min_p = f64::INFINITY;
        let mut inconsistent = Vec::new();
        for (mask, &e) in energies.iter().enumerate() {
            let z = common::bits(mask, q.n());
            let mut completed = z.clone();
            reg.complete_aux(&mut completed);
            if completed == z {
                let value = p.evaluate(&env_of(&z)).unwrap();
                prop_assert_eq!(e, value);
                min_p = min_p.min(value);
            } else {
                inconsistent.push(e);
            }
        }
        for e in inconsistent {
            prop_assert!(e >= min_p + 1.0, "inconsistent energy {} vs min {}", e, min_p);
        }
    }

    #[test]
    fn assemble_agrees_with_evaluation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (p, _) = common::random_binary_poly(&mut rng, 8, 2, 12);
        let labels: Vec<Var> = (0..8).map(|i| Var::binary(format!("b{i}"))).collect();
        let q = assemble_polynomial(&p, &labels).unwrap();
        for m in 0..256usize {
            let z = common::bits(m, 8);
            let env: BTreeMap<Var, f64> = labels.iter().cloned().zip(z.iter().map(|&b| f64::from(u8::from(b)))).collect();
            prop_assert_eq!(q.energy(&z), p.evaluate(&env).unwrap());
        }
        prop_assert_eq!(q.to_polynomial(), p);
    }

    #[test]
    fn qubo_file_round_trip(seed in any::<u64>(), n in 0usize..12) {
        let mut rng = common::rng(seed);
        let mut q = common::random_qubo(&mut rng, n, 0.6);
        // arbitrary doubles, not only dyadic ones
        use rand::Rng;
        if n > 0 {
            q.add(0, n - 1, rng.gen::<f64>() * 1e3 - 500.0);
        }
        q.set_offset(rng.gen::<f64>() / 3.0);
        let back = read_qubo(&write_qubo(&q)).unwrap();
        prop_assert_eq!(back.offset().to_bits(), q.offset().to_bits());
        let a: Vec<_> = q.entries().map(|(k, v)| (k, v.to_bits())).collect();
        let b: Vec<_> = back.entries().map(|(k, v)| (k, v.to_bits())).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decode_map_round_trip(seed in 0u64..200) {
        let mut rng = common::rng(seed);
        let (p, d) = common::random_instance(&mut rng);
        let art = compile(&p, &d).unwrap();
        let back = read_decode_map(&write_decode_map(&art.registry)).unwrap();
        prop_assert_eq!(&back, &art.registry);
    }

    #[test]
    fn brute_force_matches_naive_enumeration(seed in any::<u64>(), n in 1usize..=14) {
        let mut rng = common::rng(seed);
        let q = common::random_qubo(&mut rng, n, 0.5);
        let energies = common::naive_energies(&q);
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        // lexicographic order with bit 0 first: compare bit vectors
        let best = (0..energies.len())
            .filter(|&m| energies[m] == min)
            .map(|m| common::bits(m, n))
            .min()
            .unwrap();
        let s = brute_force(&q).unwrap();
        prop_assert_eq!(s.energy, min);
        prop_assert_eq!(s.bits, best);
    }

    #[test]
    fn annealer_is_deterministic(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let q = common::random_qubo(&mut rng, 10, 0.5);
        let mut p = AnnealParams::for_matrix(&q, None).with_seed(seed);
        p.sweeps = 30;
        p.restarts = 4;
        let a = simulated_anneal(&q, &p).unwrap();
        prop_assert_eq!(&a, &simulated_anneal(&q, &p).unwrap());
        prop_assert_eq!(a.energy, q.energy(&a.bits));
    }

    #[test]
    fn prediction_rule_matches_sigmoid(theta in prop::collection::vec(-4.0f64..4.0, 4), x in prop::collection::vec(-1.0f64..1.0, 4)) {
        let t: f64 = theta.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert_eq!(sigmoid(t) > 0.5, predict(&theta, &x));
    }

    #[test]
    fn rcut_is_symmetric(mask in 1u32..255) {
        let g = Graph::two_cliques();
        let side: Vec<bool> = (0..8).map(|v| (mask >> v) & 1 == 1).collect();
        let flipped: Vec<bool> = side.iter().map(|b| !b).collect();
        prop_assert_eq!(rcut_value(&g, &side).unwrap(), rcut_value(&g, &flipped).unwrap());
    }
}

#[test]
fn energy_of_empty_matrix_is_offset() {
    let mut q = QuboMatrix::new(0);
    q.set_offset(-1.25);
    assert_eq!(q.energy(&[]), -1.25);
}
