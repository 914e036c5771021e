//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use polyqubo::approx::{fourier_fit, lagrange_interpolate, taylor_series, DataPoint, PeriodicSamples, SeriesFunction};
use polyqubo::cli::{EXIT_INVALID, EXIT_PARSE, EXIT_SIZE_LIMIT};
use polyqubo::compiler::format::{read_qubo, write_qubo};
use polyqubo::compiler::{compile, encode_fixed_point, gadget, quadratize, DomainSpec};
use polyqubo::poly::{Polynomial, Powers, Var};
use polyqubo::showcase::{
    rcut_value, ratio_cut_objective, run_logreg_experiment, solve_ratio_cut, Graph, LogRegConfig, RatioCutConfig,
    RatioCutModel,
};
use polyqubo::solvers::{brute_force, simulated_anneal, verify_theorem1, AnnealParams, AnnealSchedule};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, outcome: Outcome) -> Outcome {
    let took = start.elapsed();
    match outcome {
        Ok(d) if took <= limit => Ok(format!("{d} [{took:.2?}]")),
        Ok(d) => Err(format!("{d} but took {took:.2?}, limit {limit:?}")),
        Err(d) => Err(format!("{d} [{took:.2?}]")),
    }
}

fn b(name: &str) -> Var {
    Var::binary(name)
}

fn gadget_truth_table() -> Outcome {
    let (q, x1, x2) = (b("q"), b("x1"), b("x2"));
    let g = gadget(&q, &x1, &x2);
    let mut bad = Vec::new();
    for m in 0..8u32 {
        let (vq, v1, v2) = (m & 1, m >> 1 & 1, m >> 2 & 1);
        let env = BTreeMap::from([(q.clone(), f64::from(vq)), (x1.clone(), f64::from(v1)), (x2.clone(), f64::from(v2))]);
        let val = g.evaluate(&env).unwrap();
        let ok = if vq == v1 * v2 { val == 0.0 } else { val >= 1.0 };
        if !ok {
            bad.push(format!("(q={vq},x1={v1},x2={v2})->{val}"));
        }
    }
    check(bad.is_empty(), format!("8 assignments, violations: {bad:?}"))
}

fn theorem_suite() -> Outcome {
    let suite = common::theorem_suite(100, 2024, 20);
    let mut failures = Vec::new();
    for (i, (p, d)) in suite.iter().enumerate() {
        match verify_theorem1(p, d) {
            Ok(r) if r.min_p == r.min_qubo && r.argmin_decodes => {}
            Ok(r) => failures.push(format!("#{i}: min_P={} min_QUBO={} argmin={}", r.min_p, r.min_qubo, r.argmin_decodes)),
            Err(e) => failures.push(format!("#{i}: {e}")),
        }
    }
    check(
        failures.is_empty(),
        format!("{}/100 instances exact, failures: {failures:?}", 100 - failures.len()),
    )
}

fn penalty_weight_example() -> Outcome {
    let x: Vec<Var> = (1..=4).map(|i| b(&format!("x{i}"))).collect();
    let p = Polynomial::monomial(-1.0, Powers::product_of(x.clone())) + Polynomial::var(&x[3]);
    let art = quadratize(&p).unwrap();
    let defs = art.aux_defs();
    if art.penalty_weight != 5.0 || defs.len() != 2 {
        return Err(format!("A = {}, {} auxiliaries", art.penalty_weight, defs.len()));
    }
    let (q1, q2) = (defs[0].var.clone(), defs[1].var.clone());
    let expected = Polynomial::monomial(-1.0, Powers::product_of([q1.clone(), q2.clone()]))
        + Polynomial::var(&x[3])
        + gadget(&q1, &x[0], &x[1]).scale(5.0)
        + gadget(&q2, &x[2], &x[3]).scale(5.0);
    if art.p_triple_prime != expected || defs[0].factors != x[..2] || defs[1].factors != x[2..] {
        return Err(format!("P''' = {}", art.p_triple_prime));
    }
    let all: Vec<Var> = x.iter().cloned().chain([q1.clone(), q2.clone()]).collect();
    let mut min_p = f64::INFINITY;
    let mut min_consistent = f64::INFINITY;
    let mut min_all = f64::INFINITY;
    for m in 0..64usize {
        let z = common::bits(m, 6);
        let env: BTreeMap<Var, f64> = all.iter().cloned().zip(z.iter().map(|&v| f64::from(u8::from(v)))).collect();
        let e = art.p_triple_prime.evaluate(&env).unwrap();
        min_all = min_all.min(e);
        if z[4] == (z[0] && z[1]) && z[5] == (z[2] && z[3]) {
            min_consistent = min_consistent.min(e);
            min_p = min_p.min(p.evaluate(&env).unwrap());
        }
    }
    check(
        min_p == min_consistent && min_p == min_all,
        format!("A = 5, structure matches; min P' = {min_p}, min consistent P''' = {min_consistent}, min P''' = {min_all}"),
    )
}

fn encoding_coverage() -> Outcome {
    let x = Var::continuous("x");
    for r_min in 0..=3u32 {
        for r_max in 0..=3u32 {
            let enc = encode_fixed_point(&x, r_min, r_max, true);
            let n = enc.bits().len();
            let got: BTreeSet<i64> = (0..1usize << n)
                .map(|m| {
                    let v = enc.decode_mask(&common::bits(m, n)) * 2f64.powi(r_min as i32);
                    assert_eq!(v.fract(), 0.0);
                    v as i64
                })
                .collect();
            let top = (1i64 << (r_min + r_max + 1)) - 1;
            let expected: BTreeSet<i64> = (-top..=top).collect();
            if got != expected {
                return Err(format!("r_min={r_min} r_max={r_max}: {} values, expected {}", got.len(), expected.len()));
            }
        }
    }
    Ok("16 (r_min, r_max) pairs, all masks enumerated".into())
}

fn aux_bound() -> Outcome {
    let suite = common::theorem_suite(100, 2024, 20);
    let mut worst = 0.0f64;
    for (i, (p, d)) in suite.iter().enumerate() {
        let art = compile(p, d).unwrap();
        let bound = art.shape.aux_bound();
        if art.aux_count() as u128 > bound {
            return Err(format!("#{i}: {} auxiliaries > bound {bound}", art.aux_count()));
        }
        if bound > 0 {
            worst = worst.max(art.aux_count() as f64 / bound as f64);
        }
    }
    let xs: Vec<Var> = (1..=3).map(|i| Var::continuous(format!("x{i}"))).collect();
    let p = Polynomial::var(&xs[2]).pow(3) + &Polynomial::var(&xs[0]) * &Polynomial::var(&xs[1]) - Polynomial::constant(1.0);
    let d = xs.iter().map(|v| (v.clone(), DomainSpec::FixedPoint { r_min: 2, r_max: 2, signed: false })).collect();
    let art = compile(&p, &d).unwrap();
    let bound = art.shape.aux_bound();
    check(
        bound == 13824 && art.aux_count() as u128 <= bound,
        format!("suite within bound (max ratio {worst:.3}); example bound {bound}, actual {}", art.aux_count()),
    )
}

fn lagrange() -> Outcome {
    let x = Var::continuous("x");
    let pts = [DataPoint::new(1.0, 2.0), DataPoint::new(2.0, 6.0), DataPoint::new(3.0, 12.0)];
    let p = lagrange_interpolate(&pts, &x).unwrap();
    let c = |k: u32| p.coefficient(&Powers::single(x.clone(), k));
    let err = [c(0) - 0.0, c(1) - 1.0, c(2) - 1.0].iter().fold(0.0f64, |m, e| m.max(e.abs()));
    check(err <= 1e-9 && p.degree() <= 2, format!("P = {p}, max coefficient error {err:.1e}"))
}

fn taylor_fourier() -> Outcome {
    let x = Var::continuous("x");
    let t = taylor_series(SeriesFunction::Ln1p, 2, &x).unwrap();
    let expected = Polynomial::var(&x) - Polynomial::var(&x).pow(2).scale(0.5);
    if t != expected {
        return Err(format!("taylor(ln1p, 2) = {t}"));
    }
    let saw = |v: f64| (v - 1.0f64).rem_euclid(2.0) - 1.0;
    let fit = fourier_fit(&PeriodicSamples::from_fn(saw, -1.0, 2.0, 1024), 3).unwrap();
    let mut err = 0.0f64;
    for (k, (_, bn)) in fit.terms.iter().enumerate() {
        let n = (k + 1) as f64;
        err = err.max((bn - 2.0 * (-1f64).powi(k as i32 + 2) / (PI * n)).abs());
    }
    check(err < 1e-3, format!("taylor exact; sawtooth max |b_n error| = {err:.2e}"))
}

/// Exact minimum of a compiled ratio-cut model over the states whose
/// auxiliary bits are consistent. Only the assignment and slack bits are
/// enumerated; by the equivalence theorem this is also the QUBO minimum.
struct ModelOptimum {
    energy: f64,
    partition: Option<Vec<bool>>,
    qubo: polyqubo::compiler::QuboMatrix,
}

fn model_optimum(model: &RatioCutModel) -> ModelOptimum {
    let art = compile(&model.objective, &BTreeMap::new()).unwrap();
    let reg = &art.registry;
    let q = art.assemble();
    let free: Vec<usize> = model
        .x
        .iter()
        .flatten()
        .chain(model.slack.iter().map(|(v, _)| v))
        .map(|v| reg.index_of(v).unwrap())
        .collect();
    let mut z = vec![false; q.n()];
    let set = |z: &mut Vec<bool>, m: usize| {
        for (k, &i) in free.iter().enumerate() {
            z[i] = (m >> k) & 1 == 1;
        }
        reg.complete_aux(z);
    };
    let mut best = (f64::INFINITY, 0usize);
    for m in 0..1usize << free.len() {
        set(&mut z, m);
        let e = q.energy(&z);
        if e < best.0 {
            best = (e, m);
        }
    }
    set(&mut z, best.1);
    let partition = model.partition(&reg.decode(&z).unwrap().values);
    ModelOptimum {
        energy: best.0,
        partition,
        qubo: q,
    }
}

fn same_split(p: &[bool], target: &[bool]) -> bool {
    p == target || p.iter().zip(target).all(|(a, b)| a != b)
}

fn ratio_cut_fig4() -> Outcome {
    let g = Graph::two_cliques();
    let cfg = RatioCutConfig::default();
    let target: Vec<bool> = (0..8).map(|v| v >= 4).collect();
    let mut hits = 0;
    let mut seen = Vec::new();
    for seed in 0..10 {
        let r = solve_ratio_cut(&g, &cfg, &AnnealSchedule::default(), seed).unwrap();
        if r.partition.as_ref().is_some_and(|p| same_split(p, &target)) && r.rcut == Some(0.5) {
            hits += 1;
        }
        seen.push(match (&r.partition, r.rcut) {
            (Some(_), Some(v)) => format!("rcut {v}"),
            (Some(_), None) => "empty side".into(),
            (None, _) => format!("infeasible E={:.4}", r.energy),
        });
    }
    // the exact optimum of the same model, for comparison
    let exact = model_optimum(&ratio_cut_objective(&g, &cfg).unwrap());
    let exact_desc = match &exact.partition {
        Some(p) => {
            let a: Vec<usize> = (0..8).filter(|&v| !p[v]).collect();
            let b: Vec<usize> = (0..8).filter(|&v| p[v]).collect();
            let rcut = rcut_value(&g, p).map_or("undefined".into(), |v| v.to_string());
            format!("{a:?}|{b:?} with rcut {rcut}")
        }
        None => "infeasible".into(),
    };
    check(
        hits >= 8,
        format!(
            "annealer returned the optimum for {hits}/10 seeds (need 8); outcomes {seen:?}; \
             exact optimum of the compiled model: E={:.4}, partition {exact_desc}",
            exact.energy
        ),
    )
}

fn random_graph(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn ratio_cut_small_graphs() -> Outcome {
    let mut rng = common::rng(77);
    let cfg = RatioCutConfig::default();
    let mut matches = 0;
    let mut notes = Vec::new();
    for i in 0..20 {
        let n = rng.gen_range(2..=6);
        let g = random_graph(&mut rng, n);
        // direct enumeration of rcut over partitions with two nonempty sides
        let best_rcut = (1..(1usize << n) - 1)
            .map(|m| rcut_value(&g, &common::bits(m, n)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let exact = model_optimum(&ratio_cut_objective(&g, &cfg).unwrap());
        if exact.qubo.n() <= 22 {
            let full = brute_force(&exact.qubo).unwrap();
            if full.energy != exact.energy {
                return Err(format!("graph #{i}: consistent minimum {} != QUBO minimum {}", exact.energy, full.energy));
            }
        }
        match exact.partition.as_ref().map(|p| rcut_value(&g, p)) {
            Some(Ok(v)) if (v - best_rcut).abs() <= 1e-9 => matches += 1,
            Some(Ok(v)) => notes.push(format!(
                "#{i} (|V|={n}, |E|={}): Taylor drift, rcut {v} vs optimum {best_rcut}",
                g.edge_count()
            )),
            Some(Err(e)) => notes.push(format!("#{i}: {e}")),
            None => notes.push(format!("#{i}: assignment constraint violated")),
        }
    }
    check(matches >= 18, format!("{matches}/20 graphs match (need 18); flagged: {notes:?}"))
}

fn logistic_regression() -> Outcome {
    let paper = [(1.0, 0.97), (0.8, 0.76), (0.6, 0.56), (0.5, 0.50)];
    let ps = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    let mut rows = Vec::new();
    for &p in &ps {
        let cfg = LogRegConfig { p, ..Default::default() };
        let r = run_logreg_experiment(&cfg, 20, &AnnealSchedule::default()).unwrap();
        rows.push((p, r.accuracy_mean, r.accuracy_std));
    }
    let mut problems = Vec::new();
    for (p, mu_paper) in paper {
        let (_, mu, _) = rows.iter().find(|r| r.0 == p).unwrap();
        if (mu - mu_paper).abs() > 0.08 {
            problems.push(format!("p={p}: mu {mu:.3} vs {mu_paper}"));
        }
    }
    for w in rows.windows(2) {
        let ((p0, m0, s0), (p1, m1, s1)) = (w[0], w[1]);
        if m1 < m0 - 2.0 * s0.max(s1) {
            problems.push(format!("mu drops from p={p0} to p={p1}"));
        }
    }
    let table: Vec<String> = rows.iter().map(|(p, m, s)| format!("p={p}: {m:.3}±{s:.3}")).collect();
    check(problems.is_empty(), format!("{}; problems: {problems:?}", table.join(", ")))
}

fn annealer_sanity() -> Outcome {
    let mut rng = common::rng(5150);
    let mut hits = 0;
    for i in 0..50u64 {
        let n = rng.gen_range(4..=18);
        let q = common::random_qubo(&mut rng, n, 0.5);
        let exact = brute_force(&q).unwrap();
        let params = AnnealParams::for_matrix(&q, None).with_seed(i);
        let s = simulated_anneal(&q, &params).unwrap();
        if s.energy == exact.energy {
            hits += 1;
        }
    }
    check(hits >= 45, format!("{hits}/50 instances reach the brute-force optimum (need 45)"))
}

fn file_round_trip() -> Outcome {
    let mut rng = common::rng(31337);
    for i in 0..50 {
        let n = rng.gen_range(0..=30);
        let mut q = common::random_qubo(&mut rng, n, 0.3);
        for _ in 0..n {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            q.add(a, b, rng.gen::<f64>() * 2e3 - 1e3);
        }
        q.set_offset(rng.gen::<f64>() - 0.5);
        let back = read_qubo(&write_qubo(&q)).unwrap();
        let same = back.n() == q.n()
            && back.offset().to_bits() == q.offset().to_bits()
            && back.entries().map(|(k, v)| (k, v.to_bits())).eq(q.entries().map(|(k, v)| (k, v.to_bits())));
        if !same {
            return Err(format!("matrix #{i} changed on round trip"));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let file = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let out = dir.path().join("o.qubo").to_string_lossy().into_owned();
    let cases: Vec<(&str, Vec<String>, i32)> = vec![
        ("truncated JSON", vec!["compile".into(), file("a.json", "{\"variables\": ["), "-o".into(), out.clone()], EXIT_PARSE),
        (
            "undeclared variable",
            vec![
                "compile".into(),
                file("b.json", r#"{"variables": [], "objective": [{"coeff": 1, "powers": {"y": 2}}]}"#),
                "-o".into(),
                out.clone(),
            ],
            EXIT_INVALID,
        ),
        ("entry below diagonal", vec!["solve".into(), file("c.qubo", "QUBO 1\nVARS 2\nOFFSET 0\n1 0 1\n")], EXIT_PARSE),
        ("bad header", vec!["solve".into(), file("d.qubo", "QUBO 2\nVARS 1\nOFFSET 0\n")], EXIT_PARSE),
        (
            "40 bits for brute force",
            vec!["solve".into(), file("e.qubo", "QUBO 1\nVARS 40\nOFFSET 0\n0 0 1\n"), "--method".into(), "brute".into()],
            EXIT_SIZE_LIMIT,
        ),
    ];
    let mut wrong = Vec::new();
    for (name, args, code) in &cases {
        let got = Command::new(env!("CARGO_BIN_EXE_polyqubo")).args(args).output().unwrap().status.code();
        if got != Some(*code) {
            wrong.push(format!("{name}: exit {got:?}, expected {code}"));
        }
    }
    check(wrong.is_empty(), format!("50 matrices bit-exact; 5 malformed inputs, wrong exit codes: {wrong:?}"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("gadget truth table", Duration::from_millis(1), gadget_truth_table),
        ("equivalence suite", Duration::from_secs(60), theorem_suite),
        ("penalty-weight example", Duration::MAX, penalty_weight_example),
        ("encoding coverage", Duration::MAX, encoding_coverage),
        ("aux bound", Duration::MAX, aux_bound),
        ("Lagrange", Duration::MAX, lagrange),
        ("Taylor/Fourier", Duration::MAX, taylor_fourier),
        ("ratio cut, two-clique graph", Duration::from_secs(60), ratio_cut_fig4),
        ("ratio cut, small-graph oracle", Duration::from_secs(120), ratio_cut_small_graphs),
        ("logistic regression trend", Duration::from_secs(300), logistic_regression),
        ("annealer sanity", Duration::from_secs(60), annealer_sanity),
        ("file round-trip and exit codes", Duration::MAX, file_round_trip),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        match within(limit, start, f()) {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
