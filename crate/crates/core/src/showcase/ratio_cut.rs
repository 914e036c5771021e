use std::collections::{BTreeMap, BTreeSet};

use crate::approx::{shifted_log_approx, LogShiftParams};
use crate::compiler::compile;
use crate::poly::{Polynomial, Powers, Var};
use crate::solvers::{simulated_anneal, AnnealSchedule};

use super::ShowcaseError;

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ShowcaseError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(ShowcaseError::SelfLoop(u));
            }
            for vertex in [u, v] {
                if vertex >= vertex_count {
                    return Err(ShowcaseError::VertexOutOfRange {
                        vertex,
                        count: vertex_count,
                    });
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            vertex_count,
            edges: set,
        })
    }

    /// Two 4-cliques `{0,1,2,3}` and `{4,5,6,7}` joined by the edge 3–4.
    pub fn two_cliques() -> Self {
        let clique = |o: usize| (0..4).flat_map(move |i| (i + 1..4).map(move |j| (o + i, o + j)));
        Self::new(8, clique(0).chain(clique(4)).chain([(3, 4)])).expect("valid graph")
    }

    /// One `u v` pair per line; `#` starts a comment. The vertex count is
    /// one more than the largest id.
    pub fn parse(text: &str) -> Result<Self, ShowcaseError> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| ShowcaseError::GraphSyntax {
                line: i + 1,
                message: message.into(),
            };
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| syntax(&format!("`{t}` is not a vertex id"))))
                .collect::<Result<_, _>>()?;
            match ids[..] {
                [u, v] => edges.push((u, v)),
                _ => return Err(syntax("expected two vertex ids")),
            }
        }
        let count = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edges whose endpoints lie on different sides.
    pub fn cut_size(&self, side: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| side[u] != side[v]).count()
    }
}

/// `cut/|A| + cut/|B|`, where `side[v]` is true for vertices in `B`.
pub fn rcut_value(g: &Graph, side: &[bool]) -> Result<f64, ShowcaseError> {
    if side.len() != g.vertex_count {
        return Err(ShowcaseError::PartitionLength {
            expected: g.vertex_count,
            got: side.len(),
        });
    }
    let b = side.iter().filter(|&&s| s).count();
    let a = side.len() - b;
    if a == 0 || b == 0 {
        return Err(ShowcaseError::EmptySide);
    }
    let cut = g.cut_size(side) as f64;
    Ok(cut / a as f64 + cut / b as f64)
}

/// Constants of the log-shifted ratio-cut polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCutConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// Weight of the assignment constraints.
    pub weight: f64,
    /// Adds `weight · (|A| − 1 − s)²` with a binary slack `s ∈ [0, |V|−2]`,
    /// which rules out partitions with an empty side. Without it the
    /// approximated objective prefers putting every vertex on one side.
    pub require_nonempty: bool,
}

impl Default for RatioCutConfig {
    fn default() -> Self {
        Self {
            c1: 2.0,
            c2: 8.0,
            c3: 8.0,
            d1: 1.0,
            d2: 1.0,
            d3: 1.0,
            weight: 100.0,
            require_nonempty: true,
        }
    }
}

impl RatioCutConfig {
    pub fn validate(&self) -> Result<(), ShowcaseError> {
        for (c, d) in [(self.c1, self.d1), (self.c2, self.d2), (self.c3, self.d3)] {
            LogShiftParams::new(c, d)?;
        }
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(ShowcaseError::InvalidConfig("weight must be positive".into()));
        }
        Ok(())
    }
}

/// The binary ratio-cut polynomial and its variables.
#[derive(Debug, Clone)]
pub struct RatioCutModel {
    pub objective: Polynomial,
    /// `x[n] = [x_{n,0}, x_{n,1}]`: vertex `n` is in `A` resp. `B`.
    pub x: Vec<[Var; 2]>,
    /// Slack bits with their weights; empty without the nonempty guard.
    pub slack: Vec<(Var, f64)>,
}

impl RatioCutModel {
    /// Reads the partition from an assignment; `None` unless every vertex
    /// has exactly one of its two bits set.
    pub fn partition(&self, values: &BTreeMap<Var, f64>) -> Option<Vec<bool>> {
        self.x
            .iter()
            .map(|[a, b]| match (values.get(a) == Some(&1.0), values.get(b) == Some(&1.0)) {
                (true, false) => Some(false),
                (false, true) => Some(true),
                _ => None,
            })
            .collect()
    }
}

/// Weights `1, 2, 4, …` whose last entry is trimmed so they sum to `max`.
fn capped_binary_weights(max: usize) -> Vec<f64> {
    let mut weights = Vec::new();
    let mut total = 0;
    let mut next = 1;
    while total < max {
        let w = next.min(max - total);
        weights.push(w as f64);
        total += w;
        next *= 2;
    }
    weights
}

/// `L1(cut) − L2(|A|) − L3(|B|)` with `L_i` the shifted second-order log
/// approximation, plus `weight · Σ_n (x_{n,0} + x_{n,1} − 1)²`.
pub fn ratio_cut_objective(g: &Graph, cfg: &RatioCutConfig) -> Result<RatioCutModel, ShowcaseError> {
    cfg.validate()?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(ShowcaseError::TooFewVertices);
    }
    let x: Vec<[Var; 2]> = (0..n)
        .map(|v| [Var::binary(format!("x{v}_0")), Var::binary(format!("x{v}_1"))])
        .collect();
    let side_size = |j: usize| -> Polynomial { x.iter().map(|pair| Polynomial::var(&pair[j])).sum() };
    let size_a = side_size(0);
    let size_b = side_size(1);
    let pair = |a: &Var, b: &Var| Polynomial::monomial(1.0, Powers::product_of([a.clone(), b.clone()]));
    let cut: Polynomial = g
        .edges()
        .map(|(u, v)| pair(&x[u][0], &x[v][1]) + pair(&x[v][0], &x[u][1]))
        .sum();

    let t = Var::continuous("t");
    let log = |c: f64, d: f64, arg: &Polynomial| -> Result<Polynomial, ShowcaseError> {
        Ok(shifted_log_approx(LogShiftParams::new(c, d)?, &t).substitute(&t, arg))
    };
    let mut objective = log(cfg.c1, cfg.d1, &cut)? - log(cfg.c2, cfg.d2, &size_a)? - log(cfg.c3, cfg.d3, &size_b)?;

    let one = Polynomial::constant(1.0);
    let assignment: Polynomial = x
        .iter()
        .map(|[a, b]| (Polynomial::var(a) + Polynomial::var(b) - one.clone()).pow(2))
        .sum();
    objective = objective + assignment.scale(cfg.weight);

    let mut slack = Vec::new();
    if cfg.require_nonempty {
        slack = capped_binary_weights(n - 2)
            .into_iter()
            .enumerate()
            .map(|(k, w)| (Var::binary(format!("s{k}")), w))
            .collect();
        let s: Polynomial = slack.iter().map(|(v, w)| Polynomial::var(v).scale(*w)).sum();
        objective = objective + (&size_a - &one - s).pow(2).scale(cfg.weight);
    }
    Ok(RatioCutModel { objective, x, slack })
}

/// A solved ratio-cut instance.
#[derive(Debug, Clone)]
pub struct RatioCutResult {
    /// `side[v]` is true for vertices in `B`; `None` if the solution
    /// violates the assignment constraints.
    pub partition: Option<Vec<bool>>,
    /// `rcut` of the partition, when it has two nonempty sides.
    pub rcut: Option<f64>,
    pub energy: f64,
    pub consistent: bool,
    pub bit_count: usize,
    pub aux_count: usize,
}

/// Compiles the ratio-cut polynomial and anneals it.
pub fn solve_ratio_cut(
    g: &Graph,
    cfg: &RatioCutConfig,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<RatioCutResult, ShowcaseError> {
    let model = ratio_cut_objective(g, cfg)?;
    let art = compile(&model.objective, &BTreeMap::new())?;
    let q = art.assemble();
    let params = schedule.params_for(&q, Some(art.penalty_weight), seed);
    let sol = simulated_anneal(&q, &params)?.decode_with(&art.registry)?;
    let partition = model.partition(&sol.decoded);
    let rcut = partition.as_ref().and_then(|p| rcut_value(g, p).ok());
    Ok(RatioCutResult {
        partition,
        rcut,
        energy: sol.energy,
        consistent: sol.consistent,
        bit_count: q.n(),
        aux_count: art.aux_count(),
    })
}
