use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compiler::{compile, DomainSpec};
use crate::poly::{Polynomial, Powers, Var};
use crate::solvers::{simulated_anneal, AnnealSchedule};

use super::ShowcaseError;

/// Synthetic logistic-regression experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegConfig {
    /// Input dimension, including the constant bias feature.
    pub d: usize,
    /// Number of output labels per point.
    pub g: usize,
    pub n_points: usize,
    /// Probability that a label agrees with the true side.
    pub p: f64,
    pub train_fraction: f64,
    pub seed: u64,
    pub theta_domain: DomainSpec,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            d: 5,
            g: 3,
            n_points: 200,
            p: 1.0,
            train_fraction: 0.6,
            seed: 0,
            theta_domain: DomainSpec::FixedPoint {
                r_min: 1,
                r_max: 1,
                signed: true,
            },
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<(), ShowcaseError> {
        let bad = |m: &str| Err(ShowcaseError::InvalidConfig(m.into()));
        if !(0.0..=1.0).contains(&self.p) {
            return bad("p must lie in [0, 1]");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie in (0, 1)");
        }
        Ok(())
    }

    /// Number of training points; the rest are the test set.
    pub fn train_len(&self) -> usize {
        (self.n_points as f64 * self.train_fraction).round() as usize
    }
}

/// Points with `g` labels each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<bool>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Points `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset {
        Dataset {
            x: self.x[range.clone()].to_vec(),
            y: self.y[range].to_vec(),
        }
    }
}

/// Draws separating functions `f_j(u) = c_j·u + b_j` and points, then labels
/// each point by the side of every `f_j`, flipping each label with
/// probability `1 − p`.
///
/// Features are `(u_1, …, u_{d−1}, 1)` with `u`, `c` and `b` uniform on
/// `[−1, 1]`; the trailing 1 lets `θ` carry the offset `b`.
pub fn generate_logreg_dataset(cfg: &LogRegConfig) -> Result<Dataset, ShowcaseError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let free = cfg.d.saturating_sub(1);
    let planes: Vec<(Vec<f64>, f64)> = (0..cfg.g)
        .map(|_| {
            let c = (0..free).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            (c, rng.gen_range(-1.0..=1.0))
        })
        .collect();
    let mut x = Vec::with_capacity(cfg.n_points);
    let mut y = Vec::with_capacity(cfg.n_points);
    for _ in 0..cfg.n_points {
        let mut point: Vec<f64> = (0..free).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let labels = planes
            .iter()
            .map(|(c, b)| {
                let side = c.iter().zip(&point).map(|(c, u)| c * u).sum::<f64>() + b > 0.0;
                if rng.gen::<f64>() < cfg.p {
                    side
                } else {
                    !side
                }
            })
            .collect();
        if cfg.d > 0 {
            point.push(1.0);
        }
        x.push(point);
        y.push(labels);
    }
    Ok(Dataset { x, y })
}

/// Writes `x_0,…,x_{d−1},y_0,…,y_{g−1}` rows after a header line.
pub fn write_dataset(data: &Dataset, mut out: impl Write) -> io::Result<()> {
    let d = data.x.first().map_or(0, Vec::len);
    let g = data.y.first().map_or(0, Vec::len);
    let header: Vec<String> = (0..d).map(|i| format!("x{i}")).chain((0..g).map(|j| format!("y{j}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (x, y) in data.x.iter().zip(&data.y) {
        let row: Vec<String> = x
            .iter()
            .map(f64::to_string)
            .chain(y.iter().map(|&b| u8::from(b).to_string()))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// `θᵀx > 0`, the same decision as `σ(θᵀx) > 0.5`.
pub fn predict(theta: &[f64], x: &[f64]) -> bool {
    theta.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() > 0.0
}

/// The surrogate loss and its parameter variables.
#[derive(Debug, Clone)]
pub struct LogRegModel {
    pub objective: Polynomial,
    /// `theta[j][k]`: weight of feature `k` for output `j`.
    pub theta: Vec<Vec<Var>>,
}

/// `Σ_i Σ_j (1 − y_ij)·t − t/2 + t²/8` with `t = θ_jᵀx_i`, the softplus
/// Taylor surrogate of the cross-entropy with `ln 2` dropped.
pub fn logreg_objective(data: &Dataset) -> Result<LogRegModel, ShowcaseError> {
    if data.is_empty() {
        return Err(ShowcaseError::EmptyDataset);
    }
    let d = data.x[0].len();
    let g = data.y[0].len();
    let theta: Vec<Vec<Var>> = (0..g)
        .map(|j| (0..d).map(|k| Var::continuous(format!("theta{j}_{k}"))).collect())
        .collect();
    // t² summed over points only needs the Gram matrix
    let mut gram = vec![vec![0.0; d]; d];
    for x in &data.x {
        for k in 0..d {
            for l in 0..d {
                gram[k][l] += x[k] * x[l];
            }
        }
    }
    let mut terms = Vec::new();
    for (j, vars) in theta.iter().enumerate() {
        let mut linear = vec![0.0; d];
        for (x, y) in data.x.iter().zip(&data.y) {
            let w = if y[j] { -0.5 } else { 0.5 };
            for k in 0..d {
                linear[k] += w * x[k];
            }
        }
        for k in 0..d {
            terms.push((linear[k], Powers::single(vars[k].clone(), 1)));
            for l in 0..d {
                let pair = Powers::from_pairs([(vars[k].clone(), 1), (vars[l].clone(), 1)]);
                terms.push((gram[k][l] / 8.0, pair));
            }
        }
    }
    Ok(LogRegModel {
        objective: Polynomial::from_terms(terms),
        theta,
    })
}

/// Mean and spread of per-run test accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy_mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub accuracy_std: f64,
    pub runs: usize,
    pub accuracies: Vec<f64>,
}

fn run_seed(seed: u64, run: usize) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add((run as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn one_run(cfg: &LogRegConfig, schedule: &AnnealSchedule, seed: u64) -> Result<f64, ShowcaseError> {
    let data = generate_logreg_dataset(&LogRegConfig { seed, ..cfg.clone() })?;
    let split = cfg.train_len();
    let (train, test) = (data.slice(0..split), data.slice(split..data.len()));
    let model = logreg_objective(&train)?;
    let domains: BTreeMap<Var, DomainSpec> = model
        .theta
        .iter()
        .flatten()
        .map(|v| (v.clone(), cfg.theta_domain.clone()))
        .collect();
    let art = compile(&model.objective, &domains)?;
    let q = art.assemble();
    let params = schedule.params_for(&q, Some(art.penalty_weight), seed);
    let sol = simulated_anneal(&q, &params)?.decode_with(&art.registry)?;
    let theta: Vec<Vec<f64>> = model
        .theta
        .iter()
        .map(|row| row.iter().map(|v| sol.decoded[v]).collect())
        .collect();
    let mut correct = 0usize;
    let mut total = 0usize;
    for (x, y) in test.x.iter().zip(&test.y) {
        for (t, &label) in theta.iter().zip(y) {
            correct += usize::from(predict(t, x) == label);
            total += 1;
        }
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

/// Trains on the first `train_fraction` of each run's dataset and scores
/// label agreement on the rest. Runs execute in parallel with seeds derived
/// from `cfg.seed` and the run index.
pub fn run_logreg_experiment(
    cfg: &LogRegConfig,
    runs: usize,
    schedule: &AnnealSchedule,
) -> Result<EvalReport, ShowcaseError> {
    cfg.validate()?;
    if runs == 0 {
        return Err(ShowcaseError::InvalidConfig("runs must be at least 1".into()));
    }
    let accuracies = (0..runs)
        .into_par_iter()
        .map(|r| one_run(cfg, schedule, run_seed(cfg.seed, r)))
        .collect::<Result<Vec<f64>, _>>()?;
    let mean = accuracies.iter().sum::<f64>() / runs as f64;
    let std = if runs > 1 {
        (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(EvalReport {
        accuracy_mean: mean,
        accuracy_std: std,
        runs,
        accuracies,
    })
}
