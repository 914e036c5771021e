use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compiler::QuboMatrix;

use super::brute::tie_tolerance;
use super::{Couplings, SolveError, Solution};

/// Simulated-annealing schedule. Restart `r` draws from a generator seeded
/// with `seed ^ r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub restarts: usize,
    pub sweeps: usize,
    pub t_initial: f64,
    pub t_final: f64,
    pub seed: u64,
}

impl AnnealParams {
    pub const DEFAULT_RESTARTS: usize = 20;
    pub const DEFAULT_SWEEPS: usize = 2000;
    pub const DEFAULT_T_FINAL: f64 = 1e-3;

    /// Default schedule starting at `t_initial`.
    pub fn new(t_initial: f64) -> Self {
        Self {
            restarts: Self::DEFAULT_RESTARTS,
            sweeps: Self::DEFAULT_SWEEPS,
            t_initial,
            t_final: Self::DEFAULT_T_FINAL,
            seed: 0,
        }
    }

    /// Default schedule for `q`: start at the penalty weight if known,
    /// otherwise at the largest coefficient magnitude.
    pub fn for_matrix(q: &QuboMatrix, penalty_weight: Option<f64>) -> Self {
        let t0 = penalty_weight.unwrap_or_else(|| q.max_abs_entry());
        Self::new(t0.max(Self::DEFAULT_T_FINAL))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: &str| Err(SolveError::InvalidParams(m.into()));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.sweeps == 0 {
            return bad("sweeps must be at least 1");
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("t_final must be positive");
        }
        if !(self.t_initial >= self.t_final && self.t_initial.is_finite()) {
            return bad("t_initial must be finite and at least t_final");
        }
        Ok(())
    }

    fn temperature(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.t_final;
        }
        let frac = sweep as f64 / (self.sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

/// An annealing schedule not yet bound to an instance: `t_initial = None`
/// picks the default for each matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub restarts: usize,
    pub sweeps: usize,
    pub t_initial: Option<f64>,
    pub t_final: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            restarts: AnnealParams::DEFAULT_RESTARTS,
            sweeps: AnnealParams::DEFAULT_SWEEPS,
            t_initial: None,
            t_final: AnnealParams::DEFAULT_T_FINAL,
        }
    }
}

impl AnnealSchedule {
    pub fn params_for(&self, q: &QuboMatrix, penalty_weight: Option<f64>, seed: u64) -> AnnealParams {
        let auto = AnnealParams::for_matrix(q, penalty_weight);
        AnnealParams {
            restarts: self.restarts,
            sweeps: self.sweeps,
            t_initial: self.t_initial.unwrap_or(auto.t_initial.max(self.t_final)),
            t_final: self.t_final,
            seed,
        }
    }
}

struct Run {
    energy: f64,
    bits: Vec<bool>,
}

fn pick(a: Run, b: Run) -> Run {
    let tol = tie_tolerance(a.energy.min(b.energy));
    if b.energy < a.energy - tol || (b.energy <= a.energy + tol && b.bits < a.bits) {
        b
    } else {
        a
    }
}

fn one_restart(q: &QuboMatrix, c: &Couplings, params: &AnnealParams, restart: usize) -> Run {
    let n = q.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ restart as u64);
    let mut z: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut field = c.fields(&z);
    let mut e = q.energy(&z);
    let mut best = Run {
        energy: e,
        bits: z.clone(),
    };
    for sweep in 0..params.sweeps {
        let t = params.temperature(sweep);
        for k in 0..n {
            let d = c.delta(&z, &field, k);
            if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                c.flip(&mut z, &mut field, k);
                e += d;
                if e < best.energy - tie_tolerance(best.energy) {
                    best.energy = e;
                    best.bits.copy_from_slice(&z);
                }
            }
        }
    }
    // the running energy drifts; report the exact value
    best.energy = q.energy(&best.bits);
    best
}

/// Best of `params.restarts` single-flip Metropolis runs with geometric
/// cooling. Restarts run in parallel; the result depends only on the
/// instance and `params`.
pub fn simulated_anneal(q: &QuboMatrix, params: &AnnealParams) -> Result<Solution, SolveError> {
    params.validate()?;
    let c = Couplings::new(q);
    let best = (0..params.restarts)
        .into_par_iter()
        .map(|r| one_restart(q, &c, params, r))
        .reduce_with(pick)
        .expect("at least one restart");
    Ok(Solution::new(q, best.bits))
}
