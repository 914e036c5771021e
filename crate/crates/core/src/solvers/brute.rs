use rayon::prelude::*;

use crate::compiler::QuboMatrix;

use super::{lex_key, mask_to_bits, Couplings, SolveError, Solution};

/// Default cap on the number of bits enumerated exhaustively.
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// Energies closer than this (relative, floored at 1) count as ties.
pub(crate) fn tie_tolerance(e: f64) -> f64 {
    1e-9 * e.abs().max(1.0)
}

/// Visits every bitstring as `(mask, energy)` in Gray-code order, split into
/// chunks over the high bits. Chunk results are merged in chunk order.
pub(crate) fn scan<T, I, V, M>(q: &QuboMatrix, init: I, visit: V, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, u64, f64) + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    let n = q.n();
    assert!(n < 64, "at most 63 bits can be enumerated");
    let c = Couplings::new(q);
    let high = n.saturating_sub(12).min(8);
    let low = n - high;
    (0..1u64 << high)
        .into_par_iter()
        .map(|prefix| {
            let mut acc = init();
            let mut mask = prefix << low;
            let mut z = mask_to_bits(mask, n);
            let mut field = c.fields(&z);
            let mut e = q.energy(&z);
            visit(&mut acc, mask, e);
            for step in 1..1u64 << low {
                let k = step.trailing_zeros() as usize;
                e += c.delta(&z, &field, k);
                c.flip(&mut z, &mut field, k);
                mask ^= 1 << k;
                visit(&mut acc, mask, e);
            }
            acc
        })
        .reduce(&init, &merge)
}

#[derive(Clone, Copy)]
struct Best {
    energy: f64,
    key: u64,
    mask: u64,
}

impl Best {
    const NONE: Best = Best {
        energy: f64::INFINITY,
        key: u64::MAX,
        mask: 0,
    };

    fn better(self, other: Best) -> Best {
        let tol = tie_tolerance(self.energy.min(other.energy));
        if other.energy < self.energy - tol || (other.energy <= self.energy + tol && other.key < self.key) {
            other
        } else {
            self
        }
    }
}

/// Exhaustive minimum with the default size limit.
pub fn brute_force(q: &QuboMatrix) -> Result<Solution, SolveError> {
    brute_force_with_limit(q, BRUTE_FORCE_LIMIT)
}

/// Exhaustive minimum over all `2^n` bitstrings. Among ties the
/// lexicographically smallest bitstring (bit 0 most significant) wins.
pub fn brute_force_with_limit(q: &QuboMatrix, limit: usize) -> Result<Solution, SolveError> {
    let n = q.n();
    if n > limit.min(63) {
        return Err(SolveError::TooManyBits { n, limit });
    }
    let best = scan(
        q,
        || Best::NONE,
        |best, mask, energy| {
            *best = best.better(Best {
                energy,
                key: lex_key(mask, n),
                mask,
            })
        },
        Best::better,
    );
    Ok(Solution::new(q, mask_to_bits(best.mask, n)))
}
