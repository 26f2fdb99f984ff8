//! Seeded random rational specializations.

use super::{Rat, Scalar, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest numerator and denominator drawn.
pub const BOUND: i64 = 97;

pub struct Specializer {
    rng: ChaCha8Rng,
}

impl Specializer {
    pub fn new(seed: u64) -> Specializer {
        Specializer {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A rational `n/d` with `|n|, d ≤ BOUND`, never `0` or `±1`.
    pub fn rational(&mut self) -> Rat {
        loop {
            let n = self.rng.gen_range(-BOUND..=BOUND);
            let d = self.rng.gen_range(1..=BOUND);
            let r = Rat::new(n, d);
            if !r.is_zero() && !r.abs().is_one() {
                return r;
            }
        }
    }

    pub fn bindings(&mut self, vars: &[Var]) -> Vec<(Var, Scalar)> {
        vars.iter()
            .map(|v| (*v, Scalar::from_rat(self.rational())))
            .collect()
    }

    /// Draw bindings until `accept` succeeds, skipping pole loci.
    pub fn bindings_avoiding<T, E>(
        &mut self,
        vars: &[Var],
        mut accept: impl FnMut(&[(Var, Scalar)]) -> Result<T, E>,
    ) -> Result<(Vec<(Var, Scalar)>, T), E> {
        let mut last = None;
        for _ in 0..32 {
            let b = self.bindings(vars);
            match accept(&b) {
                Ok(t) => return Ok((b, t)),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }
}
