//! Counter-based splittable random numbers.
//!
//! Every draw is a pure function of `(seed, path, step, slot)`, so parallel
//! paths are reproducible independent of scheduling and a rerun with the
//! same key is bit-identical.

/// Stateless counter RNG keyed by `(seed, path)`.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
    path: u64,
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64, path: u64) -> Self {
        Self { seed, path }
    }

    #[inline]
    pub fn raw(&self, step: u64, slot: u64) -> u64 {
        let k = self
            .seed
            .wrapping_add(splitmix(self.path.wrapping_mul(GOLDEN).wrapping_add(1)))
            .wrapping_add(splitmix(step.wrapping_mul(GOLDEN) ^ 0xa0761d6478bd642f))
            .wrapping_add(splitmix(slot.wrapping_add(0x2545f4914f6cdd1d)));
        splitmix(k)
    }

    /// Uniform in `(0, 1]` (53-bit, never zero so `ln` is safe).
    #[inline]
    pub fn uniform(&self, step: u64, slot: u64) -> f64 {
        ((self.raw(step, slot) >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal by Box-Muller.
    #[inline]
    pub fn normal(&self, step: u64, slot: u64) -> f64 {
        let u1 = self.uniform(step, 2 * slot);
        let u2 = self.uniform(step, 2 * slot + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
