use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimate::Estimate;

/// Sample budget and seeding for [`mc_mean`].
///
/// `workers` only selects the thread count; results are identical for any
/// value because every chunk owns a private stream keyed by `(seed, chunk)`
/// and chunk partials are merged in chunk order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSpec {
    pub samples: u64,
    pub seed: u64,
    pub chunks: u64,
    /// Thread count; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { samples: 1_000_000, seed: 0, chunks: 64, workers: 0 }
    }
}

impl McSpec {
    pub fn new(samples: u64, seed: u64) -> Self {
        McSpec { samples, seed, ..Default::default() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// A spec for an independent sub-computation, keyed off this one.
    pub fn derived(&self, tag: u64) -> Self {
        let mixed = splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        McSpec { seed: mixed, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return invalid("Monte Carlo needs at least one sample");
        }
        if self.chunks == 0 {
            return invalid("Monte Carlo needs at least one chunk");
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-chunk random stream.
pub struct McStream {
    rng: ChaCha8Rng,
}

impl McStream {
    pub fn new(seed: u64, chunk: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        McStream { rng }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `(0, 1]`, safe for logs and negative powers.
    pub fn uniform_open(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform direction on `S^{n-1}`, written into `out`.
    pub fn direction(&mut self, out: &mut [f64]) {
        loop {
            let mut norm2 = 0.0;
            for x in out.iter_mut() {
                *x = self.normal();
                norm2 += *x * *x;
            }
            if norm2 > 1e-300 {
                let inv = 1.0 / norm2.sqrt();
                out.iter_mut().for_each(|x| *x *= inv);
                return;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / n;
        let m2 = self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        Moments { count: self.count + other.count, mean, m2 }
    }
}

/// Sample mean of `draw` with one standard error.
///
/// `draw` receives the chunk's stream and must return one realisation of
/// the (bounded) integrand. Bit-identical for fixed `(samples, seed,
/// chunks)` regardless of `workers`.
pub fn mc_mean<F>(spec: &McSpec, draw: F) -> Result<Estimate>
where
    F: Fn(&mut McStream) -> f64 + Sync,
{
    spec.validate()?;
    let per_chunk = spec.samples.div_ceil(spec.chunks);
    let run_chunk = |c: u64| {
        let start = c * per_chunk;
        let end = ((c + 1) * per_chunk).min(spec.samples);
        let mut stream = McStream::new(spec.seed, c);
        let mut m = Moments::default();
        for _ in start..end {
            m.push(draw(&mut stream));
        }
        m
    };
    let partials: Vec<Moments> = if spec.workers == 0 {
        (0..spec.chunks).into_par_iter().map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| (0..spec.chunks).into_par_iter().map(run_chunk).collect())
    };
    let total = partials.into_iter().fold(Moments::default(), Moments::merge);
    let n = total.count as f64;
    let var = if total.count > 1 { (total.m2 / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(Estimate::monte_carlo(total.mean, (var / n).sqrt(), total.count, spec.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_has_zero_error() {
        let e = mc_mean(&McSpec::new(1000, 3), |_| 2.5).unwrap();
        assert_eq!(e.value, 2.5);
        assert!(e.error < 1e-12);
        assert_eq!(e.samples, 1000);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(mc_mean(&McSpec::new(0, 1), |_| 1.0).is_err());
        let spec = McSpec { chunks: 0, ..McSpec::new(10, 1) };
        assert!(mc_mean(&spec, |_| 1.0).is_err());
    }

    #[test]
    fn short_last_chunk_counts_every_sample() {
        let spec = McSpec { samples: 1001, seed: 5, chunks: 7, workers: 0 };
        let e = mc_mean(&spec, |s| s.uniform()).unwrap();
        assert_eq!(e.samples, 1001);
        let spec = McSpec { samples: 3, seed: 5, chunks: 10, workers: 0 };
        assert_eq!(mc_mean(&spec, |s| s.uniform()).unwrap().samples, 3);
    }

    #[test]
    fn directions_are_unit() {
        let mut s = McStream::new(1, 0);
        let mut d = [0.0; 5];
        for _ in 0..100 {
            s.direction(&mut d);
            let n: f64 = d.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_specs_differ() {
        let base = McSpec::new(10, 42);
        assert_ne!(base.derived(1).seed, base.derived(2).seed);
        assert_eq!(base.derived(1), base.derived(1));
    }
}
