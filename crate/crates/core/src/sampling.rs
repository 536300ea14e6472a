//! Seeded, order-independent sampling.
//!
//! Sample `i` draws from its own ChaCha stream (`seed`, stream `i`), so a run
//! produces the same points whether samples are generated sequentially or in
//! parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{try_map_indexed, Execution};

pub const DEFAULT_SEED: u64 = 42;
/// Rejection-sampling attempts per sample before giving up.
pub const MAX_ATTEMPTS: usize = 100_000;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Axis-aligned rectangle in the (t, x) = (theta1, theta2) plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Box2 {
    pub fn new(t_min: f64, t_max: f64, x_min: f64, x_max: f64) -> Self {
        Box2 {
            t_min,
            t_max,
            x_min,
            x_max,
        }
    }

    pub fn ranges(&self) -> [(f64, f64); 2] {
        [(self.t_min, self.t_max), (self.x_min, self.x_max)]
    }

    pub fn is_valid(&self) -> bool {
        self.t_min < self.t_max && self.x_min < self.x_max
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        (self.t_min..=self.t_max).contains(&t) && (self.x_min..=self.x_max).contains(&x)
    }
}

impl std::str::FromStr for Box2 {
    type Err = String;

    /// Parses `t0,t1,x0,x1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        let [t0, t1, x0, x1] = parts[..] else {
            return Err(format!(
                "expected 4 comma-separated numbers, got {}",
                parts.len()
            ));
        };
        let b = Box2::new(t0, t1, x0, x1);
        if !b.is_valid() {
            return Err("box bounds must satisfy t0 < t1 and x0 < x1".into());
        }
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error("no acceptable point for sample {sample} after {attempts} attempts")]
    Exhausted { sample: usize, attempts: usize },
}

/// Draws `count` points uniformly from `ranges`, rejecting points for which
/// `accept` is false.
pub fn sample_points<F>(
    ranges: &[(f64, f64)],
    count: usize,
    seed: u64,
    exec: Execution,
    accept: F,
) -> Result<Vec<Vec<f64>>, SamplingError>
where
    F: Fn(&[f64]) -> bool + Sync + Send,
{
    try_map_indexed(exec, count, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let mut point = vec![0.0; ranges.len()];
        for _ in 0..MAX_ATTEMPTS {
            for (p, &(lo, hi)) in point.iter_mut().zip(ranges) {
                *p = rng.random_range(lo..hi);
            }
            if accept(&point) {
                return Ok(point);
            }
        }
        Err(SamplingError::Exhausted {
            sample: i,
            attempts: MAX_ATTEMPTS,
        })
    })
}
