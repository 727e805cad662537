//! Seeded random streams and the elementary statistics shared by every other
//! module. Standard deviations use the sample (n − 1) denominator throughout.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deterministic random stream addressed by `(seed, stream_id)`.
///
/// Backed by ChaCha8: the seed keys the generator and `stream_id` selects one
/// of its 2^64 independent streams, so consumers that need their own sequence
/// (one per generated variable, one per bootstrap resample) never share state.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Draws from N(mean, sd²). Standard normals come from the ziggurat
    /// sampler in `rand_distr`.
    pub fn normal(&mut self, mean: f64, sd: f64) -> Result<f64> {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::NonPositiveSd(sd));
        }
        let z: f64 = self.rng.sample(StandardNormal);
        Ok(mean + sd * z)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Draws a level index from a probability vector by inverse CDF.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len().saturating_sub(1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Free-function form of [`RngStream::normal`].
pub fn normal_sample(rng: &mut RngStream, mean: f64, sd: f64) -> Result<f64> {
    rng.normal(mean, sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl SummaryStats {
    pub fn of(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty);
        }
        let (min, max) = x
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(Self {
            n: x.len(),
            mean: mean(x),
            sd: if x.len() > 1 { sd(x) } else { 0.0 },
            min,
            max,
        })
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance (n − 1 denominator).
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn sd(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

pub fn covariance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Empty);
    }
    let (mx, my) = (mean(x), mean(y));
    Ok(x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / (x.len() as f64 - 1.0))
}

/// Sample Pearson correlation, clamped to [−1, 1].
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Empty);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Z-scores with the sample standard deviation.
pub fn standardize(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::Empty);
    }
    let m = mean(x);
    let s = sd(x);
    if !(s > 0.0) {
        return Err(Error::ZeroVariance("x".into()));
    }
    Ok(x.iter().map(|v| (v - m) / s).collect())
}

/// Linear-interpolation quantile: h = (n − 1)·q, interpolated between the
/// order statistics at floor(h) and ceil(h).
pub fn quantile(x: &[f64], q: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

/// As [`quantile`] for input already sorted ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::QuantileOutOfRange(q));
    }
    if sorted.is_empty() {
        return Err(Error::Empty);
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    if lo == hi {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

pub fn median(x: &[f64]) -> Result<f64> {
    quantile(x, 0.5)
}
