//! Seeded randomness and binomial confidence intervals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for work item `index` under `seed`. Each index gets its own
/// ChaCha stream, so results do not depend on how items are split across
/// workers.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Wilson score interval at confidence `z` (1.96 for 95%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn wilson_half_width(successes: u64, trials: u64, z: f64) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials, z);
    0.5 * (hi - lo)
}

pub const Z95: f64 = 1.959_963_984_540_054;
pub const Z99: f64 = 2.575_829_303_548_901;

/// Linear-interpolation sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((hi - lo - 0.19).abs() < 0.01);
        let (lo, hi) = wilson_interval(100, 100, Z95);
        assert!(hi == 1.0 && lo > 0.95);
    }

    #[test]
    fn item_streams_differ_and_repeat() {
        let a: u64 = item_rng(7, 0).random();
        let b: u64 = item_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, item_rng(7, 0).random::<u64>());
    }

    #[test]
    fn quantiles() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), 2.0);
        assert_eq!(quantile_sorted(&v, 0.25), 1.0);
        assert_eq!(quantile_sorted(&v, 0.125), 0.5);
    }
}
