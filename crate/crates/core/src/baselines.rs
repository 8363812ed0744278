//! Bounded-distance BCH baseline: a t-error-correcting hard-decision code
//! fails exactly when more than t bits flip, so its frame error rate is a
//! binomial tail. No algebraic decoding is involved.

use crate::error::{Error, Result};
use crate::util::{ln_binomial, log_sum_exp, wilson_interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Reference BCH operating point: 64-error-correcting at the common 0.9021
/// code rate (k = 8256 information bits).
pub const BCH_N: usize = 9152;
pub const BCH_T: usize = 64;

/// FER = P(Binomial(n, p) > t), summed in the log domain so that tails down
/// to ~1e-300 stay representable.
pub fn bch_fer_analytic(n: usize, t: usize, p: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidConfig(format!("bit error probability {p} outside [0, 0.5]")));
    }
    if t >= n {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    // sum over the smaller side of the distribution for accuracy
    let mean = n as f64 * p;
    if (t as f64) < mean {
        // tail P(X > t) is the bulk; compute 1 - P(X <= t)
        let mut acc = f64::NEG_INFINITY;
        for k in 0..=t {
            acc = log_sum_exp(acc, ln_binomial(n as u64, k as u64) + k as f64 * lp + (n - k) as f64 * lq);
        }
        Ok((1.0 - acc.exp()).max(0.0))
    } else {
        let mut acc = f64::NEG_INFINITY;
        for k in (t + 1)..=n {
            let term = ln_binomial(n as u64, k as u64) + k as f64 * lp + (n - k) as f64 * lq;
            acc = log_sum_exp(acc, term);
            // terms decay geometrically past the mean; stop once negligible
            if term < acc - 745.0 {
                break;
            }
        }
        Ok(acc.exp().min(1.0))
    }
}

/// Monte Carlo FER estimate with a Wilson 95% interval.
#[derive(Debug, Clone, Serialize)]
pub struct BchMcResult {
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub frame_errors: u64,
    pub trials: u64,
}

/// Draws `trials` binomial error counts (one per frame, each from its own
/// counter-derived stream, so the estimate is independent of any batching)
/// and counts frames with more than t errors.
pub fn bch_fer_mc(n: usize, t: usize, p: f64, trials: u64, seed: u64) -> Result<BchMcResult> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidConfig(format!("bit error probability {p} outside [0, 0.5]")));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut frame_errors = 0u64;
    for frame in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ frame.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut flips = 0usize;
        for _ in 0..n {
            if rng.gen::<f64>() < p {
                flips += 1;
                if flips > t {
                    break;
                }
            }
        }
        if flips > t {
            frame_errors += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(frame_errors, trials);
    Ok(BchMcResult { fer: frame_errors as f64 / trials as f64, ci_low, ci_high, frame_errors, trials })
}
