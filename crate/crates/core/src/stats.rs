//! Interval estimates and hypothesis tests used by the session engine.
//!
//! Two pieces of statistical plumbing: the Wilson score interval reported
//! alongside every error-rate estimate, and the two-sided exact binomial
//! test that turns interferometer port counts into an attack verdict.

use statrs::distribution::{Binomial, ContinuousCDF, Discrete, Normal};

use crate::error::Error;

/// Wilson score interval for a binomial proportion.
///
/// Always brackets the point estimate and stays inside `[0, 1]`. Preferred
/// over the normal approximation because sifted-key error counts are often
/// zero or tiny.
///
/// ```
/// use tqkd::wilson_interval;
///
/// let (lo, hi) = wilson_interval(0, 10, 0.95).unwrap();
/// assert_eq!(lo, 0.0);
/// assert!(hi > 0.0 && hi < 0.35);
/// ```
pub fn wilson_interval(
    successes: u64,
    trials: u64,
    confidence_level: f64,
) -> Result<(f64, f64), Error> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if successes > trials {
        return Err(Error::CountExceedsTrials {
            count: successes,
            trials,
        });
    }
    if !(confidence_level > 0.0 && confidence_level < 1.0) {
        return Err(Error::config(
            "confidence_level",
            format!("must lie in (0, 1), got {confidence_level}"),
        ));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal is valid");
    let z = normal.inverse_cdf(1.0 - (1.0 - confidence_level) / 2.0);
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    // analytically center == half at the endpoints; pin them so round-off
    // never reports a nonzero bound for a zero count
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((lo, hi))
}

/// Two-sided exact binomial test: probability, under `Binomial(trials, p)`,
/// of an outcome at most as likely as `observed`.
///
/// Minimum-likelihood convention: the p-value sums `pmf(k)` over every `k`
/// whose likelihood does not exceed `pmf(observed)` (up to a `1 + 1e-7`
/// relative tolerance absorbing round-off), matching the convention used by
/// standard statistics packages. `trials = 0` is vacuous evidence and
/// yields 1.
pub fn binomial_two_sided_p_value(observed: u64, trials: u64, p: f64) -> Result<f64, Error> {
    if observed > trials {
        return Err(Error::CountExceedsTrials {
            count: observed,
            trials,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(
            "p",
            format!("null proportion must lie in [0, 1], got {p}"),
        ));
    }
    if trials == 0 {
        return Ok(1.0);
    }
    // degenerate nulls concentrate all mass on one outcome
    if p == 0.0 {
        return Ok(if observed == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if observed == trials { 1.0 } else { 0.0 });
    }
    let mean = trials as f64 * p;
    if observed as f64 == mean {
        return Ok(1.0);
    }
    let dist = Binomial::new(p, trials).expect("validated parameters");
    let threshold = dist.pmf(observed) * (1.0 + 1e-7);
    let total: f64 = (0..=trials)
        .map(|k| dist.pmf(k))
        .filter(|&mass| mass <= threshold)
        .sum();
    Ok(total.min(1.0))
}
