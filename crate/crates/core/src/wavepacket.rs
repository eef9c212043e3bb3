//! Single-photon temporal wavepackets.
//!
//! A pulse is modeled as a normalized piecewise-constant complex amplitude
//! `psi(t)` over half-open time segments. Time is measured in units of the
//! nominal pulse duration `T`, so the honest codeword pulse is a rectangle
//! of duration 1. A constant complex amplitude over the whole support makes
//! the pulse fully coherent: its autocorrelation decays linearly with lag,
//! which is exactly the signature the Mach-Zehnder duration test probes.
//!
//! All detection statistics follow the Born rule: the probability density of
//! a detection at time `t` is `|psi(t)|^2`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Construction-time tolerance on the total norm of a packet.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A point on the simulation time axis, in units of the nominal pulse
/// duration `T`. Alice's emission reference sits at 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeInstant(f64);

impl TimeInstant {
    pub fn new(value: f64) -> Self {
        TimeInstant(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for TimeInstant {
    fn from(value: f64) -> Self {
        TimeInstant(value)
    }
}

impl fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One constant-amplitude piece of a wavepacket, supported on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub amplitude: Complex64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Probability mass carried by this segment.
    pub fn weight(&self) -> f64 {
        self.amplitude.norm_sqr() * self.length()
    }
}

/// A normalized one-photon temporal wavepacket.
///
/// Invariants held after construction: segments are finite, sorted by start,
/// non-overlapping, each with positive length, and the total norm
/// `integral |psi|^2 dt` is 1 within [`NORM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    segments: Vec<Segment>,
}

impl WavePacket {
    /// A rectangular pulse of the given duration starting at `start`, with
    /// constant real amplitude `1/sqrt(duration)` so the norm is 1.
    ///
    /// ```
    /// use tqkd::WavePacket;
    ///
    /// let pulse = WavePacket::rect(0.0, 1.0).unwrap();
    /// assert!((pulse.norm_sq() - 1.0).abs() < 1e-12);
    /// ```
    pub fn rect(start: impl Into<TimeInstant>, duration: f64) -> Result<WavePacket, Error> {
        if duration <= 0.0 || !duration.is_finite() {
            return Err(Error::NonPositiveDuration(duration));
        }
        let start = start.into().value();
        if !start.is_finite() {
            return Err(Error::MalformedSegments(format!(
                "non-finite segment start {start}"
            )));
        }
        let amplitude = Complex64::new(1.0 / duration.sqrt(), 0.0);
        Ok(WavePacket {
            segments: vec![Segment {
                start,
                end: start + duration,
                amplitude,
            }],
        })
    }

    /// Build a packet from raw segments, validating their layout and
    /// rescaling amplitudes so the total norm is exactly 1.
    pub fn from_segments(mut segments: Vec<Segment>) -> Result<WavePacket, Error> {
        if segments.is_empty() {
            return Err(Error::EmptyPacket);
        }
        for seg in &segments {
            if !seg.start.is_finite() || !seg.end.is_finite() || !seg.amplitude.is_finite() {
                return Err(Error::MalformedSegments("non-finite segment".into()));
            }
            if seg.end <= seg.start {
                return Err(Error::MalformedSegments(format!(
                    "segment [{}, {}) has non-positive length",
                    seg.start, seg.end
                )));
            }
        }
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        for pair in segments.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(Error::MalformedSegments(format!(
                    "segments [{}, {}) and [{}, {}) overlap",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                )));
            }
        }
        let norm_sq: f64 = segments.iter().map(Segment::weight).sum();
        if norm_sq <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = norm_sq.sqrt().recip();
        for seg in &mut segments {
            seg.amplitude *= scale;
        }
        Ok(WavePacket { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Earliest support point.
    pub fn support_start(&self) -> f64 {
        self.segments[0].start
    }

    /// Supremum of the support.
    pub fn support_end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    /// Whether `t` lies inside one of the segment supports.
    pub fn contains(&self, t: TimeInstant) -> bool {
        let t = t.value();
        self.segments
            .iter()
            .any(|seg| seg.start <= t && t < seg.end)
    }

    /// Total norm `integral |psi(t)|^2 dt`. 1 within [`NORM_TOLERANCE`] for
    /// any constructed packet.
    pub fn norm_sq(&self) -> f64 {
        self.segments.iter().map(Segment::weight).sum()
    }

    /// Autocorrelation `C(lag) = integral psi*(t) psi(t - lag) dt`.
    ///
    /// Evaluated in closed form over segment overlaps, so the result is exact
    /// for piecewise-constant packets. For a rectangle of duration `d` this is
    /// the triangle `max(0, 1 - |lag|/d)`.
    ///
    /// ```
    /// use tqkd::WavePacket;
    ///
    /// let pulse = WavePacket::rect(0.0, 1.0).unwrap();
    /// assert!((pulse.autocorrelation(0.5).re - 0.5).abs() < 1e-12);
    /// ```
    pub fn autocorrelation(&self, lag: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.segments {
            for b in &self.segments {
                // b shifted right by `lag` against a
                let lo = a.start.max(b.start + lag);
                let hi = a.end.min(b.end + lag);
                if hi > lo {
                    acc += a.amplitude.conj() * b.amplitude * (hi - lo);
                }
            }
        }
        acc
    }

    /// Draw a detection time with Born-rule density `|psi(t)|^2`, by inverse
    /// transform sampling over the segment list. For a rectangular pulse the
    /// result is uniform on its support.
    pub fn sample_detection_time<R: Rng + ?Sized>(&self, rng: &mut R) -> TimeInstant {
        let mut u = rng.random::<f64>() * self.norm_sq();
        for seg in &self.segments {
            let w = seg.weight();
            if u < w {
                let mut t = seg.start + (u / w) * seg.length();
                if t >= seg.end {
                    t = seg.end.next_down();
                }
                return TimeInstant(t);
            }
            u -= w;
        }
        // Rounding pushed u past the cumulative total; land in the last
        // segment, strictly inside its support.
        let last = self.segments[self.segments.len() - 1];
        TimeInstant(last.end.next_down())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domain, substream};
    use proptest::prelude::*;

    fn rect(start: f64, duration: f64) -> WavePacket {
        WavePacket::rect(start, duration).unwrap()
    }

    #[test]
    fn rect_unit_pulse() {
        let w = rect(0.0, 1.0);
        assert_eq!(w.segments().len(), 1);
        assert_eq!(w.segments()[0].start, 0.0);
        assert_eq!(w.segments()[0].end, 1.0);
        assert!((w.segments()[0].amplitude.re - 1.0).abs() < 1e-12);
        assert_eq!(w.segments()[0].amplitude.im, 0.0);
    }

    #[test]
    fn rect_half_delay_pulse() {
        let w = rect(0.5, 1.0);
        assert_eq!(w.segments()[0].start, 0.5);
        assert_eq!(w.segments()[0].end, 1.5);
        assert!((w.segments()[0].amplitude.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rect_short_pulse_amplitude() {
        let w = rect(0.3, 0.01);
        assert!((w.segments()[0].amplitude.re - 10.0).abs() < 1e-12);
        assert!((w.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rect_rejects_bad_durations() {
        assert!(matches!(
            WavePacket::rect(0.0, 0.0),
            Err(Error::NonPositiveDuration(_))
        ));
        assert!(matches!(
            WavePacket::rect(0.0, -1.0),
            Err(Error::NonPositiveDuration(_))
        ));
        assert!(matches!(
            WavePacket::rect(0.0, f64::NAN),
            Err(Error::NonPositiveDuration(_))
        ));
    }

    #[test]
    fn from_segments_validates_layout() {
        assert_eq!(WavePacket::from_segments(vec![]), Err(Error::EmptyPacket));

        let overlap = vec![
            Segment {
                start: 0.0,
                end: 1.0,
                amplitude: Complex64::new(1.0, 0.0),
            },
            Segment {
                start: 0.5,
                end: 1.5,
                amplitude: Complex64::new(1.0, 0.0),
            },
        ];
        assert!(matches!(
            WavePacket::from_segments(overlap),
            Err(Error::MalformedSegments(_))
        ));

        let degenerate = vec![Segment {
            start: 1.0,
            end: 1.0,
            amplitude: Complex64::new(1.0, 0.0),
        }];
        assert!(matches!(
            WavePacket::from_segments(degenerate),
            Err(Error::MalformedSegments(_))
        ));

        let dark = vec![Segment {
            start: 0.0,
            end: 1.0,
            amplitude: Complex64::new(0.0, 0.0),
        }];
        assert_eq!(WavePacket::from_segments(dark), Err(Error::ZeroNorm));
    }

    #[test]
    fn from_segments_normalizes() {
        let w = WavePacket::from_segments(vec![
            Segment {
                start: 0.0,
                end: 0.5,
                amplitude: Complex64::new(3.0, 0.0),
            },
            Segment {
                start: 1.0,
                end: 2.0,
                amplitude: Complex64::new(0.0, 1.0),
            },
        ])
        .unwrap();
        assert!((w.norm_sq() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn autocorrelation_at_zero_is_one() {
        let w = rect(0.0, 1.0);
        let c = w.autocorrelation(0.0);
        assert!((c.re - 1.0).abs() < 1e-12);
        assert!(c.im.abs() < 1e-15);
    }

    #[test]
    fn autocorrelation_half_lag() {
        let w = rect(0.0, 1.0);
        // analytic overlap: length 0.5 at amplitude^2 = 1
        assert!((w.autocorrelation(0.5).re - 0.5).abs() < 1e-12);
        assert!((w.autocorrelation(-0.5).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_disjoint_supports() {
        let w = rect(0.0, 1.0);
        assert_eq!(w.autocorrelation(1.2).norm(), 0.0);
        assert_eq!(w.autocorrelation(-1.2).norm(), 0.0);
    }

    #[test]
    fn samples_stay_inside_support() {
        let w = rect(0.0, 1.0);
        let mut rng = substream(1, domain::PULSE, 0);
        for _ in 0..20_000 {
            let t = w.sample_detection_time(&mut rng);
            assert!(w.contains(t), "sample {t} escaped the support");
        }
    }

    #[test]
    fn sample_mean_matches_uniform_moment() {
        let w = rect(0.0, 1.0);
        let mut rng = substream(2, domain::PULSE, 0);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| w.sample_detection_time(&mut rng).value())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    /// One-sample Kolmogorov-Smirnov statistic against the uniform CDF on
    /// [lo, hi).
    fn ks_statistic(samples: &mut [f64], lo: f64, hi: f64) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let f = (x - lo) / (hi - lo);
            d = d.max((f - i as f64 / n).abs());
            d = d.max(((i + 1) as f64 / n - f).abs());
        }
        d
    }

    #[test]
    fn sample_distribution_passes_ks_test() {
        let w = rect(0.5, 1.0);
        let mut rng = substream(3, domain::PULSE, 0);
        let n = 20_000;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| w.sample_detection_time(&mut rng).value())
            .collect();
        let d = ks_statistic(&mut samples, 0.5, 1.5);
        // critical value at alpha = 0.01: sqrt(-ln(alpha/2)/2) / sqrt(n)
        let crit = (-(0.005f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds critical value {crit}");
    }

    #[test]
    fn sample_respects_segment_weights() {
        // equal amplitudes: weight proportional to length (0.25 vs 0.75)
        let w = WavePacket::from_segments(vec![
            Segment {
                start: 0.0,
                end: 0.25,
                amplitude: Complex64::new(1.0, 0.0),
            },
            Segment {
                start: 1.0,
                end: 1.75,
                amplitude: Complex64::new(1.0, 0.0),
            },
        ])
        .unwrap();
        let mut rng = substream(4, domain::PULSE, 0);
        let n = 100_000;
        let in_first = (0..n)
            .filter(|_| w.sample_detection_time(&mut rng).value() < 0.5)
            .count();
        let frac = in_first as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.01, "first-segment fraction {frac}");
    }

    proptest! {
        #[test]
        fn rect_norm_is_one(start in -100.0f64..100.0, duration in 1e-6f64..100.0) {
            let w = rect(start, duration);
            prop_assert!((w.norm_sq() - 1.0).abs() < NORM_TOLERANCE);
        }

        #[test]
        fn rect_autocorrelation_is_triangular(
            start in -10.0f64..10.0,
            duration in 1e-3f64..10.0,
            lag_frac in -2.0f64..2.0,
        ) {
            let lag = lag_frac * duration;
            let c = rect(start, duration).autocorrelation(lag);
            let expected = (1.0 - (lag / duration).abs()).max(0.0);
            prop_assert!((c.re - expected).abs() < 1e-9, "C({lag}) = {} vs {expected}", c.re);
            prop_assert!(c.im.abs() < 1e-12);
        }

        #[test]
        fn autocorrelation_bounded_by_one(
            gaps in proptest::collection::vec(0.0f64..2.0, 1..4),
            lengths in proptest::collection::vec(0.01f64..2.0, 4),
            res in proptest::collection::vec(-1.0f64..1.0, 4),
            ims in proptest::collection::vec(-1.0f64..1.0, 4),
            lag in -8.0f64..8.0,
        ) {
            let mut segments = Vec::new();
            let mut cursor = 0.0;
            for (i, gap) in gaps.iter().enumerate() {
                let amplitude = Complex64::new(res[i], ims[i]);
                if amplitude.norm_sqr() == 0.0 {
                    continue;
                }
                segments.push(Segment { start: cursor, end: cursor + lengths[i], amplitude });
                cursor += lengths[i] + gap;
            }
            prop_assume!(!segments.is_empty());
            let w = WavePacket::from_segments(segments).unwrap();
            prop_assert!(w.autocorrelation(lag).norm() <= 1.0 + 1e-9);
            prop_assert!((w.autocorrelation(0.0).norm() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn samples_never_leave_support(
            start in -5.0f64..5.0,
            duration in 1e-3f64..5.0,
            seed in 0u64..1000,
        ) {
            let w = rect(start, duration);
            let mut rng = substream(seed, domain::PULSE, 0);
            for _ in 0..100 {
                prop_assert!(w.contains(w.sample_detection_time(&mut rng)));
            }
        }
    }
}
