//! Lossy channel, dark counts, and the intercept-resend adversary.
//!
//! Eve taps the line with ideal detectors: she measures each intercepted
//! pulse's detection time exactly once and re-emits a fresh pulse (or
//! nothing). Two resend flavors are modeled. `ResendFull` re-encodes her
//! best guess as a nominal duration-`T` codeword — correct timing
//! statistics, but unavoidable key errors whenever her detection was
//! ambiguous. `ResendShort` re-emits a duration-`T_E` pulse starting at the
//! measured time — nearly perfect timing statistics, but a short packet
//! that no longer overlaps its delayed copy in the duration-test
//! interferometer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::protocol::{Classification, EncoderConfig};
use crate::wavepacket::{TimeInstant, WavePacket};

/// Loss and noise of the quantum channel plus Bob's detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// Probability that a pulse survives the channel, in `[0, 1]`.
    pub transmittance: f64,
    /// Probability of a spurious detection per empty detection window,
    /// in `[0, 1)`.
    pub dark_count_prob: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            transmittance: 1.0,
            dark_count_prob: 0.0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.transmittance) || !self.transmittance.is_finite() {
            return Err(Error::config(
                "channel.transmittance",
                format!("must lie in [0, 1], got {}", self.transmittance),
            ));
        }
        if !(0.0..1.0).contains(&self.dark_count_prob) {
            return Err(Error::config(
                "channel.dark_count_prob",
                format!("must lie in [0, 1), got {}", self.dark_count_prob),
            ));
        }
        Ok(())
    }
}

/// What Eve does with a pulse she intercepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EveStrategy {
    /// No adversary: pulses pass through untouched.
    None,
    /// Measure, then re-encode the guessed symbol as a nominal duration-`T`
    /// codeword.
    ResendFull {
        #[serde(default)]
        ambiguous_policy: AmbiguousPolicy,
    },
    /// Measure, then re-emit a short rectangular pulse `[t, t + T_E)`
    /// starting at the measured time `t`.
    ResendShort {
        /// Eve's pulse duration `T_E`, in units of `T = 1`.
        pulse_duration: f64,
    },
}

/// Eve's move when her detection time is compatible with several codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguousPolicy {
    /// Pick uniformly among the candidate symbols and resend that codeword.
    #[default]
    GuessUniform,
    /// Send nothing; the slot shows up as a loss.
    Suppress,
}

impl EveStrategy {
    /// Validate against the honest pulse duration `T`. Returns
    /// advisory warnings (e.g. a short-pulse duration so large the
    /// interferometer signature weakens); hard errors only for
    /// non-positive or non-finite durations.
    pub fn validate(&self, pulse_duration_t: f64) -> Result<Vec<String>, Error> {
        let mut warnings = Vec::new();
        if let EveStrategy::ResendShort { pulse_duration } = self {
            if *pulse_duration <= 0.0 || !pulse_duration.is_finite() {
                return Err(Error::config(
                    "eve.pulse_duration",
                    format!("must be positive and finite, got {pulse_duration}"),
                ));
            }
            if *pulse_duration >= pulse_duration_t / 2.0 {
                warnings.push(format!(
                    "eve.pulse_duration {} is at least half the honest pulse duration {}; \
                     the interferometer signature of the short-pulse attack weakens in this regime",
                    pulse_duration, pulse_duration_t
                ));
            }
        }
        Ok(warnings)
    }

    pub fn is_none(&self) -> bool {
        matches!(self, EveStrategy::None)
    }
}

/// Pass `packet` through the lossy channel: survives with probability
/// `transmittance`, unchanged when it does.
pub fn transmit<R: Rng + ?Sized>(
    packet: WavePacket,
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Option<WavePacket> {
    if rng.random::<f64>() < cfg.transmittance {
        Some(packet)
    } else {
        None
    }
}

/// Eve's intercept-and-resend step for one pulse.
///
/// `encoder` is the public delay set (Eve knows it). Returns the pulse she
/// forwards to Bob, or `None` when she suppresses the slot. The strategy
/// must have passed [`EveStrategy::validate`]; a `ResendShort` duration
/// that cannot form a packet panics.
pub fn eve_intercept<R: Rng + ?Sized>(
    packet: WavePacket,
    strategy: &EveStrategy,
    encoder: &EncoderConfig,
    rng: &mut R,
) -> Option<WavePacket> {
    match strategy {
        EveStrategy::None => Some(packet),
        EveStrategy::ResendFull { ambiguous_policy } => {
            let detection = packet.sample_detection_time(rng);
            match encoder.classify(detection) {
                Classification::Decoded(symbol) => Some(
                    encoder
                        .encode(symbol)
                        .expect("classify returns valid symbols"),
                ),
                Classification::Ambiguous(candidates) => match ambiguous_policy {
                    AmbiguousPolicy::GuessUniform => {
                        let pick = candidates[rng.random_range(0..candidates.len())];
                        Some(
                            encoder
                                .encode(pick)
                                .expect("classify returns valid symbols"),
                        )
                    }
                    AmbiguousPolicy::Suppress => None,
                },
                Classification::NoCandidate => None,
            }
        }
        EveStrategy::ResendShort { pulse_duration } => {
            let detection = packet.sample_detection_time(rng);
            Some(
                WavePacket::rect(detection, *pulse_duration)
                    .expect("validated: positive short-pulse duration"),
            )
        }
    }
}

/// Detector dark counts: an empty window fires anyway with probability
/// `dark_count_prob`, at a uniform time inside `window`. Real detections
/// pass through untouched.
pub fn apply_dark_count<R: Rng + ?Sized>(
    detected: Option<TimeInstant>,
    cfg: &ChannelConfig,
    window: (TimeInstant, TimeInstant),
    rng: &mut R,
) -> Option<TimeInstant> {
    if detected.is_some() {
        return detected;
    }
    let (lo, hi) = (window.0.value(), window.1.value());
    assert!(lo < hi, "dark-count window must be non-empty");
    if cfg.dark_count_prob > 0.0 && rng.random::<f64>() < cfg.dark_count_prob {
        Some(TimeInstant::new(rng.random_range(lo..hi)))
    } else {
        None
    }
}
