//! Delay encoding, interval classification, sifting, and error estimation.
//!
//! Alice codes each symbol as the emission delay of a duration-`T` pulse.
//! With the two-state default (delays 0 and `T/2`) the detection axis splits
//! into three intervals: `[0, T/2)` and `[T, 3T/2)` identify the delay
//! uniquely, while a detection in `[T/2, T)` is compatible with both
//! codewords and carries no key information. Bob keeps only unambiguous
//! detections and announces their positions; a sampled subset of the sifted
//! key is then revealed to estimate the error rate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::stats::wilson_interval;
use crate::wavepacket::{TimeInstant, WavePacket};

/// Alice's delay encoder: a pulse duration and a strictly increasing list of
/// delays, one symbol per delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncoderConfig {
    /// Nominal pulse duration `T`. All times are in units of `T = 1`.
    pub pulse_duration: f64,
    /// Emission delay per symbol, strictly increasing.
    pub delays: Vec<f64>,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig::two_state()
    }
}

impl EncoderConfig {
    /// The two-state configuration: delay 0 codes symbol 0, delay `T/2`
    /// codes symbol 1.
    pub fn two_state() -> Self {
        EncoderConfig {
            pulse_duration: 1.0,
            delays: vec![0.0, 0.5],
        }
    }

    /// Validating constructor for arbitrary delay sets.
    pub fn new(pulse_duration: f64, delays: Vec<f64>) -> Result<Self, Error> {
        let cfg = EncoderConfig {
            pulse_duration,
            delays,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.pulse_duration <= 0.0 || !self.pulse_duration.is_finite() {
            return Err(Error::config(
                "encoder.pulse_duration",
                format!("must be positive and finite, got {}", self.pulse_duration),
            ));
        }
        if self.delays.len() < 2 {
            return Err(Error::config(
                "encoder.delays",
                format!("need at least 2 delays, got {}", self.delays.len()),
            ));
        }
        if self.delays.iter().any(|d| !d.is_finite()) {
            return Err(Error::config("encoder.delays", "delays must be finite"));
        }
        if self.delays.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "encoder.delays",
                "delays must be strictly increasing",
            ));
        }
        Ok(())
    }

    /// Number of symbols in the alphabet.
    pub fn n_symbols(&self) -> usize {
        self.delays.len()
    }

    /// The pulse emitted for `symbol`: a rectangle of duration `T` starting
    /// at the symbol's delay.
    ///
    /// ```
    /// use tqkd::EncoderConfig;
    ///
    /// let enc = EncoderConfig::two_state();
    /// assert_eq!(enc.encode(1).unwrap().support_start(), 0.5);
    /// assert!(enc.encode(2).is_err());
    /// ```
    pub fn encode(&self, symbol: usize) -> Result<WavePacket, Error> {
        let delay = *self.delays.get(symbol).ok_or(Error::SymbolOutOfRange {
            symbol,
            n_symbols: self.n_symbols(),
        })?;
        WavePacket::rect(delay, self.pulse_duration)
    }

    /// Classify a detection time against the public delay set.
    ///
    /// The candidate set is every symbol whose pulse support `[delay,
    /// delay + T)` contains `t`. One candidate decodes the symbol, two or
    /// more leave the delay ambiguous, zero matches no codeword. Total:
    /// every real `t` maps to exactly one variant.
    pub fn classify(&self, t: TimeInstant) -> Classification {
        let t = t.value();
        let candidates: Vec<usize> = self
            .delays
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= t && t < d + self.pulse_duration)
            .map(|(k, _)| k)
            .collect();
        match candidates.len() {
            0 => Classification::NoCandidate,
            1 => Classification::Decoded(candidates[0]),
            _ => Classification::Ambiguous(candidates),
        }
    }

    /// The window in which any codeword photon can arrive:
    /// `[first delay, last delay + T)`.
    pub fn detection_window(&self) -> (TimeInstant, TimeInstant) {
        let first = *self.delays.first().expect("validated: at least 2 delays");
        let last = *self.delays.last().expect("validated: at least 2 delays");
        (
            TimeInstant::new(first),
            TimeInstant::new(last + self.pulse_duration),
        )
    }

    /// Lebesgue measure of each symbol's unambiguous region: the part of its
    /// pulse support covered by no other codeword support. A symbol with
    /// zero measure can never be decoded and makes the delay set degenerate.
    pub fn unambiguous_measures(&self) -> Vec<f64> {
        let t = self.pulse_duration;
        (0..self.delays.len())
            .map(|k| {
                let (lo, hi) = (self.delays[k], self.delays[k] + t);
                let mut others: Vec<(f64, f64)> = self
                    .delays
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &d)| (d, d + t))
                    .collect();
                others.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut measure = 0.0;
                let mut cursor = lo;
                for (s, e) in others {
                    if e <= cursor {
                        continue;
                    }
                    if s >= hi {
                        break;
                    }
                    if s > cursor {
                        measure += s.min(hi) - cursor;
                    }
                    cursor = cursor.max(e);
                    if cursor >= hi {
                        break;
                    }
                }
                if cursor < hi {
                    measure += hi - cursor;
                }
                measure
            })
            .collect()
    }
}

/// Outcome of Bob's delay measurement for one detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Exactly one codeword support contains the detection time.
    Decoded(usize),
    /// Two or more codeword supports contain it; candidates listed in
    /// symbol order.
    Ambiguous(Vec<usize>),
    /// The detection time lies outside every codeword support.
    NoCandidate,
}

impl Classification {
    pub fn decoded_symbol(&self) -> Option<usize> {
        match self {
            Classification::Decoded(k) => Some(*k),
            _ => None,
        }
    }

    pub fn is_decoded(&self) -> bool {
        matches!(self, Classification::Decoded(_))
    }
}

/// Result of sifting: the positions Bob announces as unambiguous and both
/// parties' raw keys restricted to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiftOutcome {
    pub key_alice: Vec<usize>,
    pub key_bob: Vec<usize>,
    /// Indices into the input record lists, strictly increasing.
    pub kept_indices: Vec<usize>,
}

/// Keep exactly the positions where Bob decoded a symbol.
///
/// `alice_symbols[i]` is the symbol Alice sent for record `i`;
/// `bob_results[i]` is Bob's classification of the same record. Both keys in
/// the outcome have equal length.
pub fn sift(alice_symbols: &[usize], bob_results: &[Classification]) -> Result<SiftOutcome, Error> {
    if alice_symbols.len() != bob_results.len() {
        return Err(Error::LengthMismatch {
            alice: alice_symbols.len(),
            bob: bob_results.len(),
        });
    }
    let mut outcome = SiftOutcome {
        key_alice: Vec::new(),
        key_bob: Vec::new(),
        kept_indices: Vec::new(),
    };
    for (i, result) in bob_results.iter().enumerate() {
        if let Classification::Decoded(symbol) = result {
            outcome.key_alice.push(alice_symbols[i]);
            outcome.key_bob.push(*symbol);
            outcome.kept_indices.push(i);
        }
    }
    Ok(outcome)
}

/// Error-rate estimate over a revealed sample of the sifted key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QberEstimate {
    /// Number of key positions revealed.
    pub revealed: u64,
    /// Mismatches among the revealed positions.
    pub errors: u64,
    /// Point estimate `errors / revealed`.
    pub qber: f64,
    /// Confidence level of the interval below.
    pub confidence_level: f64,
    /// Wilson score interval lower bound.
    pub ci_low: f64,
    /// Wilson score interval upper bound.
    pub ci_high: f64,
}

/// Reveal a uniformly sampled subset of the sifted key and count mismatches.
///
/// Returns the estimate together with the revealed positions (sorted,
/// indices into the sifted keys) so callers can discard them from the final
/// key. The number revealed is `ceil(reveal_fraction * len)`.
pub fn estimate_qber<R: Rng + ?Sized>(
    key_alice: &[usize],
    key_bob: &[usize],
    reveal_fraction: f64,
    confidence_level: f64,
    rng: &mut R,
) -> Result<(QberEstimate, Vec<usize>), Error> {
    if key_alice.len() != key_bob.len() {
        return Err(Error::LengthMismatch {
            alice: key_alice.len(),
            bob: key_bob.len(),
        });
    }
    if key_alice.is_empty() {
        return Err(Error::EmptyKeys);
    }
    if !(reveal_fraction > 0.0 && reveal_fraction <= 1.0) {
        return Err(Error::config(
            "reveal_fraction",
            format!("must lie in (0, 1], got {reveal_fraction}"),
        ));
    }
    if !(confidence_level > 0.0 && confidence_level < 1.0) {
        return Err(Error::config(
            "confidence_level",
            format!("must lie in (0, 1), got {confidence_level}"),
        ));
    }
    let len = key_alice.len();
    let n_reveal = ((reveal_fraction * len as f64).ceil() as usize).clamp(1, len);
    let mut positions: Vec<usize> = rand::seq::index::sample(rng, len, n_reveal).into_vec();
    positions.sort_unstable();
    let errors = positions
        .iter()
        .filter(|&&i| key_alice[i] != key_bob[i])
        .count() as u64;
    let revealed = n_reveal as u64;
    let (ci_low, ci_high) = wilson_interval(errors, revealed, confidence_level)?;
    Ok((
        QberEstimate {
            revealed,
            errors,
            qber: errors as f64 / revealed as f64,
            confidence_level,
            ci_low,
            ci_high,
        },
        positions,
    ))
}
