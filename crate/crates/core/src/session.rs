//! Full protocol sessions: Alice → Eve → channel → Bob → verdict.
//!
//! Each pulse is simulated from its own counter-derived random substream,
//! so a session is a pure function of its configuration — including the
//! seed — and may be evaluated pulse-parallel without changing a single
//! byte of the report. Bob routes arriving pulses at random to a photon
//! counter (key establishment: classify, sift, estimate the error rate) or
//! to the duration-test interferometer (port tallies, exact binomial test,
//! attack verdict).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_dark_count, eve_intercept, transmit, ChannelConfig, EveStrategy};
use crate::error::Error;
use crate::interferometer::{InterferometerConfig, PortLabel};
use crate::protocol::{estimate_qber, sift, Classification, EncoderConfig, QberEstimate};
use crate::rng::{domain, substream};
use crate::stats::binomial_two_sided_p_value;
use crate::wavepacket::TimeInstant;

/// Everything that defines a session. Two runs with equal configs produce
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SessionConfig {
    /// Number of pulses Alice emits.
    pub n_pulses: u64,
    pub encoder: EncoderConfig,
    pub channel: ChannelConfig,
    pub eve: EveStrategy,
    /// Fraction of pulses Eve intercepts, in `[0, 1]`. Ignored when `eve`
    /// is `None`.
    pub intercept_fraction: f64,
    pub mz: InterferometerConfig,
    /// Probability Bob routes a slot to the interferometer instead of the
    /// key counter, in `[0, 1]`.
    pub p_route_mz: f64,
    /// Fraction of the sifted key revealed for error estimation, in
    /// `(0, 1]`.
    pub reveal_fraction: f64,
    /// Confidence level of the error-rate interval, in `(0, 1)`.
    pub confidence_level: f64,
    /// Significance level of the interferometer attack test, in `(0, 1)`.
    pub mz_alpha: f64,
    /// Root seed for all randomness in the session.
    pub seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            n_pulses: 10_000,
            encoder: EncoderConfig::default(),
            channel: ChannelConfig::default(),
            eve: EveStrategy::None,
            intercept_fraction: 1.0,
            mz: InterferometerConfig::default(),
            p_route_mz: 0.5,
            reveal_fraction: 0.1,
            confidence_level: 0.95,
            mz_alpha: 0.01,
            seed: 0,
        }
    }
}

impl SessionConfig {
    /// Check every field before any simulation. Returns advisory warnings
    /// (degenerate delay sets, wide adversary pulses) on success.
    pub fn validate(&self) -> Result<Vec<String>, Error> {
        if self.n_pulses == 0 {
            return Err(Error::config("n_pulses", "must be at least 1"));
        }
        self.encoder.validate()?;
        self.channel.validate()?;
        self.mz.validate()?;
        let mut warnings = self.eve.validate(self.encoder.pulse_duration)?;
        let in_unit = |name: &'static str, value: f64| -> Result<(), Error> {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::config(
                    name,
                    format!("must lie in [0, 1], got {value}"),
                ))
            }
        };
        in_unit("intercept_fraction", self.intercept_fraction)?;
        in_unit("p_route_mz", self.p_route_mz)?;
        if !(self.reveal_fraction > 0.0 && self.reveal_fraction <= 1.0) {
            return Err(Error::config(
                "reveal_fraction",
                format!("must lie in (0, 1], got {}", self.reveal_fraction),
            ));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::config(
                "confidence_level",
                format!("must lie in (0, 1), got {}", self.confidence_level),
            ));
        }
        if !(self.mz_alpha > 0.0 && self.mz_alpha < 1.0) {
            return Err(Error::config(
                "mz_alpha",
                format!("must lie in (0, 1), got {}", self.mz_alpha),
            ));
        }
        for (symbol, measure) in self.encoder.unambiguous_measures().iter().enumerate() {
            if *measure <= 0.0 {
                warnings.push(format!(
                    "encoder delay set is degenerate: symbol {symbol} has no unambiguous \
                     interval and can never be decoded"
                ));
            }
        }
        Ok(warnings)
    }
}

/// Per-stream pulse tallies. Every emitted pulse meets exactly one fate:
/// suppressed by Eve, lost in the channel, or detected on one of Bob's two
/// paths — so `emitted = suppressed_by_eve + lost + routed_to_key +
/// routed_to_mz`. Dark counts are spurious extra detections on otherwise
/// empty key-path slots and are tallied separately.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCounts {
    pub emitted: u64,
    pub suppressed_by_eve: u64,
    pub lost: u64,
    /// Arriving pulses Bob routed to the key counter.
    pub routed_to_key: u64,
    /// Arriving pulses Bob routed to the interferometer.
    pub routed_to_mz: u64,
    /// Spurious detections on empty key-path slots.
    pub dark_counts: u64,
    /// Key-path detections (real or dark) landing in exactly one codeword
    /// support.
    pub decoded: u64,
    /// Key-path detections compatible with several codewords.
    pub ambiguous: u64,
    /// Key-path detections outside every codeword support.
    pub no_candidate: u64,
}

/// Interferometer exit-port tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MzCounts {
    pub port_a: u64,
    pub port_b: u64,
}

impl MzCounts {
    pub fn total(&self) -> u64 {
        self.port_a + self.port_b
    }
}

/// Outcome of the interferometer attack test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    /// Port statistics consistent with full-duration pulses.
    Honest { p_value: f64 },
    /// Port statistics reject the honest hypothesis at the configured
    /// significance level.
    AttackSuspected { p_value: f64 },
}

impl Verdict {
    pub fn p_value(&self) -> f64 {
        match self {
            Verdict::Honest { p_value } | Verdict::AttackSuspected { p_value } => *p_value,
        }
    }

    pub fn is_attack_suspected(&self) -> bool {
        matches!(self, Verdict::AttackSuspected { .. })
    }
}

/// Everything observable from one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub counts: SessionCounts,
    /// Length of the sifted key (positions Bob decoded unambiguously).
    pub sifted_len: u64,
    /// Error estimate over the revealed sample; absent when nothing was
    /// sifted.
    pub qber: Option<QberEstimate>,
    pub mz_counts: MzCounts,
    /// Honest-case port-A probability the attack test was calibrated
    /// against.
    pub mz_expected_honest: f64,
    /// Honest-case fraction of key-path detections expected to sift.
    pub honest_sift_fraction: f64,
    pub verdict: Verdict,
    /// Sifted keys with the revealed positions discarded.
    pub final_key_alice: Vec<usize>,
    pub final_key_bob: Vec<usize>,
    /// Advisory warnings from configuration validation.
    pub warnings: Vec<String>,
}

/// How `run_session_with` schedules pulse evaluation. Reports are identical
/// either way; the knob exists so determinism is testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

/// Two-sided exact binomial attack test on interferometer port tallies.
///
/// Under honest traffic, port-A hits are `Binomial(total, p_honest)`. A
/// p-value below `alpha` flags the session; zero trials are vacuous
/// evidence and stay `Honest` with p-value 1.
pub fn mz_attack_test(
    port_a_count: u64,
    total: u64,
    p_honest: f64,
    alpha: f64,
) -> Result<Verdict, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(
            "mz_alpha",
            format!("must lie in (0, 1), got {alpha}"),
        ));
    }
    let p_value = binomial_two_sided_p_value(port_a_count, total, p_honest)?;
    Ok(if p_value < alpha {
        Verdict::AttackSuspected { p_value }
    } else {
        Verdict::Honest { p_value }
    })
}

/// Closed-form honest expectations `(sift_fraction, port_a_prob)` for a
/// configuration.
///
/// The sift fraction is each codeword's unambiguous measure divided by the
/// pulse duration, averaged over symbols (Alice draws symbols uniformly).
/// The port probability comes from the honest codeword packet; it is the
/// same for every symbol because the autocorrelation is invariant under
/// time shifts.
pub fn honest_expectations(cfg: &SessionConfig) -> Result<(f64, f64), Error> {
    cfg.encoder.validate()?;
    cfg.mz.validate()?;
    let measures = cfg.encoder.unambiguous_measures();
    let sift_fraction =
        measures.iter().sum::<f64>() / (measures.len() as f64 * cfg.encoder.pulse_duration);
    let packet = cfg.encoder.encode(0)?;
    let (port_a, _) = cfg.mz.port_probabilities(&packet);
    Ok((sift_fraction, port_a))
}

/// What happened to one pulse, recorded slot-by-slot so tallies and keys
/// can be reduced in emission order.
struct PulseOutcome {
    symbol: usize,
    eve_suppressed: bool,
    lost: bool,
    /// Exit port, when the pulse arrived and Bob routed it to the
    /// interferometer.
    port: Option<PortLabel>,
    /// Key-path classification, when a detection (real or dark) occurred.
    detection: Option<Classification>,
    /// The detection above was a dark count.
    dark: bool,
}

/// Simulate slot `index` from its dedicated substream. The draw order
/// within a slot is fixed: symbol, interception coin and Eve's draws,
/// transmission coin, routing coin, then the detection draw.
fn simulate_pulse(
    cfg: &SessionConfig,
    index: u64,
    window: (TimeInstant, TimeInstant),
) -> PulseOutcome {
    let mut rng = substream(cfg.seed, domain::PULSE, index);
    let symbol = rng.random_range(0..cfg.encoder.n_symbols());
    let packet = cfg
        .encoder
        .encode(symbol)
        .expect("validated config encodes every drawn symbol");

    let mut eve_suppressed = false;
    let after_eve = if !cfg.eve.is_none() && rng.random::<f64>() < cfg.intercept_fraction {
        let resent = eve_intercept(packet, &cfg.eve, &cfg.encoder, &mut rng);
        eve_suppressed = resent.is_none();
        resent
    } else {
        Some(packet)
    };

    let mut lost = false;
    let after_channel = after_eve.and_then(|p| {
        let out = transmit(p, &cfg.channel, &mut rng);
        lost = out.is_none();
        out
    });

    let route_mz = rng.random::<f64>() < cfg.p_route_mz;
    let mut port = None;
    let mut detection = None;
    let mut dark = false;
    match after_channel {
        Some(arrived) => {
            if route_mz {
                port = Some(cfg.mz.sample_port(&arrived, &mut rng));
            } else {
                let t = arrived.sample_detection_time(&mut rng);
                detection = Some(cfg.encoder.classify(t));
            }
        }
        None => {
            if !route_mz {
                if let Some(t) = apply_dark_count(None, &cfg.channel, window, &mut rng) {
                    detection = Some(cfg.encoder.classify(t));
                    dark = true;
                }
            }
        }
    }

    PulseOutcome {
        symbol,
        eve_suppressed,
        lost,
        port,
        detection,
        dark,
    }
}

/// Run a full session with the default (parallel) scheduler.
pub fn run_session(cfg: &SessionConfig) -> Result<SessionReport, Error> {
    run_session_with(cfg, Parallelism::Parallel)
}

/// Run a full session with an explicit scheduling choice.
pub fn run_session_with(
    cfg: &SessionConfig,
    parallelism: Parallelism,
) -> Result<SessionReport, Error> {
    let warnings = cfg.validate()?;
    let (honest_sift_fraction, mz_expected_honest) = honest_expectations(cfg)?;
    let window = cfg.encoder.detection_window();

    let outcomes: Vec<PulseOutcome> = match parallelism {
        Parallelism::Sequential => (0..cfg.n_pulses)
            .map(|i| simulate_pulse(cfg, i, window))
            .collect(),
        Parallelism::Parallel => (0..cfg.n_pulses)
            .into_par_iter()
            .map(|i| simulate_pulse(cfg, i, window))
            .collect(),
    };

    let mut counts = SessionCounts {
        emitted: cfg.n_pulses,
        ..SessionCounts::default()
    };
    let mut mz_counts = MzCounts::default();
    let mut alice_symbols = Vec::with_capacity(outcomes.len());
    let mut bob_results = Vec::with_capacity(outcomes.len());
    for outcome in &outcomes {
        if outcome.eve_suppressed {
            counts.suppressed_by_eve += 1;
        }
        if outcome.lost {
            counts.lost += 1;
        }
        if let Some(port) = outcome.port {
            counts.routed_to_mz += 1;
            match port {
                PortLabel::A => mz_counts.port_a += 1,
                PortLabel::B => mz_counts.port_b += 1,
            }
        }
        if let Some(classification) = &outcome.detection {
            if outcome.dark {
                counts.dark_counts += 1;
            } else {
                counts.routed_to_key += 1;
            }
            match classification {
                Classification::Decoded(_) => counts.decoded += 1,
                Classification::Ambiguous(_) => counts.ambiguous += 1,
                Classification::NoCandidate => counts.no_candidate += 1,
            }
        }
        alice_symbols.push(outcome.symbol);
        bob_results.push(
            outcome
                .detection
                .clone()
                .unwrap_or(Classification::NoCandidate),
        );
    }

    let sifted = sift(&alice_symbols, &bob_results)?;
    let sifted_len = sifted.key_alice.len() as u64;

    let (qber, final_key_alice, final_key_bob) = if sifted_len > 0 {
        let mut reveal_rng = substream(cfg.seed, domain::REVEAL, 0);
        let (estimate, revealed_positions) = estimate_qber(
            &sifted.key_alice,
            &sifted.key_bob,
            cfg.reveal_fraction,
            cfg.confidence_level,
            &mut reveal_rng,
        )?;
        let keep = |key: &[usize]| -> Vec<usize> {
            let mut revealed = revealed_positions.iter().peekable();
            key.iter()
                .enumerate()
                .filter(|(i, _)| {
                    if revealed.peek() == Some(&i) {
                        revealed.next();
                        false
                    } else {
                        true
                    }
                })
                .map(|(_, &bit)| bit)
                .collect()
        };
        (
            Some(estimate),
            keep(&sifted.key_alice),
            keep(&sifted.key_bob),
        )
    } else {
        (None, Vec::new(), Vec::new())
    };

    let verdict = mz_attack_test(
        mz_counts.port_a,
        mz_counts.total(),
        mz_expected_honest,
        cfg.mz_alpha,
    )?;

    Ok(SessionReport {
        counts,
        sifted_len,
        qber,
        mz_counts,
        mz_expected_honest,
        honest_sift_fraction,
        verdict,
        final_key_alice,
        final_key_bob,
        warnings,
    })
}
