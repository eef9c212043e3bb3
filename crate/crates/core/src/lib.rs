//! Monte Carlo simulator of a time-coded quantum key distribution protocol.
//!
//! Alice encodes each key symbol as the emission *delay* of a fixed-duration
//! single-photon pulse: delay 0 codes a 0, delay `T/2` codes a 1. Because
//! the pulses overlap in time, a single detection identifies the delay only
//! when it falls outside the overlap — Bob keeps those unambiguous slots
//! (sifting) and discards the rest. An eavesdropper faces the same
//! ambiguity: re-encoding her guesses corrupts a quarter of the sifted key,
//! while re-emitting short pulses at her measured times stays invisible to
//! timing but is caught by an unbalanced interferometer that measures pulse
//! duration through self-interference.
//!
//! The crate simulates all of this end to end:
//!
//! - [`WavePacket`]: piecewise-constant pulse amplitudes, autocorrelation,
//!   Born-rule detection sampling.
//! - [`EncoderConfig`] / [`Classification`]: delay alphabets, interval
//!   classification, [`sift`], [`estimate_qber`].
//! - [`InterferometerConfig`]: the duration test, `pA = (1 + Re[e^{iφ}
//!   C(τ)])/2`.
//! - [`EveStrategy`] and the lossy [`ChannelConfig`].
//! - [`run_session`]: full protocol rounds with per-pulse deterministic
//!   substreams, tallies, error estimation, and an exact binomial attack
//!   [`Verdict`].
//!
//! # Example
//!
//! ```
//! use tqkd::{run_session, SessionConfig};
//!
//! let cfg = SessionConfig {
//!     n_pulses: 2_000,
//!     seed: 7,
//!     ..SessionConfig::default()
//! };
//! let report = run_session(&cfg).unwrap();
//! // no adversary, no noise: the sifted keys agree exactly
//! assert_eq!(report.qber.unwrap().qber, 0.0);
//! assert!(!report.verdict.is_attack_suspected());
//! ```
//!
//! All randomness descends from `SessionConfig::seed` through counter-based
//! substreams, so reports are byte-identical across runs and across
//! sequential or parallel execution.

pub mod channel;
pub mod error;
pub mod interferometer;
pub mod protocol;
pub mod rng;
pub mod session;
pub mod stats;
pub mod wavepacket;

pub use channel::{
    apply_dark_count, eve_intercept, transmit, AmbiguousPolicy, ChannelConfig, EveStrategy,
};
pub use error::Error;
pub use interferometer::{InterferometerConfig, PortLabel};
pub use protocol::{estimate_qber, sift, Classification, EncoderConfig, QberEstimate, SiftOutcome};
pub use rng::{substream, SimRng};
pub use session::{
    honest_expectations, mz_attack_test, run_session, run_session_with, MzCounts, Parallelism,
    SessionConfig, SessionCounts, SessionReport, Verdict,
};
pub use stats::{binomial_two_sided_p_value, wilson_interval};
pub use wavepacket::{Segment, TimeInstant, WavePacket, NORM_TOLERANCE};

// Every code snippet in the guide (book/) and the README runs as a doctest,
// so the prose can never drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}

    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}

    #[doc = include_str!("../../../book/src/wavepackets.md")]
    pub mod wavepackets {}

    #[doc = include_str!("../../../book/src/protocol.md")]
    pub mod protocol {}

    #[doc = include_str!("../../../book/src/interferometer.md")]
    pub mod interferometer {}

    #[doc = include_str!("../../../book/src/adversaries.md")]
    pub mod adversaries {}

    #[doc = include_str!("../../../book/src/sessions.md")]
    pub mod sessions {}

    #[doc = include_str!("../../../book/src/statistics.md")]
    pub mod statistics {}

    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
