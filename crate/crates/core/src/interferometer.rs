//! Unbalanced interferometer used as a pulse-duration test.
//!
//! A fraction of the received pulses is routed into an interferometer whose
//! long arm adds delay `tau` and phase `phase`. The exit-port statistics
//! depend on the overlap between the pulse and its delayed copy: for port A
//! the detection probability is
//!
//! ```text
//! pA = (1 + Re[e^{i phase} * C(tau)]) / 2
//! ```
//!
//! with `C` the normalized field autocorrelation of the incoming packet.
//! At the default working point (`tau = T/2`, `phase = pi`) a full-length
//! uniform pulse gives `pA = 1/4`, while any pulse too short to overlap its
//! delayed copy gives `pA = 1/2`. Watching port A therefore catches an
//! intruder who re-emits shortened pulses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::wavepacket::WavePacket;

/// Arm imbalance of the duration-test interferometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferometerConfig {
    /// Long-arm delay `tau`, in units of `T = 1`.
    pub delay: f64,
    /// Long-arm phase, radians.
    pub phase: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        InterferometerConfig {
            delay: 0.5,
            phase: std::f64::consts::PI,
        }
    }
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.delay.is_finite() {
            return Err(Error::config(
                "interferometer.delay",
                format!("must be finite, got {}", self.delay),
            ));
        }
        if !self.phase.is_finite() {
            return Err(Error::config(
                "interferometer.phase",
                format!("must be finite, got {}", self.phase),
            ));
        }
        Ok(())
    }

    /// Exit-port probabilities `(pA, pB)` for one incoming packet.
    ///
    /// Both are clamped to `[0, 1]` against floating-point round-off and
    /// always sum to exactly 1.
    ///
    /// ```
    /// use tqkd::{InterferometerConfig, WavePacket};
    ///
    /// let mz = InterferometerConfig::default();
    /// let (pa, _) = mz.port_probabilities(&WavePacket::rect(0.0, 1.0).unwrap());
    /// assert!((pa - 0.25).abs() < 1e-12);
    /// let (pa_short, _) = mz.port_probabilities(&WavePacket::rect(0.0, 0.01).unwrap());
    /// assert!((pa_short - 0.5).abs() < 1e-12);
    /// ```
    pub fn port_probabilities(&self, packet: &WavePacket) -> (f64, f64) {
        let c = packet.autocorrelation(self.delay);
        let rotated = num_complex::Complex64::from_polar(1.0, self.phase) * c;
        let pa = ((1.0 + rotated.re) / 2.0).clamp(0.0, 1.0);
        (pa, 1.0 - pa)
    }

    /// Sample which exit port fires for one incoming packet.
    pub fn sample_port<R: Rng + ?Sized>(&self, packet: &WavePacket, rng: &mut R) -> PortLabel {
        let (pa, _) = self.port_probabilities(packet);
        if rng.random::<f64>() < pa {
            PortLabel::A
        } else {
            PortLabel::B
        }
    }
}

/// Exit ports of the duration-test interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PortLabel {
    A,
    B,
}
