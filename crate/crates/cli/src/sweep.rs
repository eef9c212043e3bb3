//! Parameter sweeps: run a grid of sessions over one knob with derived,
//! independently reproducible seeds.
//!
//! Each row's seed is `base_seed + step_index * 1_000_000 + repetition`, so
//! any single row can be reproduced with `run --seed` without re-running
//! the sweep. Rows may execute in parallel; output order is always
//! (step, repetition).

use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use rayon::prelude::*;
use tqkd::{run_session, EveStrategy, SessionConfig, SessionReport};

/// Seed stride between sweep steps.
pub const STEP_SEED_STRIDE: u64 = 1_000_000;

/// The knobs a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    InterceptFraction,
    EvePulseDuration,
    ChannelTransmittance,
    NPulses,
}

impl SweepParam {
    pub const NAMES: [&'static str; 4] = [
        "intercept_fraction",
        "eve.pulse_duration",
        "channel.transmittance",
        "n_pulses",
    ];
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        match name {
            "intercept_fraction" => Ok(SweepParam::InterceptFraction),
            "eve.pulse_duration" => Ok(SweepParam::EvePulseDuration),
            "channel.transmittance" => Ok(SweepParam::ChannelTransmittance),
            "n_pulses" => Ok(SweepParam::NPulses),
            other => Err(format!(
                "unknown sweep parameter {other:?}; expected one of {}",
                SweepParam::NAMES.join(", ")
            )),
        }
    }
}

/// A validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    /// Number of grid points, endpoints included. At least 2.
    pub steps: usize,
    /// Sessions per grid point.
    pub repetitions: usize,
    pub base: SessionConfig,
}

/// One completed sweep run, in (step, repetition) order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter_value: f64,
    pub seed: u64,
    pub report: SessionReport,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.steps >= 2,
            "sweep needs at least 2 steps, got {}",
            self.steps
        );
        ensure!(
            self.repetitions >= 1,
            "sweep needs at least 1 repetition per step"
        );
        ensure!(
            self.from.is_finite() && self.to.is_finite(),
            "sweep bounds must be finite"
        );
        ensure!(
            self.from <= self.to,
            "sweep bounds must satisfy from <= to, got {} > {}",
            self.from,
            self.to
        );
        if self.param == SweepParam::EvePulseDuration
            && !matches!(self.base.eve, EveStrategy::ResendShort { .. })
        {
            bail!(
                "sweeping eve.pulse_duration requires the base config to use the \
                 resend_short strategy"
            );
        }
        // every grid value must produce a valid config
        for value in self.values() {
            apply_param(&self.base, self.param, value)?
                .validate()
                .map_err(|e| anyhow::anyhow!("sweep value {value}: {e}"))?;
        }
        Ok(())
    }

    /// The evenly spaced grid, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let span = self.to - self.from;
        (0..self.steps)
            .map(|i| self.from + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Build the config for one grid value.
fn apply_param(base: &SessionConfig, param: SweepParam, value: f64) -> Result<SessionConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::InterceptFraction => cfg.intercept_fraction = value,
        SweepParam::ChannelTransmittance => cfg.channel.transmittance = value,
        SweepParam::EvePulseDuration => match &mut cfg.eve {
            EveStrategy::ResendShort { pulse_duration } => *pulse_duration = value,
            _ => bail!("base config does not use the resend_short strategy"),
        },
        SweepParam::NPulses => {
            ensure!(
                value >= 1.0,
                "n_pulses sweep values must be at least 1, got {value}"
            );
            cfg.n_pulses = value.round() as u64;
        }
    }
    Ok(cfg)
}

/// Run the whole grid. Rows are computed in parallel but returned in
/// deterministic (step, repetition) order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize, f64)> = spec
        .values()
        .into_iter()
        .enumerate()
        .flat_map(|(step, value)| (0..spec.repetitions).map(move |rep| (step, rep, value)))
        .collect();
    jobs.into_par_iter()
        .map(|(step, rep, value)| {
            let mut cfg = apply_param(&spec.base, spec.param, value)?;
            cfg.seed = spec
                .base
                .seed
                .wrapping_add(step as u64 * STEP_SEED_STRIDE)
                .wrapping_add(rep as u64);
            let report = run_session(&cfg)?;
            Ok(SweepRow {
                parameter_value: value,
                seed: cfg.seed,
                report,
            })
        })
        .collect()
}
