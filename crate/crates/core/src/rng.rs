//! Counter-based random streams.
//!
//! Every source of randomness in a session is a ChaCha8 stream addressed by
//! `(seed, domain, index)`. Pulse `i` always draws from the same stream no
//! matter how many threads evaluate pulses, so a session report is a pure
//! function of its configuration.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the simulator.
pub type SimRng = ChaCha8Rng;

/// Stream-id domains. Indices within a domain must stay below 2^48.
pub mod domain {
    /// One stream per pulse slot.
    pub const PULSE: u64 = 0;
    /// Selection of key positions revealed for error estimation.
    pub const REVEAL: u64 = 1;
}

/// Derive the independent random stream for `(seed, domain, index)`.
///
/// ```
/// use tqkd::rng::{substream, domain};
/// use rand::Rng;
///
/// let mut a = substream(7, domain::PULSE, 3);
/// let mut b = substream(7, domain::PULSE, 3);
/// assert_eq!(a.random::<u64>(), b.random::<u64>());
/// ```
pub fn substream(seed: u64, domain: u64, index: u64) -> SimRng {
    debug_assert!(index < 1 << 48, "substream index exceeds 2^48");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain << 48 | index);
    rng
}
