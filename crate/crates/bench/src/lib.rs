//! Fixtures shared by the benchmarks.

use dyncoh::random;
use dyncoh::QuantumChannel;

/// Seeded random channel on `d` dimensions with full Kraus rank.
pub fn fixture_channel(d: usize, seed: u64) -> QuantumChannel {
    random::random_channel(&mut random::seeded(seed), d, d, d)
}
