//! Shared fixtures for the benchmark targets.

use chandisc_core::channels::{
    random_channel, random_classical, random_state, ClassicalChannel, DensityMatrix, QuantumChannel,
};
use chandisc_core::rng::stream_rng;

pub fn state_pair(dim: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = stream_rng(seed, 0);
    (random_state(dim, &mut rng), random_state(dim, &mut rng))
}

pub fn qubit_channel_pair(seed: u64) -> (QuantumChannel, QuantumChannel) {
    (
        random_channel(2, 2, None, &mut stream_rng(seed, 0)),
        random_channel(2, 2, None, &mut stream_rng(seed, 1)),
    )
}

pub fn classical_pair(seed: u64) -> (ClassicalChannel, ClassicalChannel) {
    let mut rng = stream_rng(seed, 0);
    (
        random_classical(2, 2, &mut rng),
        random_classical(2, 2, &mut rng),
    )
}
