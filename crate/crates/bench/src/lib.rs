//! Fixtures shared by the benchmarks.

use subpack_core::{sub_packetization_level, MessageStore, ProblemInstance};

/// `(N, s)` pairs covering both cases at a few sizes.
pub const PAIRS: [(usize, usize); 6] = [(5, 3), (4, 2), (16, 12), (16, 4), (30, 20), (30, 6)];

/// CDE instance with `bytes` bytes per block, and seeded random messages.
pub fn fixture(n: usize, s: usize, bytes: usize) -> (ProblemInstance, MessageStore) {
    let z = sub_packetization_level(n, s).expect("valid pair").z;
    let inst = ProblemInstance::cde(n, s, 8 * z * bytes).expect("aligned");
    let store = MessageStore::random(&inst, 42);
    (inst, store)
}
