use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The consumer of a random stream within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StreamRole {
    LabelOracle = 0,
    SignOracle = 1,
    Learner = 2,
    Optimizer = 3,
}

/// Independent stream for `(base_seed, replication, role)`.
///
/// ChaCha exposes 2^64 streams per key; the replication index occupies the
/// high bits and the role the low byte, so each replication's streams are
/// fixed regardless of which other replications run.
pub fn stream_rng(base_seed: u64, replication: u64, role: StreamRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream((replication << 8) | role as u64);
    rng
}
