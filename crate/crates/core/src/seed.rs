//! Reproducible per-task random streams.
//!
//! Task `k` of a campaign seeded with `master` draws from ChaCha20 keyed by
//! `master` on stream `k`, so results do not depend on how tasks are scheduled
//! across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type TaskRng = ChaCha20Rng;

pub fn task_rng(master: u64, task: u64) -> TaskRng {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(task);
    rng
}
