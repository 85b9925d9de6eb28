use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::geogrid::CellId;

const DOMAIN: &[u8] = b"majortom-sampler/v1";

/// Independent random stream for one (seed, cell) pair.
pub struct CellRng(ChaCha20Rng);

impl CellRng {
    pub fn new(seed: u64, cell: CellId) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN);
        hasher.update(seed.to_le_bytes());
        hasher.update(cell.to_string().as_bytes());
        CellRng(ChaCha20Rng::from_seed(hasher.finalize().into()))
    }

    /// Uniform integer in `[0, n)` by rejection; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.0.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }
}
