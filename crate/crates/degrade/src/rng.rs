//! Deterministic per-item random streams.
//!
//! Every stochastic operation in the crate draws from an [`RngStream`]
//! derived from a `(master seed, item id, stage)` triple. Derivation is a
//! pure function: SHA-256 over the length-prefixed triple keys a ChaCha20
//! generator, so identical triples replay bitwise-identical sequences on
//! any platform, and distinct triples give independent streams.
//!
//! Variates are defined directly over the raw 64-bit output so the exact
//! draw sequence is easy to reproduce outside Rust: uniforms take the top
//! 53 bits, normals use one Box–Muller cosine per call (two uniforms),
//! bounded integers use rejection sampling.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

const DOMAIN_TAG: &[u8] = b"degrade.rng.v1";

/// Where a stream came from. Identical provenance ⇒ identical draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub master_seed: u64,
    pub item_id: String,
    pub stage: String,
}

/// A seeded, single-consumer random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    provenance: Provenance,
    rng: ChaCha20Rng,
}

impl RngStream {
    /// Derive the stream for `(master_seed, item_id, stage)`.
    pub fn derive(master_seed: u64, item_id: &str, stage: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN_TAG);
        hasher.update(master_seed.to_le_bytes());
        hasher.update((item_id.len() as u64).to_le_bytes());
        hasher.update(item_id.as_bytes());
        hasher.update((stage.len() as u64).to_le_bytes());
        hasher.update(stage.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        Self {
            provenance: Provenance {
                master_seed,
                item_id: item_id.to_owned(),
                stage: stage.to_owned(),
            },
            rng: ChaCha20Rng::from_seed(key),
        }
    }

    /// Derive an independent sub-stream with stage `"{stage}/{label}"`.
    /// Used by composed corruptions so each child gets its own stream.
    pub fn child(&self, label: &str) -> Self {
        Self::derive(
            self.provenance.master_seed,
            &self.provenance.item_id,
            &format!("{}/{label}", self.provenance.stage),
        )
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in [0, 1), 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    #[inline]
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.uniform() * (hi - lo)
    }

    /// True with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in [lo, hi], rejection-sampled to avoid modulo bias.
    pub fn uniform_int(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty integer range [{lo}, {hi}]");
        let span = hi - lo + 1; // span 0 means the full u64 range
        if span == 0 {
            return self.next_u64();
        }
        let zone = u64::MAX - (u64::MAX - span + 1) % span;
        loop {
            let draw = self.next_u64();
            if draw <= zone {
                return lo + draw % span;
            }
        }
    }

    /// Uniform over the odd integers of [lo, hi]; both bounds must be odd.
    pub fn odd_int(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo % 2 == 1 && hi % 2 == 1 && lo <= hi, "bad odd range [{lo}, {hi}]");
        let count = (hi - lo) / 2 + 1;
        lo + 2 * self.uniform_int(0, count - 1)
    }

    /// Standard normal via Box–Muller (cosine branch). Two uniforms per
    /// draw, no cached state.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
