// SPDX-License-Identifier: Apache-2.0

use super::hmac::HmacKey;
use super::HashAlg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RngError {
    #[error("random source exhausted")]
    Exhausted,
    #[error("operating system random source failed")]
    System,
}

/// Source of random octets. Instances are single-consumer.
pub trait RandomSource {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError>;

    /// Fills `out` with nonzero octets by redrawing zeros. A source that
    /// keeps producing zeros is reported as exhausted.
    fn fill_nonzero(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        self.fill(out)?;
        for b in out.iter_mut() {
            let mut tries = 0;
            while *b == 0 {
                tries += 1;
                if tries > 1024 {
                    return Err(RngError::Exhausted);
                }
                let mut one = [0u8];
                self.fill(&mut one)?;
                *b = one[0];
            }
        }
        Ok(())
    }
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        (**self).fill(out)
    }
}

impl<R: RandomSource + ?Sized> RandomSource for Box<R> {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        (**self).fill(out)
    }
}

pub fn random_bytes(rng: &mut dyn RandomSource, n: usize) -> Result<Vec<u8>, RngError> {
    let mut v = vec![0u8; n];
    rng.fill(&mut v)?;
    Ok(v)
}

/// Operating system entropy.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemRandom;

impl RandomSource for SystemRandom {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        getrandom::getrandom(out).map_err(|_| RngError::System)
    }
}

/// Emits the same octet forever.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource(pub u8);

impl RandomSource for ConstantSource {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        out.fill(self.0);
        Ok(())
    }
}

/// Deterministic stream `HMAC(seed, C(0)) || HMAC(seed, C(1)) || ...` with
/// `C(j)` the four-octet big-endian counter.
#[derive(Clone)]
pub struct SeededStream {
    key: HmacKey,
    counter: u64,
    block: Vec<u8>,
    pos: usize,
}

impl SeededStream {
    pub fn new(seed: &[u8]) -> Self {
        SeededStream { key: HmacKey::new(HashAlg::Sha256, seed), counter: 0, block: Vec::new(), pos: 0 }
    }

    pub fn from_u64(seed: u64) -> Self {
        Self::new(&seed.to_be_bytes())
    }
}

impl RandomSource for SeededStream {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        let mut written = 0;
        while written < out.len() {
            if self.pos == self.block.len() {
                if self.counter > u64::from(u32::MAX) {
                    return Err(RngError::Exhausted);
                }
                self.block = self.key.mac(&(self.counter as u32).to_be_bytes());
                self.counter += 1;
                self.pos = 0;
            }
            let take = (self.block.len() - self.pos).min(out.len() - written);
            out[written..written + take].copy_from_slice(&self.block[self.pos..self.pos + take]);
            self.pos += take;
            written += take;
        }
        Ok(())
    }
}

/// Replays a fixed octet script and then runs dry.
#[derive(Debug, Clone)]
pub struct FixedSource {
    bytes: Vec<u8>,
    pos: usize,
}

impl FixedSource {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        FixedSource { bytes: bytes.into(), pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

impl RandomSource for FixedSource {
    fn fill(&mut self, out: &mut [u8]) -> Result<(), RngError> {
        if out.len() > self.remaining() {
            return Err(RngError::Exhausted);
        }
        out.copy_from_slice(&self.bytes[self.pos..self.pos + out.len()]);
        self.pos += out.len();
        Ok(())
    }
}
