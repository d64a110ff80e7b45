// SPDX-License-Identifier: Apache-2.0

//! Hash, HMAC, MGF1, AES-128-CBC and random sources shared by every scheme.

pub mod aes;
pub mod hmac;
pub mod rand;
pub mod sha256;

pub use self::aes::Aes128;
pub use self::hmac::{hmac, HmacKey};
pub use self::rand::{random_bytes, ConstantSource, FixedSource, RandomSource, RngError, SeededStream, SystemRandom};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("bad length: {0}")]
    BadLength(&'static str),
    #[error("bad padding")]
    BadPadding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashAlg {
    Sha256,
}

impl HashAlg {
    pub fn name(self) -> &'static str {
        match self {
            HashAlg::Sha256 => "SHA-256",
        }
    }

    /// hLen in octets.
    pub fn output_len(self) -> usize {
        match self {
            HashAlg::Sha256 => sha256::OUTPUT_LEN,
        }
    }

    pub fn block_len(self) -> usize {
        match self {
            HashAlg::Sha256 => sha256::BLOCK_LEN,
        }
    }

    pub fn digest(self, msg: &[u8]) -> Vec<u8> {
        match self {
            HashAlg::Sha256 => sha256::Sha256::digest(msg).to_vec(),
        }
    }
}

/// Free-function form of [`HashAlg::digest`].
pub fn hash(alg: HashAlg, msg: &[u8]) -> Vec<u8> {
    alg.digest(msg)
}

/// MGF1: the first `out_len` octets of `H(seed || C(0)) || H(seed || C(1)) || ...`
/// where `C(j)` is the four-octet big-endian counter.
///
/// Panics if `out_len` exceeds `2^32 * hLen`.
pub fn mgf1(alg: HashAlg, seed: &[u8], out_len: usize) -> Vec<u8> {
    let h_len = alg.output_len();
    assert!((out_len as u128) <= (1u128 << 32) * h_len as u128, "mask too long");
    let mut out = Vec::with_capacity(out_len + h_len);
    let mut counter: u32 = 0;
    while out.len() < out_len {
        let mut h = sha256::Sha256::new();
        h.update(seed);
        h.update(&counter.to_be_bytes());
        out.extend_from_slice(&h.finalize());
        counter = counter.wrapping_add(1);
    }
    out.truncate(out_len);
    out
}

/// Compares two octet strings without an early exit on the first
/// difference. Lengths are treated as public.
pub fn ct_eq(a: &[u8], b: &[u8]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let diff = a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y));
    diff == 0
}

pub fn xor_in_place(dst: &mut [u8], mask: &[u8]) {
    for (d, m) in dst.iter_mut().zip(mask) {
        *d ^= m;
    }
}

fn cipher_for(key: &[u8], iv: &[u8]) -> Result<(Aes128, [u8; aes::BLOCK_LEN]), CryptoError> {
    let key: &[u8; aes::KEY_LEN] = key.try_into().map_err(|_| CryptoError::BadLength("key"))?;
    let iv: [u8; aes::BLOCK_LEN] = iv.try_into().map_err(|_| CryptoError::BadLength("iv"))?;
    Ok((Aes128::new(key), iv))
}

/// AES-128-CBC with block padding: `n` octets of value `n`, `1 <= n <= 16`.
pub fn cbc_encrypt(key: &[u8], iv: &[u8], plaintext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    let (aes, iv) = cipher_for(key, iv)?;
    let pad = aes::BLOCK_LEN - plaintext.len() % aes::BLOCK_LEN;
    let mut data = plaintext.to_vec();
    data.resize(plaintext.len() + pad, pad as u8);
    let mut chain = iv;
    for chunk in data.chunks_exact_mut(aes::BLOCK_LEN) {
        let mut block: [u8; aes::BLOCK_LEN] = chunk.try_into().unwrap();
        xor_in_place(&mut block, &chain);
        aes.encrypt_block(&mut block);
        chunk.copy_from_slice(&block);
        chain = block;
    }
    Ok(data)
}

/// Inverse of [`cbc_encrypt`]. Every padding defect yields the same
/// [`CryptoError::BadPadding`].
pub fn cbc_decrypt(key: &[u8], iv: &[u8], ciphertext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    let (aes, iv) = cipher_for(key, iv)?;
    if ciphertext.is_empty() || !ciphertext.len().is_multiple_of(aes::BLOCK_LEN) {
        return Err(CryptoError::BadLength("ciphertext"));
    }
    let mut data = ciphertext.to_vec();
    let mut chain = iv;
    for chunk in data.chunks_exact_mut(aes::BLOCK_LEN) {
        let mut block: [u8; aes::BLOCK_LEN] = chunk.try_into().unwrap();
        let next_chain = block;
        aes.decrypt_block(&mut block);
        xor_in_place(&mut block, &chain);
        chunk.copy_from_slice(&block);
        chain = next_chain;
    }
    let last_block = &data[data.len() - aes::BLOCK_LEN..];
    let pad = last_block[aes::BLOCK_LEN - 1];
    // scan the whole final block so timing does not depend on the pad value
    let mut bad = u8::from(pad == 0) | u8::from(pad as usize > aes::BLOCK_LEN);
    for (i, &b) in last_block.iter().enumerate() {
        let in_pad = u8::from(aes::BLOCK_LEN - i <= pad as usize);
        bad |= in_pad & u8::from(b != pad);
    }
    if bad != 0 {
        return Err(CryptoError::BadPadding);
    }
    data.truncate(data.len() - pad as usize);
    Ok(data)
}
