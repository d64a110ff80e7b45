// SPDX-License-Identifier: Apache-2.0

//! PBKDF2, PBES2 (AES-128-CBC) and PBMAC1 (HMAC-SHA-256).

use crate::crypto::{self, ct_eq, xor_in_place, CryptoError, HashAlg, HmacKey, RandomSource, RngError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Pkcs5Error {
    #[error("derived key too long")]
    DerivedKeyTooLong,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("decryption error")]
    DecryptionError,
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

/// Salt length used when a caller does not supply one.
pub const DEFAULT_SALT_LEN: usize = 8;
pub const DEFAULT_ITERATIONS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pbkdf2Params {
    pub salt: Vec<u8>,
    pub iterations: u32,
    pub dk_len: usize,
    pub prf: HashAlg,
}

impl Pbkdf2Params {
    pub fn new(salt: &[u8], iterations: u32, dk_len: usize) -> Self {
        Pbkdf2Params { salt: salt.to_vec(), iterations, dk_len, prf: HashAlg::Sha256 }
    }

    fn check(&self) -> Result<(), Pkcs5Error> {
        if self.salt.is_empty() {
            return Err(Pkcs5Error::InvalidParameter("salt must not be empty"));
        }
        if self.iterations == 0 {
            return Err(Pkcs5Error::InvalidParameter("iteration count must be positive"));
        }
        if self.dk_len == 0 {
            return Err(Pkcs5Error::InvalidParameter("derived key length must be positive"));
        }
        if self.dk_len as u128 > u128::from(u32::MAX) * self.prf.output_len() as u128 {
            return Err(Pkcs5Error::DerivedKeyTooLong);
        }
        Ok(())
    }
}

/// `T_i = U_1 ^ ... ^ U_c` with `U_1 = PRF(P, S || INT(i))` and
/// `U_j = PRF(P, U_{j-1})`; the password keys the PRF.
pub fn pbkdf2(password: &[u8], params: &Pbkdf2Params) -> Result<Vec<u8>, Pkcs5Error> {
    params.check()?;
    let key = HmacKey::new(params.prf, password);
    let h_len = params.prf.output_len();
    let blocks = params.dk_len.div_ceil(h_len);
    let mut dk = Vec::with_capacity(blocks * h_len);
    for i in 1..=blocks as u32 {
        let mut u = key.mac_parts(&[&params.salt, &i.to_be_bytes()]);
        let mut t = u.clone();
        for _ in 1..params.iterations {
            u = key.mac(&u);
            xor_in_place(&mut t, &u);
        }
        dk.extend_from_slice(&t);
    }
    dk.truncate(params.dk_len);
    Ok(dk)
}

/// Everything needed to reverse a PBES2 encryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pbes2Params {
    pub kdf: Pbkdf2Params,
    pub iv: Vec<u8>,
}

pub fn pbes2_encrypt(
    message: &[u8],
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    rng: &mut dyn RandomSource,
) -> Result<(Pbes2Params, Vec<u8>), Pkcs5Error> {
    let kdf = Pbkdf2Params::new(salt, iterations, crypto::aes::KEY_LEN);
    let dk = pbkdf2(password, &kdf)?;
    let mut iv = vec![0u8; crypto::aes::BLOCK_LEN];
    rng.fill(&mut iv)?;
    let ct = crypto::cbc_encrypt(&dk, &iv, message).map_err(|_| Pkcs5Error::InvalidParameter("cipher"))?;
    Ok((Pbes2Params { kdf, iv }, ct))
}

pub fn pbes2_decrypt(params: &Pbes2Params, ciphertext: &[u8], password: &[u8]) -> Result<Vec<u8>, Pkcs5Error> {
    if params.kdf.dk_len != crypto::aes::KEY_LEN {
        return Err(Pkcs5Error::InvalidParameter("key length does not match the cipher"));
    }
    let dk = pbkdf2(password, &params.kdf)?;
    crypto::cbc_decrypt(&dk, &params.iv, ciphertext).map_err(|e| match e {
        CryptoError::BadLength("iv") => Pkcs5Error::InvalidParameter("iv"),
        _ => Pkcs5Error::DecryptionError,
    })
}

/// HMAC-SHA-256 keyed with `PBKDF2(P, S, c, mac_key_len)`.
pub fn pbmac1_tag(
    message: &[u8],
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    mac_key_len: usize,
) -> Result<Vec<u8>, Pkcs5Error> {
    let dk = pbkdf2(password, &Pbkdf2Params::new(salt, iterations, mac_key_len))?;
    Ok(crypto::hmac(HashAlg::Sha256, &dk, message))
}

pub fn pbmac1_verify(
    message: &[u8],
    tag: &[u8],
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    mac_key_len: usize,
) -> bool {
    match pbmac1_tag(message, password, salt, iterations, mac_key_len) {
        Ok(expect) => ct_eq(&expect, tag),
        Err(_) => false,
    }
}
