// SPDX-License-Identifier: Apache-2.0

//! EME-PKCS1-v1_5, EME-OAEP and EMSA-PSS, plus the RSAES and RSASSA-PSS
//! schemes built on the raw RSA operations.

use num_bigint::BigUint;

use crate::crypto::{ct_eq, mgf1, xor_in_place, HashAlg, RandomSource, RngError};
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Pkcs1Error {
    #[error("message too long")]
    MessageTooLong,
    #[error("label too long")]
    LabelTooLong,
    #[error("decryption error")]
    DecryptionError,
    #[error("encoding error")]
    EncodingError,
    #[error("modulus too small for the encoding parameters")]
    ModulusTooSmall,
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

/// Smallest number of padding octets in an EME-PKCS1-v1_5 block.
pub const V15_MIN_PS: usize = 8;

// SHA-256 input limit in octets
const MAX_HASH_INPUT: u64 = (1 << 61) - 1;

/// Integer to octet string of exactly `len` octets, big-endian.
pub fn i2osp(x: &BigUint, len: usize) -> Option<Vec<u8>> {
    let bytes = x.to_bytes_be();
    let bytes: &[u8] = if bytes == [0] { &[] } else { &bytes };
    if bytes.len() > len {
        return None;
    }
    let mut out = vec![0u8; len - bytes.len()];
    out.extend_from_slice(bytes);
    Some(out)
}

pub fn os2ip(octets: &[u8]) -> BigUint {
    BigUint::from_bytes_be(octets)
}

/// `0x00 || 0x02 || PS || 0x00 || M` with `|PS| = k - 3 - |M| >= 8` nonzero
/// random octets.
pub fn eme_v15_pad(m: &[u8], k: usize, rng: &mut dyn RandomSource) -> Result<Vec<u8>, Pkcs1Error> {
    if k < 3 + V15_MIN_PS || m.len() > k - 3 - V15_MIN_PS {
        return Err(Pkcs1Error::MessageTooLong);
    }
    let ps_len = k - 3 - m.len();
    let mut em = vec![0u8; k];
    em[1] = 0x02;
    rng.fill_nonzero(&mut em[2..2 + ps_len])?;
    em[3 + ps_len..].copy_from_slice(m);
    Ok(em)
}

pub fn eme_v15_unpad(em: &[u8], k: usize) -> Result<Vec<u8>, Pkcs1Error> {
    if em.len() != k || k < 3 + V15_MIN_PS {
        return Err(Pkcs1Error::DecryptionError);
    }
    // one pass over every octet; remember the first zero after the header
    let mut bad = u8::from(em[0] != 0) | u8::from(em[1] != 2);
    let mut sep = 0usize;
    for (i, &b) in em.iter().enumerate().skip(2) {
        let first_zero = u8::from(b == 0) & u8::from(sep == 0);
        sep |= i * usize::from(first_zero);
    }
    bad |= u8::from(sep == 0) | u8::from(sep < 2 + V15_MIN_PS);
    if bad != 0 {
        return Err(Pkcs1Error::DecryptionError);
    }
    Ok(em[sep + 1..].to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OaepParams {
    pub hash: HashAlg,
    pub label: Vec<u8>,
    /// Modulus length in octets.
    pub k: usize,
}

impl OaepParams {
    pub fn new(k: usize) -> Self {
        OaepParams { hash: HashAlg::Sha256, label: Vec::new(), k }
    }

    pub fn with_label(mut self, label: &[u8]) -> Self {
        self.label = label.to_vec();
        self
    }

    /// Largest message length, or `None` when `k` cannot host any message.
    pub fn max_message_len(&self) -> Option<usize> {
        // k1 < k - 2 k0 - 2
        (self.k).checked_sub(2 * self.hash.output_len() + 3)
    }
}

pub fn oaep_encode(m: &[u8], params: &OaepParams, rng: &mut dyn RandomSource) -> Result<Vec<u8>, Pkcs1Error> {
    oaep_encode_with(m, params, rng, &|seed, len| mgf1(params.hash, seed, len))
}

fn oaep_encode_with(
    m: &[u8],
    params: &OaepParams,
    rng: &mut dyn RandomSource,
    mgf: &dyn Fn(&[u8], usize) -> Vec<u8>,
) -> Result<Vec<u8>, Pkcs1Error> {
    if params.label.len() as u64 > MAX_HASH_INPUT {
        return Err(Pkcs1Error::LabelTooLong);
    }
    let max = params.max_message_len().ok_or(Pkcs1Error::MessageTooLong)?;
    if m.len() > max {
        return Err(Pkcs1Error::MessageTooLong);
    }
    let k0 = params.hash.output_len();
    let db_len = params.k - k0 - 1;
    let mut db = params.hash.digest(&params.label);
    db.resize(db_len - m.len() - 1, 0);
    db.push(0x01);
    db.extend_from_slice(m);
    let mut seed = vec![0u8; k0];
    rng.fill(&mut seed)?;
    xor_in_place(&mut db, &mgf(&seed, db_len));
    xor_in_place(&mut seed, &mgf(&db, k0));
    let mut em = Vec::with_capacity(params.k);
    em.push(0x00);
    em.extend_from_slice(&seed);
    em.extend_from_slice(&db);
    Ok(em)
}

pub fn oaep_decode(em: &[u8], params: &OaepParams) -> Result<Vec<u8>, Pkcs1Error> {
    let k0 = params.hash.output_len();
    if em.len() != params.k || params.max_message_len().is_none() {
        return Err(Pkcs1Error::DecryptionError);
    }
    let db_len = params.k - k0 - 1;
    let mut seed = em[1..1 + k0].to_vec();
    let mut db = em[1 + k0..].to_vec();
    xor_in_place(&mut seed, &mgf1(params.hash, &db, k0));
    xor_in_place(&mut db, &mgf1(params.hash, &seed, db_len));
    let l_hash = params.hash.digest(&params.label);
    let mut bad = u8::from(em[0] != 0) | u8::from(!ct_eq(&db[..k0], &l_hash));
    // find the 0x01 delimiter; any nonzero octet before it is an error
    let mut one_at = 0usize;
    let mut found = 0u8;
    for (i, &b) in db.iter().enumerate().skip(k0) {
        let is_one = u8::from(b == 1) & (found ^ 1);
        let stray = u8::from(b != 0 && b != 1) & (found ^ 1);
        bad |= stray;
        one_at |= i * usize::from(is_one);
        found |= is_one;
    }
    bad |= found ^ 1;
    if bad != 0 {
        return Err(Pkcs1Error::DecryptionError);
    }
    Ok(db[one_at + 1..].to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PssParams {
    pub hash: HashAlg,
    pub salt_len: usize,
    /// Modulus length in octets.
    pub k: usize,
    /// |n| in bits.
    pub modulus_bits: usize,
}

impl PssParams {
    /// SHA-256 with a salt as long as the hash output.
    pub fn new(modulus_bits: usize) -> Self {
        let hash = HashAlg::Sha256;
        PssParams { hash, salt_len: hash.output_len(), k: modulus_bits.div_ceil(8), modulus_bits }
    }

    pub fn for_key(pk: &RsaPublicKey) -> Self {
        Self::new(pk.modulus_bits())
    }

    pub fn with_salt_len(mut self, salt_len: usize) -> Self {
        self.salt_len = salt_len;
        self
    }

    /// Largest salt the modulus can carry, if any.
    pub fn max_salt_len(&self) -> Option<usize> {
        let spare = usize::from(self.cleared_bits() == 8);
        self.k.checked_sub(self.hash.output_len() + 2 + spare)
    }

    /// hLen-octet salt, shortened to the largest that fits when the modulus
    /// is too small for the default.
    pub fn fitted(modulus_bits: usize) -> Self {
        let p = Self::new(modulus_bits);
        let salt = p.max_salt_len().unwrap_or(0).min(p.salt_len);
        p.with_salt_len(salt)
    }

    /// Number of leading bits of EM forced to zero.
    pub fn cleared_bits(&self) -> usize {
        8 * self.k + 1 - self.modulus_bits
    }

    pub fn is_feasible(&self) -> bool {
        let k0 = self.hash.output_len();
        if self.modulus_bits == 0 || self.k != self.modulus_bits.div_ceil(8) {
            return false;
        }
        // PS || 0x01 || salt must fit in DB; when a whole octet is cleared
        // the delimiter cannot sit in the first octet of DB either
        let spare = usize::from(self.cleared_bits() == 8);
        self.k >= k0 + 2 + self.salt_len + spare
    }
}

fn pss_m_prime(alg: HashAlg, m_hash: &[u8], salt: &[u8]) -> Vec<u8> {
    let mut m_prime = vec![0u8; 8];
    m_prime.extend_from_slice(m_hash);
    m_prime.extend_from_slice(salt);
    alg.digest(&m_prime)
}

pub fn pss_encode(m: &[u8], params: &PssParams, rng: &mut dyn RandomSource) -> Result<Vec<u8>, Pkcs1Error> {
    if !params.is_feasible() {
        return Err(Pkcs1Error::EncodingError);
    }
    let k0 = params.hash.output_len();
    let db_len = params.k - k0 - 1;
    let mut salt = vec![0u8; params.salt_len];
    rng.fill(&mut salt)?;
    let h = pss_m_prime(params.hash, &params.hash.digest(m), &salt);
    let mut db = vec![0u8; db_len - params.salt_len - 1];
    db.push(0x01);
    db.extend_from_slice(&salt);
    xor_in_place(&mut db, &mgf1(params.hash, &h, db_len));
    let mut em = db;
    em.extend_from_slice(&h);
    em.push(0xbc);
    clear_top_bits(&mut em, params.cleared_bits());
    Ok(em)
}

fn clear_top_bits(em: &mut [u8], bits: usize) {
    let mut left = bits;
    for b in em.iter_mut() {
        if left == 0 {
            break;
        }
        let n = left.min(8);
        *b &= 0xFFu8.checked_shr(n as u32).unwrap_or(0);
        left -= n;
    }
}

fn top_bits_clear(em: &[u8], bits: usize) -> bool {
    let mut copy = em.to_vec();
    clear_top_bits(&mut copy, bits);
    copy == em
}

pub fn pss_verify_encoding(m: &[u8], em: &[u8], params: &PssParams) -> bool {
    if !params.is_feasible() || em.len() != params.k {
        return false;
    }
    let k0 = params.hash.output_len();
    let db_len = params.k - k0 - 1;
    if em[params.k - 1] != 0xbc || !top_bits_clear(em, params.cleared_bits()) {
        return false;
    }
    let h = &em[db_len..params.k - 1];
    let mut db = em[..db_len].to_vec();
    xor_in_place(&mut db, &mgf1(params.hash, h, db_len));
    clear_top_bits(&mut db, params.cleared_bits());
    let ps_len = db_len - params.salt_len - 1;
    if db[..ps_len].iter().any(|&b| b != 0) || db[ps_len] != 0x01 {
        return false;
    }
    let salt = &db[ps_len + 1..];
    ct_eq(&pss_m_prime(params.hash, &params.hash.digest(m), salt), h)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    V15,
    Oaep(OaepParams),
}

impl Scheme {
    /// OAEP with SHA-256 and the empty label, sized for `pk`.
    pub fn oaep_for(pk: &RsaPublicKey) -> Self {
        Scheme::Oaep(OaepParams::new(pk.modulus_len()))
    }
}

pub fn encrypt(m: &[u8], pk: &RsaPublicKey, scheme: &Scheme, rng: &mut dyn RandomSource) -> Result<Vec<u8>, Pkcs1Error> {
    let k = pk.modulus_len();
    let em = match scheme {
        Scheme::V15 => eme_v15_pad(m, k, rng)?,
        Scheme::Oaep(p) => {
            if p.k != k {
                return Err(Pkcs1Error::EncodingError);
            }
            oaep_encode(m, p, rng)?
        }
    };
    let c = pk.public_op(&os2ip(&em)).map_err(|_| Pkcs1Error::MessageTooLong)?;
    Ok(i2osp(&c, k).expect("c < n"))
}

pub fn decrypt(c: &[u8], sk: &RsaPrivateKey, scheme: &Scheme) -> Result<Vec<u8>, Pkcs1Error> {
    let k = sk.modulus_len();
    if c.len() != k {
        return Err(Pkcs1Error::DecryptionError);
    }
    let m = sk.private_op(&os2ip(c)).map_err(|_| Pkcs1Error::DecryptionError)?;
    let em = i2osp(&m, k).ok_or(Pkcs1Error::DecryptionError)?;
    match scheme {
        Scheme::V15 => eme_v15_unpad(&em, k),
        Scheme::Oaep(p) if p.k == k => oaep_decode(&em, p),
        Scheme::Oaep(_) => Err(Pkcs1Error::DecryptionError),
    }
}

pub fn sign(m: &[u8], sk: &RsaPrivateKey, params: &PssParams, rng: &mut dyn RandomSource) -> Result<Vec<u8>, Pkcs1Error> {
    if params.modulus_bits != sk.modulus_bits() || !params.is_feasible() {
        return Err(Pkcs1Error::ModulusTooSmall);
    }
    let em = pss_encode(m, params, rng)?;
    let s = sk.private_op(&os2ip(&em)).map_err(|_| Pkcs1Error::EncodingError)?;
    Ok(i2osp(&s, params.k).expect("s < n"))
}

pub fn verify(m: &[u8], s: &[u8], pk: &RsaPublicKey, params: &PssParams) -> bool {
    if params.modulus_bits != pk.modulus_bits() || s.len() != params.k {
        return false;
    }
    let Ok(em_int) = pk.public_op(&os2ip(s)) else {
        return false;
    };
    match i2osp(&em_int, params.k) {
        Some(em) => pss_verify_encoding(m, &em, params),
        None => false,
    }
}
