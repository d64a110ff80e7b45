// SPDX-License-Identifier: Apache-2.0

//! Multiprime RSA key material and the raw RSA operations.
//!
//! A private key for `n = r_1 * ... * r_u` keeps, besides `d`, the CRT
//! exponents `d_i` (with `e * d_i = 1 mod (r_i - 1)`) and the CRT
//! coefficients `t_i` for `i >= 2` (with `R_i * t_i = 1 mod r_i` where
//! `R_i = r_1 * ... * r_{i-1}`). The private operation exponentiates modulo
//! each prime and folds the residues together incrementally with the `t_i`.

mod prime;
mod strength;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use prime::{generate_prime, is_probable_prime, MILLER_RABIN_ROUNDS};
pub use strength::{nfs_advisory_estimate, strength_lookup, STRENGTH_TABLE};

use crate::crypto::{RandomSource, RngError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RsaError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
    #[error("public exponent is not invertible modulo every r_i - 1")]
    BadExponent,
    #[error("primes are not distinct")]
    DuplicatePrime,
    #[error("message representative out of range")]
    MessageRepresentativeOutOfRange,
    #[error("ciphertext representative out of range")]
    CiphertextRepresentativeOutOfRange,
    #[error("inconsistent key: {0}")]
    InvalidKey(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    n: BigUint,
    e: BigUint,
}

impl RsaPublicKey {
    pub fn new(n: BigUint, e: BigUint) -> Result<Self, RsaError> {
        if e < BigUint::from(3u32) || e.is_even() {
            return Err(RsaError::InvalidKey("public exponent must be odd and at least 3"));
        }
        if n <= e || n.is_even() {
            return Err(RsaError::InvalidKey("modulus must be odd and larger than the exponent"));
        }
        Ok(RsaPublicKey { n, e })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn e(&self) -> &BigUint {
        &self.e
    }

    /// |n| in bits.
    pub fn modulus_bits(&self) -> usize {
        self.n.bits() as usize
    }

    /// k: length of the modulus in octets.
    pub fn modulus_len(&self) -> usize {
        self.modulus_bits().div_ceil(8)
    }

    /// `m^e mod n` for `0 <= m < n`.
    pub fn public_op(&self, m: &BigUint) -> Result<BigUint, RsaError> {
        if m >= &self.n {
            return Err(RsaError::MessageRepresentativeOutOfRange);
        }
        Ok(m.modpow(&self.e, &self.n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPrivateKey {
    n: BigUint,
    e: BigUint,
    d: BigUint,
    primes: Vec<BigUint>,
    exponents: Vec<BigUint>,
    // t_2..t_u and R_2..R_u
    coefficients: Vec<BigUint>,
    prefix_products: Vec<BigUint>,
}

impl RsaPrivateKey {
    /// Derives the full multiprime key from its primes and `e`. The private
    /// exponent is taken modulo `lcm(r_1 - 1, ..., r_u - 1)`.
    pub fn from_primes(primes: &[BigUint], e: &BigUint) -> Result<Self, RsaError> {
        if primes.len() < 2 {
            return Err(RsaError::Precondition("at least two primes are required"));
        }
        if e < &BigUint::from(3u32) || e.is_even() {
            return Err(RsaError::Precondition("public exponent must be odd and at least 3"));
        }
        for (i, p) in primes.iter().enumerate() {
            if p < &BigUint::from(3u32) || p.is_even() {
                return Err(RsaError::Precondition("primes must be odd"));
            }
            if primes[..i].contains(p) {
                return Err(RsaError::DuplicatePrime);
            }
        }
        let minus_one: Vec<BigUint> = primes.iter().map(|p| p - 1u32).collect();
        if minus_one.iter().any(|m| !e.gcd(m).is_one()) {
            return Err(RsaError::BadExponent);
        }
        let lambda = prime::lcm_all(&minus_one);
        let d = e.modinv(&lambda).ok_or(RsaError::BadExponent)?;
        let exponents = minus_one.iter().map(|m| &d % m).collect();
        let mut coefficients = Vec::with_capacity(primes.len() - 1);
        let mut prefix_products = Vec::with_capacity(primes.len() - 1);
        let mut r = primes[0].clone();
        for p in &primes[1..] {
            let t = (&r % p).modinv(p).ok_or(RsaError::DuplicatePrime)?;
            coefficients.push(t);
            prefix_products.push(r.clone());
            r *= p;
        }
        Ok(RsaPrivateKey {
            n: r,
            e: e.clone(),
            d,
            primes: primes.to_vec(),
            exponents,
            coefficients,
            prefix_products,
        })
    }

    /// Rebuilds a key from stored components, checking every invariant.
    pub fn from_components(
        n: BigUint,
        e: BigUint,
        d: BigUint,
        primes: Vec<BigUint>,
        exponents: Vec<BigUint>,
        coefficients: Vec<BigUint>,
    ) -> Result<Self, RsaError> {
        let u = primes.len();
        if u < 2 || exponents.len() != u || coefficients.len() != u - 1 {
            return Err(RsaError::InvalidKey("component counts do not match"));
        }
        let derived = Self::from_primes(&primes, &e)?;
        if derived.n != n {
            return Err(RsaError::InvalidKey("modulus is not the product of the primes"));
        }
        let minus_one: Vec<BigUint> = primes.iter().map(|p| p - 1u32).collect();
        let lambda = prime::lcm_all(&minus_one);
        if d.is_zero() || !((&e * &d) % &lambda).is_one() {
            return Err(RsaError::InvalidKey("e * d is not 1 modulo lcm(r_i - 1)"));
        }
        for (di, m) in exponents.iter().zip(&minus_one) {
            if !((&e * di) % m).is_one() {
                return Err(RsaError::InvalidKey("CRT exponent mismatch"));
            }
        }
        for ((t, r), p) in coefficients.iter().zip(&derived.prefix_products).zip(&primes[1..]) {
            if t.is_zero() || t >= p || !((r * t) % p).is_one() {
                return Err(RsaError::InvalidKey("CRT coefficient mismatch"));
            }
        }
        Ok(RsaPrivateKey { d, exponents, coefficients, ..derived })
    }

    /// 0 for two-prime keys, 1 for multiprime keys.
    pub fn version(&self) -> u8 {
        if self.primes.len() == 2 {
            0
        } else {
            1
        }
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn e(&self) -> &BigUint {
        &self.e
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn primes(&self) -> &[BigUint] {
        &self.primes
    }

    /// d_1..d_u
    pub fn crt_exponents(&self) -> &[BigUint] {
        &self.exponents
    }

    /// t_2..t_u
    pub fn crt_coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    /// R_2..R_u
    pub fn prefix_products(&self) -> &[BigUint] {
        &self.prefix_products
    }

    pub fn modulus_bits(&self) -> usize {
        self.n.bits() as usize
    }

    pub fn modulus_len(&self) -> usize {
        self.modulus_bits().div_ceil(8)
    }

    pub fn public_key(&self) -> RsaPublicKey {
        RsaPublicKey { n: self.n.clone(), e: self.e.clone() }
    }

    /// `c^d mod n` through the per-prime residues.
    pub fn private_op(&self, c: &BigUint) -> Result<BigUint, RsaError> {
        if c >= &self.n {
            return Err(RsaError::CiphertextRepresentativeOutOfRange);
        }
        let mut m = c.modpow(&self.exponents[0], &self.primes[0]);
        for i in 1..self.primes.len() {
            let r_i = &self.primes[i];
            let m_i = c.modpow(&self.exponents[i], r_i);
            // h = (m_i - m) * t_i mod r_i, then m += R_i * h
            let m_mod = &m % r_i;
            let diff = if m_i >= m_mod { m_i - m_mod } else { r_i - (m_mod - m_i) };
            let h = (diff * &self.coefficients[i - 1]) % r_i;
            m += &self.prefix_products[i - 1] * h;
        }
        Ok(m)
    }

    /// `c^d mod n` by a single exponentiation; reference path for the CRT
    /// implementation.
    pub fn private_op_naive(&self, c: &BigUint) -> Result<BigUint, RsaError> {
        if c >= &self.n {
            return Err(RsaError::CiphertextRepresentativeOutOfRange);
        }
        Ok(c.modpow(&self.d, &self.n))
    }
}

pub fn rsa_public_op(m: &BigUint, pk: &RsaPublicKey) -> Result<BigUint, RsaError> {
    pk.public_op(m)
}

pub fn rsa_private_op(c: &BigUint, sk: &RsaPrivateKey) -> Result<BigUint, RsaError> {
    sk.private_op(c)
}

const KEYGEN_ATTEMPTS: usize = 1000;
const EXPONENT_RETRIES: usize = 100;

/// Generates a `u`-prime key whose modulus has exactly `modulus_bits` bits.
pub fn generate_key(
    modulus_bits: usize,
    u: usize,
    e: &BigUint,
    rng: &mut dyn RandomSource,
) -> Result<(RsaPublicKey, RsaPrivateKey), RsaError> {
    if u < 2 {
        return Err(RsaError::Precondition("at least two primes are required"));
    }
    if modulus_bits / u < 16 {
        return Err(RsaError::Precondition("each prime needs at least 16 bits"));
    }
    if e < &BigUint::from(3u32) || e.is_even() {
        return Err(RsaError::Precondition("public exponent must be odd and at least 3"));
    }
    let base = modulus_bits / u;
    let sizes: Vec<usize> = (0..u).map(|i| base + usize::from(i < modulus_bits % u)).collect();
    for _ in 0..KEYGEN_ATTEMPTS {
        let mut primes: Vec<BigUint> = Vec::with_capacity(u);
        for &bits in &sizes {
            let mut found = None;
            for _ in 0..EXPONENT_RETRIES {
                // two top bits keep the product close to the requested size
                let p = prime::random_prime(bits, 2, rng)?;
                if !e.gcd(&(&p - 1u32)).is_one() || primes.contains(&p) {
                    continue;
                }
                found = Some(p);
                break;
            }
            match found {
                Some(p) => primes.push(p),
                None if primes.is_empty() => return Err(RsaError::BadExponent),
                None => return Err(RsaError::DuplicatePrime),
            }
        }
        let n: BigUint = primes.iter().product();
        if n.bits() as usize != modulus_bits {
            continue;
        }
        let sk = RsaPrivateKey::from_primes(&primes, e)?;
        return Ok((sk.public_key(), sk));
    }
    Err(RsaError::Precondition("could not reach the requested modulus size"))
}
