// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::RsaError;
use crate::crypto::RandomSource;

pub const MILLER_RABIN_ROUNDS: usize = 40;

pub(crate) const SMALL_PRIMES: [u16; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Uniform-ish integer of exactly `bits` bits drawn from `rng`, with the top
/// `top_bits` bits and the low bit forced to one.
fn random_odd(bits: usize, top_bits: usize, rng: &mut dyn RandomSource) -> Result<BigUint, RsaError> {
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    rng.fill(&mut bytes)?;
    let excess = bytes.len() * 8 - bits;
    bytes[0] &= 0xFF >> excess;
    let mut n = BigUint::from_bytes_be(&bytes);
    for i in 0..top_bits {
        n.set_bit((bits - 1 - i) as u64, true);
    }
    n.set_bit(0, true);
    Ok(n)
}

/// Uniform-ish value in `[low, high]` by reduction of a wide random draw.
fn random_in_range(low: &BigUint, high: &BigUint, rng: &mut dyn RandomSource) -> Result<BigUint, RsaError> {
    let span = high - low + 1u32;
    let mut bytes = vec![0u8; (span.bits() as usize).div_ceil(8) + 8];
    rng.fill(&mut bytes)?;
    Ok(low + BigUint::from_bytes_be(&bytes) % span)
}

/// Trial division by the small primes below 256 followed by `rounds`
/// Miller-Rabin rounds with random bases.
pub fn is_probable_prime(n: &BigUint, rounds: usize, rng: &mut dyn RandomSource) -> Result<bool, RsaError> {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return Ok(false);
        }
        if small < 256 {
            return Ok(SMALL_PRIMES.contains(&(small as u16)));
        }
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return Ok(false);
        }
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let high = n - &two;
    'witness: for _ in 0..rounds {
        let a = random_in_range(&two, &high, rng)?;
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
            if x == one {
                return Ok(false);
            }
        }
        return Ok(false);
    }
    Ok(true)
}

pub(crate) fn random_prime(bits: usize, top_bits: usize, rng: &mut dyn RandomSource) -> Result<BigUint, RsaError> {
    if bits < 8 {
        return Err(RsaError::Precondition("prime size must be at least 8 bits"));
    }
    loop {
        let candidate = random_odd(bits, top_bits, rng)?;
        if is_probable_prime(&candidate, MILLER_RABIN_ROUNDS, rng)? {
            return Ok(candidate);
        }
    }
}

/// Probable prime of exactly `bits` bits (top bit set), confirmed by 40
/// Miller-Rabin rounds.
pub fn generate_prime(bits: usize, rng: &mut dyn RandomSource) -> Result<BigUint, RsaError> {
    random_prime(bits, 1, rng)
}

pub(crate) fn lcm_all(values: &[BigUint]) -> BigUint {
    values.iter().fold(BigUint::one(), |acc, v| acc.lcm(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{FixedSource, RngError, SeededStream};

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn eight_bit_primes_pass_trial_division() {
        let mut rng = SeededStream::new(b"eight");
        for _ in 0..50 {
            let p = generate_prime(8, &mut rng).unwrap().to_u64().unwrap();
            assert!((128..256).contains(&p));
            assert!(SMALL_PRIMES.iter().all(|&s| p == u64::from(s) || !p.is_multiple_of(u64::from(s))));
            assert!(trial_division_is_prime(p));
        }
    }

    #[test]
    fn small_sizes_are_prime() {
        let mut rng = SeededStream::new(b"small");
        for bits in 8..=20 {
            for _ in 0..10 {
                let p = generate_prime(bits, &mut rng).unwrap();
                assert_eq!(p.bits() as usize, bits);
                assert!(trial_division_is_prime(p.to_u64().unwrap()), "{p}");
            }
        }
    }

    #[test]
    fn top_bit_set() {
        let mut rng = SeededStream::new(b"top");
        for bits in [8usize, 33, 64, 127, 256] {
            let p = generate_prime(bits, &mut rng).unwrap();
            assert!(p >= BigUint::one() << (bits - 1));
        }
    }

    #[test]
    fn deterministic_for_identical_seed() {
        let a = generate_prime(128, &mut SeededStream::new(b"same")).unwrap();
        let b = generate_prime(128, &mut SeededStream::new(b"same")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_source() {
        let mut rng = FixedSource::new(vec![0u8; 3]);
        assert_eq!(generate_prime(64, &mut rng), Err(RsaError::Rng(RngError::Exhausted)));
    }

    #[test]
    fn classifies_small_numbers() {
        let mut rng = SeededStream::new(b"cls");
        for n in 0u64..2000 {
            let got = is_probable_prime(&BigUint::from(n), 10, &mut rng).unwrap();
            assert_eq!(got, trial_division_is_prime(n), "{n}");
        }
        // Carmichael numbers
        for n in [561u64, 41041, 825265, 321197185] {
            assert!(!is_probable_prime(&BigUint::from(n), 40, &mut rng).unwrap());
        }
    }
}
