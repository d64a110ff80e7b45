// SPDX-License-Identifier: Apache-2.0

//! Symmetric-equivalent strength of multiprime RSA moduli.

/// `(modulus bits, prime count, symmetric-equivalent bits)`. Treated as
/// opaque published data: there is no formula behind the lookup.
pub const STRENGTH_TABLE: [(u32, u32, u32); 18] = [
    (1024, 2, 80),
    (1024, 3, 73),
    (2335, 3, 112),
    (2335, 4, 100),
    (2335, 5, 88),
    (3072, 3, 128),
    (3072, 4, 117),
    (3072, 5, 103),
    (3072, 6, 93),
    (7680, 4, 192),
    (7680, 5, 175),
    (7680, 6, 158),
    (7680, 7, 144),
    (7680, 9, 125),
    (15360, 5, 256),
    (15360, 6, 235),
    (15360, 7, 215),
    (15360, 8, 199),
];

/// Exact table lookup; `None` for any pair not in the table.
pub fn strength_lookup(modulus_bits: u32, primes: u32) -> Option<u32> {
    STRENGTH_TABLE
        .iter()
        .find(|(bits, u, _)| *bits == modulus_bits && *u == primes)
        .map(|(_, _, s)| *s)
}

/// log2 of the heuristic Number Field Sieve cost
/// `L[1/3, (64/9)^(1/3)] = exp(c * (ln N)^(1/3) * (ln ln N)^(2/3))` at
/// `N = 2^modulus_bits`, with the o(1) term dropped.
///
/// Advisory only. It is not calibrated against [`STRENGTH_TABLE`] and
/// overshoots the 1024-bit row by roughly seven bits.
pub fn nfs_advisory_estimate(modulus_bits: u32) -> f64 {
    let ln_n = f64::from(modulus_bits) * std::f64::consts::LN_2;
    let c = (64.0f64 / 9.0).cbrt();
    let nats = c * ln_n.cbrt() * ln_n.ln().powf(2.0 / 3.0);
    nats / std::f64::consts::LN_2
}
